"""
command line: python -m arffbias {spectral-bias,attack,train,evaluate} [--config PATH] ...
"""
import sys
import argparse

from .experiments import (load_config, run_spectral_bias_experiment, run_attack_experiment,
                          train_models, evaluate_models, settings_info, ConfigError)
from .data import IdxFormatError
from .io import SnapshotError
from .sgd import DivergenceError
from .solver import SingularSystemError
from .spectral import UndefinedCutoffError


def _seed(value):
    seed = int(value)
    if not 0 <= seed < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {value}")
    return seed


def _sigma_list(value):
    try:
        return [float(v) for v in value.split(",") if v.strip()]
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"--sigma takes a comma list of floats: {err}")


def get_parser():
    parser = argparse.ArgumentParser(prog="arffbias",
                                     description="ARFF vs SGD: spectral bias and noise attacks")
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "spectral-bias": "spectral bias per epoch on the Si target",
        "attack": "MNIST noise-attack experiment (variant 1, 2 or 3)",
        "train": "train and save models without evaluating",
        "evaluate": "accuracy of saved ensembles on attacked test images",
        "info": "list the configuration keys",
    }
    for name, helptext in commands.items():
        p = sub.add_parser(name, help=helptext)
        if name == "info":
            continue
        p.add_argument("--config", default=None, type=str, help="INI configuration file")
        p.add_argument("--seed", default=None, type=_seed, help="master seed (overrides config)")
        p.add_argument("--out", default=None, type=str, help="output directory")
        p.add_argument("--sigma", default=None, type=_sigma_list,
                       help="comma list of noise levels, e.g. 0,1,2,4")
        p.add_argument("--variant", default=None, type=int, choices=(1, 2, 3),
                       help="attack variant")
        p.add_argument("--quiet", action="store_true", help="no progress output")
        if name == "evaluate":
            p.add_argument("--models", default=None, type=str,
                           help="directory of saved ensembles (default <out>/models)")
    return parser


def _overrides(args):
    overrides = {}
    if args.seed is not None:
        overrides[("experiment", "seed")] = args.seed
    if args.out is not None:
        overrides[("output", "out")] = args.out
    if args.sigma is not None:
        overrides[("attack", "sigma")] = args.sigma
    if args.variant is not None:
        overrides[("experiment", "id")] = f"attack-{args.variant}"
        overrides[("attack", "variant")] = args.variant
    if args.quiet:
        overrides[("output", "verbose")] = False
    return overrides


def main(argv=None):
    args = get_parser().parse_args(argv)
    if args.command == "info":
        for key, text in settings_info().items():
            print(f"{key:32s}{text}")
        return 0
    experiment = "spectral-bias" if args.command == "spectral-bias" else None
    if args.command == "attack" and args.variant is None and args.config is None:
        print("ERROR: attack needs --variant or a --config naming one", file=sys.stderr)
        return 2
    try:
        cfg = load_config(args.config, experiment=experiment, overrides=_overrides(args))
        exp_id = cfg["experiment"]["id"]
        if args.command == "spectral-bias":
            if exp_id != "spectral-bias":
                raise ConfigError(f"experiment.id: spectral-bias command got {exp_id}")
            run_spectral_bias_experiment(cfg)
        elif args.command == "attack":
            if exp_id == "spectral-bias":
                raise ConfigError("experiment.id: attack command needs an attack configuration")
            run_attack_experiment(cfg)
        elif args.command == "train":
            for path in train_models(cfg):
                print(path)
        else:
            evaluate_models(cfg, args.models)
    except ConfigError as err:
        print(f"ERROR: {err}", file=sys.stderr)
        return 2
    except (OSError, IdxFormatError, SnapshotError, DivergenceError,
            SingularSystemError, UndefinedCutoffError) as err:
        print(f"ERROR: {err}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
