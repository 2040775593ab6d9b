"""
batch experiments: spectral bias of ARFF vs SGD on the Si target, and the
MNIST noise-attack experiments (sparse attack, full attack, full attack with
noisy-validation early stopping)
"""
import os
import time
import configparser
import numpy as np

from .arff import arff_settings, validate_arff_settings
from .sgd import sgd_settings, validate_sgd_settings
from .classify import EnsembleTrainer, OneVsRestEnsemble, accuracy, TRAINERS
from .data import (generate_synthetic, load_mnist, split, normalize, noise_attack,
                   AttackSpec)
from .io import (write_csv, write_trace_csv, write_predictions_csv, emit_plot_data, save_network,
                 save_ensemble, load_ensemble, SNAPSHOT_EXT)
from .network import mse
from .spectral import (GaussianDensity, KernelDensityModel, frequency_grid,
                       weighted_spectrum, cutoff_frequency, spectral_bias)
from .utils import derive_seed, split_sizes

EXPERIMENTS = ("spectral-bias", "attack-1", "attack-2", "attack-3")

SPECTRAL_HEADER = ["epoch", "trainer", "n_nodes", "seed", "sb", "cutoff", "e_low", "e_high",
                   "variance", "train_mse", "val_mse"]
FINAL_HEADER = ["trainer", "n_nodes", "seed", "train_mse", "val_mse", "test_mse"]
ATTACK_HEADER = ["variant", "trainer", "seed", "sigma", "n_pixel", "epoch", "accuracy"]
EVALUATE_HEADER = ["trainer", "sigma", "n_pixel", "accuracy"]


class ConfigError(ValueError):
    """ invalid experiment configuration, message lists every bad field """


def experiment_settings(experiment="spectral-bias"):
    """ default (full-scale) configuration of an experiment, as nested dicts """
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"experiment.id: unknown experiment {experiment!r}, "
                          f"use one of {', '.join(EXPERIMENTS)}")
    arff = arff_settings()
    sgd = sgd_settings()
    for s in (arff, sgd):
        del s["epochs"], s["seed"]
    cfg = {
        "experiment": {"id": experiment, "trainer": "both", "n_nodes": [1024],
                       "epochs": 10000, "seed": 0, "repeats": 1},
        "data": {"n_samples": 5000, "a": 1e-2, "mnist_dir": "", "subset": 0,
                 "standardize": False, "split": [7, 2, 1]},
        "arff": arff,
        "sgd": sgd,
        "spectral": {"stride": 10, "n_grid": 2048, "density": "gaussian"},
        "attack": {"variant": 1, "sigma": [0.0, 0.5, 1.0, 2.0, 4.0], "n_pixel": None},
        "output": {"out": "results", "keep_all_checkpoints": False, "plot_data": True,
                   "verbose": True},
    }
    if experiment == "spectral-bias":
        cfg["arff"]["exponent"] = 1.0
    else:
        cfg["experiment"]["epochs"] = 100
        cfg["arff"]["proposal_width"] = 0.02
        cfg["sgd"]["learning_rate"] = 2e-3
        cfg["attack"]["variant"] = int(experiment[-1])
    return cfg


def settings_info():
    info = {}
    info["experiment.id"] = "one of " + ", ".join(EXPERIMENTS)
    info["experiment.trainer"] = "arff, sgd or both"
    info["experiment.n_nodes"] = (
        """node count K; a comma list runs every width (spectral-bias only)""")
    info["experiment.epochs"] = "epochs M of both trainers"
    info["experiment.seed"] = "master seed, every random stream is derived from it"
    info["experiment.repeats"] = "independent repetitions with master seeds seed, seed+1, ..."
    info["data.n_samples"] = "synthetic samples before the 7:2:1 split"
    info["data.a"] = "scale a of the target exp(-x^2/2) Si(x/a)"
    info["data.mnist_dir"] = "directory with the four standard MNIST IDX files"
    info["data.subset"] = "random MNIST subsample size, 0 keeps all 70,000 images"
    info["data.standardize"] = "standardize MNIST pixels with training mean/std"
    info["data.split"] = "train:validation:test ratios"
    info["spectral.stride"] = "compute the spectral bias every stride epochs"
    info["spectral.n_grid"] = "points of the frequency grid"
    info["spectral.density"] = "input density model: gaussian (analytic) or kde"
    info["attack.variant"] = "1: sparse attack, 2: full attack, 3: full attack + noisy early stopping"
    info["attack.sigma"] = "comma list of noise levels"
    info["attack.n_pixel"] = "attacked pixels per image, default 50 (variant 1) or d"
    info["output.out"] = "output directory"
    info["output.keep_all_checkpoints"] = "save every epoch's ensemble, not only the best"
    info["output.plot_data"] = "write whitespace-delimited plot data and manifests"
    info["output.verbose"] = "print progress"
    return info


def _parse_list(value, cast):
    return [cast(v) for v in value.replace(";", ",").split(",") if v.strip()]


def _parse_optional(cast):
    def parse(value):
        return None if value.strip().lower() in ("", "none") else cast(value)
    return parse


def _parse_bool(value):
    v = value.strip().lower()
    if v in ("1", "yes", "true", "on"):
        return True
    if v in ("0", "no", "false", "off"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


_PARSERS = {
    ("experiment", "n_nodes"): lambda v: _parse_list(v, int),
    ("data", "split"): lambda v: _parse_list(v, int),
    ("attack", "sigma"): lambda v: _parse_list(v, float),
    ("attack", "n_pixel"): _parse_optional(int),
    ("arff", "exponent"): _parse_optional(float),
}


def _parser(section, key, default):
    if (section, key) in _PARSERS:
        return _PARSERS[(section, key)]
    if isinstance(default, bool):
        return _parse_bool
    if isinstance(default, int):
        return int
    if isinstance(default, float):
        return float
    return str


def load_config(path=None, experiment=None, overrides=None):
    """ defaults of the experiment, overlaid with an INI file and then overrides

    Parameters
    ----------
    path : str (optional)
        INI file with sections experiment, data, arff, sgd, spectral, attack, output
    experiment : str (optional)
        experiment id used when the file does not name one
    overrides : dict (optional)
        {(section, key): value} applied last (already typed)

    Returns
    -------
    cfg : dict of dicts, validated
    """
    raw = configparser.ConfigParser(interpolation=None)
    if path is not None:
        try:
            with open(path, encoding="utf-8") as f:
                raw.read_file(f)
        except OSError as err:
            raise OSError(f"could not read config {path}: {err}") from err
        except configparser.Error as err:
            raise ConfigError(f"{path}: {err}") from err
    overrides = dict(overrides or {})
    experiment = overrides.get(("experiment", "id"),
                               raw.get("experiment", "id", fallback=experiment or "spectral-bias"))
    cfg = experiment_settings(experiment)
    errors = []
    for section in raw.sections():
        if section not in cfg:
            errors.append(f"[{section}]: unknown section")
            continue
        for key, value in raw.items(section):
            if key not in cfg[section]:
                errors.append(f"{section}.{key}: unknown setting")
                continue
            try:
                cfg[section][key] = _parser(section, key, cfg[section][key])(value)
            except ValueError as err:
                errors.append(f"{section}.{key}: cannot parse {value!r} ({err})")
    for (section, key), value in overrides.items():
        if section not in cfg or key not in cfg[section]:
            errors.append(f"{section}.{key}: unknown setting")
        else:
            cfg[section][key] = value
    if errors:
        raise ConfigError("invalid configuration:\n  " + "\n  ".join(errors))
    return validate_config(cfg)


def validate_config(cfg):
    """ check every field before any compute, raise ConfigError listing all problems """
    errors = []
    exp = cfg["experiment"]
    if exp["id"] not in EXPERIMENTS:
        errors.append(f"experiment.id: unknown experiment {exp['id']!r}")
    if exp["trainer"] not in ("arff", "sgd", "both"):
        errors.append(f"experiment.trainer: must be arff, sgd or both, got {exp['trainer']!r}")
    if not exp["n_nodes"] or any(k < 1 for k in exp["n_nodes"]):
        errors.append(f"experiment.n_nodes: need node counts >= 1, got {exp['n_nodes']}")
    elif exp["id"] != "spectral-bias" and len(exp["n_nodes"]) != 1:
        errors.append("experiment.n_nodes: attack experiments take a single node count")
    if exp["epochs"] < 1:
        errors.append(f"experiment.epochs: must be >= 1, got {exp['epochs']}")
    if exp["repeats"] < 1:
        errors.append(f"experiment.repeats: must be >= 1, got {exp['repeats']}")

    data = cfg["data"]
    if len(data["split"]) != 3 or min(data["split"], default=-1) < 0 or sum(data["split"]) == 0:
        errors.append(f"data.split: need three ratios >= 0, got {data['split']}")
    n_total = None
    if exp["id"] == "spectral-bias":
        if data["n_samples"] < 10:
            errors.append(f"data.n_samples: need >= 10 samples, got {data['n_samples']}")
        else:
            n_total = data["n_samples"]
        if not data["a"] > 0:
            errors.append(f"data.a: must be > 0, got {data['a']}")
    else:
        if not data["mnist_dir"]:
            errors.append("data.mnist_dir: required for attack experiments")
        elif not os.path.isdir(data["mnist_dir"]):
            errors.append(f"data.mnist_dir: {data['mnist_dir']!r} is not a directory")
        if data["subset"] < 0:
            errors.append(f"data.subset: must be >= 0, got {data['subset']}")
        n_total = data["subset"] if data["subset"] >= 10 else None
    n_train = None
    if n_total is not None and len(data["split"]) == 3 and sum(data["split"]) > 0:
        n_train = split_sizes(n_total, data["split"])[0]

    try:
        validate_arff_settings({**cfg["arff"], "epochs": exp["epochs"]})
    except ValueError as err:
        errors.append(f"arff: {err}")
    try:
        validate_sgd_settings({**cfg["sgd"], "epochs": exp["epochs"]}, n_samples=n_train)
    except ValueError as err:
        errors.append(f"sgd: {err}")

    spectral = cfg["spectral"]
    if spectral["stride"] < 1:
        errors.append(f"spectral.stride: must be >= 1, got {spectral['stride']}")
    if spectral["n_grid"] < 2:
        errors.append(f"spectral.n_grid: must be >= 2, got {spectral['n_grid']}")
    if spectral["density"] not in ("gaussian", "kde"):
        errors.append(f"spectral.density: must be gaussian or kde, got {spectral['density']!r}")

    attack = cfg["attack"]
    if attack["variant"] not in (1, 2, 3):
        errors.append(f"attack.variant: must be 1, 2 or 3, got {attack['variant']}")
    elif exp["id"].startswith("attack-") and int(exp["id"][-1]) != attack["variant"]:
        errors.append(f"attack.variant: {attack['variant']} contradicts experiment.id {exp['id']}")
    if not attack["sigma"] or any(not (s >= 0 and np.isfinite(s)) for s in attack["sigma"]):
        errors.append(f"attack.sigma: need noise levels >= 0, got {attack['sigma']}")
    if attack["n_pixel"] is not None and attack["n_pixel"] < 0:
        errors.append(f"attack.n_pixel: must be >= 0, got {attack['n_pixel']}")

    if not cfg["output"]["out"]:
        errors.append("output.out: output directory is empty")
    if errors:
        raise ConfigError("invalid configuration:\n  " + "\n  ".join(errors))
    return cfg


def _trainers(cfg):
    trainer = cfg["experiment"]["trainer"]
    return ["arff", "sgd"] if trainer == "both" else [trainer]


def _trainer_settings(cfg, trainer, seed):
    return {**cfg[trainer], "epochs": cfg["experiment"]["epochs"], "seed": seed}


def _seeds(cfg):
    seed = cfg["experiment"]["seed"]
    return [seed + r for r in range(cfg["experiment"]["repeats"])]


### ---------------- spectral bias ---------------------------------------------- ###

def synthetic_splits(cfg, seed):
    """ normalized (train, validation, test) of the Si-target data and the input density """
    data = cfg["data"]
    dataset = generate_synthetic(data["n_samples"], data["a"], seed=derive_seed(seed, "data"))
    train, validation, test = split(dataset, data["split"], seed=derive_seed(seed, "split"))
    (train, validation, test), stats = normalize(train, validation, test)
    if cfg["spectral"]["density"] == "gaussian":
        # x ~ N(0, 1) before normalization
        density = GaussianDensity(mean=-stats.mean / stats.std, std=1.0 / stats.std)
    else:
        density = KernelDensityModel().fit(train.inputs)
    return (train, validation, test), density


def run_spectral_bias_experiment(cfg, verbose=None):
    """ train each trainer on the Si target and track its spectral bias per epoch

    writes <out>/spectral_bias.csv, spectral_bias_final.csv, spectral_bias_grid.txt,
    one trace_<trainer>_K<k>_seed<s>.csv per run and (optionally) plot data

    Returns
    -------
    header, rows : the spectral_bias.csv table
    """
    cfg = validate_config(cfg)
    verbose = cfg["output"]["verbose"] if verbose is None else verbose
    out = cfg["output"]["out"]
    stride = cfg["spectral"]["stride"]
    epochs = cfg["experiment"]["epochs"]
    rows, final_rows, grid_lines, curves = [], [], [], {}
    t0 = time.time()
    path = os.path.join(out, "spectral_bias.csv")
    try:
        for seed in _seeds(cfg):
            (train, validation, test), density = synthetic_splits(cfg, seed)
            y = train.target(0)
            grid, meta = frequency_grid(y, train.inputs, density, cfg["spectral"]["n_grid"])
            cutoff = cutoff_frequency(weighted_spectrum(y, train.inputs, density, grid))
            grid_lines.append(f"seed {seed} cutoff {cutoff!r} " +
                              " ".join(f"{k} {v!r}" for k, v in meta.items()))
            if verbose:
                print(f"seed {seed}: frequency grid up to {meta['omega_max']:0.2f}, "
                      f"cutoff {cutoff:0.3f}, time {time.time()-t0:0.2f}sec")
            for n_nodes in cfg["experiment"]["n_nodes"]:
                for name in _trainers(cfg):
                    settings = _trainer_settings(cfg, name, derive_seed(seed, name, n_nodes))
                    trainer = TRAINERS[name](train, validation, n_nodes, settings,
                                             verbose=verbose)
                    sb_epochs, sb_values = [], []

                    def callback(epoch, net, trace):
                        if epoch % stride and epoch != epochs:
                            return
                        report = spectral_bias(net, train, density, grid, cutoff=cutoff)
                        rows.append([epoch, name, n_nodes, seed] + report.row() +
                                    [mse(net, train.inputs, y), trace.val_loss[-1]])
                        sb_epochs.append(epoch)
                        sb_values.append(report.sb)

                    net, trace = trainer.run(callback=callback)
                    final_rows.append([name, n_nodes, seed, mse(net, train.inputs, y),
                                       trace.val_loss[-1], mse(net, test.inputs, test.target(0))])
                    write_trace_csv(os.path.join(out, f"trace_{name}_K{n_nodes}_seed{seed}.csv"),
                                    trace)
                    save_network(net, os.path.join(out, "models",
                                                   f"{name}_K{n_nodes}_seed{seed}{SNAPSHOT_EXT}"))
                    curves[f"{name}_K{n_nodes}_seed{seed}"] = (sb_epochs, sb_values)
    except Exception:
        write_csv(path, SPECTRAL_HEADER, rows, incomplete=True)
        raise
    write_csv(path, SPECTRAL_HEADER, rows)
    write_csv(os.path.join(out, "spectral_bias_final.csv"), FINAL_HEADER, final_rows)
    with open(os.path.join(out, "spectral_bias_grid.txt"), "w", encoding="utf-8") as f:
        f.write("\n".join(grid_lines) + "\n")
    if cfg["output"]["plot_data"]:
        emit_plot_data({"name": "spectral_bias", "xlabel": "epoch", "ylabel": "SB",
                        "curves": curves}, os.path.join(out, "plot_data"))
    if verbose:
        print(f"spectral bias experiment complete, time {time.time()-t0:0.2f}sec")
    return SPECTRAL_HEADER, rows


### ---------------- noise attacks ---------------------------------------------- ###

class Checkpoint:
    def __init__(self, epoch, accuracy, ensemble):
        self.epoch = epoch
        self.accuracy = accuracy
        self.ensemble = ensemble


class CheckpointStore:
    """best-so-far ensembles of one trainer, by noisy-validation accuracy

    one best checkpoint per key (the index of a noise level); ties keep the
    earlier epoch, so the best accuracy never decreases over epochs. With
    keep_all, every epoch's ensemble is also written to
    <directory>/<trainer>/epoch<e>/digit<i>.arffnet
    """

    def __init__(self, trainer, directory=None, keep_all=False):
        if keep_all and directory is None:
            raise ValueError("keep_all needs a directory")
        self.trainer = trainer
        self.directory = directory
        self.keep_all = keep_all
        self.best = {}
        self.history = {}

    def update(self, key, epoch, ensemble, val_accuracy):
        """ record epoch's accuracy for key, keep a copy if it beats the best; returns True then """
        best = self.best.get(key)
        improved = best is None or val_accuracy > best.accuracy
        if improved:
            self.best[key] = Checkpoint(epoch, val_accuracy, ensemble.copy())
        self.history.setdefault(key, []).append(
            (epoch, val_accuracy, self.best[key].accuracy))
        return improved

    def save_epoch(self, epoch, ensemble):
        if self.keep_all:
            save_ensemble(ensemble.networks, self.epoch_dir(epoch))

    def epoch_dir(self, epoch):
        return os.path.join(self.directory, self.trainer, f"epoch{epoch}")

    def load_epoch(self, epoch):
        return OneVsRestEnsemble(load_ensemble(self.epoch_dir(epoch)))

    def __getitem__(self, key):
        return self.best[key]


def mnist_splits(cfg, seed):
    data = cfg["data"]
    dataset = load_mnist(data["mnist_dir"], subset=data["subset"] or None,
                         seed=derive_seed(seed, "data"))
    train, validation, test = split(dataset, data["split"], seed=derive_seed(seed, "split"))
    if data["standardize"]:
        (train, validation, test), _ = normalize(train, validation, test,
                                                 standardize_targets=False)
    return train, validation, test


def attacked_copies(dataset, sigmas, n_pixel, seed, stream="attack"):
    """ one noisy copy per noise level, seeds shared by every trainer """
    return [noise_attack(dataset, AttackSpec(n_pixel, sigma, derive_seed(seed, stream, j)))
            for j, sigma in enumerate(sigmas)]


def _n_pixel(cfg, variant, n_dims):
    n_pixel = cfg["attack"]["n_pixel"]
    if n_pixel is None:
        n_pixel = 50 if variant == 1 else n_dims
    if n_pixel > n_dims:
        raise ConfigError(f"attack.n_pixel: {n_pixel} exceeds input dimension {n_dims}")
    return n_pixel


def run_attack_experiment(cfg, variant=None, verbose=None):
    """ accuracy of the ARFF and SGD ensembles on noise-attacked MNIST test images

    variant 1 attacks 50 pixels, variants 2 and 3 every pixel; variant 3 also
    attacks the validation set with the same sigma and reports, per sigma, the
    test accuracy of the epoch with the best noisy-validation accuracy

    writes <out>/attack_<variant>.csv, the final ensembles under <out>/models and
    (optionally) plot data

    Returns
    -------
    header, rows : the attack_<variant>.csv table
    """
    if variant is not None:
        cfg = {section: dict(values) for section, values in cfg.items()}
        cfg["attack"]["variant"] = variant
        cfg["experiment"]["id"] = f"attack-{variant}"
    cfg = validate_config(cfg)
    variant = cfg["attack"]["variant"]
    verbose = cfg["output"]["verbose"] if verbose is None else verbose
    out = cfg["output"]["out"]
    sigmas = cfg["attack"]["sigma"]
    n_nodes = cfg["experiment"]["n_nodes"][0]
    epochs = cfg["experiment"]["epochs"]
    rows, curves = [], {}
    path = os.path.join(out, f"attack_{variant}.csv")
    t0 = time.time()
    try:
        for seed in _seeds(cfg):
            train, validation, test = mnist_splits(cfg, seed)
            n_pixel = _n_pixel(cfg, variant, train.n_dims)
            noisy_test = attacked_copies(test, sigmas, n_pixel, seed)
            noisy_val = (attacked_copies(validation, sigmas, n_pixel, seed, "attack_validation")
                         if variant == 3 else [])
            if verbose:
                print(f"seed {seed}: {len(train)} train / {len(validation)} validation / "
                      f"{len(test)} test images, n_pixel={n_pixel}, time {time.time()-t0:0.2f}sec")
            for name in _trainers(cfg):
                store = CheckpointStore(name, os.path.join(out, "checkpoints", f"seed{seed}"),
                                        keep_all=cfg["output"]["keep_all_checkpoints"])

                def callback(epoch, ensemble):
                    store.save_epoch(epoch, ensemble)
                    for j, noisy in enumerate(noisy_val):
                        store.update(j, epoch, ensemble, accuracy(ensemble, noisy))

                trainer = EnsembleTrainer(name, train, validation, n_nodes,
                                          _trainer_settings(cfg, name, seed), master_seed=seed,
                                          verbose=verbose)
                ensemble = trainer.run(callback)
                save_ensemble(ensemble.networks, os.path.join(out, "models",
                                                              f"{name}_seed{seed}"))
                accs = []
                for j, sigma in enumerate(sigmas):
                    if variant == 3:
                        best = store[j]
                        epoch, acc = best.epoch, accuracy(best.ensemble, noisy_test[j])
                    else:
                        epoch, acc = epochs, accuracy(ensemble, noisy_test[j])
                    rows.append([variant, name, seed, sigma, n_pixel, epoch, acc])
                    accs.append(acc)
                curves[f"{name}_seed{seed}"] = (sigmas, accs)
                if verbose:
                    print(f"{name}: accuracy " +
                          ", ".join(f"sigma={s:g}: {a:0.4f}" for s, a in zip(sigmas, accs)))
    except Exception:
        write_csv(path, ATTACK_HEADER, rows, incomplete=True)
        raise
    write_csv(path, ATTACK_HEADER, rows)
    if cfg["output"]["plot_data"]:
        emit_plot_data({"name": f"attack_{variant}", "xlabel": "sigma", "ylabel": "accuracy",
                        "curves": curves}, os.path.join(out, "plot_data"))
    if verbose:
        print(f"attack experiment {variant} complete, time {time.time()-t0:0.2f}sec")
    return ATTACK_HEADER, rows


### ---------------- train / evaluate ------------------------------------------- ###

def train_models(cfg, verbose=None):
    """ train and save models without evaluation

    spectral-bias configs save one network per trainer and width to
    <out>/models/<trainer>_K<k>.arffnet; attack configs save one ensemble per
    trainer to <out>/models/<trainer>/digit<i>.arffnet

    Returns
    -------
    paths : list of str
    """
    cfg = validate_config(cfg)
    verbose = cfg["output"]["verbose"] if verbose is None else verbose
    out = cfg["output"]["out"]
    seed = cfg["experiment"]["seed"]
    paths = []
    if cfg["experiment"]["id"] == "spectral-bias":
        (train, validation, _), _ = synthetic_splits(cfg, seed)
        for n_nodes in cfg["experiment"]["n_nodes"]:
            for name in _trainers(cfg):
                settings = _trainer_settings(cfg, name, derive_seed(seed, name, n_nodes))
                net, trace = TRAINERS[name](train, validation, n_nodes, settings,
                                            verbose=verbose).run()
                path = os.path.join(out, "models", f"{name}_K{n_nodes}{SNAPSHOT_EXT}")
                save_network(net, path)
                write_trace_csv(os.path.join(out, f"trace_{name}_K{n_nodes}.csv"), trace)
                paths.append(path)
    else:
        train, validation, _ = mnist_splits(cfg, seed)
        for name in _trainers(cfg):
            ensemble = EnsembleTrainer(name, train, validation, cfg["experiment"]["n_nodes"][0],
                                       _trainer_settings(cfg, name, seed), master_seed=seed,
                                       verbose=verbose).run()
            paths.extend(save_ensemble(ensemble.networks, os.path.join(out, "models", name)))
    return paths


def evaluate_models(cfg, models_dir=None, verbose=None):
    """ accuracy of saved ensembles on the attacked test split of an attack config

    models_dir holds one subdirectory per trainer (as written by train_models);
    writes <out>/evaluate.csv
    """
    cfg = validate_config(cfg)
    if cfg["experiment"]["id"] == "spectral-bias":
        raise ConfigError("experiment.id: evaluate needs an attack configuration")
    verbose = cfg["output"]["verbose"] if verbose is None else verbose
    out = cfg["output"]["out"]
    models_dir = models_dir or os.path.join(out, "models")
    seed = cfg["experiment"]["seed"]
    _, _, test = mnist_splits(cfg, seed)
    n_pixel = _n_pixel(cfg, cfg["attack"]["variant"], test.n_dims)
    noisy_test = attacked_copies(test, cfg["attack"]["sigma"], n_pixel, seed)
    rows = []
    for name in _trainers(cfg):
        ensemble = OneVsRestEnsemble(load_ensemble(os.path.join(models_dir, name)))
        for sigma, noisy in zip(cfg["attack"]["sigma"], noisy_test):
            write_predictions_csv(os.path.join(out, f"predictions_{name}_sigma{sigma:g}.csv"),
                                  noisy.labels, ensemble.scores(noisy.inputs))
            rows.append([name, sigma, n_pixel, accuracy(ensemble, noisy)])
            if verbose:
                print(f"{name}: sigma={sigma:g} accuracy {rows[-1][-1]:0.4f}")
    write_csv(os.path.join(out, "evaluate.csv"), EVALUATE_HEADER, rows)
    return EVALUATE_HEADER, rows
