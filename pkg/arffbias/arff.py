"""
adaptive random Fourier features (ARFF): Metropolis random-walk sampling of the
frequencies with a least-squares amplitude solve every epoch
"""
import time
import numpy as np
from tqdm import trange

from .network import init_network, design_matrix, mse, FourierFeatureNetwork
from .solver import LsProblem, solve_amplitudes, training_loss
from .trace import Trace
from .utils import default_rng


def arff_settings():
    """ default settings for the ARFF trainer """
    settings = {}
    settings["epochs"] = 100
    settings["proposal_width"] = 2.0
    settings["exponent"] = None
    settings["lam"] = 0.05
    settings["seed"] = 0
    settings["frequency_init_scale"] = 1.0
    return settings


def arff_settings_info():
    info = {}
    info["epochs"] = "number of epochs M, one Metropolis sweep + amplitude solve each"
    info["proposal_width"] = "proposal width delta of the Gaussian random walk on frequencies"
    info["exponent"] = (
        """exponent gamma of the amplitude ratio in the acceptance probability,
            None uses 3d - 2""")
    info["lam"] = "Tikhonov regularization of the amplitude solve"
    info["seed"] = "seed of the random number generator"
    info["frequency_init_scale"] = "standard deviation of the initial frequencies"
    return info


def validate_arff_settings(settings):
    """ check every field, raise ValueError listing all offending ones """
    errors = []
    unknown = set(settings) - set(arff_settings())
    if unknown:
        errors.append(f"unknown settings {sorted(unknown)}")
    s = {**arff_settings(), **settings}
    if int(s["epochs"]) != s["epochs"] or s["epochs"] < 1:
        errors.append(f"epochs must be an integer >= 1, got {s['epochs']}")
    if not np.isfinite(s["proposal_width"]) or s["proposal_width"] <= 0:
        errors.append(f"proposal_width must be > 0, got {s['proposal_width']}")
    if s["exponent"] is not None and not np.isfinite(s["exponent"]):
        errors.append(f"exponent must be finite or None, got {s['exponent']}")
    if not np.isfinite(s["lam"]) or s["lam"] < 0:
        errors.append(f"lam must be >= 0, got {s['lam']}")
    if not np.isfinite(s["frequency_init_scale"]) or s["frequency_init_scale"] <= 0:
        errors.append(f"frequency_init_scale must be > 0, got {s['frequency_init_scale']}")
    if errors:
        raise ValueError("invalid ARFF settings: " + "; ".join(errors))
    return s


def acceptance_probability(new_magnitude, old_magnitude, exponent):
    """ min(1, (|a'_k| / |a_k|)^gamma), elementwise

    |a_k| = 0 counts as an infinite ratio (always accept), and gamma = 0 accepts
    everything; evaluated in log space so gamma = 3d - 2 with d = 784 cannot overflow
    """
    new = np.abs(np.asarray(new_magnitude, dtype=np.float64))
    old = np.abs(np.asarray(old_magnitude, dtype=np.float64))
    new, old = np.broadcast_arrays(new, old)
    prob = np.ones(new.shape)
    if exponent == 0:
        return prob
    live = old > 0
    with np.errstate(divide="ignore"):
        log_ratio = exponent * (np.log(new[live]) - np.log(old[live]))
    prob[live] = np.exp(np.minimum(0.0, log_ratio))
    return prob


def acceptance_mask(new_magnitude, old_magnitude, exponent, rng):
    """ accept node k when a uniform draw falls below its acceptance probability """
    prob = acceptance_probability(new_magnitude, old_magnitude, exponent)
    return rng.random(prob.shape) < prob


def metropolis_step(net, inputs, targets, settings, rng):
    """ one Metropolis sweep over all K nodes

    proposes omega'_k = omega_k + delta * r_k (r_k standard normal) and a fresh
    uniform phase b'_k for every node, solves the amplitudes of the proposed set,
    accepts (omega'_k, b'_k) with probability min(1, (|a'_k|/|a_k|)^gamma) and
    finishes with an amplitude solve on the mixed set

    net must carry amplitudes solved for its own frequencies

    Returns
    -------
    net : FourierFeatureNetwork
        network after the sweep, amplitudes solved
    acceptance_rate : float
        fraction of nodes whose proposal was accepted
    """
    net, rate, _ = _sweep(net, inputs, targets, settings, rng)
    return net, rate


def _sweep(net, inputs, targets, settings, rng):
    """ metropolis_step that also returns the least-squares problem of the mixed set """
    lam = settings["lam"]
    exponent = settings["exponent"]
    if exponent is None:
        exponent = 3 * net.n_dims - 2
    n_nodes = net.n_nodes

    frequencies = net.frequencies + settings["proposal_width"] * rng.standard_normal(
        net.frequencies.shape)
    biases = rng.uniform(0, 2 * np.pi, n_nodes)
    proposed = FourierFeatureNetwork(frequencies, np.zeros(n_nodes), biases)
    amplitudes = solve_amplitudes(LsProblem(design_matrix(proposed, inputs), targets, lam))

    accept = acceptance_mask(amplitudes, net.amplitudes, exponent, rng)
    frequencies = np.where(accept[:, np.newaxis], frequencies, net.frequencies)
    biases = np.where(accept, biases, net.biases)
    mixed = FourierFeatureNetwork(frequencies, np.zeros(n_nodes), biases)
    problem = LsProblem(design_matrix(mixed, inputs), targets, lam)
    return mixed.with_amplitudes(solve_amplitudes(problem)), float(accept.mean()), problem


class ARFFTrainer:
    """ARFF training state for one network, advanced one epoch at a time

    Parameters
    -----------
    train : Dataset
        training data
    validation : Dataset or None
        validation data, its mean squared error is recorded every epoch
    n_nodes : int
        number of nodes K
    settings : dict (optional, default arff_settings())
        see arff_settings_info()
    target_column : int (optional, default 0)
        which target column to fit (digit index for one-vs-rest)
    verbose : bool (optional, default False)
        print progress

    Attributes
    ----------
    network : FourierFeatureNetwork
        current network
    trace : Trace
        one record per completed epoch
    epoch : int
        number of completed epochs
    """

    name = "arff"

    def __init__(self, train, validation, n_nodes, settings=None, target_column=0,
                 verbose=False):
        self.settings = validate_arff_settings(settings or {})
        if len(train) < 1:
            raise ValueError("training set is empty")
        if n_nodes < 1:
            raise ValueError(f"n_nodes must be >= 1, got {n_nodes}")
        self.inputs = train.inputs
        self.targets = train.target(target_column)
        self.validation = validation
        self.target_column = target_column
        self.verbose = verbose
        self.rng = default_rng(self.settings["seed"])
        net = init_network(n_nodes, train.n_dims, self.rng,
                           self.settings["frequency_init_scale"])
        self.network = net.with_amplitudes(solve_amplitudes(self.problem(net)))
        self.trace = Trace()
        self.epoch = 0

    def problem(self, net):
        return LsProblem(design_matrix(net, self.inputs), self.targets, self.settings["lam"])

    def step(self):
        """ run one epoch, return the acceptance rate """
        self.network, rate, problem = _sweep(self.network, self.inputs, self.targets,
                                             self.settings, self.rng)
        self.epoch += 1
        loss = training_loss(problem, self.network.amplitudes)
        val_loss = (mse(self.network, self.validation.inputs,
                        self.validation.target(self.target_column))
                    if self.validation is not None else np.nan)
        self.trace.append(loss, val_loss, rate)
        return rate

    def run(self, callback=None):
        """ run the remaining epochs; callback(epoch, network, trace) after each """
        t0 = time.time()
        epochs = self.settings["epochs"]
        for _ in trange(self.epoch, epochs, disable=not self.verbose):
            self.step()
            if callback is not None:
                callback(self.epoch, self.network, self.trace)
        if self.verbose:
            print(f"arff trained: K={self.network.n_nodes}, {epochs} epochs, "
                  f"loss {self.trace.train_loss[-1]:0.4e}, time {time.time()-t0:0.2f}sec")
        return self.network, self.trace


def arff_train(train, validation, n_nodes, settings=None, callback=None, verbose=False):
    """ train one network with ARFF, returns (network, trace); deterministic given seed """
    trainer = ARFFTrainer(train, validation, n_nodes, settings, verbose=verbose)
    return trainer.run(callback=callback)
