"""
plain minibatch stochastic gradient descent on all network parameters
(no momentum, no adaptive step sizes)
"""
import time
import numpy as np
from tqdm import trange

from .network import init_network, phases, mse
from .trace import Trace
from .utils import default_rng, batch_slices


class DivergenceError(RuntimeError):
    """ training loss blew up (non-finite or > 1e6 x its initial value) """


DIVERGENCE_FACTOR = 1e6


def sgd_settings():
    """ default settings for the SGD trainer """
    settings = {}
    settings["epochs"] = 100
    settings["batch_size"] = 32
    settings["learning_rate"] = 2e-4
    settings["seed"] = 0
    settings["lam"] = 0.0
    settings["frequency_init_scale"] = 1.0
    return settings


def sgd_settings_info():
    info = {}
    info["epochs"] = "number of passes over the training set"
    info["batch_size"] = "samples per gradient step (last batch of an epoch may be short)"
    info["learning_rate"] = "step size of every gradient step"
    info["seed"] = "seed of the random number generator (initialization and shuffling)"
    info["lam"] = "penalty lam * |amplitudes|^2 added to the mean squared error"
    info["frequency_init_scale"] = "standard deviation of the initial frequencies"
    return info


def validate_sgd_settings(settings, n_samples=None):
    """ check every field, raise ValueError listing all offending ones """
    errors = []
    unknown = set(settings) - set(sgd_settings())
    if unknown:
        errors.append(f"unknown settings {sorted(unknown)}")
    s = {**sgd_settings(), **settings}
    if int(s["epochs"]) != s["epochs"] or s["epochs"] < 1:
        errors.append(f"epochs must be an integer >= 1, got {s['epochs']}")
    if int(s["batch_size"]) != s["batch_size"] or s["batch_size"] < 1:
        errors.append(f"batch_size must be an integer >= 1, got {s['batch_size']}")
    elif n_samples is not None and s["batch_size"] > n_samples:
        errors.append(f"batch_size {s['batch_size']} exceeds {n_samples} training samples")
    if not np.isfinite(s["learning_rate"]) or s["learning_rate"] <= 0:
        errors.append(f"learning_rate must be > 0, got {s['learning_rate']}")
    if not np.isfinite(s["lam"]) or s["lam"] < 0:
        errors.append(f"lam must be >= 0, got {s['lam']}")
    if not np.isfinite(s["frequency_init_scale"]) or s["frequency_init_scale"] <= 0:
        errors.append(f"frequency_init_scale must be > 0, got {s['frequency_init_scale']}")
    if errors:
        raise ValueError("invalid SGD settings: " + "; ".join(errors))
    return s


def batch_loss(net, inputs, targets, lam):
    """ |B|^-1 sum_n (beta(x_n) - y_n)^2 + lam |amplitudes|^2 """
    err = np.cos(phases(net, inputs)) @ net.amplitudes - np.asarray(targets).reshape(-1)
    return float((err**2).mean() + lam * (net.amplitudes**2).sum())


def batch_gradients(net, inputs, targets, lam):
    """ exact gradients of batch_loss

    with e_n = beta(x_n) - y_n and z_nk = omega_k . x_n + b_k:
        dL/da_k     =  2/|B| sum_n e_n cos(z_nk) + 2 lam a_k
        dL/db_k     = -2/|B| sum_n e_n a_k sin(z_nk)
        dL/domega_k = -2/|B| sum_n e_n a_k sin(z_nk) x_n

    Returns
    -------
    grad_frequencies : array, shape (K, d)
    grad_amplitudes : array, shape (K,)
    grad_biases : array, shape (K,)
    """
    X = np.asarray(inputs, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, np.newaxis]
    y = np.asarray(targets, dtype=np.float64).reshape(-1)
    if X.shape[0] < 1:
        raise ValueError("batch is empty")
    if y.shape[0] != X.shape[0]:
        raise ValueError(f"{y.shape[0]} targets for a batch of {X.shape[0]} inputs")
    z = phases(net, X)
    C = np.cos(z)
    e = C @ net.amplitudes - y
    scale = 2.0 / X.shape[0]
    grad_amplitudes = scale * (C.T @ e) + 2 * lam * net.amplitudes
    dz = -scale * (e[:, np.newaxis] * np.sin(z)) * net.amplitudes
    grad_biases = dz.sum(axis=0)
    grad_frequencies = dz.T @ X
    return grad_frequencies, grad_amplitudes, grad_biases


class SGDTrainer:
    """SGD training state for one network, advanced one epoch at a time

    Parameters
    -----------
    train : Dataset
        training data
    validation : Dataset or None
        validation data, its mean squared error is recorded every epoch
    n_nodes : int
        number of nodes K
    settings : dict (optional, default sgd_settings())
        see sgd_settings_info()
    target_column : int (optional, default 0)
        which target column to fit (digit index for one-vs-rest)
    verbose : bool (optional, default False)
        print progress

    Attributes
    ----------
    network : FourierFeatureNetwork
        current network; starts from N(0, scale^2) frequencies, U[0, 2pi) biases
        and zero amplitudes
    trace : Trace
        one record per completed epoch (acceptance_rate is nan)
    initial_loss : float
        training loss before the first step, reference of the divergence check
    """

    name = "sgd"

    def __init__(self, train, validation, n_nodes, settings=None, target_column=0,
                 verbose=False):
        if len(train) < 1:
            raise ValueError("training set is empty")
        if n_nodes < 1:
            raise ValueError(f"n_nodes must be >= 1, got {n_nodes}")
        self.settings = validate_sgd_settings(settings or {}, n_samples=len(train))
        self.inputs = train.inputs
        self.targets = train.target(target_column)
        self.validation = validation
        self.target_column = target_column
        self.verbose = verbose
        self.rng = default_rng(self.settings["seed"])
        self.network = init_network(n_nodes, train.n_dims, self.rng,
                                    self.settings["frequency_init_scale"])
        self.initial_loss = self.loss()
        self.trace = Trace()
        self.epoch = 0

    def loss(self):
        return batch_loss(self.network, self.inputs, self.targets, self.settings["lam"])

    def step(self):
        """ one shuffled pass over the training set, returns the training loss """
        lr, lam = self.settings["learning_rate"], self.settings["lam"]
        net = self.network.copy()
        iperm = self.rng.permutation(len(self.targets))
        for batch in batch_slices(len(iperm), self.settings["batch_size"]):
            ib = iperm[batch]
            g_freq, g_amp, g_bias = batch_gradients(net, self.inputs[ib], self.targets[ib], lam)
            net.frequencies -= lr * g_freq
            net.amplitudes -= lr * g_amp
            net.biases -= lr * g_bias
        loss = batch_loss(net, self.inputs, self.targets, lam)
        if not np.isfinite(loss) or loss > DIVERGENCE_FACTOR * max(self.initial_loss, 1e-300):
            raise DivergenceError(
                f"SGD diverged at epoch {self.epoch + 1}: loss {loss:0.4e}, "
                f"initial {self.initial_loss:0.4e}")
        self.network = net
        self.epoch += 1
        val_loss = (mse(net, self.validation.inputs, self.validation.target(self.target_column))
                    if self.validation is not None else np.nan)
        self.trace.append(loss, val_loss)
        return loss

    def run(self, callback=None):
        """ run the remaining epochs; callback(epoch, network, trace) after each """
        t0 = time.time()
        epochs = self.settings["epochs"]
        for _ in trange(self.epoch, epochs, disable=not self.verbose):
            self.step()
            if callback is not None:
                callback(self.epoch, self.network, self.trace)
        if self.verbose:
            print(f"sgd trained: K={self.network.n_nodes}, {epochs} epochs, "
                  f"loss {self.trace.train_loss[-1]:0.4e}, time {time.time()-t0:0.2f}sec")
        return self.network, self.trace


def sgd_train(train, validation, n_nodes, settings=None, callback=None, verbose=False):
    """ train one network with SGD, returns (network, trace); deterministic given seed """
    trainer = SGDTrainer(train, validation, n_nodes, settings, verbose=verbose)
    return trainer.run(callback=callback)
