"""
one-vs-rest classification with ten per-digit networks
"""
import time
import numpy as np
from sklearn.metrics import confusion_matrix

from .arff import ARFFTrainer
from .sgd import SGDTrainer
from .network import predict as network_predict
from .utils import derive_seed

N_DIGITS = 10
TRAINERS = {"arff": ARFFTrainer, "sgd": SGDTrainer}


class OneVsRestEnsemble:
    """ten networks, network i scores "is digit i"

    all members share input dimension d and node count K
    """

    def __init__(self, networks):
        networks = list(networks)
        if len(networks) != N_DIGITS:
            raise ValueError(f"ensemble needs exactly {N_DIGITS} networks, got {len(networks)}")
        shapes = {(net.n_nodes, net.n_dims) for net in networks}
        if len(shapes) != 1:
            raise ValueError(f"ensemble members differ in (K, d): {sorted(shapes)}")
        self.networks = networks

    @property
    def n_dims(self):
        return self.networks[0].n_dims

    @property
    def n_nodes(self):
        return self.networks[0].n_nodes

    def scores(self, inputs):
        """ (N, 10) raw outputs of the ten networks """
        return np.stack([network_predict(net, inputs) for net in self.networks], axis=1)

    def predict(self, inputs):
        """ (N,) digit per input, smallest index among tied maxima """
        return self.scores(inputs).argmax(axis=1)

    def copy(self):
        return OneVsRestEnsemble([net.copy() for net in self.networks])


def predict(ensemble, x):
    """ arg max_i beta^i(x), ties to the smallest digit """
    x = np.asarray(x, dtype=np.float64).reshape(1, -1)
    return int(ensemble.predict(x)[0])


def accuracy(ensemble, dataset):
    """ N_correct / N_total over a labeled dataset """
    if dataset.labels is None:
        raise ValueError("accuracy needs a labeled dataset")
    if len(dataset) == 0:
        raise ValueError("accuracy of an empty dataset is undefined")
    n_correct = int((ensemble.predict(dataset.inputs) == dataset.labels).sum())
    return n_correct / len(dataset)


def confusion(ensemble, dataset):
    """ (10, 10) counts, rows true digit, columns predicted digit """
    if dataset.labels is None:
        raise ValueError("confusion needs a labeled dataset")
    return confusion_matrix(dataset.labels, ensemble.predict(dataset.inputs),
                            labels=np.arange(N_DIGITS))


def digit_seed(master_seed, trainer, digit):
    """ seed of digit's network, depends only on (master_seed, trainer, digit) """
    return derive_seed(master_seed, trainer, digit)


class EnsembleTrainer:
    """ten one-vs-rest trainers advanced in lockstep, one epoch at a time

    Parameters
    -----------
    trainer : str
        "arff" or "sgd"
    train, validation : Dataset
        one-hot targets, column i trains network i
    n_nodes : int
        K of every network
    settings : dict
        trainer settings; "seed" is replaced per digit by digit_seed(master_seed, ...)
    master_seed : int
    verbose : bool
    """

    def __init__(self, trainer, train, validation, n_nodes, settings=None, master_seed=0,
                 verbose=False):
        if trainer not in TRAINERS:
            raise ValueError(f"unknown trainer {trainer!r}, use one of {sorted(TRAINERS)}")
        if train.n_outputs != N_DIGITS:
            raise ValueError(f"one-vs-rest training needs {N_DIGITS} target columns, "
                             f"got {train.n_outputs}")
        self.name = trainer
        self.verbose = verbose
        settings = dict(settings or {})
        self.trainers = []
        for digit in range(N_DIGITS):
            s = {**settings, "seed": digit_seed(master_seed, trainer, digit)}
            self.trainers.append(TRAINERS[trainer](train, validation, n_nodes, s,
                                                   target_column=digit))
        self.epochs = self.trainers[0].settings["epochs"]
        self.epoch = 0

    @property
    def ensemble(self):
        return OneVsRestEnsemble([t.network for t in self.trainers])

    def step(self):
        for t in self.trainers:
            t.step()
        self.epoch += 1

    def run(self, callback=None):
        """ callback(epoch, ensemble) after every epoch """
        t0 = time.time()
        while self.epoch < self.epochs:
            self.step()
            if self.verbose:
                print(f"{self.name} ensemble epoch {self.epoch}/{self.epochs}, "
                      f"time {time.time()-t0:0.2f}sec")
            if callback is not None:
                callback(self.epoch, self.ensemble)
        return self.ensemble


def train_ensemble(trainer, train, validation, n_nodes, settings=None, master_seed=0,
                   callback=None, verbose=False):
    """ train ten one-vs-rest networks, returns the OneVsRestEnsemble """
    return EnsembleTrainer(trainer, train, validation, n_nodes, settings, master_seed,
                           verbose).run(callback)
