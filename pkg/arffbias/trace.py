"""
per-epoch training record shared by the ARFF and SGD trainers
"""
import numpy as np


class Trace:
    """one record per completed epoch

    Attributes
    ----------
    train_loss : list of float
        regularized training loss after the epoch
    val_loss : list of float
        validation mean squared error after the epoch (nan without validation data)
    acceptance_rate : list of float
        fraction of accepted Metropolis proposals, in [0, 1]; nan for SGD
    snapshots : list
        optional reference to a saved model (path), None otherwise
    """

    def __init__(self):
        self.train_loss = []
        self.val_loss = []
        self.acceptance_rate = []
        self.snapshots = []

    def append(self, train_loss, val_loss, acceptance_rate=np.nan, snapshot=None):
        if not np.isnan(acceptance_rate) and not 0.0 <= acceptance_rate <= 1.0:
            raise ValueError(f"acceptance rate {acceptance_rate} outside [0, 1]")
        self.train_loss.append(float(train_loss))
        self.val_loss.append(float(val_loss))
        self.acceptance_rate.append(float(acceptance_rate))
        self.snapshots.append(snapshot)

    def __len__(self):
        return len(self.train_loss)

    def rows(self):
        """ (epoch, train_loss, val_loss, acceptance_rate), epochs counted from 1 """
        return [(i + 1, self.train_loss[i], self.val_loss[i], self.acceptance_rate[i])
                for i in range(len(self))]

    def as_arrays(self):
        return (np.array(self.train_loss), np.array(self.val_loss),
                np.array(self.acceptance_rate))

    def __eq__(self, other):
        if not isinstance(other, Trace):
            return NotImplemented
        return all(np.array_equal(a, b, equal_nan=True)
                   for a, b in zip(self.as_arrays(), other.as_arrays()))
