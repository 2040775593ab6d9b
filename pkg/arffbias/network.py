"""
two-layer cosine-feature network beta(x) = sum_k amplitudes[k] * cos(frequencies[k] . x + biases[k])
"""
import numpy as np


class FourierFeatureNetwork:
    """two-layer network with cosine activation

    Parameters
    -----------
    frequencies : array, shape (K, d)
        frequency of each node, in radians per (normalized) input unit
    amplitudes : array, shape (K,)
        output weight of each node, in target units
    biases : array, shape (K,)
        phase of each node, in radians

    All three are copied to float64 and must be finite.
    """

    def __init__(self, frequencies, amplitudes, biases):
        frequencies = np.array(frequencies, dtype=np.float64)
        amplitudes = np.array(amplitudes, dtype=np.float64).reshape(-1)
        biases = np.array(biases, dtype=np.float64).reshape(-1)
        if frequencies.ndim == 1:
            frequencies = frequencies[:, np.newaxis]
        if frequencies.ndim != 2:
            raise ValueError("frequencies must be a K x d matrix")
        n_nodes = frequencies.shape[0]
        if n_nodes < 1:
            raise ValueError("network needs at least one node")
        if amplitudes.shape[0] != n_nodes or biases.shape[0] != n_nodes:
            raise ValueError(
                f"frequencies ({n_nodes} nodes), amplitudes ({amplitudes.shape[0]}) "
                f"and biases ({biases.shape[0]}) must have the same leading dimension")
        for name, arr in (("frequencies", frequencies), ("amplitudes", amplitudes),
                          ("biases", biases)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contain NaN or Inf")
        self.frequencies = frequencies
        self.amplitudes = amplitudes
        self.biases = biases

    @property
    def n_nodes(self):
        return self.frequencies.shape[0]

    @property
    def n_dims(self):
        return self.frequencies.shape[1]

    def copy(self):
        return FourierFeatureNetwork(self.frequencies, self.amplitudes, self.biases)

    def with_amplitudes(self, amplitudes):
        """ same frequencies and biases, new amplitudes """
        return FourierFeatureNetwork(self.frequencies, amplitudes, self.biases)

    def __call__(self, inputs):
        return predict(self, inputs)

    def __repr__(self):
        return f"FourierFeatureNetwork(K={self.n_nodes}, d={self.n_dims})"


def init_network(n_nodes, n_dims, rng, frequency_init_scale=1.0):
    """ frequencies ~ N(0, scale^2), biases ~ U[0, 2pi), amplitudes zero """
    if n_nodes < 1 or n_dims < 1:
        raise ValueError("n_nodes and n_dims must be >= 1")
    frequencies = frequency_init_scale * rng.standard_normal((n_nodes, n_dims))
    biases = rng.uniform(0, 2 * np.pi, n_nodes)
    return FourierFeatureNetwork(frequencies, np.zeros(n_nodes), biases)


def _as_inputs(net, inputs):
    X = np.asarray(inputs, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, np.newaxis] if net.n_dims == 1 else X[np.newaxis, :]
    if X.ndim != 2 or X.shape[1] != net.n_dims:
        raise ValueError(f"inputs of shape {np.shape(inputs)} do not match "
                         f"network input dimension {net.n_dims}")
    return X


def phases(net, inputs):
    """ (N, K) matrix of omega_k . x_n + b_k """
    X = _as_inputs(net, inputs)
    return X @ net.frequencies.T + net.biases


def forward(net, x):
    """ network output at a single input x (d-vector) """
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != net.n_dims:
        raise ValueError(f"input has dimension {x.shape[0]}, network expects {net.n_dims}")
    return float(np.cos(net.frequencies @ x + net.biases) @ net.amplitudes)


def design_matrix(net, inputs):
    """ S[n, k] = cos(omega_k . x_n + b_k), shape (N, K), rows are samples """
    S = np.cos(phases(net, inputs))
    if S.shape[0] < 1:
        raise ValueError("design matrix needs at least one input")
    return S


def predict(net, inputs):
    """ network outputs for N inputs, shape (N,) """
    return design_matrix(net, inputs) @ net.amplitudes


def residuals(net, inputs, targets):
    """ r_n = targets[n] - beta(x_n)

    note the sign: this is target minus prediction, the opposite of the
    S @ amplitudes - y residual used inside the least-squares solver
    """
    y = np.asarray(targets, dtype=np.float64)
    if y.ndim == 2 and y.shape[1] == 1:
        y = y[:, 0]
    out = predict(net, inputs)
    if y.shape != out.shape:
        raise ValueError(f"targets of shape {y.shape} do not match {out.shape[0]} inputs")
    return y - out


def mse(net, inputs, targets):
    return float((residuals(net, inputs, targets)**2).mean())
