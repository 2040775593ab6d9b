"""
computable spectral bias of a trained network

SB = (E_high - E_low) / (E_high + E_low), where E_high / E_low are the residual's
weighted spectral energy above / below the cutoff omega_0 that splits the
target's weighted spectrum into equal halves
"""
import warnings
import numpy as np
from numba import njit, prange
from scipy.special import sici
from scipy.stats import norm
from sklearn.neighbors import KernelDensity

from .network import residuals


class UndefinedCutoffError(ValueError):
    """ target spectrum carries no energy, so no cutoff frequency exists """


def sine_integral(x):
    """ Si(x) = int_0^x sin(t)/t dt, exactly odd in x """
    x = np.asarray(x, dtype=np.float64)
    si = np.sign(x) * sici(np.abs(x))[0]
    return float(si) if si.ndim == 0 else si


def target_function(x, a=1e-2):
    """ f(x) = exp(-x^2 / 2) Si(x / a) """
    if not a > 0:
        raise ValueError(f"a must be > 0, got {a}")
    x = np.asarray(x, dtype=np.float64)
    f = np.exp(-x**2 / 2) * sine_integral(x / a)
    return float(f) if np.ndim(f) == 0 else f


class GaussianDensity:
    """ analytic normal density, product over input dimensions """

    def __init__(self, mean=0.0, std=1.0):
        self.mean = np.atleast_1d(np.asarray(mean, dtype=np.float64))
        self.std = np.atleast_1d(np.asarray(std, dtype=np.float64))
        if np.any(self.std <= 0):
            raise ValueError("std must be > 0")

    def __call__(self, inputs):
        X = _as_matrix(inputs)
        return norm.pdf(X, loc=self.mean, scale=self.std).prod(axis=1)

    def __repr__(self):
        return f"GaussianDensity(mean={self.mean}, std={self.std})"


class KernelDensityModel:
    """ Gaussian kernel density estimate with Silverman's bandwidth, for unknown densities """

    def __init__(self):
        self.kde = None

    def fit(self, inputs):
        self.kde = KernelDensity(kernel="gaussian", bandwidth="silverman").fit(_as_matrix(inputs))
        return self

    def __call__(self, inputs):
        if self.kde is None:
            raise ValueError("KernelDensityModel used before fit()")
        return np.exp(self.kde.score_samples(_as_matrix(inputs)))


def _as_matrix(inputs):
    X = np.asarray(inputs, dtype=np.float64)
    return X[:, np.newaxis] if X.ndim == 1 else X


@njit("float64[:] (float64[:], float64[:], float64[:])", nogil=True, parallel=True,
      cache=True)
def _fourier_energy(x, w, grid):
    """ |N^-1 sum_n w_n exp(-i omega x_n)|^2 for every omega in grid """
    n = x.shape[0]
    energy = np.zeros(grid.shape[0])
    for j in prange(grid.shape[0]):
        re = 0.0
        im = 0.0
        for i in range(n):
            ph = grid[j] * x[i]
            re += w[i] * np.cos(ph)
            im -= w[i] * np.sin(ph)
        energy[j] = (re * re + im * im) / (n * n)
    return energy


class SpectrumEstimate:
    """weighted spectral energy on a grid of frequency magnitudes

    Attributes
    ----------
    grid : array, shape (G,)
        strictly increasing frequency magnitudes
    energy : array, shape (G,)
        nonnegative |F(omega)|^2 estimates
    floor : float
        flat noise floor N^-2 sum_n w_n^2 contained in every energy value
        (the n = m terms of |F|^2); energy - floor keeps only the n != m cross terms
    """

    def __init__(self, grid, energy, floor=0.0):
        grid = np.asarray(grid, dtype=np.float64).reshape(-1)
        energy = np.asarray(energy, dtype=np.float64).reshape(-1)
        if grid.shape != energy.shape or grid.size < 1:
            raise ValueError("grid and energy must be nonempty and of equal length")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if np.any(grid < 0):
            raise ValueError("grid holds frequency magnitudes, must be >= 0")
        if np.any(energy < 0) or not np.all(np.isfinite(energy)):
            raise ValueError("energy must be finite and >= 0")
        if not (np.isfinite(floor) and floor >= 0):
            raise ValueError(f"floor must be finite and >= 0, got {floor}")
        self.grid = grid
        self.energy = energy
        self.floor = float(floor)

    def scaled(self, factor):
        return SpectrumEstimate(self.grid, self.energy * factor, self.floor * factor)

    @property
    def signal(self):
        """ energy with the noise floor removed, entries may be negative """
        return self.energy - self.floor

    @property
    def total(self):
        return float(self.signal.sum())


def weighted_spectrum(values, inputs, density, grid):
    """ Monte Carlo estimate of the spectrum of sqrt(rho(x)) (g(x) - mean g)

    F(omega) = N^-1 sum_n exp(-i omega x_n) (g_n - mean(g)) / sqrt(rho(x_n)),
    energy = |F(omega)|^2; its n = m terms add the flat floor N^-2 sum_n w_n^2,
    recorded on the estimate and removed by SpectrumEstimate.signal, which is
    exact in expectation when density is the true sampling density of inputs

    Parameters
    ----------
    values : array, shape (N,)
        function values g(x_n)
    inputs : array, shape (N, 1)
        sample points (one-dimensional inputs only)
    density : callable
        density(inputs) -> (N,) strictly positive densities
    grid : array, shape (G,)
        frequency magnitudes

    Returns
    -------
    spectrum : SpectrumEstimate
    """
    X = _as_matrix(inputs)
    g = np.asarray(values, dtype=np.float64).reshape(-1)
    if X.shape[1] != 1:
        raise ValueError("weighted spectra are only implemented for one-dimensional inputs")
    if g.shape[0] != X.shape[0] or g.shape[0] < 1:
        raise ValueError(f"{g.shape[0]} values for {X.shape[0]} inputs")
    rho = np.asarray(density(X), dtype=np.float64).reshape(-1)
    if np.any(~(rho > 0)):
        raise ValueError("density must be strictly positive at every sample")
    w = (g - g.mean()) / np.sqrt(rho)
    grid = np.ascontiguousarray(grid, dtype=np.float64).reshape(-1)
    energy = _fourier_energy(np.ascontiguousarray(X[:, 0]), w, grid)
    return SpectrumEstimate(grid, energy, (w**2).sum() / w.size**2)


def frequency_grid(values, inputs, density, n_grid=2048, omega_start=1.0,
                   max_doublings=20, top_fraction=0.01):
    """ uniform grid of n_grid magnitudes from 0 to omega_max

    omega is doubled from omega_start until the top decile of the grid holds less
    than top_fraction of the target's spectral energy (the located support);
    omega_max = min(4 * support, pi / dx_min) with dx_min the smallest input spacing

    Returns
    -------
    grid : array, shape (n_grid,)
    meta : dict
        omega_max, support, nyquist, n_grid, doublings
    """
    X = _as_matrix(inputs)
    xs = np.unique(X[:, 0])
    nyquist = np.pi / np.diff(xs).min() if xs.size > 1 else np.inf
    support = min(omega_start, nyquist)
    doublings = 0
    while True:
        spec = weighted_spectrum(values, X, density, np.linspace(0, support, n_grid))
        top = spec.signal[int(0.9 * n_grid):].sum()
        if spec.total <= 0 or top < top_fraction * spec.total:
            break
        if doublings >= max_doublings or 2 * support > nyquist:
            warnings.warn(f"frequency grid stopped at omega={support:0.3g} "
                          f"after {doublings} doublings")
            break
        support *= 2
        doublings += 1
    omega_max = min(4 * support, nyquist)
    meta = {"omega_max": omega_max, "support": support, "nyquist": nyquist,
            "n_grid": n_grid, "doublings": doublings}
    return np.linspace(0, omega_max, n_grid), meta


def cutoff_frequency(spectrum):
    """ grid magnitude omega_0 minimizing |low-side energy - high-side energy|

    low side is every grid point <= omega_0; ties go to the smaller omega_0;
    energies are taken above the noise floor
    """
    total = spectrum.total
    if not total > 0:
        raise UndefinedCutoffError("target spectrum has zero total energy")
    low = np.cumsum(spectrum.signal)
    imbalance = np.abs(low - (total - low))
    return float(spectrum.grid[np.argmin(imbalance)])


class SpectralBiasReport:
    """spectral bias of one network on one dataset

    Attributes
    ----------
    sb : float
        (e_high - e_low) / (e_high + e_low), nan when undefined
    defined : bool
        False when the residual carries (numerically) no spectral energy
    cutoff : float
        omega_0
    e_high, e_low : float
        residual energy above / below omega_0, scaled by ((2pi)^d Var(f))^-1
    variance : float
        sample variance of the targets
    """

    def __init__(self, sb, defined, cutoff, e_high, e_low, variance):
        self.sb = sb
        self.defined = defined
        self.cutoff = cutoff
        self.e_high = e_high
        self.e_low = e_low
        self.variance = variance

    def row(self):
        return [self.sb, self.cutoff, self.e_low, self.e_high, self.variance]

    def __repr__(self):
        return (f"SpectralBiasReport(sb={self.sb:0.4f}, cutoff={self.cutoff:0.4g}, "
                f"e_low={self.e_low:0.4g}, e_high={self.e_high:0.4g})")


def _trapezoid(grid, energy):
    if grid.size < 2:
        return 0.0
    return float(((energy[1:] + energy[:-1]) * np.diff(grid)).sum() / 2)


def spectral_bias_from_spectrum(residual_spectrum, cutoff, variance, n_dims=1):
    """ SB report from a residual spectrum, a cutoff and Var(f)

    energies are integrated with the trapezoidal rule on [0, omega_0] and
    [omega_0, omega_max]; a cutoff below the first grid point puts everything high

    the noise floor is subtracted before integrating and each band is clipped
    at zero afterwards; SB is undefined when the scaled energies sum to less
    than 1e-14 Var(f)
    """
    if not variance > 0:
        raise ValueError(f"target variance must be > 0, got {variance}")
    grid, energy = residual_spectrum.grid, residual_spectrum.signal
    low = grid <= cutoff
    high = grid >= cutoff
    scale = (2 * np.pi)**n_dims * variance
    e_low = max(0.0, _trapezoid(grid[low], energy[low])) / scale
    e_high = max(0.0, _trapezoid(grid[high], energy[high])) / scale
    defined = (e_high + e_low) >= 1e-14 * variance
    sb = (e_high - e_low) / (e_high + e_low) if defined else np.nan
    return SpectralBiasReport(sb, bool(defined), float(cutoff), e_high, e_low, float(variance))


def spectral_bias(net, dataset, density, grid=None, cutoff=None, target_spectrum=None):
    """ spectral bias of net on dataset

    Parameters
    ----------
    net : FourierFeatureNetwork
    dataset : Dataset
        one-dimensional regression data, targets column 0 is f(x)
    density : callable
        input density rho
    grid : array (optional)
        frequency magnitudes; default frequency_grid(...) of the targets
    cutoff : float (optional)
        omega_0; default computed from the target spectrum
    target_spectrum : SpectrumEstimate (optional)
        precomputed target spectrum on grid, reused across epochs

    Returns
    -------
    report : SpectralBiasReport
    """
    y = dataset.target(0)
    if y.shape[0] < 2:
        raise ValueError("spectral bias needs at least two samples")
    variance = float(np.var(y, ddof=1))
    if not variance > 0:
        raise ValueError("target variance must be > 0")
    if grid is None:
        grid = frequency_grid(y, dataset.inputs, density)[0]
    if cutoff is None:
        if target_spectrum is None:
            target_spectrum = weighted_spectrum(y, dataset.inputs, density, grid)
        cutoff = cutoff_frequency(target_spectrum)
    r = residuals(net, dataset.inputs, y)
    report = spectral_bias_from_spectrum(weighted_spectrum(r, dataset.inputs, density, grid),
                                         cutoff, variance, dataset.n_dims)
    if not report.defined:
        warnings.warn("residual has no spectral energy, spectral bias undefined")
    return report
