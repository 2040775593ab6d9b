import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import norm

from arffbias.data import generate_synthetic, Dataset
from arffbias.network import FourierFeatureNetwork
from arffbias.spectral import (sine_integral, target_function, GaussianDensity,
                               KernelDensityModel, SpectrumEstimate, weighted_spectrum,
                               frequency_grid, cutoff_frequency, spectral_bias,
                               spectral_bias_from_spectrum, UndefinedCutoffError)


def test_sine_integral_matches_quadrature():
    x = np.linspace(-100, 100, 1000)
    si = sine_integral(x)
    for xi, s in zip(x, si):
        expected, _ = quad(lambda t: np.sinc(t / np.pi), 0, xi, limit=1000,
                           epsabs=1e-13, epsrel=1e-13)
        assert abs(s - expected) < 1e-10


def test_sine_integral_is_odd():
    x = np.random.default_rng(0).uniform(0, 50, 100)
    assert np.array_equal(sine_integral(-x), -sine_integral(x))
    assert sine_integral(0.0) == 0.0
    assert sine_integral(1e6) == pytest.approx(np.pi / 2, abs=1e-5)


def test_target_function():
    assert target_function(0.0) == 0.0
    assert target_function(0.5, a=0.1) == pytest.approx(np.exp(-0.125) * sine_integral(5.0))
    with pytest.raises(ValueError):
        target_function(1.0, a=0.0)


def test_gaussian_density_is_normal_pdf():
    x = np.linspace(-3, 3, 11)
    assert np.allclose(GaussianDensity(0.5, 2.0)(x), norm.pdf(x, 0.5, 2.0))
    X = np.random.default_rng(1).standard_normal((5, 2))
    expected = norm.pdf(X[:, 0]) * norm.pdf(X[:, 1], 1.0, 3.0)
    assert np.allclose(GaussianDensity([0.0, 1.0], [1.0, 3.0])(X), expected)


def test_kernel_density_is_positive():
    x = np.random.default_rng(2).standard_normal((300, 1))
    density = KernelDensityModel().fit(x)
    rho = density(x)
    assert np.all(rho > 0)
    assert density(np.zeros((1, 1)))[0] == pytest.approx(norm.pdf(0), rel=0.3)


def test_weighted_spectrum_matches_direct_sum():
    rng = np.random.default_rng(3)
    x = rng.standard_normal(50)
    g = np.sin(2 * x) + 0.3 * x
    density = GaussianDensity()
    grid = np.linspace(0, 8, 40)
    w = (g - g.mean()) / np.sqrt(norm.pdf(x))
    expected = np.abs(np.exp(-1j * np.outer(grid, x)) @ w / x.size)**2
    spectrum = weighted_spectrum(g, x, density, grid)
    assert np.allclose(spectrum.energy, expected, rtol=1e-10, atol=1e-14)


def test_weighted_spectrum_rejects_bad_input():
    x = np.linspace(-1, 1, 10)
    with pytest.raises(ValueError):
        weighted_spectrum(np.ones(9), x, GaussianDensity(), np.linspace(0, 1, 5))
    with pytest.raises(ValueError):
        weighted_spectrum(np.ones(10), x, lambda X: np.zeros(len(X)), np.linspace(0, 1, 5))
    with pytest.raises(ValueError):
        weighted_spectrum(np.ones(10), np.ones((10, 2)), GaussianDensity(), np.linspace(0, 1, 5))


def test_cutoff_splits_energy_in_half():
    grid = np.arange(10.0)
    assert cutoff_frequency(SpectrumEstimate(grid, np.ones(10))) == 4.0


def test_cutoff_ties_go_to_smaller_frequency():
    grid = np.array([0.0, 1.0, 2.0])
    assert cutoff_frequency(SpectrumEstimate(grid, np.array([1.0, 0.0, 1.0]))) == 0.0


def test_cutoff_undefined_without_energy():
    with pytest.raises(UndefinedCutoffError):
        cutoff_frequency(SpectrumEstimate(np.arange(5.0), np.zeros(5)))


def test_all_low_and_all_high_spectra():
    grid = np.linspace(0, 10, 101)
    low = SpectrumEstimate(grid, (grid <= 2).astype(float))
    high = SpectrumEstimate(grid, (grid > 5).astype(float))
    assert spectral_bias_from_spectrum(low, 5.0, 1.0).sb == -1.0
    assert spectral_bias_from_spectrum(high, 5.0, 1.0).sb == 1.0


def test_zero_residual_spectrum_is_undefined():
    grid = np.linspace(0, 10, 11)
    report = spectral_bias_from_spectrum(SpectrumEstimate(grid, np.zeros(11)), 5.0, 1.0)
    assert not report.defined
    assert np.isnan(report.sb)


def test_energies_are_scaled_by_variance():
    grid = np.linspace(0, 1, 3)
    spectrum = SpectrumEstimate(grid, np.ones(3))
    report = spectral_bias_from_spectrum(spectrum, 0.5, 2.0)
    assert report.e_low == pytest.approx(0.5 / (2 * np.pi * 2.0))
    assert report.e_high == pytest.approx(0.5 / (2 * np.pi * 2.0))
    assert report.sb == 0.0


def test_spectral_bias_bounded_on_random_pairs():
    rng = np.random.default_rng(4)
    density = GaussianDensity()
    grid = np.linspace(0, 20, 64)
    for _ in range(500):
        n = int(rng.integers(5, 40))
        K = int(rng.integers(1, 6))
        x = rng.standard_normal((n, 1))
        y = rng.standard_normal(n)
        net = FourierFeatureNetwork(3 * rng.standard_normal((K, 1)), rng.standard_normal(K),
                                    rng.uniform(0, 2 * np.pi, K))
        cutoff = float(rng.uniform(0, 20))
        report = spectral_bias(net, Dataset(x, y), density, grid, cutoff=cutoff)
        if report.defined:
            assert -1.0 <= report.sb <= 1.0
        else:
            assert np.isnan(report.sb)


def test_untrained_network_is_spectrally_balanced():
    data = generate_synthetic(500, a=0.1, seed=5)
    density = GaussianDensity()
    grid = np.linspace(0, 40, 512)
    net = FourierFeatureNetwork([[1.0]], [0.0], [0.0])
    # residual of a zero network is the target, split in half by the cutoff
    report = spectral_bias(net, data, density, grid)
    assert abs(report.sb) < 0.05


def test_frequency_grid_covers_target_band():
    a = 0.1
    data = generate_synthetic(400, a=a, seed=6)
    grid, meta = frequency_grid(data.target(0), data.inputs, GaussianDensity(), n_grid=256)
    assert grid.shape == (256,)
    assert grid[0] == 0.0
    assert grid[-1] == pytest.approx(meta["omega_max"])
    assert meta["omega_max"] >= 1 / a
    assert meta["omega_max"] <= meta["nyquist"]


def test_noise_floor_is_the_diagonal_term():
    rng = np.random.default_rng(7)
    x = rng.standard_normal(60)
    g = rng.standard_normal(60)
    spectrum = weighted_spectrum(g, x, GaussianDensity(), np.linspace(0, 5, 20))
    w = (g - g.mean()) / np.sqrt(norm.pdf(x))
    assert spectrum.floor == pytest.approx((w**2).sum() / 60**2, rel=1e-12)
    assert np.allclose(spectrum.signal, spectrum.energy - spectrum.floor)


def test_white_noise_residual_carries_no_signal():
    rng = np.random.default_rng(8)
    x = rng.uniform(-1, 1, 2000)
    noise = rng.standard_normal(2000)
    uniform = lambda X: np.full(len(X), 0.5)
    spectrum = weighted_spectrum(noise, x, uniform, np.linspace(0, 200, 512))
    # raw energy sits on the floor, the floor-free part averages out
    assert spectrum.energy.mean() == pytest.approx(spectrum.floor, rel=0.25)
    assert abs(spectrum.signal.mean()) < 0.25 * spectrum.floor


def test_flat_floor_does_not_count_as_high_frequency_error():
    grid = np.linspace(0, 64, 257)
    floor = 1e-3
    energy = floor + np.where(grid <= 1.0, 1e-2, 0.0)
    report = spectral_bias_from_spectrum(SpectrumEstimate(grid, energy, floor), 2.25, 1.0)
    assert report.sb == -1.0
    # the same energies read without the floor are dominated by it
    raw = spectral_bias_from_spectrum(SpectrumEstimate(grid, energy), 2.25, 1.0)
    assert raw.sb > 0.5


def test_undefined_threshold_applies_to_scaled_energies():
    grid = np.array([0.0, 0.5, 1.0])
    scale = 2 * np.pi
    above = SpectrumEstimate(grid, np.full(3, 2e-14 * scale))
    below = SpectrumEstimate(grid, np.full(3, 0.5e-14 * scale))
    assert spectral_bias_from_spectrum(above, 0.5, 1.0).defined
    assert not spectral_bias_from_spectrum(below, 0.5, 1.0).defined


def test_spectral_bias_ignores_energy_scale():
    rng = np.random.default_rng(11)
    grid = np.linspace(0, 10, 50)
    spectrum = SpectrumEstimate(grid, rng.random(50))
    for cutoff in (0.5, 3.0, 7.5):
        sb = spectral_bias_from_spectrum(spectrum, cutoff, 1.3).sb
        assert spectral_bias_from_spectrum(spectrum.scaled(7.0), cutoff, 1.3).sb == \
            pytest.approx(sb, rel=1e-12, abs=1e-15)


def test_cutoff_moves_up_with_the_mass():
    rng = np.random.default_rng(12)
    grid = np.arange(30.0)
    for _ in range(200):
        energy = rng.random(30)
        i, j = sorted(rng.choice(30, size=2, replace=False))
        moved = energy.copy()
        moved[j] += moved[i]
        moved[i] = 0.0
        assert cutoff_frequency(SpectrumEstimate(grid, moved)) >= \
            cutoff_frequency(SpectrumEstimate(grid, energy))


def test_single_frequency_peak():
    x = np.random.default_rng(13).standard_normal(2000)
    grid = np.linspace(0, 10, 201)
    spectrum = weighted_spectrum(np.cos(5 * x), x, GaussianDensity(), grid)
    assert abs(grid[np.argmax(spectrum.signal)] - 5.0) <= grid[1] - grid[0]
