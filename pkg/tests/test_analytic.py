"""Analytic-signal construction against frequency-domain oracles.

The oracle below rebuilds the one-sided spectrum mask directly with
numpy's FFT, independent of the scipy routine used by the package, and
bin-frequency cosines additionally have the exact closed form
exp(i*(2 pi k t / n + phase)).
"""

import numpy as np
import pytest

from kmva.analytic import hilbert_analytic, phase_amplitude
from kmva.data import DataMatrix
from kmva.exceptions import DimensionMismatchError


def analytic_oracle(x):
    """One-sided spectrum route: double positive bins, keep DC/Nyquist,
    zero negative bins, inverse transform."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    weights = np.zeros(n)
    weights[0] = 1.0
    if n % 2 == 0:
        weights[n // 2] = 1.0
        weights[1:n // 2] = 2.0
    else:
        weights[1:(n + 1) // 2] = 2.0
    spectrum = np.fft.fft(x, axis=0) * weights[:, None]
    return np.fft.ifft(spectrum, axis=0)


def bin_cosine(n, k, phase=0.0):
    t = np.arange(n)
    return np.cos(2.0 * np.pi * k * t / n + phase)


def rng(seed):
    return np.random.default_rng(np.random.SeedSequence(seed))


def centered(x):
    return DataMatrix(x - x.mean(axis=0), centered=True)


def test_matches_fft_oracle():
    for n in (37, 40):
        x = rng(n).normal(size=(n, 3))
        x -= x.mean(axis=0)
        z = hilbert_analytic(centered(x))
        np.testing.assert_allclose(z, analytic_oracle(x), atol=1e-12)


@pytest.mark.parametrize("n", [64, 100])
def test_bin_cosines_map_to_complex_exponentials(n):
    t = np.arange(n)
    for k in range(1, n // 2):
        x = bin_cosine(n, k, phase=0.3)[:, None]
        z = hilbert_analytic(DataMatrix(x, centered=True))
        expected = np.exp(1j * (2.0 * np.pi * k * t / n + 0.3))[:, None]
        assert np.max(np.abs(z - expected)) < 1e-10


def test_negative_frequency_energy_is_null():
    n = 64
    x = rng(7).normal(size=(n, 2))
    x -= x.mean(axis=0)
    z = hilbert_analytic(centered(x))
    spec = np.fft.fft(z, axis=0)
    negative = spec[n // 2 + 1:, :]
    ratio = np.sum(np.abs(negative) ** 2) / np.sum(np.abs(spec) ** 2)
    assert ratio < 1e-20


def test_real_part_is_preserved():
    x = rng(8).normal(size=(25, 4))
    x -= x.mean(axis=0)
    z = hilbert_analytic(centered(x))
    np.testing.assert_allclose(z.real, x, atol=1e-12)


def test_linearity():
    x = rng(9).normal(size=(30, 2))
    y = rng(10).normal(size=(30, 2))
    x -= x.mean(axis=0)
    y -= y.mean(axis=0)
    combined = hilbert_analytic(centered(2.0 * x - 0.5 * y))
    separate = 2.0 * hilbert_analytic(centered(x)) - 0.5 * hilbert_analytic(centered(y))
    np.testing.assert_allclose(combined, separate, atol=1e-12)


@pytest.mark.parametrize("n", [33, 34])
def test_energy_identity_with_nyquist_correction(n):
    """For centered input sum|z|^2 = 2 sum|x|^2 minus the Nyquist bin's
    energy (the doubling convention keeps that bin at weight one); odd
    lengths have no Nyquist bin and the factor two is exact.
    """
    x = rng(n).normal(size=(n, 1))
    x -= x.mean(axis=0)
    z = hilbert_analytic(centered(x))
    spectrum = np.fft.fft(x[:, 0])
    nyquist = abs(spectrum[n // 2]) ** 2 / n if n % 2 == 0 else 0.0
    lhs = np.sum(np.abs(z) ** 2)
    rhs = 2.0 * np.sum(x**2) - nyquist
    assert abs(lhs - rhs) < 1e-9 * rhs


def test_input_validation():
    with pytest.raises(TypeError):
        hilbert_analytic(np.ones((8, 2), dtype=complex))
    with pytest.raises(DimensionMismatchError):
        hilbert_analytic(np.ones((3, 2)))
    with pytest.warns(UserWarning, match="centered"):
        hilbert_analytic(np.ones((8, 1)) + np.linspace(0, 1, 8)[:, None])


def test_phase_amplitude_split():
    z = np.array([[3.0 + 4.0j, 0.0]])
    amp, phase = phase_amplitude(z)
    np.testing.assert_allclose(amp, [[5.0, 0.0]])
    assert phase[0, 1] == 0.0
    np.testing.assert_allclose(phase[0, 0], np.arctan2(4.0, 3.0))
