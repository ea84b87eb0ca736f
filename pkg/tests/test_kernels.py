"""Kernel construction, centering, and regularized inversion.

Oracles are explicit pairwise loops; the small regularized-inverse case
is solved by hand: K = diag(2, 2) with n=2, eps=0.5 gives
(K + 2*0.5*I)^-1 = diag(1/3, 1/3).
"""

import numpy as np
import pytest

from kmva.data import DataMatrix, center_columns
from kmva.exceptions import SingularMatrixError
from kmva.kernels import (
    KernelMatrix,
    center_kernel,
    gamma_from_sigma,
    gram,
    median_pairwise_distance,
    rbf,
    reg_inverse,
    sigma_from_gamma,
)


def gram_oracle(x):
    n = x.shape[0]
    out = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            out[i, j] = np.sum(x[i] * np.conj(x[j]))
    return out


def rbf_oracle(x, gamma):
    n = x.shape[0]
    out = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            out[i, j] = np.exp(-gamma * np.sum(np.abs(x[i] - x[j]) ** 2))
    return out


def center_oracle(k):
    n = k.shape[0]
    out = np.empty_like(k)
    grand = k.mean()
    for i in range(n):
        for j in range(n):
            out[i, j] = k[i, j] - k[i].mean() - k[:, j].mean() + grand
    return out


def rng(seed):
    return np.random.default_rng(np.random.SeedSequence(seed))


def test_gram_matches_loops_real_and_complex():
    x = rng(0).normal(size=(9, 3))
    np.testing.assert_allclose(gram(DataMatrix(x)).values,
                               gram_oracle(x).real, atol=1e-12)
    z = x + 1j * rng(1).normal(size=(9, 3))
    np.testing.assert_allclose(gram(DataMatrix(z)).values,
                               gram_oracle(z), atol=1e-12)


def test_gram_is_psd():
    x = rng(2).normal(size=(12, 4))
    w = np.linalg.eigvalsh(gram(DataMatrix(x)).values)
    assert w.min() > -1e-10 * max(w.max(), 1.0)


def test_rbf_matches_loops_and_unit_diagonal():
    x = rng(3).normal(size=(10, 2))
    k = rbf(DataMatrix(x), gamma=0.7)
    np.testing.assert_allclose(k.values, rbf_oracle(x, 0.7), atol=1e-12)
    np.testing.assert_array_equal(np.diag(k.values), np.ones(10))
    assert k.gamma == 0.7 and k.kind == "rbf"


def test_rbf_scale_identity_exact():
    # gamma * ||c x_i - c x_j||^2 == (gamma c^2) ||x_i - x_j||^2 exactly for c = 2
    x = rng(4).normal(size=(8, 3))
    a = rbf(DataMatrix(2.0 * x), gamma=0.3)
    b = rbf(DataMatrix(x), gamma=0.3 * 4.0)
    np.testing.assert_array_equal(a.values, b.values)


def test_center_kernel_matches_loops_and_is_idempotent():
    x = rng(5).normal(size=(11, 3))
    k = gram(DataMatrix(x))
    c = center_kernel(k)
    np.testing.assert_allclose(c.values, center_oracle(k.values), atol=1e-10)
    assert c.centered
    c2 = center_kernel(c)
    np.testing.assert_allclose(c2.values, c.values, atol=1e-10)
    assert np.max(np.abs(c.values.sum(axis=0))) < 1e-8 * np.abs(c.values).max()


def test_centering_data_equals_centering_kernel():
    x = rng(6).normal(size=(14, 4)) + 2.5
    direct = gram(center_columns(x)).values
    via_kernel = center_kernel(gram(DataMatrix(x))).values
    np.testing.assert_allclose(direct, via_kernel, atol=1e-10 * np.abs(direct).max())


def test_small_gamma_rbf_approaches_scaled_linear_kernel():
    """exp(-gamma d^2) ~ 1 - gamma d^2; after double centering the distance
    terms reduce to twice the centered Gram matrix, so centered-rbf/gamma
    converges to 2*centered-gram with a remainder that is first order in
    gamma.  Dropping gamma from 1e-4 to 1e-5 must shrink the deviation by
    about that same factor of ten.
    """
    x = rng(7).normal(size=(12, 3))
    target = 2.0 * center_kernel(gram(center_columns(x))).values
    scale = float(np.linalg.norm(target))

    def deviation(g):
        approx = center_kernel(rbf(center_columns(x), g)).values / g
        return float(np.linalg.norm(approx - target))

    assert deviation(1e-4) < 1e-3 * scale
    ratio = deviation(1e-5) / deviation(1e-4)
    assert 0.05 < ratio < 0.2


def test_reg_inverse_hand_case_and_residual():
    k = KernelMatrix(np.diag([2.0, 2.0]), kind="linear")
    np.testing.assert_allclose(reg_inverse(k, eps=0.5), np.diag([1 / 3, 1 / 3]),
                               atol=1e-14)
    x = rng(8).normal(size=(10, 4))
    kc = center_kernel(gram(DataMatrix(x)))
    inv = reg_inverse(kc, eps=1e-3)
    n = 10
    residual = (kc.values + n * 1e-3 * np.eye(n)) @ inv - np.eye(n)
    assert np.max(np.abs(residual)) < 1e-10


def test_reg_inverse_rejects_indefinite():
    # PSD is deliberately not checked at construction, only when factoring
    k = KernelMatrix(np.diag([1.0, -1.0]), kind="linear")
    with pytest.raises(SingularMatrixError, match="eps"):
        reg_inverse(k, eps=1e-12)


def test_median_pairwise_distance_hand_case():
    # points 0, 1, 3 on a line: distances {1, 2, 3}, median 2
    assert median_pairwise_distance(np.array([[0.0], [1.0], [3.0]])) == 2.0
    with pytest.raises(ValueError, match="degenerate"):
        median_pairwise_distance(np.ones((5, 2)))


def test_sigma_gamma_conversion():
    assert gamma_from_sigma(2.0) == 0.125
    assert sigma_from_gamma(0.125) == 2.0
    for bad in (0.0, -1.0):
        with pytest.raises(ValueError):
            gamma_from_sigma(bad)
        with pytest.raises(ValueError):
            sigma_from_gamma(bad)


def test_kernel_matrix_requires_hermitian():
    bad = np.array([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(ValueError, match="Hermitian"):
        KernelMatrix(bad, kind="linear")
    with pytest.raises(ValueError, match="kind"):
        KernelMatrix(np.eye(2), kind="cubic")
