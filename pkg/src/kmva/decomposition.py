"""Paired-dataset and kernel eigendecompositions.

All solvers share conventions:

* rows are observations, columns are variables; complex input is handled
  throughout with the inner product conjugate-linear in the second slot;
* cross-covariance uses the 1/(n-1) scaling;
* eigenproblems are solved in symmetric/Hermitian form (whiten, then an
  ordinary Hermitian eigensolve or SVD) rather than as non-symmetric
  products, for numerical stability;
* mode order is descending in the mode values, with deterministic
  lexicographic tie-breaking, and each mode's reference column is phase
  fixed so its largest-magnitude entry is real and positive.

Estimators follow the fit/attributes pattern: hyper-parameters in
``__init__``, data in ``fit``, trailing-underscore results.
"""

import warnings

import numpy as np
import scipy.linalg
from sklearn.base import BaseEstimator

from ._validation import as_matrix, check_same_rows
from .analytic import hilbert_analytic
from .data import DataMatrix, Datacube, center_columns, ensure_centered
from .exceptions import NotCenteredError, SingularMatrixError
from .kernels import (
    KernelMatrix,
    center_kernel,
    gamma_from_sigma,
    gram,
    median_pairwise_distance,
    rbf,
)
from .rotation import promax, varimax

__all__ = [
    "cross_cov",
    "MCA",
    "CCA",
    "DualCCA",
    "KernelCCA",
    "KernelPCA",
    "RockPCA",
]


def cross_cov(a, b=None):
    """Cross-covariance matrix C_ab = (1/(n-1)) a_c^H b_c.

    Inputs are centered first; a warning is emitted when centering was
    still needed (pass pre-centered data to avoid it).  With ``b=None``
    computes the auto-covariance, which is Hermitian PSD.

    Returns an ndarray of shape (d_a, d_b).
    """
    av = as_matrix(a, "a")
    ac = ensure_centered(a if isinstance(a, DataMatrix) else av, "a")
    if b is None:
        bc = ac
    else:
        bv = as_matrix(b, "b")
        check_same_rows(av, bv)
        bc = ensure_centered(b if isinstance(b, DataMatrix) else bv, "b")
    return ac.conj().T @ bc / (ac.shape[0] - 1)


def _phase_fix(matrix):
    """Rotate each column's phase so its largest-|.| entry is real positive.

    Returns (fixed, phases) with fixed = matrix * phases[None, :].
    """
    out = np.array(matrix, copy=True)
    is_complex = out.dtype.kind == "c"
    phases = np.ones(out.shape[1], dtype=out.dtype)
    for j in range(out.shape[1]):
        col = out[:, j]
        mags = np.abs(col)
        i = int(np.argmax(mags))
        if mags[i] == 0.0:
            continue
        ph = np.conj(col[i]) / mags[i] if is_complex else np.sign(col[i])
        out[:, j] = col * ph
        phases[j] = ph
    return out, phases


def _column_key(col):
    if np.iscomplexobj(col):
        return tuple(np.round(col.real, 10)) + tuple(np.round(col.imag, 10))
    return tuple(np.round(col, 10))


def _canonical_order(values, key_matrix):
    """Descending stable order with lexicographic tie-breaking on columns."""
    order = list(np.argsort(-np.asarray(values), kind="stable"))
    i = 0
    while i < len(order):
        j = i + 1
        ref = values[order[i]]
        while j < len(order) and abs(ref - values[order[j]]) <= 1e-12 * max(1.0, abs(ref)):
            j += 1
        if j - i > 1:
            order[i:j] = sorted(order[i:j], key=lambda c: _column_key(key_matrix[:, c]))
        i = j
    return np.asarray(order, dtype=int)


def _inv_sqrt_psd(c, ridge, what):
    """Hermitian inverse square root of (c + ridge*I) via eigendecomposition."""
    w, v = scipy.linalg.eigh(c)
    w = w + ridge
    top = max(float(w[-1]), 0.0)
    if w[0] <= top * 1e-13 or top == 0.0:
        raise SingularMatrixError(
            f"{what} is rank deficient; supply eps > 0 to regularize"
        )
    return (v / np.sqrt(w)[None, :]) @ v.conj().T


def _check_centered_kernel(k, name):
    """Return the ndarray of a kernel that must already be centered."""
    if isinstance(k, KernelMatrix):
        values = k.values
        if k.centered:
            return values
    else:
        values = np.asarray(k)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError(f"{name} must be a square kernel matrix")
    fro = np.linalg.norm(values)
    rows = np.abs(values.sum(axis=1)).max()
    if rows > 1e-8 * max(fro, np.finfo(float).tiny):
        raise NotCenteredError(
            f"{name} is not centered; apply center_kernel first "
            "(centering is a separate, visible step)"
        )
    return values


def _psd_eigh_desc(values, name):
    """Hermitian eigendecomposition, descending, tiny negatives clipped."""
    w, v = scipy.linalg.eigh(values)
    w, v = w[::-1].copy(), v[:, ::-1].copy()
    top = max(float(w[0]), 0.0)
    if w[-1] < -1e-8 * max(top, 1e-300):
        raise ValueError(f"{name} is not positive semi-definite "
                         f"(min eigenvalue {w[-1]:.3e})")
    np.maximum(w, 0.0, out=w)
    return w, v


def _unit_variance_columns(t, scale):
    """Normalize columns to unit variance ||t_j||^2 / scale = 1; returns factors."""
    norms = np.sqrt(np.einsum("ij,ij->j", t, t.conj()).real / scale)
    safe = np.where(norms > 0.0, norms, 1.0)
    return t / safe[None, :], safe


def _dual_modes(ka, kb, eps, scale):
    """Shared solver for Gram/kernel-space canonical correlation.

    Solves the regularized product eigenproblem
    (K_a K_a + n*eps*I)^-1 K_a K_b (K_b K_b + n*eps*I)^-1 K_b K_a through
    its Hermitian form: with the filter F_x = U_x diag(w/sqrt(w^2+n*eps))
    U_x^H the singular values of F_a F_b are the regularized canonical
    correlations and the singular vectors give the dual coefficients.

    Returns dict with dual coefficients, temporal components (unit
    variance), achieved correlations, and the regularized (eigenvalue
    route) correlations.
    """
    if eps <= 0.0:
        raise SingularMatrixError(
            "the squared Gram/kernel matrix is singular for centered data; "
            "eps > 0 is required"
        )
    n = ka.shape[0]
    wa, ua = _psd_eigh_desc(ka, "first kernel")
    wb, ub = _psd_eigh_desc(kb, "second kernel")
    fa = wa / np.sqrt(wa**2 + n * eps)
    fb = wb / np.sqrt(wb**2 + n * eps)
    m = (fa[:, None] * (ua.conj().T @ ub)) * fb[None, :]
    pm, s, qmh = np.linalg.svd(m)
    qm = qmh.conj().T

    coef_a = (ua / np.sqrt(wa**2 + n * eps)[None, :]) @ pm
    coef_b = (ub / np.sqrt(wb**2 + n * eps)[None, :]) @ qm
    ta = ka @ coef_a
    tb = kb @ coef_b
    ta, norm_a = _unit_variance_columns(ta, scale)
    tb, norm_b = _unit_variance_columns(tb, scale)
    coef_a = coef_a / norm_a[None, :]
    coef_b = coef_b / norm_b[None, :]
    achieved = np.abs(np.einsum("ij,ij->j", ta.conj(), tb)) / scale
    # beyond the filtered rank of either side K @ coef is numerical noise;
    # normalizing it to unit variance would turn garbage directions into
    # spuriously large correlations, so those modes are reported as zero
    achieved[(norm_a < 1e-8) | (norm_b < 1e-8)] = 0.0
    return {
        "coef_a": coef_a, "coef_b": coef_b,
        "temporal_a": ta, "temporal_b": tb,
        "achieved": achieved, "regularized": np.clip(s, 0.0, None),
    }


def _finalize_paired(est, values, frac, la, lb, ta, tb):
    """Order, phase-fix, truncate, and store a paired mode set."""
    p = est.n_components_
    order = _canonical_order(values, la)[:p]
    la, pa = _phase_fix(la[:, order])
    lb, pb = _phase_fix(lb[:, order])
    est.values_ = np.asarray(values)[order]
    est.explained_fraction_ = np.asarray(frac)[order]
    est.loadings_a_ = la
    est.loadings_b_ = lb
    est.temporal_a_ = ta[:, order] * pa[None, :]
    est.temporal_b_ = tb[:, order] * pb[None, :]
    return est


class MCA(BaseEstimator):
    """Maximum covariance analysis: SVD of the cross-covariance matrix.

    Finds paired direction sets maximizing covariance between two
    datasets observed on the same n samples.  Mode values are the
    singular values of C_ab; explained fractions are squared singular
    values over the total squared Frobenius norm of C_ab.

    Parameters
    ----------
    n_components : int or None
        Number of modes to keep; None keeps min(d_a, d_b, n-1).

    Attributes
    ----------
    values_ : ndarray (p,)
        Singular values, descending.
    explained_fraction_ : ndarray (p,)
    loadings_a_, loadings_b_ : ndarray (d_a, p), (d_b, p)
        Orthonormal singular-vector columns, phase fixed.
    temporal_a_, temporal_b_ : ndarray (n, p)
        Projections of the centered data onto the loadings.

    With identical inputs (a is b) the singular values equal the
    eigenvalues of the auto-covariance, reducing to ordinary PCA of C_aa.
    """

    def __init__(self, n_components=None):
        self.n_components = n_components

    def fit(self, a, b):
        av = as_matrix(a, "a")
        bv = as_matrix(b, "b")
        check_same_rows(av, bv, "a", "b")
        n = av.shape[0]
        ac = ensure_centered(a if isinstance(a, DataMatrix) else av, "a")
        bc = ensure_centered(b if isinstance(b, DataMatrix) else bv, "b")
        rank_cap = min(av.shape[1], bv.shape[1], n - 1)
        p = rank_cap if self.n_components is None else int(self.n_components)
        if not 1 <= p <= rank_cap:
            raise ValueError(
                f"n_components must be in [1, {rank_cap}] "
                f"(min of d_a={av.shape[1]}, d_b={bv.shape[1]}, n-1={n - 1}), got {p}"
            )
        self.n_components_ = p
        c = ac.conj().T @ bc / (n - 1)
        u, s, vh = np.linalg.svd(c, full_matrices=False)
        v = vh.conj().T
        total = float(np.sum(s**2))
        frac = s**2 / total if total > 0 else np.zeros_like(s)
        self.mean_a_ = av.mean(axis=0)
        self.mean_b_ = bv.mean(axis=0)
        _finalize_paired(self, s, frac, u, v, ac @ u, bc @ v)
        return self

    def transform(self, a, b=None):
        """Project new data onto the fitted loadings (training means removed)."""
        ta = (as_matrix(a, "a") - self.mean_a_) @ self.loadings_a_
        if b is None:
            return ta
        return ta, (as_matrix(b, "b") - self.mean_b_) @ self.loadings_b_


class CCA(BaseEstimator):
    """Canonical correlation analysis in the variable (primal) space.

    Whitens both covariance blocks and takes the SVD of the whitened
    cross-covariance; canonical correlations are reported as the achieved
    sample correlation between the paired unit-variance temporal
    components.  On one-dimensional inputs the single value equals
    |Pearson r| exactly.

    Parameters
    ----------
    n_components : int or None
        Modes kept; None keeps min(d_a, d_b, n-1).
    eps : float, default 1e-6
        Ridge added to each covariance diagonal, scaled by the mean
        diagonal of the respective block.  eps=0 requires full-rank data
        (raises SingularMatrixError otherwise).

    Attributes
    ----------
    values_ : ndarray (p,)
        Canonical correlations in [0, 1], descending.
    explained_fraction_ : ndarray (p,)
        rho^2 over the summed rho^2 of the full spectrum.
    loadings_a_, loadings_b_ : ndarray
        Canonical direction columns scaled for unit-variance projections.
    temporal_a_, temporal_b_ : ndarray (n, p)
        Unit-variance canonical components.
    """

    def __init__(self, n_components=None, eps=1e-6):
        self.n_components = n_components
        self.eps = eps

    def fit(self, a, b):
        av = as_matrix(a, "a")
        bv = as_matrix(b, "b")
        check_same_rows(av, bv, "a", "b")
        n = av.shape[0]
        if self.eps < 0:
            raise ValueError(f"eps must be non-negative, got {self.eps}")
        ac = ensure_centered(a if isinstance(a, DataMatrix) else av, "a")
        bc = ensure_centered(b if isinstance(b, DataMatrix) else bv, "b")
        cap = min(av.shape[1], bv.shape[1])
        p = cap if self.n_components is None else int(self.n_components)
        if not 1 <= p <= cap:
            raise ValueError(f"n_components must be in [1, {cap}] "
                             f"(min of d_a and d_b), got {p}")
        self.n_components_ = p

        scale = n - 1
        caa = ac.conj().T @ ac / scale
        cbb = bc.conj().T @ bc / scale
        cab = ac.conj().T @ bc / scale
        ridge_a = self.eps * float(np.mean(np.diag(caa).real))
        ridge_b = self.eps * float(np.mean(np.diag(cbb).real))
        wa = _inv_sqrt_psd(caa, ridge_a, "covariance of a")
        wb = _inv_sqrt_psd(cbb, ridge_b, "covariance of b")
        u, s, vh = np.linalg.svd(wa @ cab @ wb, full_matrices=False)
        ua = wa @ u
        ub = wb @ vh.conj().T

        ta, norm_a = _unit_variance_columns(ac @ ua, scale)
        tb, norm_b = _unit_variance_columns(bc @ ub, scale)
        ua = ua / norm_a[None, :]
        ub = ub / norm_b[None, :]
        rho = np.abs(np.einsum("ij,ij->j", ta.conj(), tb)) / scale
        total = float(np.sum(rho**2))
        frac = rho**2 / total if total > 0 else np.zeros_like(rho)
        self.mean_a_ = av.mean(axis=0)
        self.mean_b_ = bv.mean(axis=0)
        _finalize_paired(self, rho, frac, ua, ub, ta, tb)
        return self

    def transform(self, a, b=None):
        """Project new data onto the fitted canonical directions."""
        ta = (as_matrix(a, "a") - self.mean_a_) @ self.loadings_a_
        if b is None:
            return ta
        return ta, (as_matrix(b, "b") - self.mean_b_) @ self.loadings_b_


class DualCCA(BaseEstimator):
    """Canonical correlation analysis solved in the sample (dual) space.

    Forms the n-by-n Gram matrices of the centered datasets and solves the
    regularized product eigenproblem; never builds a d-by-d matrix, so it
    handles d >> n.  Equivalent to :class:`CCA` on full-rank data with
    matching small eps.

    Parameters
    ----------
    n_components : int or None
    eps : float, default 1e-6
        Ridge scale for the squared-Gram inversions (ridge is n*eps).
        Must be positive: the squared Gram of centered data is singular.

    Attributes
    ----------
    values_, explained_fraction_, temporal_a_, temporal_b_ : as in CCA.
    loadings_a_, loadings_b_ : ndarray (n, p)
        Dual coefficient columns; temporal components are Gram @ coef.
    primal_loadings_a_, primal_loadings_b_ : ndarray (d, p)
        Data-space directions recovered as centered_data^H @ coef.
    """

    def __init__(self, n_components=None, eps=1e-6):
        self.n_components = n_components
        self.eps = eps

    def fit(self, a, b):
        av = as_matrix(a, "a")
        bv = as_matrix(b, "b")
        check_same_rows(av, bv, "a", "b")
        n = av.shape[0]
        ac = ensure_centered(a if isinstance(a, DataMatrix) else av, "a")
        bc = ensure_centered(b if isinstance(b, DataMatrix) else bv, "b")
        cap = min(av.shape[1], bv.shape[1], n)
        p = cap if self.n_components is None else int(self.n_components)
        if not 1 <= p <= cap:
            raise ValueError(f"n_components must be in [1, {cap}] "
                             f"(min of d_a, d_b and n), got {p}")
        self.n_components_ = p

        ga = ac @ ac.conj().T
        gb = bc @ bc.conj().T
        modes = _dual_modes(ga, gb, self.eps, n - 1)
        rho = modes["achieved"]
        total = float(np.sum(rho**2))
        frac = rho**2 / total if total > 0 else np.zeros_like(rho)
        _finalize_paired(self, rho, frac, modes["coef_a"], modes["coef_b"],
                         modes["temporal_a"], modes["temporal_b"])
        self.primal_loadings_a_ = ac.conj().T @ self.loadings_a_
        self.primal_loadings_b_ = bc.conj().T @ self.loadings_b_
        return self


class KernelCCA(BaseEstimator):
    """Canonical correlation between two precomputed centered kernels.

    With linear kernels of centered data this reproduces :class:`DualCCA`
    exactly; with RBF kernels it measures nonlinear association.  Inputs
    must already be centered (KernelMatrix.centered, or row sums below
    1e-8 of the Frobenius norm) -- centering is deliberately a separate
    step, and uncentered input raises NotCenteredError.

    Parameters
    ----------
    n_components : int or None
        Modes kept; None keeps n-1.  Must be <= n.
    eps : float, default 1e-3
        Ridge scale for the squared-kernel inversions (ridge is n*eps).

    Attributes
    ----------
    values_ : ndarray (p,)
        Achieved correlations of the paired unit-variance temporal
        components, in [0, 1], descending.
    regularized_values_ : ndarray (p,)
        Correlations from the regularized eigenvalue route (deflated by
        eps); this is the quantity dependence statistics use.
    loadings_a_, loadings_b_ : ndarray (n, p)
        Dual coefficients; temporal components are K @ coef.
    temporal_a_, temporal_b_ : ndarray (n, p)
    """

    def __init__(self, n_components=None, eps=1e-3):
        self.n_components = n_components
        self.eps = eps

    def fit(self, ka, kb):
        va = _check_centered_kernel(ka, "ka")
        vb = _check_centered_kernel(kb, "kb")
        if va.shape != vb.shape:
            raise ValueError(f"kernel shapes differ: {va.shape} vs {vb.shape}")
        n = va.shape[0]
        p = (n - 1) if self.n_components is None else int(self.n_components)
        if not 1 <= p <= n:
            raise ValueError(f"n_components must be in [1, {n}], got {p}")
        self.n_components_ = p
        modes = _dual_modes(va, vb, self.eps, n - 1)
        rho = modes["achieved"]
        total = float(np.sum(rho**2))
        frac = rho**2 / total if total > 0 else np.zeros_like(rho)
        order = _canonical_order(rho, modes["coef_a"])[:p]
        self.regularized_values_ = modes["regularized"][order]
        _finalize_paired(self, rho, frac, modes["coef_a"], modes["coef_b"],
                         modes["temporal_a"], modes["temporal_b"])
        return self


class KernelPCA(BaseEstimator):
    """Eigendecomposition of a centered kernel matrix.

    Temporal components are the unit-norm eigenvectors; dual coefficients
    are scaled so that K @ coef reproduces them.  Explained fractions are
    eigenvalue over kernel trace.  A linear kernel of centered data gives
    eigenvalues equal to (n-1) times the PCA eigenvalues of the
    covariance matrix.

    Parameters
    ----------
    n_components : int or None
        Modes kept; None keeps all n.  Must be <= n.
    """

    def __init__(self, n_components=None):
        self.n_components = n_components

    def fit(self, k):
        values = _check_centered_kernel(k, "k")
        n = values.shape[0]
        p = n if self.n_components is None else int(self.n_components)
        if not 1 <= p <= n:
            raise ValueError(f"n_components must be in [1, {n}], got {p}")
        self.n_components_ = p
        w, v = _psd_eigh_desc(values, "kernel")
        trace = float(np.trace(values).real)
        order = _canonical_order(w, v)[:p]
        w = w[order]
        v, _ = _phase_fix(v[:, order])
        self.values_ = w
        self.explained_fraction_ = w / trace if trace > 0 else np.zeros_like(w)
        self.temporal_ = v
        floor = max(float(w[0]), 0.0) * 1e-14 + np.finfo(float).tiny
        self.coefficients_ = v / np.maximum(w, floor)[None, :]
        return self


class RockPCA(BaseEstimator):
    """Complex kernel decomposition of a real space-time field.

    Pipeline, in fixed order: center columns -> per-column analytic
    signal -> kernel on the complex rows (linear or RBF) -> kernel
    centering -> kernel PCA -> unitary/oblique rotation of the retained
    variance-scaled temporal components -> spatial amplitude and phase
    maps by projecting the analytic data onto each component.

    The rotation matrix is found by maximizing the simple-structure
    criterion of the spatial covariation maps (rotation_target
    'spatial', the default) and applied to the temporal components; maps
    are then recomputed from the rotated components.  Spatial structure
    is the meaningful notion of simplicity here: an oscillatory mode has
    near-constant temporal modulus, and making temporal moduli spiky
    actively mixes clean oscillators into beating pairs.

    The complex temporal components carry instantaneous phase, so a
    propagating oscillation appears as a single mode whose spatial phase
    map is affine in the cell index with slope equal to the planted
    phase gradient.

    Parameters
    ----------
    n_components : int, default 2
        Temporal components retained for rotation and maps.
    kernel : {'linear', 'rbf'}
    sigma : 'median' or float
        RBF length scale; 'median' uses the median pairwise distance of
        the analytic rows.  gamma = 1/(2 sigma^2).
    gamma : float or None
        Direct RBF width; overrides sigma when given.
    rotate : {'varimax', 'promax', 'none'}
    promax_power : int, default 4
    rotation_target : {'spatial', 'temporal'}, default 'spatial'
        Matrix whose simple structure the rotation criterion maximizes:
        the scaled spatial projections or the temporal components.  The
        conjugate rotation is applied to the other side either way,
        keeping the two views consistent.
    rotation_tol, rotation_max_iter : rotation stopping controls.

    Attributes
    ----------
    values_ : ndarray (p,)
        Component variances (rotated column energies), descending.
    explained_fraction_ : ndarray (p,)
        values_ / trace of the centered kernel.
    eigenvalues_ : ndarray (n,)
        Unrotated kernel spectrum.
    temporal_ : ndarray (n, p) complex, unit-norm columns.
    spatial_ : ndarray (d, p) complex projection maps.
    amplitude_ : ndarray (d, p)
        |spatial_| with each column normalized to maximum 1.
    phase_ : ndarray (d, p)
        arg(spatial_) in (-pi, pi].
    rotation_ : RotationResult or None
    gamma_, sigma_ : resolved RBF parameters (None for linear).
    """

    def __init__(self, n_components=2, kernel="linear", sigma="median", gamma=None,
                 rotate="varimax", promax_power=4, rotation_target="spatial",
                 rotation_tol=1e-10, rotation_max_iter=200):
        self.n_components = n_components
        self.kernel = kernel
        self.sigma = sigma
        self.gamma = gamma
        self.rotate = rotate
        self.promax_power = promax_power
        self.rotation_target = rotation_target
        self.rotation_tol = rotation_tol
        self.rotation_max_iter = rotation_max_iter

    def fit(self, cube):
        if isinstance(cube, Datacube):
            m = cube.to_matrix()
        elif isinstance(cube, DataMatrix):
            m = cube
        else:
            m = DataMatrix(as_matrix(cube, "cube", min_rows=4))
        if m.is_complex:
            raise TypeError("input must be a real field; the pipeline builds "
                            "the analytic signal itself")
        if self.kernel not in ("linear", "rbf"):
            raise ValueError(f"kernel must be 'linear' or 'rbf', got {self.kernel!r}")
        if self.rotate not in ("varimax", "promax", "none"):
            raise ValueError(f"rotate must be varimax/promax/none, got {self.rotate!r}")
        if self.rotation_target not in ("spatial", "temporal"):
            raise ValueError(f"rotation_target must be 'spatial' or 'temporal', "
                             f"got {self.rotation_target!r}")

        mc = center_columns(m)
        z = hilbert_analytic(mc)
        n = z.shape[0]
        p = int(self.n_components)
        if not 1 <= p <= n:
            raise ValueError(f"n_components must be in [1, {n}], got {p}")
        self.n_components_ = p

        self.gamma_ = self.sigma_ = None
        if self.kernel == "linear":
            k = gram(DataMatrix(z, centered=True))
        else:
            if self.gamma is not None:
                self.gamma_ = float(self.gamma)
                self.sigma_ = float(np.sqrt(1.0 / (2.0 * self.gamma_)))
            else:
                sig = self.sigma
                self.sigma_ = (median_pairwise_distance(z) if sig == "median"
                               else float(sig))
                self.gamma_ = gamma_from_sigma(self.sigma_)
            k = rbf(z, self.gamma_)
        k = center_kernel(k)

        w, v = _psd_eigh_desc(k.values, "kernel")
        trace = float(np.trace(k.values).real)
        self.eigenvalues_ = w
        scores = v[:, :p].astype(np.complex128) * np.sqrt(w[:p])[None, :]

        self.rotation_ = None
        if self.rotate != "none" and p > 1:
            spatial_target = self.rotation_target == "spatial"
            target = z.T @ np.conj(scores) if spatial_target else scores
            if self.rotate == "varimax":
                res = varimax(target, tol=self.rotation_tol,
                              max_iter=self.rotation_max_iter)
            else:
                res = promax(target, power=self.promax_power,
                             tol=self.rotation_tol,
                             max_iter=self.rotation_max_iter)
            self.rotation_ = res
            # Rotating the maps by R is the same as rotating the scores by
            # conj(R), since map_j = Z^T conj(score_j).
            scores = scores @ (np.conj(res.rotation) if spatial_target
                               else res.rotation)

        energy = np.einsum("ij,ij->j", scores, scores.conj()).real
        order = _canonical_order(energy, scores)
        scores = scores[:, order]
        energy = energy[order]
        spatial = z.T @ np.conj(scores)

        spatial, phases = _phase_fix(spatial)
        scores = scores * np.conj(phases)[None, :]

        self.values_ = energy
        self.explained_fraction_ = energy / trace if trace > 0 else np.zeros_like(energy)
        norms = np.sqrt(np.einsum("ij,ij->j", scores, scores.conj()).real)
        self.temporal_ = scores / np.where(norms > 0, norms, 1.0)[None, :]
        self.scores_ = scores
        self.spatial_ = spatial
        amp = np.abs(spatial)
        peaks = amp.max(axis=0)
        self.amplitude_ = amp / np.where(peaks > 0, peaks, 1.0)[None, :]
        self.phase_ = np.angle(spatial)
        self.analytic_ = z
        return self
