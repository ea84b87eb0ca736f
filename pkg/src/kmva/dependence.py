"""Dependence statistics between paired samples, with permutation nulls.

Kernel-level statistics (:func:`hsic`, :func:`coco`, :func:`kcca_stat`,
:func:`kgv`) accept kernel matrices and center them internally when they
are not already centered; centering is part of each statistic.  The
regularized-correlation statistics additionally rescale each centered
kernel to trace n so that the ridge eps acts on a scale-free spectrum;
in the wide-kernel limit an RBF statistic then matches its linear-kernel
counterpart on the same data.  hsic and coco are left unnormalized
(hsic's exact scaling law is part of its contract).

Data-level entry points (:func:`pearson_r`, :func:`cca_stat`,
:func:`mca_stat`, :func:`dependence_battery`, :func:`permutation_null`,
:func:`sigma_sweep`) center the inputs internally and build any kernels
with the median-pairwise-distance width per side.

Permutation nulls shuffle side y's sample order.  Kernel centering
commutes with simultaneous row/column permutation, so the engine centers
once and permutes the centered kernel; the spectral statistics are then
evaluated through truncated eigenbases, making each permutation far
cheaper than a fresh eigensolve.  Permutation i is drawn from a PCG64
generator seeded with SeedSequence(seed, spawn_key=(i,)), so every
statistic (and any parallel evaluation order) sees the identical
shuffle sequence.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ._validation import as_matrix, as_vector, check_same_rows
from .decomposition import _inv_sqrt_psd
from .kernels import (
    KernelMatrix,
    center_kernel,
    gamma_from_sigma,
    gram,
    median_pairwise_distance,
    rbf,
)

__all__ = [
    "STATISTICS",
    "pearson_r",
    "hsic",
    "coco",
    "kcca_stat",
    "kgv",
    "cca_stat",
    "mca_stat",
    "SigmaSweep",
    "sigma_sweep",
    "DependenceReport",
    "dependence_battery",
    "permutation_null",
]

STATISTICS = ("pearson", "mca", "cca", "hsic_lin", "hsic_rbf", "coco",
              "kcca", "kgv")


def _centered_values(k, name):
    """Centered kernel ndarray from a KernelMatrix or raw square array."""
    if isinstance(k, KernelMatrix):
        return k.values if k.centered else center_kernel(k).values
    values = np.asarray(k)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ValueError(f"{name} must be a square kernel matrix")
    return center_kernel(values).values


def _pair(ka, kb):
    a = _centered_values(ka, "ka")
    b = _centered_values(kb, "kb")
    if a.shape != b.shape:
        raise ValueError(f"kernel shapes differ: {a.shape} vs {b.shape}")
    if a.shape[0] < 4:
        raise ValueError(f"need at least 4 samples, got {a.shape[0]}")
    return a, b


def pearson_r(x, y):
    """Sample Pearson correlation of two 1-D series (complex allowed).

    Requires n >= 3 and non-zero variance on both sides.  Real input
    returns a float in [-1, 1]; complex input returns the complex
    correlation coefficient.
    """
    xv = as_vector(x, "x")
    yv = as_vector(y, "y")
    if xv.shape[0] != yv.shape[0]:
        raise ValueError(f"length mismatch: {xv.shape[0]} vs {yv.shape[0]}")
    if xv.shape[0] < 3:
        raise ValueError(f"need at least 3 samples, got {xv.shape[0]}")
    xc = xv - xv.mean()
    yc = yv - yv.mean()
    nx = np.linalg.norm(xc)
    ny = np.linalg.norm(yc)
    if nx == 0.0 or ny == 0.0:
        raise ValueError("zero variance: correlation is undefined")
    r = np.vdot(xc, yc) / (nx * ny)
    if xc.dtype.kind != "c" and yc.dtype.kind != "c":
        return float(np.clip(r.real, -1.0, 1.0))
    return complex(r)


def hsic(ka, kb):
    """Hilbert-Schmidt independence criterion, (1/n^2) tr(Ka H Kb H).

    Computed as a Frobenius inner product of the two centered kernels,
    which makes hsic(ka, kb) == hsic(kb, ka) exact, not just up to
    rounding.  The estimator is a squared operator norm, so the result is
    clipped at zero (tiny negatives can arise from rounding on nearly
    independent data).
    """
    a, b = _pair(ka, kb)
    n = a.shape[0]
    return max(float(np.vdot(a, b).real) / n**2, 0.0)


def coco(ka, kb):
    """Constrained covariance: (1/n) * largest singular value of Ka_c Kb_c."""
    a, b = _pair(ka, kb)
    n = a.shape[0]
    return float(scipy.linalg.svdvals(a @ b)[0]) / n


def _trace_normalized_eig(values, name):
    """Descending eigenpairs of a centered kernel rescaled to trace n."""
    w, v = scipy.linalg.eigh(values)
    w, v = w[::-1].copy(), v[:, ::-1].copy()
    top = max(float(w[0]), 0.0)
    if w[-1] < -1e-8 * max(top, 1e-300):
        raise ValueError(f"{name} is not positive semi-definite")
    np.maximum(w, 0.0, out=w)
    total = float(w.sum())
    if total <= 0.0:
        raise ValueError(f"{name} has zero trace; the data are constant")
    return w * (values.shape[0] / total), v


def _filtered_correlations(wa, ua, wb, ub, n, eps):
    fa = wa / np.sqrt(wa**2 + n * eps)
    fb = wb / np.sqrt(wb**2 + n * eps)
    m = (fa[:, None] * (ua.conj().T @ ub)) * fb[None, :]
    return np.clip(scipy.linalg.svdvals(m), 0.0, 1.0 - 1e-12)


def _reg_correlations(a, b, eps):
    """Regularized kernel canonical correlations, descending in [0, 1)."""
    if eps <= 0.0:
        raise ValueError(f"eps must be positive, got {eps}")
    wa, ua = _trace_normalized_eig(a, "ka")
    wb, ub = _trace_normalized_eig(b, "kb")
    return _filtered_correlations(wa, ua, wb, ub, a.shape[0], eps)


def kcca_stat(ka, kb, eps=1e-3):
    """Largest regularized kernel canonical correlation."""
    a, b = _pair(ka, kb)
    return float(_reg_correlations(a, b, eps)[0])


def kgv(ka, kb, eps=1e-3):
    """Kernel generalized variance score, -1/2 sum log(1 - rho_i^2).

    Zero for independent wide-band kernels, growing with dependence; on
    one-dimensional data with linear kernels it reduces to the Gaussian
    mutual information -1/2 log(1 - r^2) up to the eps deflation.
    """
    a, b = _pair(ka, kb)
    rho = _reg_correlations(a, b, eps)
    return float(-0.5 * np.sum(np.log1p(-(rho**2))))


def _center_data(x, name):
    v = as_matrix(x, name)
    return v - v.mean(axis=0)


def cca_stat(x, y, eps=1e-6):
    """Largest linear canonical correlation (whitened cross-covariance norm).

    The ridge is eps times the mean diagonal of each covariance block, as
    in the CCA solver.  Inputs are centered internally.
    """
    xc = _center_data(x, "x")
    yc = _center_data(y, "y")
    check_same_rows(xc, yc, "x", "y")
    n = xc.shape[0]
    caa = xc.conj().T @ xc / (n - 1)
    cbb = yc.conj().T @ yc / (n - 1)
    cab = xc.conj().T @ yc / (n - 1)
    wa = _inv_sqrt_psd(caa, eps * float(np.mean(np.diag(caa).real)), "covariance of x")
    wb = _inv_sqrt_psd(cbb, eps * float(np.mean(np.diag(cbb).real)), "covariance of y")
    return float(np.clip(scipy.linalg.svdvals(wa @ cab @ wb)[0], 0.0, 1.0))


def mca_stat(x, y):
    """Largest singular value of the cross-covariance (not scale-free)."""
    xc = _center_data(x, "x")
    yc = _center_data(y, "y")
    check_same_rows(xc, yc, "x", "y")
    return float(scipy.linalg.svdvals(xc.conj().T @ yc)[0] / (xc.shape[0] - 1))


@dataclass(frozen=True)
class SigmaSweep:
    """Kernel-width sweep of the regularized correlation statistics.

    One shared sigma per grid point is applied to both sides.  kgv_linear
    and kcca_linear are the linear-kernel values at the same eps; because
    the regularized statistics normalize every kernel to trace n, the RBF
    curves approach these constants as sigma grows.
    """

    sigmas: np.ndarray
    eps: float
    kgv: np.ndarray
    kcca: np.ndarray
    kgv_linear: float
    kcca_linear: float


def sigma_sweep(x, y, sigmas, eps=1e-3):
    """Evaluate kgv and kcca_stat over an ascending grid of RBF widths."""
    xc = _center_data(x, "x")
    yc = _center_data(y, "y")
    check_same_rows(xc, yc, "x", "y")
    grid = np.asarray(sigmas, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("sigmas must be a non-empty 1-D sequence")
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ValueError("sigmas must be positive and strictly ascending")

    ka_lin = center_kernel(gram(xc)).values
    kb_lin = center_kernel(gram(yc)).values
    rho_lin = _reg_correlations(ka_lin, kb_lin, eps)
    kgv_lin = float(-0.5 * np.sum(np.log1p(-(rho_lin**2))))
    kcca_lin = float(rho_lin[0])

    kgv_vals = np.empty(grid.shape)
    kcca_vals = np.empty(grid.shape)
    for i, sig in enumerate(grid):
        ka = center_kernel(rbf(xc, gamma_from_sigma(sig))).values
        kb = center_kernel(rbf(yc, gamma_from_sigma(sig))).values
        rho = _reg_correlations(ka, kb, eps)
        kcca_vals[i] = rho[0]
        kgv_vals[i] = -0.5 * np.sum(np.log1p(-(rho**2)))
    return SigmaSweep(sigmas=grid, eps=eps, kgv=kgv_vals, kcca=kcca_vals,
                      kgv_linear=kgv_lin, kcca_linear=kcca_lin)


def _truncated_eig(values, rel_cut, name):
    """Descending eigenpairs with eigenvalues below rel_cut*max dropped."""
    w, v = scipy.linalg.eigh(values)
    w, v = w[::-1], v[:, ::-1]
    top = max(float(w[0]), 0.0)
    if w[-1] < -1e-8 * max(top, 1e-300):
        raise ValueError(f"{name} is not positive semi-definite")
    trace = float(np.clip(w, 0.0, None).sum())
    if trace <= 0.0:
        raise ValueError(f"{name} has zero trace; the data are constant")
    keep = w > rel_cut * top
    return np.clip(w[keep], 0.0, None), np.ascontiguousarray(v[:, keep]), trace


def _perm_stream(seed, index):
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


class _Battery:
    """Shared evaluator for the full statistic set under row permutations.

    Everything permutation-independent is precomputed: centered data,
    whitened covariance blocks, centered kernels, and truncated kernel
    eigenbases.  A permutation of side y then reduces each spectral
    statistic to a small dense SVD via the cross basis product
    Ua^H (P Ub), and hsic to a Frobenius product with the index-permuted
    centered kernel.
    """

    def __init__(self, x, y, eps_linear=1e-6, eps_rbf=1e-3):
        xc = _center_data(x, "x")
        yc = _center_data(y, "y")
        check_same_rows(xc, yc, "x", "y")
        self.xc, self.yc = xc, yc
        self.n = n = xc.shape[0]
        if n < 4:
            raise ValueError(f"need at least 4 samples, got {n}")
        self.eps_linear = eps_linear
        self.eps_rbf = eps_rbf
        self.univariate = xc.shape[1] == 1 and yc.shape[1] == 1
        self.names = (("pearson",) if self.univariate else ()) + (
            "mca", "cca", "hsic_lin", "hsic_rbf", "coco", "kcca", "kgv")

        if self.univariate:
            self._xu = xc[:, 0] / np.linalg.norm(xc[:, 0])
        caa = xc.conj().T @ xc / (n - 1)
        cbb = yc.conj().T @ yc / (n - 1)
        self._wa = _inv_sqrt_psd(
            caa, eps_linear * float(np.mean(np.diag(caa).real)), "covariance of x")
        self._wb = _inv_sqrt_psd(
            cbb, eps_linear * float(np.mean(np.diag(cbb).real)), "covariance of y")

        self.sigma_x = median_pairwise_distance(xc)
        self.sigma_y = median_pairwise_distance(yc)
        self.gamma_x = gamma_from_sigma(self.sigma_x)
        self.gamma_y = gamma_from_sigma(self.sigma_y)
        self._ka_lin = center_kernel(gram(xc)).values
        self._kb_lin = center_kernel(gram(yc)).values
        self._ka_rbf = center_kernel(rbf(xc, self.gamma_x)).values
        self._kb_rbf = center_kernel(rbf(yc, self.gamma_y)).values

        wa, ua, tra = _truncated_eig(self._ka_rbf, 1e-14, "rbf kernel of x")
        wb, ub, trb = _truncated_eig(self._kb_rbf, 1e-14, "rbf kernel of y")
        self._coco_ua = ua * wa[None, :]
        self._coco_wb = wb
        self._coco_ub = ub
        sa = wa * (n / tra)
        sb = wb * (n / trb)
        fa = sa / np.sqrt(sa**2 + n * eps_rbf)
        fb = sb / np.sqrt(sb**2 + n * eps_rbf)
        ka_keep = fa > 1e-8 * fa[0]
        kb_keep = fb > 1e-8 * fb[0]
        self._fb = fb[kb_keep]
        self._ua_f = np.ascontiguousarray(ua[:, ka_keep]) * fa[ka_keep][None, :]
        self._ub_f = np.ascontiguousarray(ub[:, kb_keep])

    def evaluate(self, perm=None, only=None):
        """Statistic values for y-rows permuted by ``perm`` (None: observed).

        Under a permutation the pearson entry is |r|, the quantity the
        null distribution is built from.
        """
        names = self.names if only is None else tuple(
            s for s in self.names if s in only)
        n = self.n
        yc = self.yc if perm is None else self.yc[perm]
        out = {}
        if "pearson" in names:
            col = yc[:, 0]
            r = float(np.vdot(self._xu, col).real / np.linalg.norm(col))
            out["pearson"] = r if perm is None else abs(r)
        if "mca" in names or "cca" in names:
            cab = self.xc.conj().T @ yc / (n - 1)
            if "mca" in names:
                out["mca"] = float(scipy.linalg.svdvals(cab)[0])
            if "cca" in names:
                out["cca"] = float(np.clip(
                    scipy.linalg.svdvals(self._wa @ cab @ self._wb)[0], 0.0, 1.0))
        if "hsic_lin" in names:
            kb = self._kb_lin if perm is None else self._kb_lin[np.ix_(perm, perm)]
            out["hsic_lin"] = max(float(np.vdot(self._ka_lin, kb).real) / n**2, 0.0)
        if "hsic_rbf" in names:
            kb = self._kb_rbf if perm is None else self._kb_rbf[np.ix_(perm, perm)]
            out["hsic_rbf"] = max(float(np.vdot(self._ka_rbf, kb).real) / n**2, 0.0)
        if "coco" in names:
            ub = self._coco_ub if perm is None else self._coco_ub[perm]
            m = (self._coco_ua.conj().T @ ub) * self._coco_wb[None, :]
            out["coco"] = float(scipy.linalg.svdvals(m)[0]) / n
        if "kcca" in names or "kgv" in names:
            ub = self._ub_f if perm is None else self._ub_f[perm]
            m = (self._ua_f.conj().T @ ub) * self._fb[None, :]
            rho = np.clip(scipy.linalg.svdvals(m), 0.0, 1.0 - 1e-12)
            if "kcca" in names:
                out["kcca"] = float(rho[0])
            if "kgv" in names:
                out["kgv"] = float(-0.5 * np.sum(np.log1p(-(rho**2))))
        return out

    def null(self, n_perm, seed, only=None):
        names = self.names if only is None else tuple(
            s for s in self.names if s in only)
        null = {name: np.empty(n_perm) for name in names}
        for i in range(n_perm):
            perm = _perm_stream(seed, i).permutation(self.n)
            for name, value in self.evaluate(perm, only=names).items():
                null[name][i] = value
        return null


def _quantiles(null):
    q50, q95, q99 = np.quantile(null, [0.5, 0.95, 0.99])
    return {"q50": float(q50), "q95": float(q95), "q99": float(q99)}


@dataclass(frozen=True)
class DependenceReport:
    """One statistic's value, kernel width (when kernelized), and null.

    null_quantiles is None without permutations, else {q50, q95, q99}
    (ascending).  For the pearson entry the null is built from |r| while
    value keeps the sign.  sigma/gamma are (x side, y side) pairs for the
    RBF statistics and None for linear ones.
    """

    statistic: str
    value: float
    sigma: tuple | None = None
    gamma: tuple | None = None
    null_quantiles: dict | None = None
    n_permutations: int = 0


def dependence_battery(x, y, n_perm=0, seed=0, eps_linear=1e-6, eps_rbf=1e-3):
    """Run every dependence statistic on one paired sample.

    Returns {name: DependenceReport} over: pearson (univariate sides
    only), mca, cca, hsic_lin, and the RBF-kernel set hsic_rbf, coco,
    kcca, kgv at median-distance widths.  With n_perm > 0 every statistic
    also gets permutation null quantiles, all statistics sharing the same
    shuffle sequence.
    """
    battery = _Battery(x, y, eps_linear, eps_rbf)
    observed = battery.evaluate()
    null = battery.null(n_perm, seed) if n_perm > 0 else {}
    rbf_width = {"sigma": (battery.sigma_x, battery.sigma_y),
                 "gamma": (battery.gamma_x, battery.gamma_y)}
    widths = {"hsic_rbf": rbf_width, "coco": rbf_width,
              "kcca": rbf_width, "kgv": rbf_width}
    return {
        name: DependenceReport(
            statistic=name,
            value=observed[name],
            null_quantiles=_quantiles(null[name]) if name in null else None,
            n_permutations=n_perm,
            **widths.get(name, {}),
        )
        for name in battery.names
    }


def permutation_null(stat, x, y, n_perm, seed, eps_linear=1e-6, eps_rbf=1e-3):
    """Permutation null quantiles {q50, q95, q99} of one statistic.

    Shuffles y's row order n_perm times; permutation i comes from
    SeedSequence(seed, spawn_key=(i,)), so results match the
    corresponding entry of :func:`dependence_battery` exactly.
    """
    if n_perm < 1:
        raise ValueError(f"n_perm must be at least 1, got {n_perm}")
    battery = _Battery(x, y, eps_linear, eps_rbf)
    if stat not in battery.names:
        raise ValueError(f"unknown statistic {stat!r}; "
                         f"choose from {list(battery.names)}")
    return _quantiles(battery.null(n_perm, seed, only=(stat,))[stat])
