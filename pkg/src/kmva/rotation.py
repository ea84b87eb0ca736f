"""Orthogonal/unitary varimax and oblique promax rotation, real or complex.

The varimax objective used throughout is the raw (un-normalized) criterion
on squared moduli

    V(L) = sum_j [ mean_i |L_ij|^4 - (mean_i |L_ij|^2)^2 ],

i.e. the summed column variances of the squared loading moduli, which for
real input reduces to the classic criterion.  Maximization is by cyclic
pairwise sweeps.  For a column pair (a, b) and the unitary planar rotation

    R(theta, phi) = [[cos t, -sin t * e^{i phi}],
                     [sin t * e^{-i phi}, cos t]]

the pair's criterion contribution is const + Var_i(u_i)/2 with

    u_i = (|a_i|^2 - |b_i|^2) cos(2t) + 2 Re(e^{i phi} a_i conj(b_i)) sin(2t),

so for fixed phi the optimal angle has the closed form
4 t* = atan2(2 Cov(p, q), Var(p) - Var(q)) where p_i = |a_i|^2 - |b_i|^2
and q_i = 2 Re(e^{i phi} a_i conj(b_i)).  Real input needs no phase
(phi = 0, classic planar varimax); complex input maximizes over phi by a
coarse grid followed by golden-section refinement.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import as_matrix
from .exceptions import SingularMatrixError

__all__ = ["RotationResult", "varimax", "promax", "varimax_criterion"]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class RotationResult:
    """Outcome of a rotation.

    Attributes
    ----------
    rotated : ndarray of shape (n, p)
        Rotated loadings.
    rotation : ndarray of shape (p, p)
        Transform with ``rotated = loadings @ rotation``.  Unitary for
        varimax; invertible but oblique for promax.  With Kaiser row
        normalization the transform acts in the row-normalized space, so
        this identity holds only for ``kaiser=False`` (the default).
    criterion_trace : list of float
        Varimax criterion before the first sweep and after each sweep;
        non-decreasing.
    converged : bool
        False when the sweep limit was hit before the per-sweep criterion
        increase dropped below tol.
    power : int or None
        Promax target power; None for pure varimax.
    """

    rotated: np.ndarray
    rotation: np.ndarray
    criterion_trace: list = field(default_factory=list)
    converged: bool = True
    power: int = None


def varimax_criterion(loadings):
    """Raw varimax criterion: summed column variance of squared moduli."""
    sq = np.abs(np.asarray(loadings)) ** 2
    return float(np.sum(np.mean(sq**2, axis=0) - np.mean(sq, axis=0) ** 2))


def _golden_max(fun, lo, hi, tol=1e-12):
    """Golden-section maximization of a unimodal function on [lo, hi]."""
    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = fun(x1), fun(x2)
    while (b - a) > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = fun(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = fun(x1)
    return (a + b) / 2.0


def _pair_stats(p, q):
    """Optimal angle and criterion gain terms for u = p cos2t + q sin2t."""
    vp = p.var()
    vq = q.var()
    cov = ((p - p.mean()) * (q - q.mean())).mean()
    theta = 0.25 * math.atan2(2.0 * cov, vp - vq)
    best = 0.5 * (vp + vq) + 0.5 * math.hypot(vp - vq, 2.0 * cov)
    return theta, best, vp


def _best_pair_rotation(a, b, is_complex, tol):
    """Optimal planar rotation for one column pair.

    Returns (theta, phi, gain) with gain the increase of the full varimax
    criterion.  phi is 0 for real input.
    """
    x = np.abs(a) ** 2
    y = np.abs(b) ** 2
    p = x - y
    w = a * np.conj(b)

    if not is_complex:
        theta, best, vp = _pair_stats(p, 2.0 * w.real)
        return theta, 0.0, 0.5 * (best - vp)

    re_w, im_w = 2.0 * w.real, -2.0 * w.imag

    def value_at(phi):
        q = math.cos(phi) * re_w + math.sin(phi) * im_w
        _, best, _ = _pair_stats(p, q)
        return best

    # Coarse grid over one period of h(phi), then golden-section refine.
    grid = np.linspace(0.0, math.pi, 33)[:-1]
    vals = [value_at(g) for g in grid]
    k = int(np.argmax(vals))
    span = math.pi / 32.0
    phi = _golden_max(value_at, grid[k] - span, grid[k] + span, tol=tol)
    q = math.cos(phi) * re_w + math.sin(phi) * im_w
    theta, best, vp = _pair_stats(p, q)
    return theta, phi, 0.5 * (best - vp)


def varimax(loadings, tol=1e-10, max_iter=100, kaiser=False, phase_tol=1e-12):
    """Varimax rotation by pairwise planar sweeps.

    Parameters
    ----------
    loadings : array-like of shape (n, p)
        Real or complex loading matrix, p >= 1.
    tol : float
        Stop when the criterion increase over a full sweep falls below tol.
    max_iter : int
        Sweep limit; exceeding it returns ``converged=False`` (no raise).
    kaiser : bool, default False
        Normalize rows to unit length before rotating and restore after.
    phase_tol : float
        Golden-section interval tolerance for the complex phase search.

    Returns
    -------
    RotationResult
        ``rotation`` is unitary (orthogonal for real input: a real input
        matrix yields a real rotation matrix).
    """
    arr = as_matrix(loadings, "loadings", min_rows=1)
    n, p = arr.shape
    is_complex = arr.dtype.kind == "c" and bool(np.any(arr.imag))
    work = arr.astype(np.complex128 if is_complex else np.float64)
    if is_complex:
        rotation = np.eye(p, dtype=np.complex128)
    else:
        work = work.real.copy()
        rotation = np.eye(p)

    row_scale = None
    if kaiser:
        row_scale = np.sqrt(np.einsum("ij,ij->i", work, work.conj()).real)
        row_scale[row_scale == 0.0] = 1.0
        work = work / row_scale[:, None]

    trace = [varimax_criterion(work)]
    converged = False
    if p == 1:
        converged = True
        max_iter = 0

    for _ in range(max_iter):
        for i in range(p - 1):
            for j in range(i + 1, p):
                a, b = work[:, i], work[:, j]
                theta, phi, gain = _best_pair_rotation(a, b, is_complex, phase_tol)
                if gain <= 1e-13 * (1.0 + trace[-1]):
                    continue
                c, s = math.cos(theta), math.sin(theta)
                if is_complex:
                    g = np.array([[c, -s * np.exp(1j * phi)],
                                  [s * np.exp(-1j * phi), c]])
                else:
                    g = np.array([[c, -s], [s, c]])
                work[:, [i, j]] = work[:, [i, j]] @ g
                rotation[:, [i, j]] = rotation[:, [i, j]] @ g
        trace.append(varimax_criterion(work))
        if trace[-1] - trace[-2] < tol:
            converged = True
            break

    if kaiser:
        work = work * row_scale[:, None]
    return RotationResult(rotated=work, rotation=rotation,
                          criterion_trace=trace, converged=converged)


def promax(loadings, power=4, tol=1e-10, max_iter=100, kaiser=False):
    """Oblique promax rotation: varimax, powered target, Procrustes fit.

    The varimax-rotated loadings V are raised to a sign/phase-preserving
    power, T = V * |V|^(power-1), and the oblique transform is the
    least-squares solution of V L = T with columns normalized by
    sqrt(diag((L^H L)^-1)) (the textbook normalization, so power=1
    reproduces varimax exactly).

    Raises
    ------
    SingularMatrixError
        If the least-squares system or the normalization matrix is
        singular (collinear varimax columns).
    """
    if int(power) != power or power < 1:
        raise ValueError(f"power must be a positive integer, got {power!r}")
    power = int(power)
    pre = varimax(loadings, tol=tol, max_iter=max_iter, kaiser=kaiser)
    v = pre.rotated
    target = v * np.abs(v) ** (power - 1)

    gramian = v.conj().T @ v
    try:
        coef = np.linalg.solve(gramian, v.conj().T @ target)
        norm = np.linalg.inv(coef.conj().T @ coef)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError("promax least-squares system is singular") from exc
    diag = np.diag(norm).real
    if np.any(diag <= 0.0):
        raise SingularMatrixError("promax normalization is degenerate")
    coef = coef @ np.diag(np.sqrt(diag))

    rotation = pre.rotation @ coef
    return RotationResult(rotated=v @ coef, rotation=rotation,
                          criterion_trace=pre.criterion_trace,
                          converged=pre.converged, power=power)
