"""Gram/RBF kernel construction, centering, and regularized inversion."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ._validation import as_matrix
from .exceptions import DimensionMismatchError, NonFiniteDataError, SingularMatrixError

__all__ = [
    "KernelMatrix",
    "gram",
    "rbf",
    "center_kernel",
    "reg_inverse",
    "median_pairwise_distance",
    "gamma_from_sigma",
    "sigma_from_gamma",
]


@dataclass(frozen=True)
class KernelMatrix:
    """Square Hermitian kernel matrix with provenance metadata.

    Parameters
    ----------
    values : ndarray of shape (n, n)
        Hermitian (residual <= 1e-10 relative) and finite.  Positive
        semi-definiteness is a property of how the matrix was built and is
        checked by :meth:`validate_psd` rather than at construction (an
        eigendecomposition per constructor call would dominate runtimes).
    kind : {'linear', 'rbf'}
    gamma : float or None
        RBF width parameter; None for linear kernels.
    centered : bool
        True once the matrix has been through :func:`center_kernel` (or is
        centered by construction, e.g. the Gram matrix of centered data).
    """

    values: np.ndarray
    kind: str
    gamma: float = None
    centered: bool = False

    def __post_init__(self):
        arr = np.asarray(self.values)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionMismatchError(f"kernel must be square, got shape {arr.shape}")
        if arr.dtype.kind not in "fc":
            arr = arr.astype(np.float64)
        if not np.all(np.isfinite(arr)):
            raise NonFiniteDataError("kernel contains non-finite entries")
        scale = max(float(np.abs(arr).max()), np.finfo(float).tiny)
        if not np.allclose(arr, arr.conj().T, atol=1e-10 * scale, rtol=0):
            raise ValueError("kernel is not Hermitian within 1e-10 relative tolerance")
        if self.kind not in ("linear", "rbf"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        object.__setattr__(self, "values", arr)

    @property
    def n(self):
        return self.values.shape[0]

    def validate_psd(self, tol=1e-8):
        """Assert min eigenvalue >= -tol * max eigenvalue; returns eigenvalues."""
        w = np.linalg.eigvalsh(self.values)
        if w[0] < -tol * max(w[-1], 0.0) - 1e-300:
            raise ValueError(f"kernel is not PSD: min eigenvalue {w[0]:.3e}")
        return w


def _hermitize(values):
    return (values + values.conj().T) / 2


def gram(m):
    """Inner-product (linear) kernel of a sample matrix.

    values[i, j] = <row_i, row_j> with the inner product conjugate-linear
    in the second argument, so the diagonal holds squared row norms.  The
    Gram matrix of column-centered data is automatically double-centered
    (row and column sums vanish), and the result is flagged accordingly.
    """
    values = as_matrix(m, "m")
    k = _hermitize(values @ values.conj().T)
    centered = bool(getattr(m, "centered", False))
    return KernelMatrix(k, kind="linear", centered=centered)


def rbf(m, gamma):
    """Gaussian kernel exp(-gamma * ||x_i - x_j||^2) with unit diagonal.

    gamma must be positive.  Squared distances are clipped at zero and the
    diagonal is exact (distance zero), so diagonal entries are exactly 1.
    Complex rows use the Euclidean norm of the complex difference.
    """
    if not np.isscalar(gamma) or not np.isfinite(gamma) or gamma <= 0:
        raise ValueError(f"gamma must be a positive finite scalar, got {gamma!r}")
    values = as_matrix(m, "m")
    sq = np.einsum("ij,ij->i", values, values.conj()).real
    cross = (values @ values.conj().T).real
    d2 = sq[:, None] + sq[None, :] - 2.0 * cross
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    k = np.exp(-float(gamma) * d2)
    return KernelMatrix(_hermitize(k), kind="rbf", gamma=float(gamma))


def center_kernel(k):
    """Double-center a kernel: K -> H K H with H = I - (1/n) 1 1^T.

    Row and column sums of the result vanish (<= 1e-8 * ||K||_F in floating
    point); centering is idempotent.
    """
    if not isinstance(k, KernelMatrix):
        k = KernelMatrix(np.asarray(k), kind="linear")
    v = k.values
    row = v.mean(axis=1, keepdims=True)
    col = v.mean(axis=0, keepdims=True)
    total = v.mean()
    centered = _hermitize(v - row - col + total)
    return KernelMatrix(centered, kind=k.kind, gamma=k.gamma, centered=True)


def reg_inverse(k, eps):
    """Inverse of (K + n*eps*I) computed through a Cholesky factorization.

    Parameters
    ----------
    k : KernelMatrix or ndarray
        Hermitian PSD matrix.
    eps : float
        Non-negative ridge scale; the ridge added is n*eps.

    Returns
    -------
    ndarray
        The inverse; residual ||(K + n*eps*I) inv - I||_F <= 1e-8 * n for
        well-scaled input.

    Raises
    ------
    SingularMatrixError
        When the factorization fails (singular at eps=0, e.g. a centered
        kernel whose null space contains the constant vector); the message
        advises raising eps.
    """
    values = k.values if isinstance(k, KernelMatrix) else np.asarray(k)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise DimensionMismatchError(f"kernel must be square, got {values.shape}")
    if eps < 0:
        raise ValueError(f"eps must be non-negative, got {eps}")
    n = values.shape[0]
    a = values + (n * eps) * np.eye(n, dtype=values.dtype)
    try:
        factor = scipy.linalg.cho_factor(a, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise SingularMatrixError(
            "matrix is singular or indefinite; increase eps to regularize"
        ) from exc
    return scipy.linalg.cho_solve(factor, np.eye(n, dtype=values.dtype))


def median_pairwise_distance(m):
    """Median Euclidean distance over all off-diagonal sample pairs.

    The standard length-scale heuristic for RBF kernels.  Raises if the
    median is zero (degenerate, all points coincide).
    """
    values = as_matrix(m, "m")
    sq = np.einsum("ij,ij->i", values, values.conj()).real
    d2 = sq[:, None] + sq[None, :] - 2.0 * (values @ values.conj().T).real
    np.maximum(d2, 0.0, out=d2)
    iu = np.triu_indices(values.shape[0], k=1)
    med = float(np.median(np.sqrt(d2[iu])))
    if med <= 0.0:
        raise ValueError("median pairwise distance is zero; data is degenerate")
    return med


def gamma_from_sigma(sigma):
    """Length scale to RBF width: gamma = 1 / (2 sigma^2)."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    return 1.0 / (2.0 * float(sigma) ** 2)


def sigma_from_gamma(gamma):
    """Inverse of :func:`gamma_from_sigma`."""
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    return 1.0 / np.sqrt(2.0 * float(gamma))
