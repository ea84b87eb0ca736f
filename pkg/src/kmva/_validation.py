"""Input validation helpers shared by the estimators and functional API."""

import numpy as np

from .exceptions import DimensionMismatchError, NonFiniteDataError

__all__ = [
    "as_float_array",
    "as_matrix",
    "as_vector",
    "check_same_rows",
    "column_means_are_small",
]


def as_float_array(x, name="x"):
    """Coerce to a float64 or complex128 ndarray, rejecting non-finite entries."""
    arr = np.asarray(x)
    if arr.dtype.kind in "iub":
        arr = arr.astype(np.float64)
    elif arr.dtype.kind == "f":
        arr = arr.astype(np.float64, copy=False)
    elif arr.dtype.kind == "c":
        arr = arr.astype(np.complex128, copy=False)
    else:
        raise TypeError(f"{name} must be numeric, got dtype {arr.dtype}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteDataError(f"{name} contains non-finite entries")
    return arr


def as_matrix(x, name="x", min_rows=2, allow_complex=True):
    """Validate a 2-D sample matrix (rows = observations, columns = variables).

    1-D input is promoted to a single column.  Objects exposing a
    ``values`` ndarray attribute (DataMatrix) are unwrapped.
    """
    values = getattr(x, "values", x)
    arr = as_float_array(values, name)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise DimensionMismatchError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < min_rows:
        raise DimensionMismatchError(
            f"{name} needs at least {min_rows} rows, got {arr.shape[0]}"
        )
    if arr.shape[1] < 1:
        raise DimensionMismatchError(f"{name} needs at least one column")
    if not allow_complex and arr.dtype.kind == "c":
        raise TypeError(f"{name} must be real-valued")
    return arr


def as_vector(x, name="x", min_len=1):
    arr = as_float_array(x, name)
    arr = np.squeeze(arr)
    if arr.ndim == 0:
        arr = arr[None]
    if arr.ndim != 1:
        raise DimensionMismatchError(f"{name} must be 1-D, got shape {arr.shape}")
    if arr.size < min_len:
        raise DimensionMismatchError(f"{name} needs at least {min_len} entries")
    return arr


def check_same_rows(a, b, name_a="a", name_b="b"):
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatchError(
            f"{name_a} and {name_b} must have the same number of rows: "
            f"{a.shape[0]} != {b.shape[0]}"
        )


def column_means_are_small(values, rtol=1e-10):
    """True when each column mean magnitude is <= rtol * column norm."""
    means = values.mean(axis=0)
    norms = np.linalg.norm(values, axis=0)
    return bool(np.all(np.abs(means) <= rtol * norms + 1e-300))
