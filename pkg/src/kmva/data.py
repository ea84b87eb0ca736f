"""Sample matrices, gridded datacubes, and their on-disk formats.

A dataset is an ``(n, d)`` matrix of n observations (rows, usually time)
by d variables (columns, usually spatial cells).  Datacubes add the grid
bookkeeping (cell coordinates, land/valid mask, time axis) and flatten to
plain matrices for the numerical routines.

On disk a matrix or cube is a pair of files sharing a base name:

``<base>.json``
    Header with the dimensions and, for cubes, ``time``, ``grid`` and
    ``mask`` arrays.  Keys for cubes: ``n``, ``d``, ``complex``, ``mask``,
    ``grid``, ``time``; plain matrices omit the last three.
``<base>.bin``
    Row-major payload of little-endian IEEE-754 float64 values; complex
    data is stored as interleaved (real, imag) pairs per element.

The pairing is bit-exact: save followed by load reproduces the array to
the last bit.
"""

import csv
import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._validation import as_float_array, column_means_are_small
from .exceptions import (
    DimensionMismatchError,
    MalformedHeaderError,
    NonFiniteDataError,
)

__all__ = [
    "DataMatrix",
    "Datacube",
    "center_columns",
    "load_cube",
    "save_cube",
    "load_matrix",
    "save_matrix",
    "load_matrix_csv",
]


@dataclass(frozen=True)
class DataMatrix:
    """Validated (n, d) sample matrix with a centering flag.

    Parameters
    ----------
    values : ndarray of shape (n, d)
        float64 or complex128 observations; must be finite, n >= 2, d >= 1.
    centered : bool, default False
        Declares the columns as mean-free.  When True this is verified:
        each column mean magnitude must be <= 1e-10 times the column norm.
    """

    values: np.ndarray
    centered: bool = False

    def __post_init__(self):
        arr = as_float_array(self.values, "values")
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2:
            raise DimensionMismatchError(f"values must be 2-D, got shape {arr.shape}")
        if arr.shape[0] < 2:
            raise DimensionMismatchError("a DataMatrix needs n >= 2 rows")
        if arr.shape[1] < 1:
            raise DimensionMismatchError("a DataMatrix needs d >= 1 columns")
        object.__setattr__(self, "values", arr)
        if self.centered and not column_means_are_small(arr):
            raise ValueError("centered=True but column means are not negligible")

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def d(self):
        return self.values.shape[1]

    @property
    def is_complex(self):
        return self.values.dtype.kind == "c"


def center_columns(m):
    """Subtract the column means.

    Parameters
    ----------
    m : DataMatrix or array-like

    Returns
    -------
    DataMatrix
        Centered copy with ``centered=True``.  Idempotent: centering a
        centered matrix changes nothing beyond rounding.
    """
    if not isinstance(m, DataMatrix):
        m = DataMatrix(np.asarray(m))
    if m.centered:
        return m
    return DataMatrix(m.values - m.values.mean(axis=0, keepdims=True), centered=True)


@dataclass(frozen=True)
class Datacube:
    """Gridded time-by-cell dataset.

    Parameters
    ----------
    values : ndarray of shape (n, d)
        One row per time step, one column per grid cell (row-major cell
        order; the order of ``grid`` defines the flattening).
    time : ndarray of shape (n,)
        Time coordinate per row.
    grid : ndarray of shape (d, 2)
        (lat, lon) or abstract (row, col) coordinates per cell.
    mask : ndarray of shape (d,)
        Truthy entries mark valid cells; ``to_matrix`` keeps only those.
    """

    values: np.ndarray
    time: np.ndarray
    grid: np.ndarray
    mask: np.ndarray = field(default=None)

    def __post_init__(self):
        values = as_float_array(self.values, "values")
        if values.ndim != 2:
            raise DimensionMismatchError("cube values must be 2-D")
        n, d = values.shape
        time = as_float_array(self.time, "time").reshape(-1)
        grid = as_float_array(self.grid, "grid")
        mask = self.mask
        if mask is None:
            mask = np.ones(d, dtype=bool)
        mask = np.asarray(mask).astype(bool).reshape(-1)
        if time.shape[0] != n:
            raise DimensionMismatchError(f"time has {time.shape[0]} entries, expected n={n}")
        if grid.shape != (d, 2):
            raise DimensionMismatchError(f"grid must be (d, 2)=({d}, 2), got {grid.shape}")
        if mask.shape[0] != d:
            raise DimensionMismatchError(f"mask has {mask.shape[0]} entries, expected d={d}")
        if not mask.any():
            raise ValueError("mask excludes every cell")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "time", time)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "mask", mask)

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def d(self):
        return self.values.shape[1]

    @property
    def is_complex(self):
        return self.values.dtype.kind == "c"

    def to_matrix(self):
        """Flatten to a DataMatrix keeping only masked-in cells, in grid order."""
        return DataMatrix(self.values[:, self.mask])


def _write_payload(path, values):
    if values.dtype.kind == "c":
        payload = np.ascontiguousarray(values, dtype="<c16")
    else:
        payload = np.ascontiguousarray(values, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(payload.tobytes(order="C"))


def _read_payload(path, n, d, is_complex):
    with open(path, "rb") as fh:
        raw = fh.read()
    itemsize = 16 if is_complex else 8
    expected = n * d * itemsize
    if len(raw) != expected:
        raise DimensionMismatchError(
            f"payload {path} has {len(raw)} bytes, header implies {expected}"
        )
    dtype = "<c16" if is_complex else "<f8"
    values = np.frombuffer(raw, dtype=dtype).reshape(n, d)
    return values.astype(np.complex128 if is_complex else np.float64)


def save_cube(cube, base):
    """Write ``<base>.json`` + ``<base>.bin`` for a Datacube.

    Returns the pair of paths written.  Output is deterministic: fixed
    key order, floats serialized in shortest round-trip-exact form.
    """
    base = str(base)
    header = {
        "n": int(cube.n),
        "d": int(cube.d),
        "complex": bool(cube.is_complex),
        "mask": [int(v) for v in cube.mask],
        "grid": [[float(a), float(b)] for a, b in cube.grid],
        "time": [float(t) for t in cube.time],
    }
    json_path, bin_path = base + ".json", base + ".bin"
    with open(json_path, "w") as fh:
        json.dump(header, fh)
        fh.write("\n")
    _write_payload(bin_path, cube.values)
    return json_path, bin_path


def _load_header(base, required):
    path = str(base) + ".json"
    try:
        with open(path) as fh:
            header = json.load(fh)
    except json.JSONDecodeError as exc:
        raise MalformedHeaderError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(header, dict):
        raise MalformedHeaderError(f"{path}: header must be a JSON object")
    missing = [k for k in required if k not in header]
    if missing:
        raise MalformedHeaderError(f"{path}: missing header keys {missing}")
    try:
        n, d = int(header["n"]), int(header["d"])
    except (TypeError, ValueError) as exc:
        raise MalformedHeaderError(f"{path}: n and d must be integers") from exc
    if n < 1 or d < 1:
        raise MalformedHeaderError(f"{path}: non-positive dimensions n={n}, d={d}")
    return header, n, d


def load_cube(base):
    """Load a Datacube saved by :func:`save_cube`.

    Raises
    ------
    MalformedHeaderError
        Missing keys, bad JSON, or inconsistent header fields.
    DimensionMismatchError
        Payload byte count disagrees with the header.
    NonFiniteDataError
        Payload contains NaN or infinities.
    """
    header, n, d = _load_header(base, ("n", "d", "complex", "mask", "grid", "time"))
    mask = np.asarray(header["mask"])
    grid = np.asarray(header["grid"], dtype=float)
    time = np.asarray(header["time"], dtype=float)
    if mask.shape != (d,):
        raise MalformedHeaderError(f"mask length {mask.shape} != d={d}")
    if grid.ndim != 2 or grid.shape != (d, 2):
        raise MalformedHeaderError(f"grid shape {grid.shape} != ({d}, 2)")
    if time.shape != (n,):
        raise MalformedHeaderError(f"time length {time.shape} != n={n}")
    values = _read_payload(str(base) + ".bin", n, d, bool(header["complex"]))
    if not np.all(np.isfinite(values)):
        raise NonFiniteDataError(f"{base}.bin contains non-finite values")
    return Datacube(values=values, time=time, grid=grid, mask=mask.astype(bool))


def save_matrix(values, base):
    """Write a bare matrix as a ``<base>.json`` + ``<base>.bin`` pair."""
    arr = as_float_array(getattr(values, "values", values), "values")
    if arr.ndim == 1:
        arr = arr[:, None]
    header = {"n": int(arr.shape[0]), "d": int(arr.shape[1]),
              "complex": bool(arr.dtype.kind == "c")}
    json_path, bin_path = str(base) + ".json", str(base) + ".bin"
    with open(json_path, "w") as fh:
        json.dump(header, fh)
        fh.write("\n")
    _write_payload(bin_path, arr)
    return json_path, bin_path


def load_matrix(base):
    """Load a matrix saved by :func:`save_matrix`; returns an ndarray."""
    header, n, d = _load_header(base, ("n", "d", "complex"))
    values = _read_payload(str(base) + ".bin", n, d, bool(header["complex"]))
    if not np.all(np.isfinite(values)):
        raise NonFiniteDataError(f"{base}.bin contains non-finite values")
    return values


def load_matrix_csv(path):
    """Read a time-by-space CSV (one header row) into a DataMatrix."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            next(reader)
        except StopIteration:
            raise MalformedHeaderError(f"{path}: empty CSV") from None
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise MalformedHeaderError(f"{path}:{lineno}: non-numeric cell") from exc
    if not rows:
        raise DimensionMismatchError(f"{path}: no data rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise DimensionMismatchError(f"{path}: ragged rows (widths {sorted(widths)})")
    values = np.asarray(rows, dtype=float)
    if not np.all(np.isfinite(values)):
        raise NonFiniteDataError(f"{path}: non-finite values")
    return DataMatrix(values)


def ensure_centered(values, what="input", warn=True):
    """Return centered values, warning when centering had to be applied.

    Accepts DataMatrix or ndarray; ndarray input is checked numerically.
    """
    if isinstance(values, DataMatrix):
        if values.centered:
            return values.values
        if warn:
            warnings.warn(f"{what} was not centered; centering now", stacklevel=3)
        return values.values - values.values.mean(axis=0, keepdims=True)
    arr = np.asarray(values)
    if column_means_are_small(arr):
        return arr
    if warn:
        warnings.warn(f"{what} was not centered; centering now", stacklevel=3)
    return arr - arr.mean(axis=0, keepdims=True)
