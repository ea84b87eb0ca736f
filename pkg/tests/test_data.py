"""Container validation and file round-trips for the data layer."""

import json

import numpy as np
import pytest

from kmva.data import (
    DataMatrix,
    Datacube,
    center_columns,
    load_cube,
    load_matrix,
    load_matrix_csv,
    save_cube,
    save_matrix,
)
from kmva.exceptions import (
    DimensionMismatchError,
    MalformedHeaderError,
    NonFiniteDataError,
)


def rng(seed):
    return np.random.default_rng(np.random.SeedSequence(seed))


# ------------------------------------------------------------- DataMatrix


def test_matrix_promotes_1d_to_column():
    m = DataMatrix(np.arange(4.0))
    assert m.values.shape == (4, 1)
    assert m.n == 4 and m.d == 1
    assert not m.is_complex


def test_matrix_rejects_short_and_empty():
    with pytest.raises(DimensionMismatchError):
        DataMatrix(np.ones((1, 3)))
    with pytest.raises(DimensionMismatchError):
        DataMatrix(np.ones((5, 0)))


def test_matrix_rejects_nonfinite():
    bad = np.array([[1.0], [np.nan]])
    with pytest.raises(NonFiniteDataError):
        DataMatrix(bad)


def test_centered_flag_is_verified():
    x = rng(0).normal(size=(20, 3))
    with pytest.raises(ValueError):
        DataMatrix(x + 5.0, centered=True)
    DataMatrix(x - x.mean(axis=0), centered=True)


def test_center_columns_idempotent():
    x = rng(1).normal(size=(15, 4)) + 3.0
    c1 = center_columns(x)
    c2 = center_columns(c1)
    assert c1.centered and c2.centered
    assert c2 is c1
    assert np.max(np.abs(c1.values.mean(axis=0))) < 1e-12


# --------------------------------------------------------------- Datacube


def test_cube_shape_checks():
    values = rng(2).normal(size=(6, 4))
    grid = np.array([[i, j] for i in range(2) for j in range(2)], dtype=float)
    cube = Datacube(values=values, time=np.arange(6.0), grid=grid)
    assert cube.mask.all()
    with pytest.raises(DimensionMismatchError):
        Datacube(values=values, time=np.arange(5.0), grid=grid)
    with pytest.raises(DimensionMismatchError):
        Datacube(values=values, time=np.arange(6.0), grid=grid[:3])


def test_cube_mask_filters_cells():
    values = np.arange(12.0).reshape(3, 4)
    grid = np.array([[0, j] for j in range(4)], dtype=float)
    mask = np.array([True, False, True, False])
    cube = Datacube(values=values, time=np.arange(3.0), grid=grid, mask=mask)
    np.testing.assert_array_equal(cube.to_matrix().values, values[:, [0, 2]])
    with pytest.raises(ValueError):
        Datacube(values=values, time=np.arange(3.0), grid=grid,
                 mask=np.zeros(4, dtype=bool))


# ------------------------------------------------------------ round trips


@pytest.mark.parametrize("complex_", [False, True])
def test_matrix_roundtrip_bit_exact(tmp_path, complex_):
    x = rng(3).normal(size=(7, 5))
    if complex_:
        x = x + 1j * rng(4).normal(size=(7, 5))
    base = tmp_path / "m"
    save_matrix(x, base)
    back = load_matrix(base)
    assert back.dtype == (np.complex128 if complex_ else np.float64)
    np.testing.assert_array_equal(back, x)


def test_cube_roundtrip_and_deterministic_bytes(tmp_path):
    values = rng(5).normal(size=(8, 6))
    grid = np.array([[i, j] for i in range(2) for j in range(3)], dtype=float)
    mask = np.array([1, 1, 0, 1, 1, 1], dtype=bool)
    cube = Datacube(values=values, time=np.linspace(0, 1, 8), grid=grid, mask=mask)

    save_cube(cube, tmp_path / "c1")
    save_cube(cube, tmp_path / "c2")
    assert (tmp_path / "c1.json").read_bytes() == (tmp_path / "c2.json").read_bytes()
    assert (tmp_path / "c1.bin").read_bytes() == (tmp_path / "c2.bin").read_bytes()

    back = load_cube(tmp_path / "c1")
    np.testing.assert_array_equal(back.values, values)
    np.testing.assert_array_equal(back.time, cube.time)
    np.testing.assert_array_equal(back.grid, grid)
    np.testing.assert_array_equal(back.mask, mask)


def test_header_errors(tmp_path):
    base = tmp_path / "h"
    (tmp_path / "h.bin").write_bytes(np.zeros(2).tobytes())
    (tmp_path / "h.json").write_text('{"n": 2, "d": 1}\n')
    with pytest.raises(MalformedHeaderError, match="missing header keys"):
        load_matrix(base)
    (tmp_path / "h.json").write_text("not json at all\n")
    with pytest.raises(MalformedHeaderError, match="invalid JSON"):
        load_matrix(base)
    (tmp_path / "h.json").write_text('{"n": 0, "d": 1, "complex": false}\n')
    with pytest.raises(MalformedHeaderError, match="non-positive"):
        load_matrix(base)


def test_payload_size_and_finiteness(tmp_path):
    base = tmp_path / "p"
    header = {"n": 3, "d": 2, "complex": False}
    (tmp_path / "p.json").write_text(json.dumps(header) + "\n")
    (tmp_path / "p.bin").write_bytes(np.zeros(5).tobytes())
    with pytest.raises(DimensionMismatchError, match="bytes"):
        load_matrix(base)
    payload = np.zeros(6)
    payload[4] = np.inf
    (tmp_path / "p.bin").write_bytes(payload.tobytes())
    with pytest.raises(NonFiniteDataError):
        load_matrix(base)


# -------------------------------------------------------------------- CSV


def test_csv_reads_values(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("a,b\n1.5,2\n-3,4.25\n")
    m = load_matrix_csv(path)
    np.testing.assert_array_equal(m.values, [[1.5, 2.0], [-3.0, 4.25]])


def test_csv_errors(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("")
    with pytest.raises(MalformedHeaderError, match="empty"):
        load_matrix_csv(path)
    path.write_text("a,b\n")
    with pytest.raises(DimensionMismatchError, match="no data rows"):
        load_matrix_csv(path)
    path.write_text("a,b\n1,2\n3\n")
    with pytest.raises(DimensionMismatchError, match="ragged"):
        load_matrix_csv(path)
    path.write_text("a,b\n1,2\n3,oops\n")
    with pytest.raises(MalformedHeaderError, match=":3:"):
        load_matrix_csv(path)
