import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from allencahn.errors import DimensionError, ParameterError
from allencahn.grid import (
    GridSpec,
    cell_centers,
    dump_field,
    extended_coords,
    fill_ghosts,
    load_field,
    make_field,
)


def test_gridspec_invariants():
    g = GridSpec(bounds=((0, 2), (0, 1)), n=(400, 200))
    assert g.dim == 2 and g.h == pytest.approx(0.005)
    assert g.extended_shape == (402, 202)
    with pytest.raises(ParameterError):
        GridSpec(bounds=((0, 1), (0, 1)), n=(10, 20))
    with pytest.raises(ParameterError):
        GridSpec.box((2, 5))
    with pytest.raises(DimensionError):
        GridSpec.box((5,))


@pytest.mark.parametrize(
    "lo, n, expect_first, expect_last",
    [(0.0, 4, 0.125, 0.875), (0.0, 200, 0.0025, 0.9975), (-1.0, 100, -0.99, 0.99)],
)
def test_cell_centers(lo, n, expect_first, expect_last):
    g = GridSpec.box((n, n), lo, 1.0)
    xs = cell_centers(g)[0]
    assert xs[0] == pytest.approx(expect_first, abs=1e-15)
    assert xs[-1] == pytest.approx(expect_last, abs=1e-15)
    if n == 4:
        np.testing.assert_allclose(xs, [0.125, 0.375, 0.625, 0.875])


def test_extended_coords_offset():
    g = GridSpec.box((4, 4))
    xe = extended_coords(g)[0]
    assert xe[0] == pytest.approx(-0.125)
    np.testing.assert_allclose(xe[1:-1], cell_centers(g)[0])


@pytest.mark.parametrize("c", [0.0, 1.0])
def test_make_field_constant(c):
    g = GridSpec.box((3, 3))
    f = make_field(g, np.full((3, 3), c))
    assert f.values.shape == (5, 5)
    assert np.all(f.values == c)


def test_make_field_linear_replicates_columns():
    g = GridSpec.box((3, 3))
    x = cell_centers(g)[0]
    f = make_field(g, np.repeat(x[:, None], 3, axis=1))
    np.testing.assert_array_equal(f.values[0, 1:-1], f.values[1, 1:-1])
    np.testing.assert_array_equal(f.values[-1, 1:-1], f.values[-2, 1:-1])


def test_make_field_shape_mismatch():
    with pytest.raises(DimensionError):
        make_field(GridSpec.box((3, 3)), np.zeros((3, 4)))


def test_corner_ghost_takes_nearest_interior_corner():
    g = GridSpec.box((3, 3))
    interior = np.zeros((3, 3))
    interior[0, 0] = 7.0
    f = make_field(g, interior)
    assert f.values[0, 0] == 7.0


def test_corner_ghost_3d():
    g = GridSpec.box((3, 3, 3))
    interior = np.zeros((3, 3, 3))
    interior[-1, -1, -1] = 5.0
    f = make_field(g, interior)
    assert f.values[-1, -1, -1] == 5.0


@settings(max_examples=30, deadline=None)
@given(
    shape=st.sampled_from([(3, 3), (4, 7), (5, 3, 4)]),
    seed=st.integers(0, 2**32 - 1),
)
def test_fill_ghosts_idempotent_interior_untouched_zero_normal_derivative(shape, seed):
    g = GridSpec(bounds=tuple((0.0, k * 0.1) for k in shape), n=shape)
    interior = np.random.default_rng(seed).normal(size=shape)
    f = make_field(g, interior)
    before = f.values.copy()
    fill_ghosts(f)
    np.testing.assert_array_equal(f.values, before)
    np.testing.assert_array_equal(f.interior, interior)
    for axis in range(len(shape)):
        v = np.moveaxis(f.values, axis, 0)
        np.testing.assert_array_equal(v[0] - v[1], 0.0)
        np.testing.assert_array_equal(v[-1] - v[-2], 0.0)


@pytest.mark.parametrize("lo, n", [(0.0, 200), (-1.0, 100), (0.0, 7)])
def test_index_coordinate_round_trip(lo, n):
    g = GridSpec.box((n, n), lo, 1.0)
    for i, x in enumerate(cell_centers(g)[0]):
        assert g.nearest_index(0, x) == i


@pytest.mark.parametrize("precision", ["f64", "f32"])
def test_binary_dump_bit_exact(tmp_path, rng, precision):
    g = GridSpec(bounds=((0, 2), (0, 1), (0, 1)), n=(8, 4, 4))
    f = make_field(g, rng.normal(size=g.shape), precision)
    path = dump_field(f, tmp_path / "f.raw")
    back = load_field(path)
    assert back.spec == g
    assert back.dtype == f.dtype
    assert back.interior.tobytes() == np.ascontiguousarray(f.interior).tobytes()
    np.testing.assert_array_equal(back.values, f.values)


def test_text_dump_round_trip(tmp_path, rng):
    g = GridSpec(bounds=((-1, 1), (-1, 1.4)), n=(5, 6))
    f = make_field(g, rng.normal(size=g.shape))
    back = load_field(dump_field(f, tmp_path / "f.txt", "text"))
    np.testing.assert_array_equal(back.values, f.values)
    header = (tmp_path / "f.txt").read_text().splitlines()[:8]
    assert header[0] == "allencahn-field 1" and "format text" in header
