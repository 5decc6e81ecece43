import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from allencahn.analysis import (
    CSV_COLUMNS,
    Diagnostics,
    ErrAccumulator,
    diagnose,
    energy,
    err_metric,
    exact_radius,
    measure_radius,
    phase_stats,
    read_diagnostics_csv,
    rms_diff,
    write_diagnostics_csv,
)
from allencahn.errors import CircleVanishedError, DimensionError, NoInterfaceError
from allencahn.grid import GridSpec, make_field, mesh
from allencahn.initial import init_circle, init_sphere
from allencahn.params import default_params


def test_exact_radius_oracle():
    want = float(mpmath.sqrt(mpmath.mpf("0.25") ** 2 - 2 * mpmath.mpf("0.01")))
    assert exact_radius(0.25, 2, 0.01) == pytest.approx(want, rel=1e-15)
    assert want == pytest.approx(0.2061552812808830, rel=1e-15)
    want3 = float(mpmath.sqrt(mpmath.mpf("0.35") ** 2 - 4 * mpmath.mpf("0.01")))
    assert exact_radius(0.35, 3, 0.01) == pytest.approx(want3, rel=1e-15)
    assert exact_radius(0.3, 2, 0.0) == 0.3


def test_exact_radius_vanishes():
    with pytest.raises(CircleVanishedError):
        exact_radius(0.25, 2, 0.25**2 / 2)
    with pytest.raises(CircleVanishedError):
        exact_radius(0.25, 3, 0.02)


@given(r0=st.floats(0.1, 0.5), t1=st.floats(0, 1e-3), dt=st.floats(1e-6, 1e-3), dim=st.sampled_from([2, 3]))
def test_exact_radius_decreasing(r0, t1, dt, dim):
    assert exact_radius(r0, dim, t1 + dt) < exact_radius(r0, dim, t1)


def test_measure_radius_circle():
    g = GridSpec.box((200, 200))
    p = default_params(g)
    f = init_circle(g, p.eps, 0.25)
    assert abs(measure_radius(f, (0.5, 0.5)) - 0.25) <= g.h
    neg = make_field(g, -f.interior)
    assert measure_radius(neg, (0.5, 0.5)) == measure_radius(f, (0.5, 0.5))


def test_measure_radius_sphere():
    g = GridSpec.box((60, 60, 60))
    p = default_params(g)
    f = init_sphere(g, p.eps, 0.3)
    assert abs(measure_radius(f, (0.5, 0.5, 0.5)) - 0.3) <= g.h


def test_measure_radius_linear_interpolation():
    g = GridSpec.box((10, 10))
    x, y = mesh(g)
    f = make_field(g, np.broadcast_to(0.63 - x, g.shape).copy())
    # exact zero of a linear profile is recovered exactly
    assert measure_radius(f, (0.05, 0.55)) == pytest.approx(0.58, abs=1e-12)


def test_measure_radius_errors():
    g = GridSpec.box((10, 10))
    f = make_field(g, np.ones(g.shape))
    with pytest.raises(NoInterfaceError):
        measure_radius(f, (0.5, 0.5))
    with pytest.raises(DimensionError):
        measure_radius(f, (0.5, 0.5, 0.5))


def test_rms_and_err_constants():
    a = np.zeros((4, 4))
    assert rms_diff(a, a + 0.5) == 0.5
    assert err_metric([a, a], [a + 1.0, a + 3.0]) == 2.0
    assert err_metric([a] * 3, [a] * 3) == 0.0
    acc = ErrAccumulator()
    with pytest.raises(ValueError):
        acc.value
    acc.add(a, a + 2)
    assert acc.value == 2.0
    with pytest.raises(DimensionError):
        err_metric([a], [a, a])
    with pytest.raises(DimensionError):
        rms_diff(a, np.zeros((3, 4)))


arrays = st.lists(st.floats(-2, 2), min_size=6, max_size=6).map(lambda v: np.array(v).reshape(2, 3))


@settings(max_examples=60)
@given(a=st.lists(arrays, min_size=1, max_size=3), data=st.data())
def test_err_is_pseudometric(a, data):
    n = len(a)
    b = data.draw(st.lists(arrays, min_size=n, max_size=n))
    c = data.draw(st.lists(arrays, min_size=n, max_size=n))
    assert err_metric(a, a) == 0.0
    assert err_metric(a, b) == err_metric(b, a)
    assert err_metric(a, c) <= err_metric(a, b) + err_metric(b, c) + 1e-12


def loop_energy(phi, h, eps):
    total = 0.0
    nx, ny = len(phi), len(phi[0])
    for i in range(nx):
        for j in range(ny):
            v = phi[i][j]
            gx = (phi[i + 1][j] - v) / h if i + 1 < nx else 0.0
            gy = (phi[i][j + 1] - v) / h if j + 1 < ny else 0.0
            total += 0.25 * (v * v - 1) ** 2 / eps**2 + 0.5 * (gx * gx + gy * gy)
    return total * h * h


def test_energy_uniform_states():
    g = GridSpec(bounds=((0, 2), (0, 1)), n=(40, 20))
    p = default_params(g)
    assert energy(make_field(g, np.ones(g.shape)), p) == 0.0
    assert energy(make_field(g, -np.ones(g.shape)), p) == 0.0
    zero = energy(make_field(g, np.zeros(g.shape)), p)
    assert zero == pytest.approx(0.25 * 2.0 / p.eps**2, rel=1e-12)


def test_energy_matches_loop_oracle(rng):
    g = GridSpec.box((13, 13))
    p = default_params(g, 4)
    phi = rng.uniform(-1, 1, size=g.shape)
    assert energy(make_field(g, phi), p) == pytest.approx(loop_energy(phi.tolist(), g.h, p.eps), rel=1e-12)


def test_phase_stats():
    g = GridSpec(bounds=((0, 1), (0, 1.25)), n=(4, 5))
    phi = np.full(g.shape, 0.95)
    phi[0, :] = -0.5
    lo, hi, frac = phase_stats(make_field(g, phi))
    assert (lo, hi) == (-0.5, 0.95)
    assert frac == pytest.approx(15 / 20)


def test_diagnose_and_csv_roundtrip(tmp_path):
    g = GridSpec.box((50, 50))
    p = default_params(g, 5)
    f = init_circle(g, p.eps, 0.25)
    rows = [diagnose(f, p, 0, (0.5, 0.5), 0.25), diagnose(f, p, 3, None, None)]
    assert rows[0].exact_radius == 0.25 and rows[0].radius == pytest.approx(0.25, abs=g.h)
    assert rows[1].radius is None and rows[1].t == 3 * p.dt
    path = write_diagnostics_csv(rows, tmp_path / "d.csv")
    assert path.read_text().splitlines()[0] == ",".join(CSV_COLUMNS)
    assert read_diagnostics_csv(path) == rows


def test_diagnose_past_vanishing_time():
    g = GridSpec.box((20, 20))
    p = default_params(g, 3)
    f = make_field(g, -np.ones(g.shape))
    d = diagnose(f, p, 10**6, (0.5, 0.5), 0.1)
    assert d.radius is None and d.exact_radius is None
    assert d.max_abs == 1.0
