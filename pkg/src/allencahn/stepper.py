"""Explicit Allen-Cahn time stepping.

One step is ``φ ← (1+α)φ - αφ³ + Δt Δ_h φ`` with ``α = Δt/ε²`` and the
5-point (7-point in 3D) Laplacian under zero-Neumann ghosts. Three backends
produce the same update:

``reference``
    Interpreted per-cell loops over Python lists. Slow on purpose; this is
    the oracle the other two are checked against.
``stencil``
    The Laplacian with Δt folded into a cross-shaped convolution kernel,
    evaluated by a compiled kernel over disjoint row tiles. The persistent
    ghost layer stands in for replication padding.
``stencil-padcopy``
    Literal form: replication-pad the interior into a fresh array, then a
    valid convolution with the same kernel, as whole-array numpy operations.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field

import numba
import numpy as np

from . import analysis
from .errors import ConfigError, DivergenceError
from .grid import ScalarField, dtype_for, fill_ghosts, interior_slice
from .initial import generate
from .params import RunConfig, SchemeParams


@dataclass(frozen=True)
class StencilKernel:
    """Cross-shaped convolution weights equal to ``Δt Δ_h``.

    ``weights`` is the dense 3x3 (3x3x3) array; ``center`` is -2·dim·Δt/h²
    and each face neighbour carries Δt/h².
    """

    dim: int
    neighbor: float
    center: float

    @classmethod
    def from_params(cls, params: SchemeParams) -> StencilKernel:
        c = params.dt / params.h**2
        return cls(dim=params.dim, neighbor=c, center=-2 * params.dim * c)

    @property
    def weights(self) -> np.ndarray:
        w = np.zeros((3,) * self.dim)
        mid = (1,) * self.dim
        w[mid] = self.center
        for axis in range(self.dim):
            for off in (0, 2):
                idx = list(mid)
                idx[axis] = off
                w[tuple(idx)] = self.neighbor
        return w

    def taps(self):
        """Nonzero ``(offset, weight)`` pairs, centre first."""
        yield (0,) * self.dim, self.center
        for axis in range(self.dim):
            for off in (-1, 1):
                o = [0] * self.dim
                o[axis] = off
                yield tuple(o), self.neighbor


# -- reference backend ---------------------------------------------------------


def _fill_ghosts_nested(rows, dim):
    if dim == 2:
        rows[0][:] = rows[1]
        rows[-1][:] = rows[-2]
        for r in rows:
            r[0] = r[1]
            r[-1] = r[-2]
    else:
        for plane in (rows[0], rows[-1]):
            src = rows[1] if plane is rows[0] else rows[-2]
            for r, s in zip(plane, src):
                r[:] = s
        for plane in rows:
            plane[0][:] = plane[1]
            plane[-1][:] = plane[-2]
            for r in plane:
                r[0] = r[1]
                r[-1] = r[-2]


def _ref_step_2d(cur, nxt, a1, alpha, dt, inv_h2, four):
    for i in range(1, len(cur) - 1):
        up, row, dn, out = cur[i - 1], cur[i], cur[i + 1], nxt[i]
        for j in range(1, len(row) - 1):
            p = row[j]
            lap = (up[j] + dn[j] + row[j - 1] + row[j + 1] - four * p) * inv_h2
            out[j] = a1 * p - alpha * p * p * p + dt * lap


def _ref_step_3d(cur, nxt, a1, alpha, dt, inv_h2, six):
    for i in range(1, len(cur) - 1):
        west, plane, east, out_plane = cur[i - 1], cur[i], cur[i + 1], nxt[i]
        for j in range(1, len(plane) - 1):
            south, row, north, out = plane[j - 1], plane[j], plane[j + 1], out_plane[j]
            wr, er = west[j], east[j]
            for k in range(1, len(row) - 1):
                p = row[k]
                lap = (wr[k] + er[k] + south[k] + north[k] + row[k - 1] + row[k + 1] - six * p) * inv_h2
                out[k] = a1 * p - alpha * p * p * p + dt * lap


class ReferenceStepper:
    """Per-cell loops. float64 runs on nested Python lists; float32 runs on
    the numpy buffers element by element so every operation rounds to
    single precision."""

    name = "reference"

    def __init__(self, field: ScalarField, params: SchemeParams, threads: int = 1):
        self.spec = field.spec
        self.dtype = field.dtype
        self.dim = field.spec.dim
        cast = float if self.dtype == np.float64 else self.dtype.type
        self.consts = (
            cast(1.0 + params.alpha),
            cast(params.alpha),
            cast(params.dt),
            cast(1.0 / params.h**2),
            cast(2 * self.dim),
        )
        if self.dtype == np.float64:
            self.cur = field.values.tolist()
            self.nxt = field.values.tolist()
        else:
            self.cur = field.values.copy()
            self.nxt = field.values.copy()
        self._kernel = _ref_step_2d if self.dim == 2 else _ref_step_3d

    def advance(self, n: int = 1):
        for _ in range(n):
            self._kernel(self.cur, self.nxt, *self.consts)
            if isinstance(self.nxt, np.ndarray):
                fill_ghosts(ScalarField(self.spec, self.nxt))
            else:
                _fill_ghosts_nested(self.nxt, self.dim)
            self.cur, self.nxt = self.nxt, self.cur

    def field(self) -> ScalarField:
        return ScalarField(self.spec, np.array(self.cur, dtype=self.dtype))

    def close(self):
        pass


def laplacian_ref(field: ScalarField) -> np.ndarray:
    """Δ_h φ on the interior, cell by cell. Ghosts must be current."""
    v = field.values.tolist()
    inv_h2 = 1.0 / field.spec.h**2
    out = np.empty(field.spec.shape)
    if field.spec.dim == 2:
        for i in range(1, len(v) - 1):
            for j in range(1, len(v[i]) - 1):
                out[i - 1, j - 1] = (
                    v[i - 1][j] + v[i + 1][j] + v[i][j - 1] + v[i][j + 1] - 4.0 * v[i][j]
                ) * inv_h2
    else:
        for i in range(1, len(v) - 1):
            for j in range(1, len(v[i]) - 1):
                for k in range(1, len(v[i][j]) - 1):
                    out[i - 1, j - 1, k - 1] = (
                        v[i - 1][j][k] + v[i + 1][j][k]
                        + v[i][j - 1][k] + v[i][j + 1][k]
                        + v[i][j][k - 1] + v[i][j][k + 1]
                        - 6.0 * v[i][j][k]
                    ) * inv_h2
    return out


# -- stencil backend -------------------------------------------------------------


@numba.njit(nogil=True, cache=True)
def _stencil_rows_2d(src, dst, lo, hi, a1, alpha, wc, wn):
    ny = src.shape[1] - 1
    for i in range(lo, hi):
        for j in range(1, ny):
            p = src[i, j]
            conv = wc * p + wn * (src[i - 1, j] + src[i + 1, j] + src[i, j - 1] + src[i, j + 1])
            dst[i, j] = a1 * p - alpha * p * p * p + conv


@numba.njit(nogil=True, cache=True)
def _stencil_rows_3d(src, dst, lo, hi, a1, alpha, wc, wn):
    ny = src.shape[1] - 1
    nz = src.shape[2] - 1
    for i in range(lo, hi):
        for j in range(1, ny):
            for k in range(1, nz):
                p = src[i, j, k]
                conv = wc * p + wn * (
                    src[i - 1, j, k] + src[i + 1, j, k]
                    + src[i, j - 1, k] + src[i, j + 1, k]
                    + src[i, j, k - 1] + src[i, j, k + 1]
                )
                dst[i, j, k] = a1 * p - alpha * p * p * p + conv


def row_tiles(n: int, parts: int) -> list[tuple[int, int]]:
    """Split interior rows 1..n into at most ``parts`` contiguous half-open ranges."""
    parts = max(1, min(parts, n))
    edges = [1 + (n * k) // parts for k in range(parts + 1)]
    return [(edges[k], edges[k + 1]) for k in range(parts)]


class StencilStepper:
    """Ghost refresh plus one compiled cross-stencil sweep per step.

    With ``threads > 1`` the x-rows are split into disjoint tiles processed
    by a thread pool; each output cell is written exactly once from the
    read-only input buffer, so results do not depend on the thread count.
    """

    name = "stencil"

    def __init__(self, field: ScalarField, params: SchemeParams, threads: int = 1, kernel=None):
        self.spec = field.spec
        dt_type = field.dtype.type
        kernel = kernel or StencilKernel.from_params(params)
        self.args = (
            dt_type(1.0 + params.alpha),
            dt_type(params.alpha),
            dt_type(kernel.center),
            dt_type(kernel.neighbor),
        )
        self.cur = np.ascontiguousarray(field.values).copy()
        self.nxt = self.cur.copy()
        self._kernel = _stencil_rows_2d if self.spec.dim == 2 else _stencil_rows_3d
        self.tiles = row_tiles(self.spec.n[0], threads)
        self.pool = ThreadPoolExecutor(len(self.tiles)) if len(self.tiles) > 1 else None

    def _sweep(self, tile):
        self._kernel(self.cur, self.nxt, tile[0], tile[1], *self.args)

    def advance(self, n: int = 1):
        cur_field = ScalarField(self.spec, self.cur)
        for _ in range(n):
            cur_field.values = self.cur
            fill_ghosts(cur_field)
            if self.pool is None:
                self._kernel(self.cur, self.nxt, 1, self.spec.n[0] + 1, *self.args)
            else:
                list(self.pool.map(self._sweep, self.tiles))
            self.cur, self.nxt = self.nxt, self.cur

    def field(self) -> ScalarField:
        return fill_ghosts(ScalarField(self.spec, self.cur.copy()))

    def close(self):
        if self.pool is not None:
            self.pool.shutdown()
            self.pool = None


def conv_valid(padded: np.ndarray, kernel: StencilKernel) -> np.ndarray:
    """Valid (no padding) cross-correlation of ``padded`` with the kernel taps."""
    out = None
    for offset, w in kernel.taps():
        sl = tuple(slice(1 + o, padded.shape[a] - 1 + o) for a, o in enumerate(offset))
        term = w * padded[sl]
        out = term if out is None else out + term
    return out


class PadCopyStepper:
    """Replication-pad into a new array every step, then convolve."""

    name = "stencil-padcopy"

    def __init__(self, field: ScalarField, params: SchemeParams, threads: int = 1, kernel=None):
        self.spec = field.spec
        t = field.dtype.type
        self.kernel = kernel or StencilKernel.from_params(params)
        self.kernel = StencilKernel(self.kernel.dim, t(self.kernel.neighbor), t(self.kernel.center))
        self.a1, self.alpha = t(1.0 + params.alpha), t(params.alpha)
        self.phi = np.array(field.interior)

    def advance(self, n: int = 1):
        for _ in range(n):
            phi = self.phi
            padded = np.pad(phi, 1, mode="edge")
            self.phi = self.a1 * phi - self.alpha * phi * phi * phi + conv_valid(padded, self.kernel)

    def field(self) -> ScalarField:
        values = np.pad(self.phi, 1, mode="edge")
        return ScalarField(self.spec, values)

    def close(self):
        pass


STEPPERS = {cls.name: cls for cls in (ReferenceStepper, StencilStepper, PadCopyStepper)}


def make_stepper(backend: str, field: ScalarField, params: SchemeParams, threads: int = 1):
    try:
        cls = STEPPERS[backend]
    except KeyError:
        raise ConfigError(f"unknown backend {backend!r}; choose from {sorted(STEPPERS)}") from None
    return cls(field, params, threads)


def check_finite(field: ScalarField, step: int):
    phi = field.interior
    bad = ~np.isfinite(phi)
    if bad.any():
        raise DivergenceError(step, np.unravel_index(int(np.argmax(bad)), phi.shape))


def step_reference(current: ScalarField, params: SchemeParams) -> ScalarField:
    """One reference step; returns a new ghost-filled field."""
    s = ReferenceStepper(current, params)
    s.advance(1)
    out = s.field()
    check_finite(out, 1)
    return out


def step_stencil(current: ScalarField, params: SchemeParams, kernel: StencilKernel | None = None,
                 threads: int = 1) -> ScalarField:
    """One stencil step; returns a new ghost-filled field."""
    s = StencilStepper(current, params, threads, kernel)
    try:
        s.advance(1)
    finally:
        s.close()
    out = s.field()
    check_finite(out, 1)
    return out


# -- drivers --------------------------------------------------------------------


@dataclass
class RunReport:
    backend: str
    precision: str
    threads: int
    steps: int
    seconds: float
    final: ScalarField
    diagnostics: list = dc_field(default_factory=list)

    @property
    def steps_per_second(self) -> float:
        return self.steps / self.seconds if self.seconds > 0 else math.inf


def initial_field(config: RunConfig) -> ScalarField:
    p = config.params
    return generate(config.init, config.grid, p.eps, p.m, config.seed, config.precision)


def _probe(config: RunConfig):
    center = config.init.center(config.grid)
    r0 = getattr(config.init, "r0", None) if center is not None else None
    return center, r0


def _checkpoints(config: RunConfig, stride: int):
    n = config.n_steps
    marks = list(range(stride, n + 1, stride))
    if not marks or marks[-1] != n:
        marks.append(n)
    return marks


def run(config: RunConfig, sink=None, snapshot=None, field: ScalarField | None = None) -> RunReport:
    """Advance ``config.n_steps`` steps with the configured backend.

    ``sink(diag, field)`` is called at step 0, every ``diag_stride`` steps
    and at the final step; ``snapshot(step, field)`` every
    ``snapshot_stride`` steps when that is nonzero. Only the stepping itself
    is timed. Non-finite values are checked at each diagnostics point.
    """
    field = initial_field(config) if field is None else field.astype(config.precision)
    center, r0 = _probe(config)
    diags = [analysis.diagnose(field, config.params, 0, center, r0)]
    if sink:
        sink(diags[0], field)
    if snapshot and config.snapshot_stride:
        snapshot(0, field)
    stepper = make_stepper(config.backend, field, config.params, config.threads)
    marks = sorted(set(_checkpoints(config, config.diag_stride))
                   | (set(_checkpoints(config, config.snapshot_stride)) if config.snapshot_stride else set()))
    seconds = 0.0
    done = 0
    try:
        for mark in marks:
            t0 = time.perf_counter()
            stepper.advance(mark - done)
            seconds += time.perf_counter() - t0
            done = mark
            current = stepper.field()
            if mark % config.diag_stride == 0 or mark == config.n_steps:
                check_finite(current, mark)
                d = analysis.diagnose(current, config.params, mark, center, r0)
                diags.append(d)
                if sink:
                    sink(d, current)
            if snapshot and config.snapshot_stride and (mark % config.snapshot_stride == 0 or mark == config.n_steps):
                snapshot(mark, current)
    finally:
        stepper.close()
    return RunReport(config.backend, config.precision, config.threads, config.n_steps, seconds, current, diags)


def run_dual(config: RunConfig, backends=("reference", "stencil"), precisions=None):
    """Run two backends in lockstep from the same initial field.

    Returns ``(report_a, report_b, err)`` where ``err`` is the mean over
    steps (every ``err_stride``-th) of the interior RMS difference.
    """
    precisions = precisions or (config.precision, config.precision)
    base = initial_field(config.with_(precision="f64"))
    center, r0 = _probe(config)
    fields_ = [base.astype(p) for p in precisions]
    steppers = [make_stepper(b, f, config.params, config.threads) for b, f in zip(backends, fields_)]
    diags = [[analysis.diagnose(f, config.params, 0, center, r0)] for f in fields_]
    seconds = [0.0, 0.0]
    acc = analysis.ErrAccumulator()
    try:
        for step in range(1, config.n_steps + 1):
            for k, s in enumerate(steppers):
                t0 = time.perf_counter()
                s.advance(1)
                seconds[k] += time.perf_counter() - t0
            at_err = step % config.err_stride == 0 or step == config.n_steps
            at_diag = step % config.diag_stride == 0 or step == config.n_steps
            if at_err or at_diag:
                current = [s.field() for s in steppers]
                if at_err:
                    acc.add(current[0], current[1])
                if at_diag:
                    for k, f in enumerate(current):
                        check_finite(f, step)
                        diags[k].append(analysis.diagnose(f, config.params, step, center, r0))
    finally:
        for s in steppers:
            s.close()
    reports = tuple(
        RunReport(b, p, config.threads, config.n_steps, sec, s.field(), d)
        for b, p, sec, s, d in zip(backends, precisions, seconds, steppers, diags)
    )
    return reports[0], reports[1], acc.value
