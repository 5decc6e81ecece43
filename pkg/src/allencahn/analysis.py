"""Measurements on fields and trajectories.

All reductions run in float64 through ``numpy.sum`` so repeated evaluation
on the same data returns the same bits.
"""

from __future__ import annotations

import csv
import math
from dataclasses import astuple, dataclass, fields
from pathlib import Path

import numpy as np

from .errors import CircleVanishedError, DimensionError, NoInterfaceError
from .grid import ScalarField, cell_centers

SEPARATED_LEVEL = 0.9


def exact_radius(r0: float, dim: int, t: float) -> float:
    """Radius of a circle (dim=2) or sphere (dim=3) under mean-curvature flow."""
    arg = r0 * r0 + 2.0 * (1 - dim) * t
    if arg <= 0:
        raise CircleVanishedError(f"radius {r0} in {dim}D has vanished by t={t}")
    return math.sqrt(arg)


def measure_radius(field: ScalarField, center) -> float:
    """Distance from ``center`` to the first zero crossing along +x.

    The ray runs through the row of cell centres nearest to ``center`` on the
    remaining axes; the crossing is located by linear interpolation between
    the two cells whose values change sign.
    """
    spec = field.spec
    if len(center) != spec.dim:
        raise DimensionError(f"center {center} does not match dim {spec.dim}")
    xs = cell_centers(spec)[0]
    idx = [spec.nearest_index(axis, center[axis]) for axis in range(1, spec.dim)]
    offset2 = sum((cell_centers(spec)[axis][i] - center[axis]) ** 2 for axis, i in enumerate(idx, 1))
    line = np.asarray(field.interior[(slice(None), *idx)], dtype=np.float64)
    start = int(np.searchsorted(xs, center[0]))
    for i in range(start, len(xs) - 1):
        a, b = line[i], line[i + 1]
        if a == 0.0:
            x_cross = xs[i]
        elif a * b <= 0.0:
            x_cross = xs[i] + (xs[i + 1] - xs[i]) * a / (a - b)
        else:
            continue
        return math.sqrt((x_cross - center[0]) ** 2 + offset2)
    raise NoInterfaceError(f"no sign change along +x from {tuple(center)}")


def rms_diff(a: np.ndarray, b: np.ndarray) -> float:
    """sqrt(mean((a - b)^2)) evaluated in float64."""
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    d = np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)
    return math.sqrt(float(np.sum(d * d)) / d.size)


class ErrAccumulator:
    """Running mean of per-step RMS differences between two trajectories."""

    def __init__(self):
        self.terms: list[float] = []

    def add(self, a, b) -> float:
        term = rms_diff(_interior(a), _interior(b))
        self.terms.append(term)
        return term

    @property
    def value(self) -> float:
        if not self.terms:
            raise ValueError("no steps accumulated")
        return math.fsum(self.terms) / len(self.terms)


def _interior(x):
    return x.interior if isinstance(x, ScalarField) else np.asarray(x)


def err_metric(series_a, series_b) -> float:
    """Mean over time of the interior RMS difference between two field sequences."""
    series_a, series_b = list(series_a), list(series_b)
    if len(series_a) != len(series_b) or not series_a:
        raise DimensionError(f"need equal non-empty sequences, got {len(series_a)} and {len(series_b)}")
    acc = ErrAccumulator()
    for a, b in zip(series_a, series_b):
        acc.add(a, b)
    return acc.value


def energy(field: ScalarField, params) -> float:
    """Discrete Allen-Cahn energy ``sum[F(φ)/ε² + |∇φ|²/2] h^dim``.

    Gradients are forward differences inside the interior. The last cell on
    each axis would difference against its zero-Neumann ghost, which adds
    nothing, so ghost values are never read.
    """
    phi = np.asarray(field.interior, dtype=np.float64)
    dim = field.spec.dim
    h = field.spec.h
    bulk = 0.25 * (phi * phi - 1.0) ** 2 / params.eps**2
    grad2 = 0.0
    for axis in range(dim):
        g = np.diff(phi, axis=axis) / h
        grad2 += float(np.sum(g * g))
    return (float(np.sum(bulk)) + 0.5 * grad2) * h**dim


@dataclass
class Diagnostics:
    step: int
    t: float
    radius: float | None
    exact_radius: float | None
    energy: float
    min: float
    max: float
    separated_fraction: float

    @property
    def max_abs(self) -> float:
        return max(abs(self.min), abs(self.max))


CSV_COLUMNS = [f.name for f in fields(Diagnostics)]


def phase_stats(field: ScalarField) -> tuple[float, float, float]:
    """(min, max, share of interior cells with |φ| > 0.9)."""
    phi = field.interior
    return (
        float(phi.min()),
        float(phi.max()),
        float(np.count_nonzero(np.abs(phi) > SEPARATED_LEVEL)) / phi.size,
    )


def diagnose(field: ScalarField, params, step: int, center=None, r0=None) -> Diagnostics:
    t = step * params.dt
    radius = exact = None
    if center is not None:
        try:
            radius = measure_radius(field, center)
        except NoInterfaceError:
            pass
        if r0 is not None:
            try:
                exact = exact_radius(r0, field.spec.dim, t)
            except CircleVanishedError:
                pass
    lo, hi, frac = phase_stats(field)
    return Diagnostics(step, t, radius, exact, energy(field, params), lo, hi, frac)


def write_diagnostics_csv(rows, path) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow(["" if x is None else repr(x) for x in astuple(row)])
    return path


def read_diagnostics_csv(path) -> list[Diagnostics]:
    out = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            vals = {k: (None if rec[k] == "" else float(rec[k])) for k in CSV_COLUMNS}
            vals["step"] = int(vals["step"])
            out.append(Diagnostics(**vals))
    return out
