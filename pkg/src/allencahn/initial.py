"""Initial order-parameter fields for the benchmark shapes.

Every generator is a pure function of its arguments and returns a
ghost-filled :class:`~allencahn.grid.ScalarField` with the +1 phase inside
the shape and -1 outside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import ClassVar

import numpy as np
from scipy import ndimage

from .errors import DimensionError, ParameterError
from .grid import GridSpec, ScalarField, make_field, mesh

SQRT2 = math.sqrt(2.0)


def _require_dim(spec: GridSpec, dims, name):
    if spec.dim not in dims:
        raise DimensionError(f"{name} is defined for dim in {tuple(dims)}, grid has dim {spec.dim}")


def _profile(signed_distance, eps):
    return np.tanh(signed_distance / (SQRT2 * eps))


def init_circle(spec: GridSpec, eps: float, r0: float, precision="f64") -> ScalarField:
    _require_dim(spec, (2,), "circle")
    x, y = mesh(spec)
    r = np.sqrt((x - 0.5) ** 2 + (y - 0.5) ** 2)
    return make_field(spec, _profile(r0 - r, eps), precision)


def init_sphere(spec: GridSpec, eps: float, r0: float, precision="f64") -> ScalarField:
    _require_dim(spec, (3,), "sphere")
    x, y, z = mesh(spec)
    r = np.sqrt((x - 0.5) ** 2 + (y - 0.5) ** 2 + (z - 0.5) ** 2)
    return make_field(spec, _profile(r0 - r, eps), precision)


def init_dumbbell(spec: GridSpec, eps: float, r0: float, precision="f64") -> ScalarField:
    """Two lobes centred at x=0.3 and x=1.7 joined by a square-section bar.

    Inside the bar (0.4<x<1.6, 0.4<y,z<0.6) the value is exactly 1; elsewhere
    it is ``1 + tanh(lobe1) + tanh(lobe2)``.
    """
    _require_dim(spec, (2, 3), "dumbbell")
    coords = mesh(spec)
    x, cross = coords[0], coords[1:]
    yz = sum((c - 0.5) ** 2 for c in cross)
    lobes = (
        1.0
        + _profile(r0 - np.sqrt((x - 0.3) ** 2 + yz), eps)
        + _profile(r0 - np.sqrt((x - 1.7) ** 2 + yz), eps)
    )
    bar = (0.4 < x) & (x < 1.6)
    for c in cross:
        bar = bar & (0.4 < c) & (c < 0.6)
    return make_field(spec, np.where(bar, 1.0, lobes), precision)


def init_star(spec: GridSpec, eps: float, precision="f64", branch: str = "printed") -> ScalarField:
    """Six-pointed star.

    2D: centred at (0.5, 0.5), radius ``0.25 + 0.1 cos 6θ``.
    3D: centred at the origin, radius ``0.7 + 0.2 cos 6θ`` with θ measured in
    the x-z plane. ``branch`` picks the half-space test for the π shift in 3D:
    ``"printed"`` uses x > 0.5, ``"origin"`` uses x > 0. Both give the same
    field because cos 6θ has period π/3.
    """
    _require_dim(spec, (2, 3), "star")
    if branch not in ("printed", "origin"):
        raise ParameterError(f"branch must be 'printed' or 'origin', got {branch!r}")
    if spec.dim == 2:
        x, y = mesh(spec)
        dx, dy = x - 0.5, y - 0.5
        theta = _star_theta(dy, dx, x, 0.5)
        r = np.sqrt(dx**2 + dy**2)
        radius = 0.25 + 0.1 * np.cos(6.0 * theta)
    else:
        x, y, z = mesh(spec)
        theta = _star_theta(z, x, x, 0.5 if branch == "printed" else 0.0)
        r = np.sqrt(x**2 + y**2 + z**2)
        radius = 0.7 + 0.2 * np.cos(6.0 * theta)
    return make_field(spec, _profile(radius - r, eps), precision)


def _star_theta(num, den, x, threshold):
    num, den, x = np.broadcast_arrays(num, den, x)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where((num == 0) & (den == 0), 0.0, num / den)
    theta = np.arctan(ratio)
    return np.where(x > threshold, theta, math.pi + theta)


def init_torus(spec: GridSpec, eps: float, r1: float, r2: float, precision="f64") -> ScalarField:
    """2D: annulus r2 < ρ < r1 about (0.5, 0.5). 3D: ring torus about the z axis.

    In 3D the tube's signed distance ``s`` is mapped through ``-tanh(s/(√2 ε))``
    so the tube is the +1 phase.
    """
    _require_dim(spec, (2, 3), "torus")
    if r1 <= 0 or r2 <= 0:
        raise ParameterError(f"torus radii must be positive, got r1={r1}, r2={r2}")
    if spec.dim == 2:
        if r2 >= r1:
            raise ParameterError(f"2D torus needs inner radius r2 < outer radius r1, got {r2} >= {r1}")
        x, y = mesh(spec)
        rho = np.sqrt((x - 0.5) ** 2 + (y - 0.5) ** 2)
        phi = -1.0 + _profile(r1 - rho, eps) - _profile(r2 - rho, eps)
    else:
        x, y, z = mesh(spec)
        s = np.sqrt(z**2 + (np.sqrt(x**2 + y**2) - r1) ** 2) - r2
        phi = -_profile(s, eps)
    return make_field(spec, phi, precision)


# -- maze --------------------------------------------------------------------


def maze_geometry(m: int) -> tuple[int, int]:
    """Channel pitch and stripe width in cells for interface parameter ``m``."""
    pitch = max(2, round(8 * m / 5))
    width = max(1, math.floor(3 * m / (2 * SQRT2 * math.atanh(0.9))))
    return pitch, min(width, pitch - 1)


def spiral_segments(side: int, pitch: int) -> list[int]:
    """Arm lengths of an inward square spiral: L, L, L, L-p, L-p, L-2p, L-2p, ..."""
    lengths = [side, side, side]
    k = 1
    while side - k * pitch >= pitch:
        lengths += [side - k * pitch] * 2
        k += 1
    return lengths


def maze_mask(n: int, pitch: int, width: int) -> np.ndarray:
    """Boolean (n, n) mask of a rectilinear inward spiral stripe.

    The stripe's centre line starts at the lower-left corner of a square inset
    by ``width`` cells and runs +x, +y, -x, -y with arm lengths from
    :func:`spiral_segments`. Raises ``ParameterError`` when fewer than two
    corners fit.
    """
    margin = width
    side = n - 1 - 2 * margin
    if side < pitch:
        raise ParameterError(f"{n} cells cannot hold a spiral with pitch {pitch}")
    arms = spiral_segments(side, pitch)
    if len(arms) - 1 < 2:
        raise ParameterError(f"{n} cells fit fewer than 2 spiral turns at pitch {pitch}")
    mask = np.zeros((n, n), dtype=bool)
    lo, hi = (width - 1) // 2, width // 2
    x = y = margin
    steps = ((1, 0), (0, 1), (-1, 0), (0, -1))
    for k, length in enumerate(arms):
        dx, dy = steps[k % 4]
        x_end, y_end = x + dx * length, y + dy * length
        x0, x1 = sorted((x, x_end))
        y0, y1 = sorted((y, y_end))
        mask[max(x0 - lo, 0) : x1 + hi + 1, max(y0 - lo, 0) : y1 + hi + 1] = True
        x, y = x_end, y_end
    return mask


def _signed_cell_distance(mask: np.ndarray) -> np.ndarray:
    # Positive inside; the boundary sits half a cell beyond the last stripe cell.
    inside = ndimage.distance_transform_edt(mask)
    outside = ndimage.distance_transform_edt(~mask)
    return np.where(mask, inside - 0.5, -(outside - 0.5))


def init_maze(spec: GridSpec, eps: float, m: int, precision="f64") -> ScalarField:
    """Spiral maze: +1 on the stripe, -1 elsewhere, smoothed by a tanh of the
    signed distance to the stripe edge. 3D extrudes the x-y spiral over the
    middle half of the z axis."""
    _require_dim(spec, (2, 3), "maze")
    pitch, width = maze_geometry(m)
    nx, ny = spec.n[0], spec.n[1]
    plane = np.zeros((nx, ny), dtype=bool)
    k = min(nx, ny)
    ox, oy = (nx - k) // 2, (ny - k) // 2
    plane[ox : ox + k, oy : oy + k] = maze_mask(k, pitch, width)
    if spec.dim == 2:
        mask = plane
    else:
        nz = spec.n[2]
        mask = np.zeros(spec.n, dtype=bool)
        mask[:, :, nz // 4 : nz - nz // 4] = plane[:, :, None]
    sd = _signed_cell_distance(mask) * spec.h
    return make_field(spec, np.tanh(2.0 * sd / (SQRT2 * eps)), precision)


# -- random ------------------------------------------------------------------

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def splitmix64(z: np.ndarray) -> np.ndarray:
    """SplitMix64 finaliser applied elementwise to a uint64 array."""
    z = np.asarray(z, dtype=np.uint64)
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def uniform_cells(shape, seed: int) -> np.ndarray:
    """Counter-based uniforms on [-1, 1): cell ``k`` (row-major) gets
    ``splitmix64(key + (k + 1) * golden)`` with ``key = splitmix64(seed)``.
    Output does not depend on evaluation order."""
    key = splitmix64(np.array([seed & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64))[0]
    counter = np.arange(1, math.prod(shape) + 1, dtype=np.uint64)
    bits = splitmix64(key + counter * _GOLDEN)
    u = (bits >> np.uint64(11)).astype(np.float64) * 2.0**-53
    return (2.0 * u - 1.0).reshape(shape)


def init_random(spec: GridSpec, amplitude: float = 0.1, seed: int = 0, precision="f64") -> ScalarField:
    if not 0 < amplitude <= 1:
        raise ParameterError(f"amplitude must lie in (0, 1], got {amplitude}")
    return make_field(spec, amplitude * uniform_cells(spec.shape, seed), precision)


# -- tagged descriptions -----------------------------------------------------


@dataclass(frozen=True)
class InitialCondition:
    dims: ClassVar[tuple[int, ...]] = (2, 3)
    kind: ClassVar[str] = ""

    def generate(self, spec, eps, m, seed=0, precision="f64") -> ScalarField:
        raise NotImplementedError

    def center(self, spec):
        """Centre for radius measurements, or None when the shape has none."""
        return None


@dataclass(frozen=True)
class Circle(InitialCondition):
    r0: float = 0.25
    dims: ClassVar = (2,)
    kind: ClassVar = "circle"

    def __post_init__(self):
        if self.r0 <= 0:
            raise ParameterError(f"r0 must be positive, got {self.r0}")

    def generate(self, spec, eps, m, seed=0, precision="f64"):
        return init_circle(spec, eps, self.r0, precision)

    def center(self, spec):
        return (0.5, 0.5)


@dataclass(frozen=True)
class Sphere(Circle):
    dims: ClassVar = (3,)
    kind: ClassVar = "sphere"

    def generate(self, spec, eps, m, seed=0, precision="f64"):
        return init_sphere(spec, eps, self.r0, precision)

    def center(self, spec):
        return (0.5, 0.5, 0.5)


@dataclass(frozen=True)
class Dumbbell(InitialCondition):
    r0: float = 0.2
    kind: ClassVar = "dumbbell"

    def __post_init__(self):
        if self.r0 <= 0:
            raise ParameterError(f"r0 must be positive, got {self.r0}")

    def generate(self, spec, eps, m, seed=0, precision="f64"):
        return init_dumbbell(spec, eps, self.r0, precision)


@dataclass(frozen=True)
class Star(InitialCondition):
    branch: str = "printed"
    kind: ClassVar = "star"

    def generate(self, spec, eps, m, seed=0, precision="f64"):
        return init_star(spec, eps, precision, self.branch)


@dataclass(frozen=True)
class Torus(InitialCondition):
    r1: float = 0.4
    r2: float = 0.3
    kind: ClassVar = "torus"

    def __post_init__(self):
        if self.r1 <= 0 or self.r2 <= 0:
            raise ParameterError(f"torus radii must be positive, got {self.r1}, {self.r2}")

    def generate(self, spec, eps, m, seed=0, precision="f64"):
        return init_torus(spec, eps, self.r1, self.r2, precision)


@dataclass(frozen=True)
class Maze(InitialCondition):
    kind: ClassVar = "maze"

    def generate(self, spec, eps, m, seed=0, precision="f64"):
        return init_maze(spec, eps, m, precision)


@dataclass(frozen=True)
class Random(InitialCondition):
    amplitude: float = 0.1
    kind: ClassVar = "random"

    def __post_init__(self):
        if not 0 < self.amplitude <= 1:
            raise ParameterError(f"amplitude must lie in (0, 1], got {self.amplitude}")

    def generate(self, spec, eps, m, seed=0, precision="f64"):
        return init_random(spec, self.amplitude, seed, precision)


SHAPES = {cls.kind: cls for cls in (Circle, Sphere, Dumbbell, Star, Torus, Maze, Random)}


def generate(init: InitialCondition, spec: GridSpec, eps: float, m: int, seed=0, precision="f64"):
    """Build the initial field described by ``init`` on ``spec``."""
    if spec.dim not in init.dims:
        raise DimensionError(f"{init.kind} supports dim {init.dims}, grid has dim {spec.dim}")
    return init.generate(spec, eps, m, seed, precision)
