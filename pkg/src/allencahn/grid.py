"""Cell-centered grid geometry and scalar fields with a one-cell ghost layer.

Indices are 0-based in code. Interior cell ``i`` (0-based) on an axis with
lower bound ``a`` sits at ``a + (i + 0.5) * h``; the extended array adds one
ghost cell on each side, so extended index ``k`` sits at ``a + (k - 0.5) * h``.
Arrays are C-ordered (last axis fastest) and indexed ``[x, y]`` / ``[x, y, z]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionError, ParameterError

DTYPES = {"f64": np.float64, "f32": np.float32}
_ISOTROPY_RTOL = 1e-12
_DUMP_MAGIC = "allencahn-field 1"


def dtype_for(precision: str) -> np.dtype:
    try:
        return np.dtype(DTYPES[precision])
    except KeyError:
        raise ParameterError(f"precision must be one of {sorted(DTYPES)}, got {precision!r}") from None


def precision_of(dtype) -> str:
    return "f32" if np.dtype(dtype) == np.float32 else "f64"


@dataclass(frozen=True)
class GridSpec:
    """Uniform isotropic grid over an axis-aligned box.

    ``bounds`` holds one ``(lo, hi)`` pair per axis and ``n`` the interior
    cell count per axis. The spacing is taken from the first axis and every
    other axis must agree with it.
    """

    bounds: tuple[tuple[float, float], ...]
    n: tuple[int, ...]

    def __post_init__(self):
        bounds = tuple((float(a), float(b)) for a, b in self.bounds)
        n = tuple(int(k) for k in self.n)
        object.__setattr__(self, "bounds", bounds)
        object.__setattr__(self, "n", n)
        if len(n) not in (2, 3) or len(bounds) != len(n):
            raise DimensionError(f"need 2 or 3 axes with matching bounds, got n={n}, bounds={bounds}")
        if min(n) < 3:
            raise ParameterError(f"every axis needs at least 3 cells, got {n}")
        spacings = [(b - a) / k for (a, b), k in zip(bounds, n)]
        if spacings[0] <= 0:
            raise ParameterError(f"bounds must be increasing, got {bounds}")
        for s in spacings[1:]:
            if abs(s - spacings[0]) > _ISOTROPY_RTOL * spacings[0]:
                raise ParameterError(f"grid spacing must be isotropic, got {spacings}")

    @classmethod
    def box(cls, n, lo=0.0, hi=1.0) -> GridSpec:
        """Grid with the same interval ``(lo, hi)`` on every axis."""
        return cls(bounds=tuple((lo, hi) for _ in n), n=tuple(n))

    @property
    def dim(self) -> int:
        return len(self.n)

    @property
    def h(self) -> float:
        a, b = self.bounds[0]
        return (b - a) / self.n[0]

    @property
    def shape(self) -> tuple[int, ...]:
        return self.n

    @property
    def extended_shape(self) -> tuple[int, ...]:
        return tuple(k + 2 for k in self.n)

    @property
    def cell_volume(self) -> float:
        return self.h**self.dim

    @property
    def volume(self) -> float:
        return math.prod(b - a for a, b in self.bounds)

    def nearest_index(self, axis: int, coord: float) -> int:
        """Interior index whose cell center is closest to ``coord`` (ties go low)."""
        a = self.bounds[axis][0]
        i = math.ceil((coord - a) / self.h - 1.0)
        return min(max(int(i), 0), self.n[axis] - 1)


def cell_centers(spec: GridSpec) -> tuple[np.ndarray, ...]:
    """Per-axis 1-D arrays of interior cell-center coordinates."""
    h = spec.h
    return tuple(a + (np.arange(k) + 0.5) * h for (a, _), k in zip(spec.bounds, spec.n))


def extended_coords(spec: GridSpec) -> tuple[np.ndarray, ...]:
    h = spec.h
    return tuple(a + (np.arange(k + 2) - 0.5) * h for (a, _), k in zip(spec.bounds, spec.n))


def mesh(spec: GridSpec) -> tuple[np.ndarray, ...]:
    """Broadcastable coordinate arrays (``np.ix_`` style) for the interior."""
    return np.ix_(*cell_centers(spec))


def interior_slice(dim: int) -> tuple[slice, ...]:
    return (slice(1, -1),) * dim


@dataclass
class ScalarField:
    """Order parameter on the extended (ghosted) grid."""

    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != self.spec.extended_shape:
            raise DimensionError(
                f"extended array shape {self.values.shape} != {self.spec.extended_shape}"
            )

    @property
    def interior(self) -> np.ndarray:
        return self.values[interior_slice(self.spec.dim)]

    @property
    def dtype(self) -> np.dtype:
        return self.values.dtype

    @property
    def precision(self) -> str:
        return precision_of(self.values.dtype)

    def copy(self) -> ScalarField:
        return ScalarField(self.spec, self.values.copy())

    def astype(self, precision: str) -> ScalarField:
        return ScalarField(self.spec, np.ascontiguousarray(self.values, dtype=dtype_for(precision)))


def fill_ghosts(field: ScalarField) -> ScalarField:
    """Replicate boundary-adjacent interior values into the ghost layer, in place.

    Axes are processed in order, each copy spanning the full extent of the
    other axes, so edges and corners end up holding the nearest interior
    corner value. Only the ghost layer is written.
    """
    v = field.values
    for axis in range(v.ndim):
        lo_ghost = [slice(None)] * v.ndim
        lo_in = [slice(None)] * v.ndim
        hi_ghost = [slice(None)] * v.ndim
        hi_in = [slice(None)] * v.ndim
        lo_ghost[axis], lo_in[axis] = 0, 1
        hi_ghost[axis], hi_in[axis] = -1, -2
        v[tuple(lo_ghost)] = v[tuple(lo_in)]
        v[tuple(hi_ghost)] = v[tuple(hi_in)]
    return field


def make_field(spec: GridSpec, interior, precision: str = "f64") -> ScalarField:
    """Wrap interior values in a ghosted field and fill the ghosts."""
    interior = np.asarray(interior)
    if interior.shape != spec.shape:
        raise DimensionError(f"interior shape {interior.shape} != grid shape {spec.shape}")
    values = np.empty(spec.extended_shape, dtype=dtype_for(precision))
    values[interior_slice(spec.dim)] = interior
    return fill_ghosts(ScalarField(spec, values))


# -- raw dumps ---------------------------------------------------------------


def _header(field: ScalarField, fmt: str) -> str:
    spec = field.spec
    lines = [
        _DUMP_MAGIC,
        f"dim {spec.dim}",
        "n " + " ".join(str(k) for k in spec.n),
        "bounds " + " ".join(repr(x) for ab in spec.bounds for x in ab),
        f"h {spec.h!r}",
        f"precision {field.precision}",
        f"format {fmt}",
        "end",
    ]
    return "\n".join(lines) + "\n"


def dump_field(field: ScalarField, path, fmt: str = "binary") -> Path:
    """Write the interior values with a plain-text header.

    ``binary`` appends the raw little-endian array (row-major); ``text``
    appends one value per line with enough digits to round-trip.
    """
    if fmt not in ("binary", "text"):
        raise ParameterError(f"dump format must be 'binary' or 'text', got {fmt!r}")
    path = Path(path)
    interior = np.ascontiguousarray(field.interior)
    with open(path, "wb") as fh:
        fh.write(_header(field, fmt).encode("ascii"))
        if fmt == "binary":
            fh.write(interior.astype(interior.dtype.newbyteorder("<"), copy=False).tobytes(order="C"))
        else:
            digits = 9 if field.precision == "f32" else 17
            body = "\n".join(f"{x:.{digits}g}" for x in interior.ravel().tolist())
            fh.write(body.encode("ascii") + b"\n")
    return path


def load_field(path) -> ScalarField:
    """Read a dump written by :func:`dump_field`."""
    with open(path, "rb") as fh:
        if fh.readline().decode("ascii").strip() != _DUMP_MAGIC:
            raise ParameterError(f"{path}: not a field dump")
        meta = {}
        while True:
            line = fh.readline().decode("ascii").strip()
            if not line:
                raise ParameterError(f"{path}: truncated header")
            if line == "end":
                break
            key, _, rest = line.partition(" ")
            meta[key] = rest.split()
        body = fh.read()
    n = tuple(int(k) for k in meta["n"])
    flat = [float(x) for x in meta["bounds"]]
    spec = GridSpec(bounds=tuple(zip(flat[0::2], flat[1::2])), n=n)
    precision = meta["precision"][0]
    dtype = dtype_for(precision)
    if meta["format"][0] == "binary":
        interior = np.frombuffer(body, dtype=dtype.newbyteorder("<")).astype(dtype)
    else:
        interior = np.array(body.decode("ascii").split(), dtype=np.float64).astype(dtype)
    if interior.size != math.prod(n):
        raise DimensionError(f"{path}: expected {math.prod(n)} values, found {interior.size}")
    return make_field(spec, interior.reshape(n), precision)
