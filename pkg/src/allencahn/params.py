"""Scheme parameters: interface thickness, time step and stability guard."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .errors import ConfigError, ParameterError
from .grid import GridSpec, dtype_for

ATANH_09 = math.atanh(0.9)  # 0.5*ln(19) = 1.4722194895832204
DEFAULT_M = {2: 10, 3: 12}
BACKENDS = ("reference", "stencil", "stencil-padcopy")


def epsilon_m(h: float, m: int) -> float:
    """Interface thickness such that the tanh profile crosses +-0.9 over ``m`` cells."""
    if not h > 0:
        raise ParameterError(f"grid spacing must be positive, got {h}")
    if int(m) != m or m < 1:
        raise ParameterError(f"m must be a positive integer, got {m}")
    return h * m / (2.0 * math.sqrt(2.0) * ATANH_09)


def stable_dt_limit(h: float, dim: int) -> float:
    return h * h / (2 * dim)


@dataclass(frozen=True)
class SchemeParams:
    eps: float
    m: int
    dt: float
    h: float
    dim: int
    alpha: float = field(init=False)

    def __post_init__(self):
        if not self.eps > 0:
            raise ParameterError(f"eps must be positive, got {self.eps}")
        if not self.dt > 0:
            raise ParameterError(f"dt must be positive, got {self.dt}")
        if self.dim not in (2, 3):
            raise ParameterError(f"dim must be 2 or 3, got {self.dim}")
        limit = stable_dt_limit(self.h, self.dim)
        if self.dt > limit:
            raise ConfigError(
                f"dt={self.dt:.6g} exceeds the explicit diffusion limit h^2/(2*dim)={limit:.6g}"
            )
        object.__setattr__(self, "alpha", self.dt / self.eps**2)

    @property
    def diffusion_number(self) -> float:
        """dt/h^2, the off-center stencil weight."""
        return self.dt / self.h**2


def default_params(spec: GridSpec, m: int | None = None, dt: float | None = None) -> SchemeParams:
    """``dt = 0.1 h^2`` and ``eps = epsilon_m(h, m)`` unless overridden."""
    m = DEFAULT_M[spec.dim] if m is None else m
    h = spec.h
    dt = 0.1 * h * h if dt is None else dt
    return SchemeParams(eps=epsilon_m(h, m), m=m, dt=dt, h=h, dim=spec.dim)


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one simulation.

    ``snapshot_stride`` of 0 disables snapshots. ``seed`` feeds the random
    initial condition and is ignored by the deterministic shapes.
    """

    grid: GridSpec
    params: SchemeParams
    init: object  # initial.InitialCondition
    n_steps: int
    diag_stride: int = 1
    snapshot_stride: int = 0
    backend: str = "stencil"
    precision: str = "f64"
    threads: int = 1
    seed: int = 0
    err_stride: int = 1

    def __post_init__(self):
        if self.n_steps < 1:
            raise ConfigError(f"n_steps must be >= 1, got {self.n_steps}")
        if self.diag_stride < 1 or self.err_stride < 1 or self.snapshot_stride < 0:
            raise ConfigError("strides must be >= 1 (snapshot stride >= 0)")
        if self.backend not in BACKENDS:
            raise ConfigError(f"backend must be one of {BACKENDS}, got {self.backend!r}")
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        if self.params.dim != self.grid.dim or self.params.h != self.grid.h:
            raise ConfigError("scheme params were derived for a different grid")
        dtype_for(self.precision)

    @property
    def final_time(self) -> float:
        return self.n_steps * self.params.dt

    def with_(self, **changes) -> RunConfig:
        return replace(self, **changes)
