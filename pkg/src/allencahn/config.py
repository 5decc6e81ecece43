"""Run configuration files.

An INI file with a single ``[run]`` section. Either name a ``preset`` (and
optionally a ``scale``) and override individual keys, or describe the run
from scratch with ``shape``, ``n``, ``bounds`` and ``steps``::

    [run]
    preset = circle2d
    scale = 2
    backend = stencil
    precision = f64
    threads = 2
    diag_stride = 50
    r0 = 0.25

Recognised keys: preset, scale, shape, n, bounds, m, dt, steps, r0, r1, r2,
amplitude, star_branch, seed, backend, precision, threads, diag_stride,
snapshot_stride, err_stride.
"""

from __future__ import annotations

import configparser
from dataclasses import replace

from .errors import ConfigError
from .grid import GridSpec
from .initial import SHAPES
from .params import RunConfig, default_params
from .presets import get_preset

KEYS = {
    "preset", "scale", "shape", "n", "bounds", "m", "dt", "steps", "r0", "r1", "r2",
    "amplitude", "star_branch", "seed", "backend", "precision", "threads",
    "diag_stride", "snapshot_stride", "err_stride",
}
_INT_FIELDS = ("seed", "threads", "diag_stride", "snapshot_stride", "err_stride")
_SHAPE_FIELDS = {"r0": "r0", "r1": "r1", "r2": "r2", "amplitude": "amplitude", "star_branch": "branch"}


def parse_config_file(path) -> dict:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    if not parser.read(path):
        raise ConfigError(f"cannot read config file {path}")
    if not parser.has_section("run"):
        raise ConfigError(f"{path}: missing [run] section")
    values = dict(parser.items("run"))
    unknown = set(values) - KEYS
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    return values


def build_config(values: dict) -> RunConfig:
    """Turn a flat key/value mapping (strings or numbers) into a RunConfig."""
    values = {k: v for k, v in values.items() if v is not None}
    try:
        return _build(values)
    except (TypeError, ValueError, KeyError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad configuration: {exc}") from exc


def _floats(v):
    return [float(x) for x in str(v).replace(",", " ").split()]


def _build(values: dict) -> RunConfig:
    scale = int(values.get("scale", 1))
    if "preset" in values:
        base = get_preset(values["preset"])
        grid = base.grid(scale)
        init = base.init
        m = int(values.get("m", base.m))
        n_steps = base.n_steps(scale)
    else:
        for key in ("shape", "n", "bounds", "steps"):
            if key not in values:
                raise ConfigError(f"without a preset the config needs {key!r}")
        n = tuple(int(x) for x in _floats(values["n"]))
        flat = _floats(values["bounds"])
        if len(flat) != 2 * len(n):
            raise ConfigError(f"bounds needs {2 * len(n)} numbers, got {len(flat)}")
        grid = GridSpec(bounds=tuple(zip(flat[0::2], flat[1::2])), n=n)
        try:
            init = SHAPES[values["shape"]]()
        except KeyError:
            raise ConfigError(f"unknown shape {values['shape']!r}; choose from {sorted(SHAPES)}") from None
        m = int(values["m"]) if "m" in values else None
        n_steps = None
    if "shape" in values and "preset" in values and values["shape"] != init.kind:
        init = SHAPES[values["shape"]]()
    shape_changes = {}
    for key, attr in _SHAPE_FIELDS.items():
        if key in values:
            if not hasattr(init, attr):
                raise ConfigError(f"{key!r} does not apply to shape {init.kind!r}")
            shape_changes[attr] = values[key] if key == "star_branch" else float(values[key])
    if shape_changes:
        init = replace(init, **shape_changes)
    dt = float(values["dt"]) if "dt" in values else None
    params = default_params(grid, m, dt)
    if "steps" in values:
        n_steps = int(values["steps"])
    kwargs = {k: int(values[k]) for k in _INT_FIELDS if k in values}
    for key in ("backend", "precision"):
        if key in values:
            kwargs[key] = str(values[key])
    return RunConfig(grid=grid, params=params, init=init, n_steps=n_steps, **kwargs)


def load_config(path, overrides: dict | None = None) -> RunConfig:
    values = parse_config_file(path)
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return build_config(values)
