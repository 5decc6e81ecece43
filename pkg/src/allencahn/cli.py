"""Command-line interface: ``allencahn {run,bench,table3,presets}``.

Exit codes: 0 success, 2 configuration/usage error, 3 divergence, 4 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

from . import bench as bench_mod
from .analysis import write_diagnostics_csv
from .config import build_config, load_config
from .errors import AllenCahnError, ConfigError, DivergenceError
from .grid import dump_field
from .output import write_snapshot
from .presets import PRESETS, SUITES
from .stepper import run, run_dual

log = logging.getLogger("allencahn")

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED, EXIT_IO = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _add_common(p):
    p.add_argument("--scale", type=int, default=None, help="coarsen grid by s, steps by s^2")
    p.add_argument("--threads", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="allencahn", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="run one simulation")
    r.add_argument("--preset", choices=None)
    r.add_argument("--config", type=Path, help="INI file with a [run] section")
    r.add_argument("--backend", action="append", help="repeat to run two backends in lockstep")
    r.add_argument("--precision", choices=["f32", "f64"])
    r.add_argument("--steps", type=int)
    r.add_argument("--m", type=int)
    r.add_argument("--init", dest="shape", help="shape when not using a preset")
    r.add_argument("--n", help="cells per axis, e.g. '200 200'")
    r.add_argument("--bounds", help="per-axis bounds, e.g. '0 1 0 1'")
    r.add_argument("--r0", type=float)
    r.add_argument("--r1", type=float)
    r.add_argument("--r2", type=float)
    r.add_argument("--amplitude", type=float)
    r.add_argument("--star-branch", choices=["printed", "origin"])
    r.add_argument("--seed", type=int)
    r.add_argument("--diag-stride", type=int)
    r.add_argument("--snapshots", type=int, default=0, help="number of evenly spaced snapshots")
    r.add_argument("--dump-format", choices=["binary", "text"], default="binary")
    r.add_argument("--out", type=Path, default=Path("out"))
    _add_common(r)

    b = sub.add_parser("bench", help="time backends on presets")
    b.add_argument("--presets", default="2d", help="comma list, or '2d' / '3d' for a suite")
    b.add_argument("--backends", default=",".join(bench_mod.BACKEND_ORDER))
    b.add_argument("--reps", type=int, default=1)
    b.add_argument("--max-steps", type=int, help="cap timed steps for every backend")
    b.add_argument("--max-ref-steps", type=int, help="cap timed steps for the reference backend")
    b.add_argument("--csv", type=Path)
    _add_common(b)

    t = sub.add_parser("table3", help="cross-backend Err for every preset of one dimension")
    t.add_argument("--dim", type=int, choices=[2, 3], default=2)
    t.add_argument("--precision-pair", default="f64/f64", help="reference/stencil precisions")
    t.add_argument("--presets", help="comma list restricting the suite")
    _add_common(t)

    sub.add_parser("presets", help="list experiment presets")
    return parser


def _run_values(args) -> dict:
    values = {
        "preset": args.preset, "scale": args.scale, "threads": args.threads,
        "precision": args.precision, "steps": args.steps, "m": args.m, "shape": args.shape,
        "n": args.n, "bounds": args.bounds, "r0": args.r0, "r1": args.r1, "r2": args.r2,
        "amplitude": args.amplitude, "star_branch": args.star_branch, "seed": args.seed,
        "diag_stride": args.diag_stride if args.diag_stride is not None else (None if args.config else 1),
    }
    if args.backend and len(args.backend) == 1:
        values["backend"] = args.backend[0]
    return {k: v for k, v in values.items() if v is not None}


def cmd_run(args) -> int:
    values = _run_values(args)
    if args.config:
        config = load_config(args.config, values)
    else:
        if "preset" not in values and "shape" not in values:
            raise ConfigError("run needs --preset, --config, or --init with --n/--bounds/--steps")
        config = build_config(values)
    if args.snapshots:
        config = config.with_(snapshot_stride=max(1, math.ceil(config.n_steps / args.snapshots)))
    out = args.out
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc

    backends = args.backend or [config.backend]
    if len(backends) > 2:
        raise ConfigError("at most two backends can run together")
    if len(backends) == 2:
        rep_a, rep_b, err = run_dual(config, tuple(backends))
        for rep in (rep_a, rep_b):
            write_diagnostics_csv(rep.diagnostics, out / f"diagnostics_{rep.backend}.csv")
            dump_field(rep.final, out / f"final_{rep.backend}.raw", args.dump_format)
            print(f"{rep.backend}: {rep.steps} steps in {rep.seconds:.3f}s ({rep.steps_per_second:.1f} steps/s)")
        print(f"Err = {err:.6e}")
        return EXIT_OK

    def snap(step, field):
        write_snapshot(field, out / f"snap_{step:07d}", args.dump_format)

    report = run(config.with_(backend=backends[0]), snapshot=snap if config.snapshot_stride else None)
    write_diagnostics_csv(report.diagnostics, out / "diagnostics.csv")
    dump_field(report.final, out / "final.raw", args.dump_format)
    last = report.diagnostics[-1]
    radius = "" if last.radius is None else f" radius={last.radius:.6f}"
    print(
        f"{report.backend} {config.precision} dim={config.grid.dim} n={config.grid.n} "
        f"steps={report.steps} T={config.final_time:.6g} time={report.seconds:.3f}s "
        f"({report.steps_per_second:.1f} steps/s) min={last.min:.4f} max={last.max:.4f} "
        f"separated={last.separated_fraction:.3f}{radius}"
    )
    return EXIT_OK


def _preset_names(spec: str) -> list[str]:
    if spec in ("2d", "3d"):
        return SUITES[int(spec[0])]
    names = [s.strip() for s in spec.split(",") if s.strip()]
    for n in names:
        if n not in PRESETS:
            raise ConfigError(f"unknown preset {n!r}; available: {', '.join(PRESETS)}")
    return names


def cmd_bench(args) -> int:
    backends = [b.strip() for b in args.backends.split(",")]
    caps = {}
    for b in backends:
        cap = args.max_steps
        if b == "reference" and args.max_ref_steps:
            cap = min(cap, args.max_ref_steps) if cap else args.max_ref_steps
        caps[b] = cap
    records = []
    for name in _preset_names(args.presets):
        records += bench_mod.bench_preset(name, args.scale or 1, backends, args.reps,
                                          args.threads or 1, caps)
    print(bench_mod.format_table(records))
    if args.csv:
        bench_mod.write_bench_csv(records, args.csv)
    return EXIT_OK


def cmd_table3(args) -> int:
    try:
        pair = tuple(args.precision_pair.split("/"))
        if len(pair) != 2:
            raise ValueError
    except ValueError:
        raise ConfigError(f"--precision-pair must look like f64/f32, got {args.precision_pair!r}") from None
    names = _preset_names(args.presets) if args.presets else None
    errs = bench_mod.table3(args.dim, args.scale or 2, pair, args.threads or 1, names=names)
    print(bench_mod.format_table3(args.dim, errs))
    return EXIT_OK


def cmd_presets(args) -> int:
    print(f"{'name':<14}{'grid':<16}{'m':>3}{'iterations':>12}{'T':>10}  init")
    for p in PRESETS.values():
        grid = "x".join(str(k) for k in p.n)
        print(f"{p.name:<14}{grid:<16}{p.m:>3}{p.iterations:>12}{p.final_time():>10.4g}  {p.init}")
    return EXIT_OK


COMMANDS = {"run": cmd_run, "bench": cmd_bench, "table3": cmd_table3, "presets": cmd_presets}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
        return COMMANDS[args.command](args)
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (ConfigError, AllenCahnError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
