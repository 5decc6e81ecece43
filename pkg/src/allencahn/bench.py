"""Runtime and cross-backend error tables.

``bench`` times each backend on each preset and prints a table laid out like
a runtime-per-initial-condition table: one column per preset, one row per
backend, seconds with the ratio to the fastest backend in parentheses.

Absolute seconds are hardware specific. The comparison that carries over is
the ratio between an interpreted per-cell baseline and a bulk stencil
kernel; published figures such as 251.6x (2D) or 4766x (3D) compare an
interpreted baseline with GPU execution and are not targets here.
"""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass
from pathlib import Path

from .presets import SUITES, get_preset
from .stepper import run, run_dual

BACKEND_ORDER = ("reference", "stencil-padcopy", "stencil")


@dataclass
class BenchRecord:
    preset: str
    backend: str
    steps: int  # steps actually timed
    full_steps: int  # steps of the complete preset run
    seconds: float  # best of the repetitions, for `steps` steps
    ratio: float = math.nan  # projected time / fastest backend's projected time
    speedup: float = math.nan  # reference projected time / this backend's projected time

    @property
    def steps_per_second(self) -> float:
        return self.steps / self.seconds

    @property
    def projected_seconds(self) -> float:
        """Time for the full run at the measured per-step rate."""
        return self.full_steps / self.steps_per_second

    @property
    def projected(self) -> bool:
        return self.steps != self.full_steps


def bench_preset(name: str, scale: int = 1, backends=BACKEND_ORDER, reps: int = 1,
                 threads: int = 1, max_steps: dict | int | None = None) -> list[BenchRecord]:
    """Best-of-``reps`` stepping time per backend.

    ``max_steps`` caps the timed step count (an int for every backend, or a
    mapping backend -> cap). Per-step cost does not depend on the field
    values, so a capped run measures the same rate as the full run; the
    table then shows the projected full-run time.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    config = get_preset(name).config(scale, threads=threads)
    full = config.n_steps
    records = []
    for backend in backends:
        cap = max_steps.get(backend) if isinstance(max_steps, dict) else max_steps
        steps = min(full, cap) if cap else full
        cfg = config.with_(backend=backend, n_steps=steps, diag_stride=steps)
        best = min(run(cfg).seconds for _ in range(reps))
        records.append(BenchRecord(name, backend, steps, full, best))
    fastest = min(r.projected_seconds for r in records)
    ref = next((r for r in records if r.backend == "reference"), None)
    for r in records:
        r.ratio = r.projected_seconds / fastest
        if ref is not None:
            r.speedup = ref.projected_seconds / r.projected_seconds
    return records


def format_table(records: list[BenchRecord]) -> str:
    presets = list(dict.fromkeys(r.preset for r in records))
    backends = [b for b in BACKEND_ORDER if any(r.backend == b for r in records)]
    by_key = {(r.preset, r.backend): r for r in records}
    width = max(18, *(len(p) + 2 for p in presets))
    lines = ["".ljust(16) + "".join(p.rjust(width) for p in presets)]
    lines.append("Iterations".ljust(16) + "".join(
        str(by_key[(p, backends[0])].full_steps + 1).rjust(width) for p in presets))
    lines.append("-" * (16 + width * len(presets)))
    for b in backends:
        cells = []
        for p in presets:
            r = by_key.get((p, b))
            if r is None:
                cells.append("-".rjust(width))
                continue
            mark = "*" if r.projected else ""
            text = f"{r.projected_seconds:.3f}{mark}"
            if r.ratio > 1.0 + 1e-12:
                text += f"({r.ratio:.2f})"
            cells.append(text.rjust(width))
        lines.append(b.ljust(16) + "".join(cells))
    if any(r.projected for r in records):
        lines.append("* projected from a capped run at the measured steps/second")
    return "\n".join(lines)


def write_bench_csv(records: list[BenchRecord], path) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["preset", "backend", "iterations", "steps_timed", "seconds",
                         "steps_per_second", "projected_seconds", "ratio_to_fastest",
                         "speedup_vs_reference"])
        for r in records:
            writer.writerow([r.preset, r.backend, r.full_steps + 1, r.steps, repr(r.seconds),
                             repr(r.steps_per_second), repr(r.projected_seconds), repr(r.ratio), repr(r.speedup)])
    return path


def table3(dim: int, scale: int = 2, precisions=("f64", "f64"), threads: int = 1,
           backends=("reference", "stencil"), names=None) -> dict[str, float]:
    """Err between two backends (and precisions) for every preset of one dimension."""
    out = {}
    for name in names or SUITES[dim]:
        config = get_preset(name).config(scale, threads=threads)
        config = config.with_(diag_stride=config.n_steps)
        _, _, err = run_dual(config, backends, precisions)
        out[name] = err
    return out


def format_table3(dim: int, errs: dict[str, float]) -> str:
    names = list(errs)
    width = max(14, *(len(n) + 2 for n in names))
    head = "Dimension".ljust(10) + "".join(n.rjust(width) for n in names)
    row = f"{dim}D".ljust(10) + "".join(f"{errs[n]:.3e}".rjust(width) for n in names)
    return head + "\n" + row


def records_as_dicts(records):
    return [asdict(r) for r in records]
