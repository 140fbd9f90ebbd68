"""Parameter-grid sweeps: per-cell cycle search over ascending lengths.

Each grid cell runs the build/solve/decide pipeline for K ascending until
the first verified cycle; the region map records the minimal length, the
relevant score, and solver effort.  Output is a stable CSV (atomic
chunk-wise rewrites, resumable) that two identical runs reproduce
byte-for-byte apart from the timing column.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .analysis import CYCLE_FOUND, NO_CYCLE, DecisionThresholds, run_cycle_search
from .function_classes import (
    CocoerciveOperator,
    MonotoneOperator,
    SmoothConvex,
    SmoothStronglyConvex,
)
from .methods import heavy_ball, inexact_gradient, nesterov, three_operator_splitting

__all__ = [
    "AxisSpec",
    "SweepConfig",
    "CellResult",
    "RegionMap",
    "CorruptSweepError",
    "default_axes",
    "in_region",
    "run_sweep",
    "emit_csv",
    "parse_csv",
    "csv_rows_equal",
    "CSV_HEADER",
]

CSV_HEADER = "param1,param2,status,k_min,score,iters,ms"

STATUS_CYCLE = "cycle"
STATUS_NO_CYCLE = "no-cycle"
STATUS_INCONCLUSIVE = "inconclusive"  # clean solves, score in the dead band
STATUS_FAILED = "failed"              # some cycle length ended in a solver failure
STATUS_SKIPPED = "skipped"


class CorruptSweepError(ValueError):
    """An existing sweep CSV cannot be trusted for resuming."""


@dataclass(frozen=True)
class AxisSpec:
    name: str
    lo: float
    hi: float
    count: int

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)


@dataclass
class SweepConfig:
    method: str                      # hb | nag | igd | tos
    L: float = 1.0
    mu: float = 0.0
    beta_c: float = 1.0              # cocoercivity constant of the B operator
    alpha: float | None = None       # resolvent scale; None ties it to gamma
    axis1: AxisSpec | None = None
    axis2: AxisSpec | None = None
    k_min: int = 2
    k_max: int = 25
    grid: int = 50
    thresholds: DecisionThresholds = field(default_factory=DecisionThresholds)
    out_dir: str = "."
    jobs: int = 1
    resume: bool = False
    region_filter: bool = True
    chunk: int = 16
    max_failure_fraction: float = 0.05

    def axes(self) -> tuple[AxisSpec, AxisSpec]:
        a1, a2 = default_axes(self.method, self.L, self.grid)
        return (self.axis1 or a1, self.axis2 or a2)


def default_axes(method: str, L: float, grid: int) -> tuple[AxisSpec, AxisSpec]:
    """The parameter box of interest per method (closed regions)."""
    if method == "hb":
        return AxisSpec("gamma", 0.0, 4.0 / L, grid), AxisSpec("beta", 0.0, 1.0, grid)
    if method == "nag":
        return AxisSpec("gamma", 0.0, 2.0 / L, grid), AxisSpec("beta", 0.0, 1.0, grid)
    if method == "igd":
        return AxisSpec("gamma", 0.0, 2.0 / L, grid), AxisSpec("eps", 0.0, 1.0, grid)
    if method == "tos":
        return AxisSpec("gamma", 0.0, 2.0 / L, grid), AxisSpec("beta", 0.0, 2.0, grid)
    raise ValueError(f"unknown method {method!r}")


def in_region(method: str, L: float, p1: float, p2: float) -> bool:
    """Membership in the closed region where the method converges on
    quadratics (cells on the boundary included: that is where some of the
    interesting cycles live)."""
    tol = 1e-12
    if method == "hb":
        gamma, beta = p1, p2
        return 0 <= beta <= 1 and 0 <= gamma <= 2.0 * (1.0 + beta) / L + tol
    if method == "nag":
        gamma, beta = p1, p2
        return (
            0 <= beta <= 1
            and 0 <= gamma <= 2.0 * (1.0 + beta) / (L * (1.0 + 2.0 * beta)) + tol
        )
    if method == "igd":
        gamma, eps = p1, p2
        return 0 <= gamma <= 2.0 / L + tol and 0 <= eps <= 1
    if method == "tos":
        gamma, beta = p1, p2
        return 0 <= gamma <= 2.0 / L + tol and 0 <= beta <= 2
    raise ValueError(f"unknown method {method!r}")


def build_method(config: SweepConfig, p1: float, p2: float):
    """Method instance plus bound classes for one grid cell.

    Returns None when the cell is structurally degenerate (a zero update
    or zero resolvent scale), which sweeps record as skipped.
    """
    L, mu = config.L, config.mu
    f_class = SmoothStronglyConvex(mu, L) if mu > 0 else SmoothConvex(L)
    if config.method == "hb":
        return heavy_ball(p1, p2), f_class
    if config.method == "nag":
        return nesterov(p1, p2), f_class
    if config.method == "igd":
        return inexact_gradient(p1, p2), f_class
    if config.method == "tos":
        alpha = config.alpha if config.alpha is not None else p1
        if p2 == 0 or alpha <= 0:
            return None
        classes = {
            "A": MonotoneOperator(),
            "B": CocoerciveOperator(config.beta_c),
            "f": f_class,
        }
        return three_operator_splitting(p1, p2, alpha), classes
    raise ValueError(f"unknown method {config.method!r}")


@dataclass
class CellResult:
    param1: float
    param2: float
    status: str
    k_min: int | None
    score: float | None
    iterations: int
    ms: float


@dataclass
class RegionMap:
    config: SweepConfig
    axis1: AxisSpec
    axis2: AxisSpec
    cells: list[CellResult]

    def cell(self, i: int, j: int) -> CellResult:
        return self.cells[i * self.axis2.count + j]


def solve_cell(config: SweepConfig, p1: float, p2: float) -> CellResult:
    """Ascending-K scan with early exit at the first verified cycle."""
    t0 = time.perf_counter()
    if config.region_filter and not in_region(config.method, config.L, p1, p2):
        return CellResult(p1, p2, STATUS_SKIPPED, None, None, 0, 0.0)
    built = build_method(config, p1, p2)
    if built is None:
        return CellResult(p1, p2, STATUS_SKIPPED, None, None, 0, 0.0)
    method, classes = built

    iterations = 0
    best_score = math.inf
    saw_inconclusive = False
    saw_failure = False
    for K in range(config.k_min, config.k_max + 1):
        try:
            cert = run_cycle_search(method, classes, K, thresholds=config.thresholds)
        except np.linalg.LinAlgError:
            saw_failure = True
            continue
        iterations += cert.metadata.get("solver_iterations", 0)
        if cert.verdict == CYCLE_FOUND:
            ms = 1e3 * (time.perf_counter() - t0)
            return CellResult(p1, p2, STATUS_CYCLE, K, cert.score, iterations, ms)
        if cert.verdict == NO_CYCLE:
            if cert.score < best_score:
                best_score = cert.score
        else:
            saw_inconclusive = True
            if cert.solver_status not in ("Optimal", "StructurallyInfeasible"):
                saw_failure = True
    ms = 1e3 * (time.perf_counter() - t0)
    if saw_failure:
        status = STATUS_FAILED
    elif saw_inconclusive:
        status = STATUS_INCONCLUSIVE
    else:
        status = STATUS_NO_CYCLE
    score = None if math.isinf(best_score) else best_score
    return CellResult(p1, p2, status, None, score, iterations, ms)


def _solve_cell_args(args) -> CellResult:
    config, p1, p2 = args
    return solve_cell(config, p1, p2)


def _fmt_float(v: float) -> str:
    return f"{v:.12g}"


def format_row(cell: CellResult) -> str:
    return ",".join(
        [
            _fmt_float(cell.param1),
            _fmt_float(cell.param2),
            cell.status,
            "" if cell.k_min is None else str(cell.k_min),
            "" if cell.score is None else _fmt_float(cell.score),
            str(cell.iterations),
            f"{cell.ms:.1f}",
        ]
    )


def _parse_row(line: str) -> CellResult:
    parts = line.split(",")
    if len(parts) != 7:
        raise ValueError(f"expected 7 fields, got {len(parts)}")
    p1, p2 = float(parts[0]), float(parts[1])
    status = parts[2]
    if status not in (
        STATUS_CYCLE, STATUS_NO_CYCLE, STATUS_INCONCLUSIVE, STATUS_FAILED, STATUS_SKIPPED
    ):
        raise ValueError(f"unknown status {status!r}")
    k_min = int(parts[3]) if parts[3] else None
    score = float(parts[4]) if parts[4] else None
    return CellResult(p1, p2, status, k_min, score, int(parts[5]), float(parts[6]))


def _atomic_write(path, text: str) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="ascii") as fh:
        fh.write(text)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def emit_csv(region: RegionMap | Iterable[CellResult], path) -> None:
    cells = region.cells if isinstance(region, RegionMap) else list(region)
    text = CSV_HEADER + "\n" + "".join(format_row(c) + "\n" for c in cells)
    _atomic_write(path, text)


def parse_csv(path, allow_partial_tail: bool = True) -> list[CellResult]:
    """Read a sweep CSV; a partial final line (interrupted write) is
    dropped, anything else malformed raises CorruptSweepError."""
    with open(path, encoding="ascii") as fh:
        data = fh.read()
    complete = data.endswith("\n")
    lines = data.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise CorruptSweepError(f"{path}: empty file")
    if lines[0] != CSV_HEADER:
        raise CorruptSweepError(f"{path}: unexpected header {lines[0]!r}")
    rows: list[CellResult] = []
    for idx, line in enumerate(lines[1:], start=2):
        last = idx == len(lines)
        try:
            rows.append(_parse_row(line))
        except ValueError as exc:
            if last and allow_partial_tail:
                break
            raise CorruptSweepError(f"{path}:{idx}: {exc}") from exc
    if not complete and rows and allow_partial_tail:
        # The final newline never made it to disk: that row is suspect.
        rows.pop()
    return rows


def csv_rows_equal(path_a, path_b, ignore_timing: bool = True) -> bool:
    """Byte comparison of two sweep CSVs, optionally masking the ms column."""
    def canon(path):
        with open(path, encoding="ascii") as fh:
            lines = fh.read().splitlines()
        if ignore_timing:
            out = [lines[0]]
            for ln in lines[1:]:
                parts = ln.split(",")
                if len(parts) == 7:
                    parts[6] = "-"
                out.append(",".join(parts))
            return out
        return lines

    return canon(path_a) == canon(path_b)


def run_sweep(config: SweepConfig, csv_path=None, progress=None) -> RegionMap:
    """Sweep the grid (optionally resuming) and return the region map.

    ``csv_path`` enables chunked atomic persistence; with ``resume`` set,
    cells already present in the file (keyed by their formatted parameter
    pair) are not re-solved.
    """
    ax1, ax2 = config.axes()
    v1, v2 = ax1.values(), ax2.values()
    cells_params = [(p1, p2) for p1 in v1 for p2 in v2]

    done: dict[tuple[str, str], CellResult] = {}
    if config.resume and csv_path is not None and os.path.exists(csv_path):
        for row in parse_csv(csv_path):
            done[(_fmt_float(row.param1), _fmt_float(row.param2))] = row

    pending = [
        (p1, p2)
        for (p1, p2) in cells_params
        if (_fmt_float(p1), _fmt_float(p2)) not in done
    ]

    results: dict[tuple[str, str], CellResult] = dict(done)
    solved = 0

    def flush():
        if csv_path is None:
            return
        ordered = []
        for p1, p2 in cells_params:
            key = (_fmt_float(p1), _fmt_float(p2))
            if key in results:
                ordered.append(results[key])
            else:
                break
        emit_csv(ordered, csv_path)

    def record(cell: CellResult):
        nonlocal solved
        results[(_fmt_float(cell.param1), _fmt_float(cell.param2))] = cell
        solved += 1
        if progress is not None:
            progress(solved, len(pending), cell)
        if solved % config.chunk == 0:
            flush()

    if config.jobs <= 1:
        for p1, p2 in pending:
            record(solve_cell(config, p1, p2))
    else:
        args = [(config, p1, p2) for (p1, p2) in pending]
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            for cell in pool.map(_solve_cell_args, args, chunksize=1):
                record(cell)

    cells = [results[(_fmt_float(p1), _fmt_float(p2))] for (p1, p2) in cells_params]
    region = RegionMap(config=config, axis1=ax1, axis2=ax2, cells=cells)
    if csv_path is not None:
        emit_csv(region, csv_path)
    return region


def failure_fraction(region: RegionMap) -> float:
    """Share of non-skipped cells that ended in a solver failure."""
    active = [c for c in region.cells if c.status != STATUS_SKIPPED]
    if not active:
        return 0.0
    return sum(c.status == STATUS_FAILED for c in active) / len(active)
