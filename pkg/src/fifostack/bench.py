"""Benchmark grids of generator parameters, plus CSV reports.

Each grid row is a generator parameter set; ``reps`` instances are drawn per
row with seeds ``seed0, seed0 + 1, ...`` and every requested algorithm is run
on each.  Failures are recorded as a status and never stop the suite.
"""

from __future__ import annotations

import csv
import logging
import statistics
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

from .errors import CapacityError, ParameterError
from .exact import TimeLimitExceeded
from .gen import GenParams, generate
from .runner import RunOptions, run, too_big_for

log = logging.getLogger(__name__)

# (p_max, m, k, r_min, r_max, d); n follows from m and the bin-count range
TABLE1_ROWS: tuple[tuple[int, int, int, int, int, int], ...] = tuple(
    (p, m, k, rmin, rmax, d)
    for p, m, k, rmin, rmaxes, ds in (
        (14, 100, 8, 10, (20, 30, 40), (4, 6, 8)),
        (18, 300, 10, 15, (25, 35, 45), (5, 7, 10)),
        (22, 500, 12, 20, (30, 40, 50), (6, 9, 12)),
    )
    for rmax in rmaxes
    for d in ds
)
TABLE3_ROWS: tuple[tuple[int, int, int, int, int, int], ...] = (
    (2, 3, 2, 4, 6, 2),
    (2, 4, 2, 4, 6, 2),
    (4, 5, 4, 4, 8, 2),
    (4, 6, 4, 6, 10, 2),
    (4, 8, 5, 6, 10, 2),
    (5, 10, 5, 5, 15, 2),
)
SUITES = {"table1-like": TABLE1_ROWS, "table3-like": TABLE3_ROWS}
DEFAULT_ALGOS = {
    "table1-like": ("decision-cut",),
    "table3-like": ("decision-cut", "dpw", "ilp-bin-tiny", "ilp-pallet-tiny"),
    "custom": ("decision-cut",),
}

DETAIL_HEADER = [
    "row", "rep", "seed", "instance", "n", "p_max", "m", "k", "r_min", "r_max", "d",
    "algo", "optimum", "time_ms", "nodes", "status",
]
SUMMARY_HEADER = ["row", "algo", "reps", "ok", "mean_n", "mean_time_ms", "max_time_ms", "optima", "status"]


@dataclass
class BenchRow:
    row: int
    rep: int
    seed: int
    params: GenParams
    n: int | None
    algo: str
    optimum: int | None
    time_ms: float | None
    nodes: int | None
    status: str  # ok, skipped, over_budget, timeout, param_error

    @property
    def instance_id(self) -> str:
        return f"r{self.row}s{self.seed}"

    def csv_row(self) -> list[str]:
        p = self.params
        cells = [self.row, self.rep, self.seed, self.instance_id, self.n, p.p_max, p.m, p.k, p.r_min, p.r_max, p.d,
                 self.algo, self.optimum, None if self.time_ms is None else f"{self.time_ms:.3f}", self.nodes,
                 self.status]
        return ["" if c is None else str(c) for c in cells]


def parse_rows(text: str, total: int) -> list[int]:
    """``"1-9,19"`` -> ``[1, ..., 9, 19]`` (1-based, validated)."""
    picked: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        lo, _, hi = part.partition("-")
        a, b = int(lo), int(hi or lo)
        if not 1 <= a <= b <= total:
            raise ValueError(f"row range {part!r} outside 1..{total}")
        picked.extend(range(a, b + 1))
    return sorted(set(picked))


def read_grid(fh: TextIO) -> list[tuple[int, ...]]:
    """Custom grid: CSV with header ``p_max,m,k,r_min,r_max,d``."""
    reader = csv.DictReader(line for line in fh if line.strip() and not line.startswith("#"))
    keys = ("p_max", "m", "k", "r_min", "r_max", "d")
    missing = [key for key in keys if key not in (reader.fieldnames or [])]
    if missing:
        raise ValueError(f"grid file lacks columns: {', '.join(missing)}")
    return [tuple(int(rec[key]) for key in keys) for rec in reader]


def run_suite(
    grid: Sequence[tuple[int, ...]],
    algos: Iterable[str],
    reps: int = 10,
    seed0: int = 0,
    opts: RunOptions | None = None,
    row_ids: Sequence[int] | None = None,
) -> list[BenchRow]:
    algos = tuple(algos)
    row_ids = row_ids or list(range(1, len(grid) + 1))
    out: list[BenchRow] = []
    for row_id, (p_max, m, k, r_min, r_max, d) in zip(row_ids, grid):
        for rep in range(reps):
            seed = seed0 + rep
            params = GenParams(p_max, k, m, r_min, r_max, d, seed)
            try:
                inst = generate(params)
            except ParameterError as exc:
                log.warning("row %d: %s", row_id, exc)
                out.extend(BenchRow(row_id, rep, seed, params, None, a, None, None, None, "param_error") for a in algos)
                continue
            optima = {}
            for algo in algos:
                rec = _run_one(row_id, rep, seed, params, inst, algo, opts)
                out.append(rec)
                if rec.status == "ok":
                    optima[algo] = rec.optimum
            if len(set(optima.values())) > 1:
                log.error("row %d seed %d: algorithms disagree: %s", row_id, seed, optima)
    return out


def _run_one(row_id, rep, seed, params, inst, algo, opts) -> BenchRow:
    base = dict(row=row_id, rep=rep, seed=seed, params=params, n=inst.n, algo=algo)
    if too_big_for(algo, inst):
        return BenchRow(**base, optimum=None, time_ms=None, nodes=None, status="skipped")
    try:
        rep_ = run(algo, inst, opts)
    except TimeLimitExceeded:
        return BenchRow(**base, optimum=None, time_ms=None, nodes=None, status="timeout")
    except CapacityError as exc:
        log.info("row %d seed %d %s: %s", row_id, seed, algo, exc)
        return BenchRow(**base, optimum=None, time_ms=None, nodes=None, status="over_budget")
    return BenchRow(**base, optimum=rep_.optimum, time_ms=rep_.wall_time * 1000, nodes=rep_.nodes_expanded, status="ok")


def summarize(rows: Sequence[BenchRow]) -> list[list[str]]:
    groups: dict[tuple[int, str], list[BenchRow]] = {}
    for r in rows:
        groups.setdefault((r.row, r.algo), []).append(r)
    out = []
    for (row_id, algo), recs in sorted(groups.items()):
        ok = [r for r in recs if r.status == "ok"]
        ns = [r.n for r in recs if r.n is not None]
        times = [r.time_ms for r in ok]
        statuses = sorted({r.status for r in recs})
        out.append([
            str(row_id),
            algo,
            str(len(recs)),
            str(len(ok)),
            f"{statistics.fmean(ns):.1f}" if ns else "",
            f"{statistics.fmean(times):.3f}" if times else "",
            f"{max(times):.3f}" if times else "",
            " ".join(str(r.optimum) for r in ok),
            "ok" if statuses == ["ok"] else "+".join(statuses),
        ])
    return out


def write_csv(fh: TextIO, header: list[str], rows: Iterable[list[str]]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def plot_summary(summary: Sequence[list[str]], path: str, title: str = "") -> None:
    """Mean solve time per grid row and algorithm, log scale."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(8, 4))
    algos = sorted({rec[1] for rec in summary})
    for algo in algos:
        pts = [(int(rec[0]), float(rec[5])) for rec in summary if rec[1] == algo and rec[5]]
        if pts:
            xs, ys = zip(*pts)
            ax.plot(xs, ys, marker="o", label=algo)
    ax.set_yscale("log")
    ax.set_xlabel("grid row")
    ax.set_ylabel("mean time per instance [ms]")
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
