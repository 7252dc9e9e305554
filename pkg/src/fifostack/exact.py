"""Exact state-space solvers and brute-force oracles.

Two searches over implicit DAGs of configurations:

* the processing graph, one vertex per configuration, one arc per single bin
  removal (:func:`solve_processing_bfs`);
* the decision graph, restricted to configurations where no front bin belongs
  to an open pallet; an arc opens one pallet and then drains every front bin of
  an open pallet (:func:`solve_decision_bfs`).

Both compute the min over paths of the max open count level by level, so all
predecessors of a node are final before its value is fixed.  In the decision
graph the open count peaks right after the opening removal and only falls
during the automatic steps, so arcs are scored with that peak.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .errors import CapacityError, NotFoundUnderCut
from .instance import (
    BinOrder,
    Instance,
    PalletOrder,
    SequenceOrder,
    Solution,
    Verdict,
    build_first_last,
    delta_open,
    pallet_order_to_processing,
    verify_sequence_solution,
)

DEFAULT_PROCESSING_BUDGET = 10**8
DEFAULT_DECISION_BUDGET = 10**7
DEFAULT_CUT_STEP = 5


class TimeLimitExceeded(CapacityError):
    pass


@dataclass
class TraceStep:
    cfg: tuple[int, ...]
    val: int
    open_count: int
    arc_peak: int  # open count right after the step entering ``cfg``


@dataclass
class SearchReport:
    algo: str
    optimum: int
    solution: Solution | None
    nodes_expanded: int = 0
    peak_frontier: int = 0
    wall_time: float = 0.0
    cut_iterations: int = 0
    sequences: SequenceOrder | None = None
    trace: list[TraceStep] = field(default_factory=list, repr=False)

    def csv_row(self, instance_id: str) -> list[str]:
        return [
            instance_id,
            self.algo,
            str(self.optimum),
            str(self.nodes_expanded),
            f"{self.wall_time * 1000:.3f}",
            str(self.cut_iterations),
        ]


CSV_HEADER = ["instance", "algo", "optimum", "nodes", "time_ms", "iterations"]


class _Deadline:
    def __init__(self, limit_s: float | None) -> None:
        self.limit = limit_s
        self.stop = None if limit_s is None else time.perf_counter() + limit_s

    def check(self) -> None:
        if self.stop is not None and time.perf_counter() > self.stop:
            raise TimeLimitExceeded(f"time limit of {self.limit:g} s exceeded")


# ---------------------------------------------------------------------------
# processing graph


class _PNode:
    __slots__ = ("cfg", "val", "open", "pred", "bin")

    def __init__(self, cfg, val, n_open, pred, b):
        self.cfg = cfg
        self.val = val
        self.open = n_open
        self.pred = pred
        self.bin = b


def solve_processing_bfs(
    inst: Instance,
    node_budget: int = DEFAULT_PROCESSING_BUDGET,
    time_limit_s: float | None = None,
) -> SearchReport:
    """Optimal bin solution over all ``prod(|q_j|+1)`` configurations."""
    start = time.perf_counter()
    space = math.prod(length + 1 for length in inst.lengths)
    if space > node_budget:
        raise CapacityError(
            f"processing graph has {space} configurations, node budget is {node_budget}", node_budget
        )
    deadline = _Deadline(time_limit_s)
    tbl = build_first_last(inst)
    offsets = inst.bin_offsets()
    lengths = inst.lengths
    k = inst.k
    init = inst.initial()
    level = {init: _PNode(init, 0, 0, None, None)}
    expanded = 0
    peak = 1
    for _ in range(inst.n):
        deadline.check()
        nxt: dict[tuple[int, ...], _PNode] = {}
        for cfg in sorted(level):
            node = level[cfg]
            expanded += 1
            for j in range(k):
                if cfg[j] == lengths[j]:
                    continue
                succ = cfg[:j] + (cfg[j] + 1,) + cfg[j + 1 :]
                rec = nxt.get(succ)
                if rec is None:
                    rec = _PNode(succ, math.inf, node.open + delta_open(cfg, j, tbl), None, None)
                    nxt[succ] = rec
                if node.val < rec.val:
                    rec.val = node.val
                    rec.pred = node
                    rec.bin = offsets[j] + cfg[j]
        for rec in nxt.values():
            if rec.val < rec.open:
                rec.val = rec.open
        level = nxt
        peak = max(peak, len(level))
    (last,) = level.values()
    path = _unwind(last)
    trace = [TraceStep(nd.cfg, nd.val, nd.open, nd.open) for nd in path]
    bins = tuple(nd.bin for nd in path[1:])
    return SearchReport(
        "processing",
        int(last.val),
        BinOrder(bins),
        nodes_expanded=expanded + 1,
        peak_frontier=peak,
        wall_time=time.perf_counter() - start,
        trace=trace,
    )


def _unwind(node):
    path = []
    while node is not None:
        path.append(node)
        node = node.pred
    path.reverse()
    return path


# ---------------------------------------------------------------------------
# decision graph


def automatic_closure(
    cfg: Sequence[int],
    open_pallets: frozenset[int] | set[int],
    inst: Instance,
    rng: random.Random | None = None,
) -> tuple[int, ...]:
    """Remove front bins of open pallets until none is left.

    With ``rng`` the next sequence is drawn at random among the eligible ones;
    the fixpoint does not depend on that choice.
    """
    cur = list(cfg)
    seqs = inst.sequences
    while True:
        eligible = [j for j, q in enumerate(seqs) if cur[j] < len(q) and q[cur[j]] in open_pallets]
        if not eligible:
            return tuple(cur)
        j = rng.choice(eligible) if rng is not None else eligible[0]
        cur[j] += 1


class _DNode:
    __slots__ = ("cfg", "open", "val", "pred", "pallet", "seq", "peak")

    def __init__(self, cfg, open_, val, pred, pallet, seq, peak):
        self.cfg = cfg
        self.open = open_
        self.val = val
        self.pred = pred
        self.pallet = pallet
        self.seq = seq
        self.peak = peak


class _DecisionGraph:
    """Precomputed tables for fast expansion of decision configurations."""

    def __init__(self, inst: Instance) -> None:
        self.inst = inst
        self.seqs = inst.sequences
        self.lengths = inst.lengths
        self.k = inst.k
        tbl = build_first_last(inst)
        # per pallet: (sequence, 1-based last position) for sequences holding it
        self.lasts = [
            tuple((j, tbl.last[j][t]) for j in range(inst.k) if tbl.last[j][t] > 0) for t in range(inst.m)
        ]
        self.run_end = []
        for q in self.seqs:
            ends = [0] * len(q)
            nxt = len(q)
            for pos in range(len(q) - 1, -1, -1):
                if pos + 1 < len(q) and q[pos + 1] != q[pos]:
                    nxt = pos + 1
                ends[pos] = nxt
            self.run_end.append(ends)

    def expand(self, node: _DNode, t: int, js: Sequence[int], cut: int | None = None):
        """Open pallet ``t``, the front of every sequence in ``js``; return (cfg, open, peak).

        Returns ``None`` without running the closure when the peak exceeds ``cut``.

        ``node.cfg`` is already closed under automatic removal for ``node.open``,
        so only the sequences headed by ``t`` can move, and only pallets whose
        bins were just removed can become closed.
        """
        cfg = list(node.cfg)
        lasts = self.lasts
        j = js[0]
        cfg[j] += 1
        survives = False
        for l, last in lasts[t]:
            if last > cfg[l]:
                survives = True
                break
        peak = len(node.open) + 1 if survives else len(node.open)
        if cut is not None and peak > cut:
            return None
        opened = node.open | {t}
        touched = {t}
        seqs, lengths, run_end = self.seqs, self.lengths, self.run_end
        for l in js:
            q = seqs[l]
            i = cfg[l]
            n_l = lengths[l]
            ends = run_end[l]
            while i < n_l and q[i] in opened:
                touched.add(q[i])
                i = ends[i]
            cfg[l] = i
        closed = []
        for u in touched:
            for l, last in lasts[u]:
                if last > cfg[l]:
                    break
            else:
                closed.append(u)
        return tuple(cfg), opened.difference(closed), peak


@dataclass
class _CutState:
    level: int
    nodes: dict


def _decision_search(
    inst: Instance,
    cut: int | None,
    node_budget: int,
    deadline: _Deadline,
    resume: _CutState | None = None,
    stats: dict | None = None,
) -> tuple[_DNode, _CutState | None]:
    graph = _DecisionGraph(inst)
    k = inst.k
    seqs, lengths = graph.seqs, graph.lengths
    final = inst.final()
    if resume is None:
        init = inst.initial()
        level = {init: _DNode(init, frozenset(), 0, None, None, None, 0)}
        start_level = 0
    else:
        level = resume.nodes
        start_level = resume.level
    snapshot = None
    if cut is not None and start_level == min(cut, inst.m):
        snapshot = _CutState(start_level, level)
    if final in level:
        return level[final], snapshot
    expanded = stats.setdefault("expanded", 0) if stats is not None else 0
    peak_frontier = 0
    for lvl in range(start_level, inst.m):
        deadline.check()
        nxt: dict[tuple[int, ...], _DNode] = {}
        for cfg in sorted(level):
            node = level[cfg]
            expanded += 1
            heads: dict[int, list[int]] = {}
            for j in range(k):
                if cfg[j] < lengths[j]:
                    heads.setdefault(seqs[j][cfg[j]], []).append(j)
            for t, js in heads.items():
                j = js[0]
                arc = graph.expand(node, t, js, cut)
                if arc is None:
                    continue
                succ, opened, peak = arc
                val = node.val if node.val >= peak else peak
                rec = nxt.get(succ)
                if rec is None:
                    nxt[succ] = _DNode(succ, opened, val, node, t, j, peak)
                    if len(nxt) + len(level) > node_budget:
                        raise CapacityError(
                            f"decision search exceeded {node_budget} resident nodes", node_budget
                        )
                elif val < rec.val:
                    rec.val = val
                    rec.pred = node
                    rec.pallet = t
                    rec.seq = j
                    rec.peak = peak
        level = nxt
        peak_frontier = max(peak_frontier, len(level))
        if stats is not None:
            stats["expanded"] = expanded
            stats["peak_frontier"] = max(stats.get("peak_frontier", 0), peak_frontier)
        if cut is not None and lvl + 1 == min(cut, inst.m):
            snapshot = _CutState(lvl + 1, level)
        if not level:
            break
    if final not in level:
        exc = NotFoundUnderCut(cut if cut is not None else -1)
        exc.snapshot = snapshot
        raise exc
    return level[final], snapshot


def _decision_report(algo, inst, last: _DNode, stats, start, iterations) -> SearchReport:
    path = _unwind(last)
    trace = [TraceStep(nd.cfg, nd.val, len(nd.open), nd.peak) for nd in path]
    order = tuple(nd.pallet for nd in path[1:])
    return SearchReport(
        algo,
        int(last.val),
        PalletOrder(order),
        sequences=SequenceOrder(tuple(nd.seq for nd in path[1:])),
        nodes_expanded=stats.get("expanded", 0),
        peak_frontier=stats.get("peak_frontier", 1),
        wall_time=time.perf_counter() - start,
        cut_iterations=iterations,
        trace=trace,
    )


def solve_decision_bfs(
    inst: Instance,
    cut: int | None = None,
    node_budget: int = DEFAULT_DECISION_BUDGET,
    time_limit_s: float | None = None,
) -> SearchReport:
    """Optimal pallet solution by level-synchronous search of the decision graph.

    With ``cut`` set, arcs whose open count exceeds it are discarded and
    :class:`NotFoundUnderCut` is raised when no processing survives.
    """
    start = time.perf_counter()
    stats: dict = {}
    last, _ = _decision_search(inst, cut, node_budget, _Deadline(time_limit_s), stats=stats)
    return _decision_report("decision" if cut is None else f"decision-cut{cut}", inst, last, stats, start, 1)


def solve_with_cutting(
    inst: Instance,
    step: int = DEFAULT_CUT_STEP,
    node_budget: int = DEFAULT_DECISION_BUDGET,
    time_limit_s: float | None = None,
) -> SearchReport:
    """Retry the cut search with ``step``, ``2*step``, ... until it succeeds.

    Levels up to the previous cut cannot have lost nodes (after opening ``l``
    pallets at most ``l`` are open), so each retry resumes from that level.
    """
    if step < 1:
        raise ValueError("cut step must be >= 1")
    start = time.perf_counter()
    deadline = _Deadline(time_limit_s)
    stats: dict = {}
    cut = step
    resume = None
    iterations = 0
    while True:
        iterations += 1
        try:
            last, _ = _decision_search(inst, cut, node_budget, deadline, resume, stats)
        except NotFoundUnderCut as exc:
            resume = exc.snapshot
            cut += step
            continue
        return _decision_report("decision-cut", inst, last, stats, start, iterations)


# ---------------------------------------------------------------------------
# brute-force oracles


def brute_force_pallet_perm(inst: Instance, max_pallets: int = 9) -> int:
    """Minimum over all ``m!`` pallet orders of the peak open count."""
    if inst.m > max_pallets:
        raise CapacityError(f"pallet permutation oracle limited to m <= {max_pallets}", max_pallets)
    best = math.inf
    for perm in itertools.permutations(range(inst.m)):
        _, verdict = pallet_order_to_processing(inst, PalletOrder(perm), inst.m)
        if verdict.ok and verdict.max_open < best:
            best = verdict.max_open
    return int(best)


def enumerate_sequence_orders(inst: Instance) -> Iterator[tuple[SequenceOrder, Verdict]]:
    for order in itertools.product(range(inst.k), repeat=inst.m):
        sol = SequenceOrder(order)
        yield sol, verify_sequence_solution(inst, sol, inst.m)


def brute_force_sequence_orders(inst: Instance, budget: int = 10**7) -> int:
    """Minimum over all ``k^m`` sequence orders of the peak open count."""
    if inst.k**inst.m > budget:
        raise CapacityError(f"k^m = {inst.k}^{inst.m} exceeds the budget {budget}", budget)
    best = math.inf
    for _, verdict in enumerate_sequence_orders(inst):
        if verdict.ok and verdict.max_open < best:
            best = verdict.max_open
    return int(best)
