"""One entry point per algorithm name, all returning a SearchReport."""

from __future__ import annotations

import time
from dataclasses import dataclass

from .errors import CapacityError
from .exact import (
    DEFAULT_CUT_STEP,
    DEFAULT_DECISION_BUDGET,
    SearchReport,
    brute_force_pallet_perm,
    brute_force_sequence_orders,
    solve_decision_bfs,
    solve_processing_bfs,
    solve_with_cutting,
)
from .ilp import build_bin_model, build_pallet_model, decode_bin_order, decode_layout, solve_tiny
from .instance import Instance
from .seqgraph import build_sequence_graph, directed_vertex_separation, layout_to_bin_order

ALGORITHMS = (
    "decision",
    "decision-cut",
    "processing",
    "perm-oracle",
    "seqorder-oracle",
    "dpw",
    "ilp-bin-tiny",
    "ilp-pallet-tiny",
)
TINY_BIN_MAX_N = 10
TINY_PALLET_MAX_M = 5


@dataclass
class RunOptions:
    node_budget: int | None = None
    time_limit_s: float | None = None
    cut_step: int = DEFAULT_CUT_STEP
    ilp_node_budget: int = 10**6


def too_big_for(algo: str, inst: Instance) -> str | None:
    """Reason an algorithm is skipped by the benchmark size caps, else ``None``."""
    if algo == "ilp-bin-tiny" and inst.n > TINY_BIN_MAX_N:
        return f"n={inst.n} > {TINY_BIN_MAX_N}"
    if algo == "ilp-pallet-tiny" and inst.m > TINY_PALLET_MAX_M:
        return f"m={inst.m} > {TINY_PALLET_MAX_M}"
    return None


def run(algo: str, inst: Instance, opts: RunOptions | None = None) -> SearchReport:
    opts = opts or RunOptions()
    budget = {} if opts.node_budget is None else {"node_budget": opts.node_budget}
    if algo == "decision":
        return solve_decision_bfs(inst, time_limit_s=opts.time_limit_s, **budget)
    if algo == "decision-cut":
        return solve_with_cutting(inst, opts.cut_step, time_limit_s=opts.time_limit_s, **budget)
    if algo == "processing":
        return solve_processing_bfs(inst, time_limit_s=opts.time_limit_s, **budget)

    start = time.perf_counter()
    if algo == "perm-oracle":
        report = SearchReport(algo, brute_force_pallet_perm(inst), None)
    elif algo == "seqorder-oracle":
        limit = opts.node_budget or DEFAULT_DECISION_BUDGET
        report = SearchReport(algo, brute_force_sequence_orders(inst, limit), None)
    elif algo == "dpw":
        g = build_sequence_graph(inst)
        layout = directed_vertex_separation(g)
        optimum = layout.width + 1 if inst.m else 0
        report = SearchReport(algo, optimum, layout_to_bin_order(inst, g, layout.order))
    elif algo == "ilp-bin-tiny":
        sol = _tiny(build_bin_model(inst), opts)
        report = SearchReport(algo, sol.objective_value, decode_bin_order(inst, sol.assignment), sol.nodes)
    elif algo == "ilp-pallet-tiny":
        g = build_sequence_graph(inst)
        sol = _tiny(build_pallet_model(g), opts)
        optimum = sol.objective_value + 1 if inst.m else 0
        order = layout_to_bin_order(inst, g, decode_layout(g, sol.assignment))
        report = SearchReport(algo, optimum, order, sol.nodes)
    else:
        raise ValueError(f"unknown algorithm {algo!r}; choose from {', '.join(ALGORITHMS)}")
    report.wall_time = time.perf_counter() - start
    return report


def _tiny(model, opts: RunOptions):
    sol = solve_tiny(model, opts.ilp_node_budget)
    if sol.status == "budget_exceeded":
        raise CapacityError(
            f"ILP search stopped after {opts.ilp_node_budget} nodes (incumbent {sol.objective_value})",
            opts.ilp_node_budget,
        )
    if sol.status != "optimal":
        raise RuntimeError(f"{model.kind} model reported {sol.status}")
    return sol
