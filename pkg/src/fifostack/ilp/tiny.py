"""Depth-first branch and bound for small pure-integer models.

Only bound propagation is used (no LP relaxation), which is enough for the
toy sizes these models are meant to be checked on.  Binaries are branched in
declaration order, value 0 first; after an incumbent is found the objective
variable is capped one below it.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

from .model import IlpModel

INF = math.inf


@dataclass
class IlpSolution:
    status: str  # "optimal", "infeasible" or "budget_exceeded"
    objective_value: int | None
    assignment: dict[str, int]
    nodes: int


class _BudgetHit(Exception):
    pass


class _Solver:
    def __init__(self, model: IlpModel, node_budget: int) -> None:
        self.names = model.variables
        index = {v: i for i, v in enumerate(self.names)}
        nv = len(self.names)
        self.nbin = len(model.binaries)
        self.lb = [0] * nv
        self.ub = [1] * self.nbin + [INF] * len(model.integers)
        self.obj = index[model.objective]

        rows = set()
        for con in model.constraints:
            idx = tuple(index[v] for v, _ in con.terms)
            coef = tuple(c for _, c in con.terms)
            if con.sense in ("<=", "="):
                rows.add((idx, coef, con.rhs))
            if con.sense in (">=", "="):
                rows.add((idx, tuple(-c for c in coef), -con.rhs))
        self.rows = sorted(rows)
        # a row's minimum activity only moves when lb rises on a positive
        # coefficient or ub falls on a negative one, so wake rows per direction
        self.wake_lb: list[list[int]] = [[] for _ in range(nv)]
        self.wake_ub: list[list[int]] = [[] for _ in range(nv)]
        for r, (idx, coef, _) in enumerate(self.rows):
            for v, a in zip(idx, coef):
                (self.wake_lb if a > 0 else self.wake_ub)[v].append(r)
        self.trail: list[tuple[int, int, float]] = []  # (var, old lb, old ub)
        self.budget = node_budget
        self.nodes = 0
        self.best: int | None = None
        self.best_assign: list[float] | None = None

    def _set(self, v: int, lo, hi) -> list[int]:
        """Tighten bounds of ``v``; return the rows that must be revisited."""
        woken: list[int] = []
        if lo > self.lb[v] or hi < self.ub[v]:
            self.trail.append((v, self.lb[v], self.ub[v]))
            if lo > self.lb[v]:
                self.lb[v] = lo
                woken += self.wake_lb[v]
            if hi < self.ub[v]:
                self.ub[v] = hi
                woken += self.wake_ub[v]
        return woken

    def _undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            v, lo, hi = self.trail.pop()
            self.lb[v], self.ub[v] = lo, hi

    def _propagate(self, queue: list[int]) -> bool:
        lb, ub = self.lb, self.ub
        pending = set(queue)
        while queue:
            r = queue.pop()
            pending.discard(r)
            idx, coef, rhs = self.rows[r]
            finite, n_inf = 0, 0
            for v, a in zip(idx, coef):
                bound = lb[v] if a > 0 else ub[v]
                if bound == INF:
                    n_inf += 1
                else:
                    finite += a * bound
            if n_inf == 0 and finite > rhs:
                return False
            if n_inf > 1:
                continue
            for v, a in zip(idx, coef):
                bound = lb[v] if a > 0 else ub[v]
                if bound == INF:
                    rest = finite
                elif n_inf:
                    continue
                else:
                    rest = finite - a * bound
                slack = rhs - rest
                woken = None
                if a > 0:
                    new = slack // a
                    if new < ub[v]:
                        if new < lb[v]:
                            return False
                        woken = self._set(v, lb[v], new)
                else:
                    new = -(slack // -a)  # ceil(slack / a) for a < 0
                    if new > lb[v]:
                        if new > ub[v]:
                            return False
                        woken = self._set(v, new, ub[v])
                if woken:
                    for r2 in woken:
                        if r2 not in pending:
                            pending.add(r2)
                            queue.append(r2)
        return True

    def _feasible_at_lb(self) -> bool:
        lb = self.lb
        return all(sum(a * lb[v] for v, a in zip(idx, coef)) <= rhs for idx, coef, rhs in self.rows)

    def _dfs(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget:
            raise _BudgetHit
        if self.best is not None and self.ub[self.obj] > self.best - 1:
            if self.best - 1 < self.lb[self.obj]:
                return
            if not self._propagate(self._set(self.obj, self.lb[self.obj], self.best - 1)):
                return
        branch = next((v for v in range(self.nbin) if self.lb[v] < self.ub[v]), None)
        if branch is None:
            if self._feasible_at_lb():
                self.best = int(self.lb[self.obj])
                self.best_assign = list(self.lb)
            return
        for value in (0, 1):
            mark = len(self.trail)
            if self._propagate(self._set(branch, value, value)):
                self._dfs()
            self._undo(mark)

    def run(self) -> IlpSolution:
        status = "optimal"
        if self._propagate(list(range(len(self.rows)))):
            limit = sys.getrecursionlimit()
            sys.setrecursionlimit(max(limit, 4 * self.nbin + 1000))
            try:
                self._dfs()
            except _BudgetHit:
                status = "budget_exceeded"
            finally:
                sys.setrecursionlimit(limit)
        if status == "optimal" and self.best is None:
            status = "infeasible"
        assign = {}
        if self.best_assign is not None:
            assign = {name: int(val) for name, val in zip(self.names, self.best_assign)}
        return IlpSolution(status, self.best, assign, self.nodes)


def solve_tiny(model: IlpModel, node_budget: int = 10**6) -> IlpSolution:
    """Minimise the objective variable; on budget exhaustion the incumbent (if any) is kept."""
    return _Solver(model, node_budget).run()
