"""0/1 linear models for the minimum number of stack-up places.

Bin model: a permutation matrix ``x_i_j`` (bin ``i`` removed at step ``j``)
that respects the FIFO order of every sequence, plus ``g/h/f`` indicators
telling whether pallet ``t`` has a bin at a step ``<= c``, ``> c``, or both
(open after step ``c``).  The integer ``p`` bounds every cut.

Pallet model: a permutation of the sequence-graph vertices, conjunction
variables ``X_i_ip_j_jp = x_i_j and x_ip_jp`` and indicators ``Y_j_c`` that the
vertex at position ``j <= c`` has an in-arc from a position ``> c``.  The
optimum ``w`` is the directed vertex separation number, so ``w + 1`` places
are needed.

Boolean definitions are linearised term by term; nothing is tightened.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from ..instance import BinOrder, Instance
from ..seqgraph import SequenceDigraph

RELATIONS = ("<=", ">=", "=")


@dataclass(frozen=True)
class Constraint:
    name: str
    terms: tuple[tuple[str, int], ...]
    sense: str
    rhs: int

    def __post_init__(self) -> None:
        if self.sense not in RELATIONS:
            raise ValueError(f"bad relation {self.sense!r}")


@dataclass
class IlpModel:
    kind: str
    binaries: list[str]
    integers: list[str]
    constraints: list[Constraint]
    objective: str
    instance_id: str = ""
    names: dict[str, tuple] = field(default_factory=dict)

    @property
    def variables(self) -> list[str]:
        return self.binaries + self.integers

    @property
    def num_variables(self) -> int:
        return len(self.binaries) + len(self.integers)


def _row(name: str, terms: Iterable[tuple[str, int]], sense: str, rhs: int) -> Constraint:
    merged: dict[str, int] = {}
    for var, coef in terms:
        merged[var] = merged.get(var, 0) + coef
    return Constraint(name, tuple((v, c) for v, c in merged.items() if c != 0), sense, rhs)


def _permutation(size: int, x) -> list[Constraint]:
    rows = []
    for i in range(1, size + 1):
        rows.append(_row(f"perm_r{i}", ((x(i, j), 1) for j in range(1, size + 1)), "=", 1))
    for j in range(1, size + 1):
        rows.append(_row(f"perm_c{j}", ((x(i, j), 1) for i in range(1, size + 1)), "=", 1))
    return rows


def build_bin_model(inst: Instance, instance_id: str = "") -> IlpModel:
    n, m = inst.n, inst.m
    pallet_of = [t for q in inst.sequences for t in q]  # global bin order b_1..b_n

    def x(i, j):
        return f"x_{i}_{j}"

    def g(t, c):
        return f"g_{t}_{c}"

    def h(t, c):
        return f"h_{t}_{c}"

    def f(t, c):
        return f"f_{t}_{c}"

    names: dict[str, tuple] = {}
    binaries = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            binaries.append(x(i, j))
            names[x(i, j)] = ("x", i, j)
    for fam, fn in (("g", g), ("h", h), ("f", f)):
        for t in range(1, m + 1):
            for c in range(1, n):
                binaries.append(fn(t, c))
                names[fn(t, c)] = (fam, inst.tokens[t - 1], c)
    names["p"] = ("p",)

    rows = _permutation(n, x)

    # FIFO order inside every sequence, both directions as stated
    offset = 0
    for q in inst.sequences:
        ids = range(offset + 1, offset + len(q) + 1)
        for i in ids:
            for ip in ids:
                if ip == i:
                    continue
                for j in range(1, n + 1):
                    # later bin not before b_i / earlier bin not after b_i
                    jps = range(1, j) if ip > i else range(j + 1, n + 1)
                    tag = "a" if ip > i else "b"
                    for jp in jps:
                        rows.append(_row(f"seqord_{tag}_{i}_{j}_{ip}_{jp}", [(x(ip, jp), 1), (x(i, j), 1)], "<=", 1))
        offset += len(q)

    for c in range(1, n):
        rows.append(_row(f"cut_{c}", [*((f(t, c), 1) for t in range(1, m + 1)), ("p", -1)], "<=", 0))

    bins_of = {t: [i for i in range(1, n + 1) if pallet_of[i - 1] == t - 1] for t in range(1, m + 1)}
    for t in range(1, m + 1):
        for c in range(1, n):
            left = [(i, j) for i in bins_of[t] for j in range(1, c + 1)]
            right = [(i, j) for i in bins_of[t] for j in range(c + 1, n + 1)]
            for i, j in left:
                rows.append(_row(f"lin_xxz1_{t}_{c}_{i}_{j}", [(x(i, j), 1), (g(t, c), -1)], "<=", 0))
            rows.append(_row(f"lin_xxz2_{t}_{c}", [*((x(i, j), 1) for i, j in left), (g(t, c), -1)], ">=", 0))
            for i, j in right:
                rows.append(_row(f"lin_xxz3_{t}_{c}_{i}_{j}", [(x(i, j), 1), (h(t, c), -1)], "<=", 0))
            rows.append(_row(f"lin_xxz4_{t}_{c}", [*((x(i, j), 1) for i, j in right), (h(t, c), -1)], ">=", 0))
            rows.append(_row(f"lin_xxz5_{t}_{c}", [(f(t, c), 1), (g(t, c), -1)], "<=", 0))
            rows.append(_row(f"lin_xxz6_{t}_{c}", [(f(t, c), 1), (h(t, c), -1)], "<=", 0))
            rows.append(_row(f"lin_xxz7_{t}_{c}", [(g(t, c), 1), (h(t, c), 1), (f(t, c), -1)], "<=", 1))

    return IlpModel("bin", binaries, ["p"], rows, "p", instance_id or inst.name, names)


def build_pallet_model(g: SequenceDigraph, instance_id: str = "") -> IlpModel:
    if any(u == v for u, v in g.arcs):
        raise ValueError("pallet model requires a loop-free digraph")
    m = g.order

    def x(i, j):
        return f"x_{i}_{j}"

    def X(i, ip, j, jp):
        return f"X_{i}_{ip}_{j}_{jp}"

    def Y(j, c):
        return f"Y_{j}_{c}"

    rng = range(1, m + 1)
    names: dict[str, tuple] = {}
    binaries = []
    for i in rng:
        for j in rng:
            binaries.append(x(i, j))
            names[x(i, j)] = ("x", g.vertices[i - 1], j)
    for i in rng:
        for ip in rng:
            for j in rng:
                for jp in rng:
                    binaries.append(X(i, ip, j, jp))
                    names[X(i, ip, j, jp)] = ("X", i, ip, j, jp)
    for c in range(1, m):
        for j in range(1, c + 1):
            binaries.append(Y(j, c))
            names[Y(j, c)] = ("Y", j, c)
    names["w"] = ("w",)

    rows = _permutation(m, x)
    for c in range(1, m):
        rows.append(_row(f"cut_{c}", [*((Y(j, c), 1) for j in range(1, c + 1)), ("w", -1)], "<=", 0))

    for i in rng:
        for ip in rng:
            for j in rng:
                for jp in rng:
                    v = X(i, ip, j, jp)
                    idx = f"{i}_{ip}_{j}_{jp}"
                    rows.append(_row(f"lin_x1_{idx}", [(v, 1), (x(i, j), -1)], "<=", 0))
                    rows.append(_row(f"lin_x2_{idx}", [(v, 1), (x(ip, jp), -1)], "<=", 0))
                    rows.append(_row(f"lin_x3_{idx}", [(x(i, j), 1), (x(ip, jp), 1), (v, -1)], "<=", 1))

    # arc (v_ip, v_i): v_i sits at position j <= c, v_ip at jp > c
    arcs = sorted((v + 1, u + 1) for u, v in g.arcs)  # pairs (i, ip)
    for c in range(1, m):
        for j in range(1, c + 1):
            members = [X(i, ip, j, jp) for jp in range(c + 1, m + 1) for i, ip in arcs]
            for var in members:
                rows.append(_row(f"lin_xx1_{j}_{c}_{var[2:]}", [(var, 1), (Y(j, c), -1)], "<=", 0))
            rows.append(_row(f"lin_xx2_{j}_{c}", [*((var, 1) for var in members), (Y(j, c), -1)], ">=", 0))

    return IlpModel("pallet", binaries, ["w"], rows, "w", instance_id, names)


def bin_model_size(n: int, m: int) -> int:
    return n * n + 3 * m * (n - 1) + 1


def pallet_model_size(m: int) -> int:
    return m * m + m**4 + m * (m - 1) // 2 + 1


def _positions(assignment: dict[str, int], size: int) -> list[int]:
    """Row index (0-based) placed at each position 1..size of a permutation matrix."""
    placed = []
    for j in range(1, size + 1):
        rows = [i for i in range(1, size + 1) if assignment.get(f"x_{i}_{j}") == 1]
        if len(rows) != 1:
            raise ValueError(f"assignment is not a permutation at position {j}")
        placed.append(rows[0] - 1)
    return placed


def decode_bin_order(inst: Instance, assignment: dict[str, int]) -> BinOrder:
    return BinOrder(tuple(_positions(assignment, inst.n)))


def decode_layout(g: SequenceDigraph, assignment: dict[str, int]) -> tuple[int, ...]:
    """Vertex ids in layout order."""
    return tuple(_positions(assignment, g.order))
