"""Sequence digraphs, sequence systems and exact directed vertex separation.

The sequence graph has one vertex per pallet and an arc ``u -> v`` whenever
some bin of ``u`` precedes some bin of ``v`` in a common sequence.  Its
directed vertex separation number plus one is the minimum number of stack-up
places, which gives an optimum oracle independent of the state-space search.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, ParseError
from .instance import BinOrder, Instance, build_first_last

MAX_DVSN_VERTICES = 24


@dataclass(frozen=True)
class SequenceDigraph:
    vertices: tuple[str, ...]
    arcs: frozenset[tuple[int, int]]
    _succ: tuple[frozenset[int], ...] = field(init=False, repr=False, compare=False)
    _pred: tuple[frozenset[int], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        nv = len(self.vertices)
        succ = [set() for _ in range(nv)]
        pred = [set() for _ in range(nv)]
        for u, v in self.arcs:
            if u == v:
                raise ValueError(f"self-loop on {self.vertices[u]!r}")
            if not (0 <= u < nv and 0 <= v < nv):
                raise ValueError(f"arc ({u}, {v}) references a missing vertex")
            succ[u].add(v)
            pred[v].add(u)
        object.__setattr__(self, "_succ", tuple(frozenset(s) for s in succ))
        object.__setattr__(self, "_pred", tuple(frozenset(s) for s in pred))

    @classmethod
    def from_arcs(cls, arcs: Iterable[tuple[str, str]], vertices: Sequence[str] = ()) -> SequenceDigraph:
        """Build from token pairs; vertex ids follow first appearance."""
        names: dict[str, int] = {}
        for v in vertices:
            names.setdefault(v, len(names))
        pairs = set()
        for u, v in arcs:
            a = names.setdefault(u, len(names))
            b = names.setdefault(v, len(names))
            if a == b:
                raise ValueError(f"self-loop on {u!r}")
            pairs.add((a, b))
        return cls(tuple(names), frozenset(pairs))

    @property
    def order(self) -> int:
        return len(self.vertices)

    def successors(self, u: int) -> frozenset[int]:
        return self._succ[u]

    def predecessors(self, u: int) -> frozenset[int]:
        return self._pred[u]

    def arc_tokens(self) -> set[tuple[str, str]]:
        return {(self.vertices[u], self.vertices[v]) for u, v in self.arcs}

    def non_isolated(self) -> set[str]:
        return {self.vertices[x] for arc in self.arcs for x in arc}


def build_sequence_graph(inst: Instance) -> SequenceDigraph:
    """Single pass per sequence: at the last bin of a pallet, add arcs from every
    pallet already seen in that sequence."""
    tbl = build_first_last(inst)
    arcs: set[tuple[int, int]] = set()
    for j, q in enumerate(inst.sequences):
        first, last = tbl.first[j], tbl.last[j]
        seen: list[int] = []
        for pos, t in enumerate(q, start=1):
            if pos == last[t]:
                for u in seen:
                    if u != t:
                        arcs.add((u, t))
            if pos == first[t]:
                seen.append(t)
    return SequenceDigraph(inst.tokens, frozenset(arcs))


def build_sequence_system(g: SequenceDigraph) -> Instance:
    """One two-bin sequence ``[u, v]`` per arc, arcs in sorted id order.

    Isolated vertices cannot be represented and are dropped.
    """
    if any(u == v for u, v in g.arcs):
        raise ValueError("sequence system requires a loop-free digraph")
    seqs = [[g.vertices[u], g.vertices[v]] for u, v in sorted(g.arcs)]
    return Instance.from_tokens(seqs)


def roundtrip_check(g: SequenceDigraph) -> bool:
    back = build_sequence_graph(build_sequence_system(g))
    return back.arc_tokens() == g.arc_tokens() and set(back.vertices) == g.non_isolated()


# ---------------------------------------------------------------------------
# digraph text format


def parse_digraph(text: str) -> SequenceDigraph:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or lines[0] != "digraph":
        raise ParseError("digraph file must start with a 'digraph' line")
    arcs, vertices = [], []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) == 1:
            vertices.append(parts[0])
        elif len(parts) == 2:
            arcs.append((parts[0], parts[1]))
        else:
            raise ParseError(f"expected 'u v' arc line, got {ln!r}")
    try:
        return SequenceDigraph.from_arcs(arcs, vertices)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def emit_digraph(g: SequenceDigraph) -> str:
    lines = ["digraph"]
    lines += [f"{g.vertices[u]} {g.vertices[v]}" for u, v in sorted(g.arcs)]
    lines += [g.vertices[x] for x in range(g.order) if not g.successors(x) and not g.predecessors(x)]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# directed vertex separation


@dataclass(frozen=True)
class Layout:
    order: tuple[int, ...]
    width: int


def layout_width(g: SequenceDigraph, order: Sequence[int]) -> int:
    """Max over cuts of the number of placed vertices with an in-arc from the rest."""
    placed: set[int] = set()
    width = 0
    for u in order:
        placed.add(u)
        cut = sum(1 for x in placed if any(v not in placed for v in g.predecessors(x)))
        width = max(width, cut)
    return width


def directed_vertex_separation(g: SequenceDigraph) -> Layout:
    """Exact optimum by dynamic programming over vertex subsets.

    ``best[S]`` is the smallest achievable maximum cut size over all ways of
    extending the prefix set ``S`` to the full vertex set.  The witness is the
    lexicographically smallest optimal ordering.
    """
    nv = g.order
    if nv > MAX_DVSN_VERTICES:
        raise CapacityError(
            f"directed vertex separation limited to {MAX_DVSN_VERTICES} vertices, got {nv}",
            MAX_DVSN_VERTICES,
        )
    if nv == 0:
        return Layout((), 0)
    size = 1 << nv
    subsets = np.arange(size, dtype=np.uint32)
    cost = np.zeros(size, dtype=np.int8)
    full = size - 1
    for u in range(nv):
        inmask = 0
        for v in g.predecessors(u):
            inmask |= 1 << v
        if not inmask:
            continue
        has_u = (subsets >> u) & 1
        outside_pred = (~subsets & inmask) != 0
        cost += (has_u.astype(bool) & outside_pred).astype(np.int8)

    popcount = _popcount(subsets, nv)
    best = np.full(size, 127, dtype=np.int8)
    best[full] = cost[full]
    for layer in range(nv - 1, -1, -1):
        idx = subsets[popcount == layer]
        cand = np.full(idx.shape, 127, dtype=np.int8)
        for u in range(nv):
            bit = np.uint32(1 << u)
            free = (idx & bit) == 0
            if not free.any():
                continue
            nxt = best[(idx[free] | bit)]
            cand[free] = np.minimum(cand[free], nxt)
        best[idx] = np.maximum(cost[idx], cand)

    width = int(best[0])
    order = []
    s = 0
    for _ in range(nv):
        for u in range(nv):
            if not (s >> u) & 1 and best[s | (1 << u)] <= width:
                order.append(u)
                s |= 1 << u
                break
    return Layout(tuple(order), width)


def _popcount(x: np.ndarray, bits: int) -> np.ndarray:
    out = np.zeros(x.shape, dtype=np.int8)
    for b in range(bits):
        out += ((x >> b) & 1).astype(np.int8)
    return out


def layout_to_bin_order(inst: Instance, g: SequenceDigraph, order: Sequence[int]) -> BinOrder:
    """Bin order that always removes the front bin whose pallet comes first in ``order``.

    A layout is not itself a valid pallet opening order (its first vertex may
    sit behind other bins), but this greedy keeps at most ``width + 1``
    pallets open for a layout of width ``width``.
    """
    rank = {inst.pallet_id(g.vertices[u]): r for r, u in enumerate(order)}
    cfg = list(inst.initial())
    offsets = inst.bin_offsets()
    removed = []
    for _ in range(inst.n):
        j = min(
            (j for j in range(inst.k) if cfg[j] < len(inst.sequences[j])),
            key=lambda j: (rank[inst.sequences[j][cfg[j]]], j),
        )
        removed.append(offsets[j] + cfg[j])
        cfg[j] += 1
    return BinOrder(tuple(removed))


def optimum_places_via_dpw(inst: Instance) -> int:
    if inst.m == 0:
        return 0
    return directed_vertex_separation(build_sequence_graph(inst)).width + 1
