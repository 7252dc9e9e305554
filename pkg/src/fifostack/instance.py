"""Instance model for the FIFO stack-up problem.

An instance is a list of ``k`` FIFO sequences of bins, every bin labelled with
a pallet token.  Tokens are re-indexed densely (``0..m-1``) in order of first
appearance; all algorithms work on these ids and only the I/O layer sees the
original tokens.

Configurations are plain tuples ``(i_1, ..., i_k)`` holding the number of bins
already removed from each sequence.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ParseError

log = logging.getLogger(__name__)

Configuration = tuple  # tuple[int, ...] of per-sequence removal counters


@dataclass(frozen=True)
class Instance:
    sequences: tuple[tuple[int, ...], ...]
    tokens: tuple[str, ...]
    comments: tuple[str, ...] = ()
    name: str = ""

    def __post_init__(self) -> None:
        m = len(self.tokens)
        seen = [False] * m
        for q in self.sequences:
            for t in q:
                if not 0 <= t < m:
                    raise ValueError(f"pallet id {t} out of range for m={m}")
                seen[t] = True
        if not all(seen):
            raise ValueError("every pallet must occur in at least one sequence")
        for tok in self.tokens:
            _check_token(tok)
        if len(set(self.tokens)) != m:
            raise ValueError("pallet tokens must be unique")

    @classmethod
    def from_tokens(
        cls,
        sequences: Iterable[Iterable[str]],
        comments: Sequence[str] = (),
        name: str = "",
    ) -> Instance:
        """Build an instance from token lists, assigning ids by first appearance."""
        index: dict[str, int] = {}
        seqs = []
        for q in sequences:
            row = []
            for tok in q:
                if tok not in index:
                    _check_token(tok)
                    index[tok] = len(index)
                row.append(index[tok])
            seqs.append(tuple(row))
        return cls(tuple(seqs), tuple(index), tuple(comments), name)

    @property
    def k(self) -> int:
        return len(self.sequences)

    @property
    def m(self) -> int:
        return len(self.tokens)

    @property
    def n(self) -> int:
        return sum(len(q) for q in self.sequences)

    @property
    def max_len(self) -> int:
        """``N``, the length of the longest sequence."""
        return max((len(q) for q in self.sequences), default=0)

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(len(q) for q in self.sequences)

    def initial(self) -> tuple[int, ...]:
        return (0,) * self.k

    def final(self) -> tuple[int, ...]:
        return self.lengths

    def token_sequences(self) -> list[list[str]]:
        return [[self.tokens[t] for t in q] for q in self.sequences]

    def pallet_id(self, token: str) -> int:
        try:
            return self.tokens.index(token)
        except ValueError:
            raise KeyError(f"unknown pallet token {token!r}") from None

    def bin_offsets(self) -> list[int]:
        """Global 0-based index of the first bin of every sequence."""
        offsets, acc = [], 0
        for q in self.sequences:
            offsets.append(acc)
            acc += len(q)
        return offsets

    def bin_location(self) -> list[tuple[int, int]]:
        """Map global bin index -> (sequence, 0-based position)."""
        return [(j, pos) for j, q in enumerate(self.sequences) for pos in range(len(q))]

    def bin_pallet(self, b: int) -> int:
        j, pos = self.bin_location()[b]
        return self.sequences[j][pos]


def _check_token(tok: str) -> None:
    if not tok or any(ch.isspace() for ch in tok):
        raise ValueError(f"invalid pallet token {tok!r}")
    if tok.startswith("#"):
        raise ValueError(f"pallet token may not start with '#': {tok!r}")


# ---------------------------------------------------------------------------
# text format


def parse_instance(text: str, name: str = "") -> Instance:
    """Parse the ``k=<int>`` header format.

    Comment lines start with ``#``.  After the header exactly ``k`` body lines
    follow; a blank body line is an empty sequence.  Trailing blank lines
    beyond the ``k`` body lines are ignored.
    """
    comments: list[str] = []
    header: int | None = None
    body: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("#"):
            comments.append(raw.rstrip())
            continue
        if header is None:
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep or key.strip() != "k":
                raise ParseError(f"line {lineno}: expected header 'k=<int>', got {line!r}")
            try:
                header = int(value.strip())
            except ValueError:
                raise ParseError(f"line {lineno}: bad sequence count {value.strip()!r}") from None
            if header < 1:
                raise ParseError(f"line {lineno}: an instance file needs k >= 1 sequences, got {header}")
            continue
        body.append(line)
    if header is None:
        raise ParseError("missing 'k=<int>' header")
    while len(body) > header and not body[-1]:
        body.pop()
    if len(body) != header:
        raise ParseError(f"header promises k={header} sequences, found {len(body)} lines")
    seqs = [line.split() for line in body]
    for j, q in enumerate(seqs, start=1):
        if not q:
            log.warning("sequence %d is empty", j)
    try:
        inst = Instance.from_tokens(seqs, comments=comments, name=name)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    return inst


def emit_instance(inst: Instance) -> str:
    lines = list(inst.comments)
    lines.append(f"k={inst.k}")
    lines.extend(" ".join(q) for q in inst.token_sequences())
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# first / last tables and the open-pallet machinery


@dataclass(frozen=True)
class FirstLastTable:
    """1-based ``first[j][t]`` / ``last[j][t]`` with the absent sentinels.

    ``first`` is ``|q_j|+1`` and ``last`` is ``0`` when pallet ``t`` does not
    occur in sequence ``j``.
    """

    sequences: tuple[tuple[int, ...], ...]
    first: tuple[tuple[int, ...], ...]
    last: tuple[tuple[int, ...], ...]

    @property
    def k(self) -> int:
        return len(self.sequences)


def build_first_last(inst: Instance) -> FirstLastTable:
    first, last = [], []
    for q in inst.sequences:
        f = [len(q) + 1] * inst.m
        l = [0] * inst.m
        for pos, t in enumerate(q, start=1):
            if f[t] > pos:
                f[t] = pos
            l[t] = pos
        first.append(tuple(f))
        last.append(tuple(l))
    return FirstLastTable(inst.sequences, tuple(first), tuple(last))


def is_open(cfg: Sequence[int], t: int, tbl: FirstLastTable) -> bool:
    started = False
    pending = False
    for j in range(tbl.k):
        if tbl.first[j][t] <= cfg[j]:
            started = True
        if tbl.last[j][t] > cfg[j]:
            pending = True
    return started and pending


def open_set(cfg: Sequence[int], tbl: FirstLastTable) -> tuple[frozenset[int], int]:
    m = len(tbl.first[0]) if tbl.k else 0
    opened = frozenset(t for t in range(m) if is_open(cfg, t, tbl))
    return opened, len(opened)


def is_closed(cfg: Sequence[int], t: int, tbl: FirstLastTable) -> bool:
    return all(tbl.last[j][t] <= cfg[j] for j in range(tbl.k))


def front(cfg: Sequence[int], inst: Instance) -> frozenset[int]:
    return frozenset(q[i] for q, i in zip(inst.sequences, cfg) if i < len(q))


def delta_open(cfg: Sequence[int], j: int, tbl: FirstLastTable) -> int:
    """Change of the open count when the front bin of sequence ``j`` is removed.

    A single-bin pallet opens and closes in the same step and contributes 0.
    """
    q = tbl.sequences[j]
    i = cfg[j]
    if i >= len(q):
        raise ValueError(f"sequence {j + 1} is exhausted")
    t = q[i]
    others = [l for l in range(tbl.k) if l != j]
    opens = tbl.first[j][t] == i + 1 and all(tbl.first[l][t] > cfg[l] for l in others)
    closes = tbl.last[j][t] == i + 1 and all(tbl.last[l][t] <= cfg[l] for l in others)
    if opens and closes:
        return 0
    if opens:
        return 1
    if closes:
        return -1
    return 0


def step(cfg: Sequence[int], j: int) -> tuple[int, ...]:
    out = list(cfg)
    out[j] += 1
    return tuple(out)


# ---------------------------------------------------------------------------
# statistics


@dataclass
class InstanceStats:
    n: int
    m: int
    k: int
    N: int
    d_Q: int
    d_per_pallet: list[int]
    bins_per_pallet: list[int]
    single_bin_pallets: list[int]
    empty_sequences: list[int]
    k_lt_m: bool
    m_le_half_n: bool
    p_lt_m: bool | None = None
    warnings: list[str] = field(default_factory=list)


def compute_stats(inst: Instance, p: int | None = None) -> InstanceStats:
    d = [0] * inst.m
    counts = [0] * inst.m
    for q in inst.sequences:
        for t in set(q):
            d[t] += 1
        for t in q:
            counts[t] += 1
    singles = [t for t in range(inst.m) if counts[t] == 1]
    empty = [j for j, q in enumerate(inst.sequences) if not q]
    stats = InstanceStats(
        n=inst.n,
        m=inst.m,
        k=inst.k,
        N=inst.max_len,
        d_Q=max(d, default=0),
        d_per_pallet=d,
        bins_per_pallet=counts,
        single_bin_pallets=singles,
        empty_sequences=empty,
        k_lt_m=inst.k < inst.m,
        m_le_half_n=2 * inst.m <= inst.n,
        p_lt_m=None if p is None else p < inst.m,
    )
    if singles:
        names = ", ".join(inst.tokens[t] for t in singles)
        stats.warnings.append(f"pallets with a single bin: {names}")
    if empty:
        stats.warnings.append(f"empty sequences: {', '.join(str(j + 1) for j in empty)}")
    if not stats.k_lt_m:
        stats.warnings.append(f"k={inst.k} >= m={inst.m}")
    if not stats.m_le_half_n:
        stats.warnings.append(f"m={inst.m} > n/2={inst.n / 2:g}")
    if stats.p_lt_m is False:
        stats.warnings.append(f"p={p} >= m={inst.m}")
    return stats


# ---------------------------------------------------------------------------
# solutions


@dataclass(frozen=True)
class BinOrder:
    """Global 0-based bin indices in removal order."""

    bins: tuple[int, ...]
    kind = "bin"


@dataclass(frozen=True)
class PalletOrder:
    """Dense pallet ids in opening order."""

    pallets: tuple[int, ...]
    kind = "pallet"


@dataclass(frozen=True)
class SequenceOrder:
    """0-based sequence index chosen at each decision configuration."""

    seqs: tuple[int, ...]
    kind = "sequence"


Solution = BinOrder | PalletOrder | SequenceOrder


@dataclass
class Verdict:
    ok: bool
    max_open: int
    violation_step: int | None = None  # 1-based step (or decision) index
    reason: str = ""


def parse_solution(text: str, inst: Instance) -> Solution:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ParseError("empty solution file")
    kind = lines[0]
    items = " ".join(lines[1:]).split()
    if kind in ("bin", "sequence"):
        try:
            values = tuple(int(x) - 1 for x in items)
        except ValueError:
            raise ParseError(f"non-integer entry in {kind} solution") from None
        limit = inst.n if kind == "bin" else inst.k
        bad = [v + 1 for v in values if not 0 <= v < limit]
        if bad:
            raise ParseError(f"{kind} entries must lie in 1..{limit} for this instance, got {bad[0]}")
        return BinOrder(values) if kind == "bin" else SequenceOrder(values)
    if kind == "pallet":
        try:
            return PalletOrder(tuple(inst.pallet_id(x) for x in items))
        except KeyError as exc:
            raise ParseError(str(exc.args[0])) from None
    raise ParseError(f"unknown solution kind {kind!r}; expected bin, pallet or sequence")


def emit_solution(sol: Solution, inst: Instance) -> str:
    if isinstance(sol, BinOrder):
        body = " ".join(str(b + 1) for b in sol.bins)
    elif isinstance(sol, PalletOrder):
        body = " ".join(inst.tokens[t] for t in sol.pallets)
    else:
        body = " ".join(str(s + 1) for s in sol.seqs)
    return f"{sol.kind}\n{body}\n"


def bin_order_tokens(sol: BinOrder, inst: Instance) -> list[str]:
    loc = inst.bin_location()
    return [inst.tokens[inst.sequences[j][pos]] for j, pos in (loc[b] for b in sol.bins)]


# ---------------------------------------------------------------------------
# verification


def verify_bin_solution(inst: Instance, sol: BinOrder, p: int) -> Verdict:
    """Replay a bin order; ``ok`` iff it is a FIFO processing with <= p open.

    ``max_open`` covers the longest valid prefix; ``violation_step`` is the
    first step that breaks FIFO order or the capacity ``p``.
    """
    tbl = build_first_last(inst)
    loc = inst.bin_location()
    cfg = list(inst.initial())
    n_open = max_open = 0
    breach: tuple[int, str] | None = None
    for s, b in enumerate(sol.bins, start=1):
        if not 0 <= b < len(loc):
            return Verdict(False, max_open, s, f"bin {b + 1} does not exist")
        j, pos = loc[b]
        if cfg[j] != pos:
            return Verdict(False, max_open, s, f"bin {b + 1} is not at the front of sequence {j + 1}")
        n_open += delta_open(cfg, j, tbl)
        cfg[j] += 1
        max_open = max(max_open, n_open)
        if n_open > p and breach is None:
            breach = (s, f"{n_open} pallets open after step {s}, limit {p}")
    if tuple(cfg) != inst.final():
        return Verdict(False, max_open, len(sol.bins) + 1, "bin order does not remove every bin")
    if breach is not None:
        return Verdict(False, max_open, *breach)
    return Verdict(True, max_open)


class _Walker:
    """Step-by-step replay used by the pallet- and sequence-order checkers."""

    def __init__(self, inst: Instance) -> None:
        self.inst = inst
        self.tbl = build_first_last(inst)
        self.offsets = inst.bin_offsets()
        self.cfg = list(inst.initial())
        self.n_open = 0
        self.max_open = 0
        self.removed: list[int] = []
        self.opened: set[int] = set()

    def front_pallet(self, j: int) -> int | None:
        q = self.inst.sequences[j]
        i = self.cfg[j]
        return q[i] if i < len(q) else None

    def remove(self, j: int) -> None:
        self.n_open += delta_open(self.cfg, j, self.tbl)
        self.removed.append(self.offsets[j] + self.cfg[j])
        self.opened.add(self.inst.sequences[j][self.cfg[j]])
        self.cfg[j] += 1
        self.max_open = max(self.max_open, self.n_open)

    def automatic_steps(self) -> None:
        progress = True
        while progress:
            progress = False
            for j in range(self.inst.k):
                t = self.front_pallet(j)
                while t is not None and t in self.opened:
                    self.remove(j)
                    progress = True
                    t = self.front_pallet(j)

    def done(self) -> bool:
        return tuple(self.cfg) == self.inst.final()


def pallet_order_to_processing(inst: Instance, sol: PalletOrder, p: int) -> tuple[BinOrder, Verdict]:
    """Turn a pallet opening order into a bin order, rejecting as soon as it fails."""
    w = _Walker(inst)
    w.automatic_steps()
    for d, t in enumerate(sol.pallets, start=1):
        if w.done():
            return BinOrder(tuple(w.removed)), Verdict(False, w.max_open, d, "all bins removed before order ended")
        j = next((j for j in range(inst.k) if w.front_pallet(j) == t), None)
        if j is None:
            reason = f"pallet {inst.tokens[t]} is not at the front of any sequence"
            return BinOrder(tuple(w.removed)), Verdict(False, w.max_open, d, reason)
        w.remove(j)
        if w.n_open > p:
            reason = f"{w.n_open} pallets open after opening {inst.tokens[t]}, limit {p}"
            return BinOrder(tuple(w.removed)), Verdict(False, w.max_open, d, reason)
        w.automatic_steps()
    if not w.done():
        return BinOrder(tuple(w.removed)), Verdict(False, w.max_open, len(sol.pallets) + 1, "pallet order ended early")
    return BinOrder(tuple(w.removed)), Verdict(True, w.max_open)


def verify_sequence_solution(inst: Instance, sol: SequenceOrder, p: int) -> Verdict:
    w = _Walker(inst)
    w.automatic_steps()
    for d, j in enumerate(sol.seqs, start=1):
        if not 0 <= j < inst.k:
            return Verdict(False, w.max_open, d, f"sequence {j + 1} does not exist")
        t = w.front_pallet(j)
        if t is None:
            return Verdict(False, w.max_open, d, f"sequence {j + 1} is exhausted")
        if t in w.opened:
            return Verdict(False, w.max_open, d, f"front bin of sequence {j + 1} opens no new pallet")
        w.remove(j)
        if w.n_open > p:
            return Verdict(False, w.max_open, d, f"{w.n_open} pallets open, limit {p}")
        w.automatic_steps()
    if not w.done():
        return Verdict(False, w.max_open, len(sol.seqs) + 1, "sequence order ended early")
    return Verdict(True, w.max_open)


def verify_solution(inst: Instance, sol: Solution, p: int) -> Verdict:
    if isinstance(sol, BinOrder):
        return verify_bin_solution(inst, sol, p)
    if isinstance(sol, PalletOrder):
        if sorted(sol.pallets) != list(range(inst.m)):
            return Verdict(False, 0, None, "pallet order is not a permutation of the pallets")
        return pallet_order_to_processing(inst, sol, p)[1]
    return verify_sequence_solution(inst, sol, p)
