"""Seeded random instance generator.

A bin order is drawn first, keeping at most ``p_max`` pallets open at any
time, and each bin is then dealt to one of up to ``d`` sequences chosen for
its pallet.  Dealing preserves relative order, so the drawn order is itself a
processing and the instance needs at most ``p_max`` stack-up places.

Randomness comes from splitmix64 so a seed gives the same file everywhere.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .errors import ParameterError
from .instance import BinOrder, Instance

_MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int) -> None:
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform-ish integer in ``[lo, hi]`` (plain modulo, bias negligible here)."""
        return lo + self.next_u64() % (hi - lo + 1)


@dataclass(frozen=True)
class GenParams:
    p_max: int
    k: int
    m: int
    r_min: int
    r_max: int
    d: int
    seed: int = 0

    def describe(self) -> str:
        return " ".join(f"{key}={val}" for key, val in asdict(self).items())


def validate_params(params: GenParams) -> list[tuple[str, str]]:
    """Return ``(level, message)`` pairs; level is ``"error"`` or ``"warning"``."""
    out = []
    if params.p_max < 1:
        out.append(("error", "p_max must be >= 1"))
    if params.k < 1:
        out.append(("error", "k must be >= 1"))
    if params.m < 2:
        out.append(("error", "m must be >= 2"))
    elif params.m % 2:
        out.append(("error", f"m must be even (bin counts are drawn in pairs), got {params.m}"))
    if params.r_min < 1:
        out.append(("error", "r_min must be >= 1"))
    elif params.r_min < 2:
        out.append(("warning", "r_min < 2 allows pallets with a single bin"))
    if params.r_max < params.r_min:
        out.append(("error", "r_max must be >= r_min"))
    if not 1 <= params.d <= max(params.k, 1):
        out.append(("error", f"d must lie in [1, k], got d={params.d}, k={params.k}"))
    if params.p_max >= params.m:
        out.append(("warning", f"p_max={params.p_max} >= m={params.m}: every pallet could get its own place"))
    if params.k >= params.m:
        out.append(("warning", f"k={params.k} >= m={params.m}"))
    return out


def bin_counts(params: GenParams, rng: SplitMix64) -> list[int]:
    """Per-pallet bin counts, drawn in pairs ``avg + r`` / ``avg - r``.

    ``r`` is capped so both counts stay inside ``[r_min, r_max]``.
    """
    avg = (params.r_min + params.r_max) // 2
    spread = min(params.r_max - avg, avg - params.r_min)
    counts = [0] * params.m
    for i in range(0, params.m, 2):
        r = rng.randint(0, spread)
        counts[i] = avg + r
        counts[i + 1] = avg - r
    return counts


@dataclass
class Generated:
    instance: Instance
    order: BinOrder  # the drawn bin order, a processing with <= p_max open
    open_trace: list[int]  # open count after every drawn bin


def generate_with_order(params: GenParams) -> Generated:
    errors = [msg for level, msg in validate_params(params) if level == "error"]
    if errors:
        raise ParameterError("; ".join(errors))
    rng = SplitMix64(params.seed)
    remaining = bin_counts(params, rng)
    targets = [[rng.randint(1, params.k) for _ in range(params.d)] for _ in range(params.m)]
    seqs: list[list[int]] = [[] for _ in range(params.k)]
    where: list[tuple[int, int]] = []
    unprocessed = set(range(params.m))
    opened: set[int] = set()
    trace = []
    for _ in range(sum(remaining)):
        if len(opened) == params.p_max:
            candidates = sorted(opened)
        else:
            candidates = sorted(opened | unprocessed)
        plt = candidates[rng.randint(0, len(candidates) - 1)]
        if plt in unprocessed:
            unprocessed.discard(plt)
            opened.add(plt)
        s = targets[plt][rng.randint(1, params.d) - 1] - 1
        where.append((s, len(seqs[s])))
        seqs[s].append(plt)
        remaining[plt] -= 1
        if remaining[plt] == 0:
            opened.discard(plt)
        trace.append(len(opened))

    comments = [f"# fifostack gen {params.describe()}"]
    inst = Instance.from_tokens(([str(t + 1) for t in q] for q in seqs), comments=comments)
    offsets = inst.bin_offsets()
    order = BinOrder(tuple(offsets[s] + pos for s, pos in where))
    return Generated(inst, order, trace)


def generate(params: GenParams) -> Instance:
    return generate_with_order(params).instance
