from __future__ import annotations

import random

import pytest
from hypothesis import strategies as st

from fifostack.instance import Instance, parse_instance
from fifostack.seqgraph import SequenceDigraph

EX1_TEXT = "k=2\na b a b\nc d c d a b\n"
EX6_TEXT = "k=3\na a d e d\nc b b d\nc c d e d\n"
EX3_ARCS = [("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "a"), ("e", "f"), ("f", "a")]


@pytest.fixture
def ex1() -> Instance:
    return parse_instance(EX1_TEXT, name="ex1")


@pytest.fixture
def ex6() -> Instance:
    return parse_instance(EX6_TEXT, name="ex6")


def random_instance(rnd: random.Random, k_max=3, m_max=4, len_max=4, allow_empty=False) -> Instance:
    """Random token sequences; pallets are whatever labels end up being used."""
    k = rnd.randint(1, k_max)
    labels = "abcdefgh"[: rnd.randint(1, m_max)]
    lo = 0 if allow_empty else 1
    return Instance.from_tokens([[rnd.choice(labels) for _ in range(rnd.randint(lo, len_max))] for _ in range(k)])


def random_digraph(rnd: random.Random, n_max: int, density: float | None = None) -> SequenceDigraph:
    nv = rnd.randint(0, n_max)
    names = [f"v{i}" for i in range(nv)]
    dens = rnd.random() if density is None else density
    arcs = [(u, v) for u in names for v in names if u != v and rnd.random() < dens]
    return SequenceDigraph.from_arcs(arcs, names)


@st.composite
def instances(draw, k_max=3, m_max=4, len_max=4):
    k = draw(st.integers(1, k_max))
    labels = "abcdefgh"[: draw(st.integers(1, m_max))]
    seqs = draw(
        st.lists(st.lists(st.sampled_from(labels), min_size=1, max_size=len_max), min_size=k, max_size=k)
    )
    return Instance.from_tokens(seqs)


@st.composite
def digraphs(draw, n_max=6):
    nv = draw(st.integers(0, n_max))
    names = [f"v{i}" for i in range(nv)]
    pairs = [(u, v) for u in names for v in names if u != v]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return SequenceDigraph.from_arcs(chosen, names)


# one summary line per acceptance criterion, printed after the run
_ACCEPTANCE: dict[int, list[tuple[str, float]]] = {}


def pytest_runtest_logreport(report):
    crit = next((value for key, value in report.user_properties if key == "criterion"), None)
    if crit is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _ACCEPTANCE.setdefault(crit, []).append((report.outcome, report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_ACCEPTANCE):
        results = _ACCEPTANCE[crit]
        outcomes = {outcome for outcome, _ in results}
        secs = sum(d for _, d in results)
        label = "FAIL" if "failed" in outcomes else "SKIP" if outcomes == {"skipped"} else "PASS"
        terminalreporter.write_line(f"criterion {crit:2d}: {label} ({secs:.1f} s)")
