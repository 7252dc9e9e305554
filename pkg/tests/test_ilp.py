from __future__ import annotations

import random

import pytest

from conftest import random_digraph, random_instance
from fifostack.errors import ParseError
from fifostack.exact import solve_processing_bfs
from fifostack.ilp import (
    Constraint,
    IlpModel,
    bin_model_size,
    build_bin_model,
    build_pallet_model,
    decode_bin_order,
    decode_layout,
    emit_lp,
    pallet_model_size,
    read_lp,
    solve_tiny,
    validate_model,
)
from fifostack.instance import parse_instance, verify_bin_solution
from fifostack.seqgraph import SequenceDigraph, build_sequence_graph, directed_vertex_separation, layout_width


def satisfied(model: IlpModel, assignment: dict[str, int]) -> bool:
    for con in model.constraints:
        lhs = sum(c * assignment[v] for v, c in con.terms)
        if not {"<=": lhs <= con.rhs, ">=": lhs >= con.rhs, "=": lhs == con.rhs}[con.sense]:
            return False
    return True


def test_bin_model_counts_abab():
    model = build_bin_model(parse_instance("k=1\na b a b\n"))
    assert model.num_variables == 16 + 3 * 2 * 3 + 1 == 35
    assert model.integers == ["p"]
    assert len({c.name for c in model.constraints}) == len(model.constraints)


def test_bin_model_blocks(ex1):
    model = build_bin_model(ex1)
    names = [c.name for c in model.constraints]
    n = ex1.n
    assert sum(name.startswith("perm_") for name in names) == 2 * n
    assert sum(name.startswith("cut_") for name in names) == n - 1
    # both printed directions of the order constraint: 2 * sum over sequences of C(len,2) * C(n,2)
    pairs = sum(len(q) * (len(q) - 1) // 2 for q in ex1.sequences)
    assert sum(name.startswith("seqord_") for name in names) == 2 * pairs * n * (n - 1) // 2
    for fam in ("xxz2", "xxz4", "xxz5", "xxz6", "xxz7"):
        assert sum(name.startswith(f"lin_{fam}_") for name in names) == ex1.m * (n - 1)


def test_bin_model_example1_optimum(ex1):
    model = build_bin_model(ex1)
    sol = solve_tiny(model)
    assert sol.status == "optimal" and sol.objective_value == 2
    assert satisfied(model, sol.assignment)
    assert verify_bin_solution(ex1, decode_bin_order(ex1, sol.assignment), 2).ok


def test_bin_model_single_pallet():
    sol = solve_tiny(build_bin_model(parse_instance("k=1\na a\n")))
    assert sol.objective_value == 1


def test_pallet_model_counts():
    g = SequenceDigraph.from_arcs([("a", "b"), ("b", "c")])
    model = build_pallet_model(g)
    assert model.num_variables == 9 + 81 + 3 + 1 == 94 == pallet_model_size(3)
    assert len(read_lp(emit_lp(model)).variables) == 94


def test_pallet_model_example1(ex1):
    g = build_sequence_graph(ex1)
    model = build_pallet_model(g)
    sol = solve_tiny(model)
    assert sol.objective_value == 1
    assert satisfied(model, sol.assignment)
    layout = decode_layout(g, sol.assignment)
    assert layout_width(g, layout) == 1


def test_pallet_model_arcless():
    sol = solve_tiny(build_pallet_model(SequenceDigraph.from_arcs([], ["a", "b", "c"])))
    assert sol.objective_value == 0
    assert all(v == 0 for k, v in sol.assignment.items() if k.startswith("Y_"))


def test_infeasible_toy():
    model = IlpModel(
        "toy",
        ["x"],
        ["z"],
        [Constraint("zero", (("x", 1),), "=", 0), Constraint("one", (("x", 1),), "=", 1)],
        "z",
    )
    assert solve_tiny(model).status == "infeasible"


def test_budget_exceeded_keeps_incumbent(ex1):
    sol = solve_tiny(build_bin_model(ex1), node_budget=60)
    assert sol.status == "budget_exceeded"
    if sol.objective_value is not None:
        assert sol.objective_value >= 2


def test_size_formulas():
    rnd = random.Random(4)
    for _ in range(5):
        inst = random_instance(rnd, k_max=3, m_max=4, len_max=4)
        assert build_bin_model(inst).num_variables == bin_model_size(inst.n, inst.m)
    g = SequenceDigraph.from_arcs([("a", "b")], ["c", "d"])
    assert build_pallet_model(g).num_variables == pallet_model_size(4) == 16 + 256 + 6 + 1
    assert bin_model_size(10, 4) <= 4 * 10**2 + 1
    assert pallet_model_size(4) <= 4**4 + 2 * 4**2 + 1


def test_names_are_a_bijection(ex1):
    model = build_bin_model(ex1)
    assert set(model.names) == set(model.variables)
    assert len(set(model.names.values())) == len(model.names)


# -- LP text ---------------------------------------------------------------------


def test_lp_roundtrip(ex1):
    for model in (build_bin_model(ex1), build_pallet_model(build_sequence_graph(ex1))):
        text = emit_lp(model)
        back = read_lp(text, model.kind)
        assert back.constraints == model.constraints
        assert back.binaries == model.binaries and back.integers == model.integers
        assert back.objective == model.objective
        assert validate_model(back) == []


def test_lp_layout(ex1):
    text = emit_lp(build_bin_model(ex1))
    lines = text.splitlines()
    assert lines[1:3] == ["Minimize", " obj: p"]
    assert lines[3] == "Subject To"
    assert "Binary" in lines and "General" in lines and lines[-1] == "End"
    assert lines[lines.index("General") + 1] == " p"
    assert max(len(ln) for ln in lines) < 255


def test_lp_deterministic(ex1):
    assert emit_lp(build_bin_model(ex1)) == emit_lp(build_bin_model(ex1))


def test_validator_flags_undeclared():
    model = IlpModel("toy", ["x"], ["z"], [Constraint("c", (("x", 1), ("y", 1)), "<=", 1)], "z")
    problems = validate_model(model)
    assert any("'y'" in p for p in problems)


@pytest.mark.parametrize(
    "text",
    [
        "Minimize\n obj: p\nSubject To\n c1: x <=\nEnd\n",
        "Minimize\n obj: p\nEnd\n",
        "Subject To\n c1: x <= 1\nEnd\n",
        "Minimize\n obj: p\nSubject To\n x <= 1\nEnd\n",
    ],
)
def test_lp_reader_errors(text):
    with pytest.raises(ParseError):
        read_lp(text)


# -- cross-checks on small instances --------------------------------------------


def test_bin_model_matches_bfs_small():
    rnd = random.Random(12)
    for _ in range(12):
        inst = random_instance(rnd, k_max=2, m_max=3, len_max=3)
        sol = solve_tiny(build_bin_model(inst))
        assert sol.objective_value == solve_processing_bfs(inst).optimum


def test_pallet_model_matches_dvsn_small():
    rnd = random.Random(13)
    for _ in range(15):
        g = random_digraph(rnd, 4)
        sol = solve_tiny(build_pallet_model(g))
        assert sol.objective_value == directed_vertex_separation(g).width


def test_self_loop_rejected():
    with pytest.raises(ValueError):
        SequenceDigraph(("a",), frozenset({(0, 0)}))
