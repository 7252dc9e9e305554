from __future__ import annotations

from collections import Counter
from pathlib import Path

import pytest

from fifostack.errors import ParameterError
from fifostack.exact import solve_decision_bfs, solve_processing_bfs
from fifostack.gen import GenParams, SplitMix64, bin_counts, generate, generate_with_order, validate_params
from fifostack.instance import emit_instance, parse_instance, verify_bin_solution

GOLDEN = Path(__file__).parent / "golden"


def test_splitmix_reference_values():
    rng = SplitMix64(0)
    assert rng.next_u64() == 0xE220A8397B1DCDAF
    rng = SplitMix64(1234567)
    assert [rng.next_u64() for _ in range(3)] == [6457827717110365317, 3203168211198807973, 9817491932198370423]


def test_randint_range():
    rng = SplitMix64(9)
    draws = [rng.randint(3, 5) for _ in range(300)]
    assert set(draws) == {3, 4, 5}


@pytest.mark.parametrize("path", sorted(GOLDEN.glob("gen_*.txt")), ids=lambda p: p.stem)
def test_golden_files(path):
    text = path.read_text()
    header = text.splitlines()[0]
    fields = dict(item.split("=") for item in header.split()[3:])
    params = GenParams(**{key: int(val) for key, val in fields.items()})
    assert emit_instance(generate(params)) == text


def test_seed_determinism():
    params = GenParams(p_max=2, k=2, m=4, r_min=2, r_max=3, d=2, seed=42)
    assert emit_instance(generate(params)) == emit_instance(generate(params))
    other = GenParams(p_max=2, k=2, m=4, r_min=2, r_max=3, d=2, seed=43)
    assert emit_instance(generate(other)) != emit_instance(generate(params))


def test_header_records_parameters():
    inst = generate(GenParams(p_max=3, k=2, m=6, r_min=2, r_max=4, d=1, seed=5))
    assert inst.comments == ("# fifostack gen p_max=3 k=2 m=6 r_min=2 r_max=4 d=1 seed=5",)
    assert parse_instance(emit_instance(inst)).comments == inst.comments


def test_bin_counts_stay_in_range():
    for seed in range(20):
        params = GenParams(p_max=3, k=3, m=10, r_min=2, r_max=7, d=2, seed=seed)
        counts = bin_counts(params, SplitMix64(seed))
        assert all(params.r_min <= c <= params.r_max for c in counts)
        assert sum(counts) == params.m * ((params.r_min + params.r_max) // 2)


def test_generated_instance_shape():
    params = GenParams(p_max=3, k=4, m=12, r_min=2, r_max=4, d=2, seed=1)
    gen = generate_with_order(params)
    inst = gen.instance
    assert inst.m == 12 and inst.k == 4
    per_pallet = Counter(t for q in inst.token_sequences() for t in q)
    assert all(params.r_min <= c <= params.r_max for c in per_pallet.values())
    assert max(gen.open_trace) <= params.p_max
    assert verify_bin_solution(inst, gen.order, params.p_max).ok


def test_each_pallet_uses_at_most_d_sequences():
    params = GenParams(p_max=4, k=6, m=20, r_min=3, r_max=6, d=2, seed=4)
    inst = generate(params)
    for t in range(inst.m):
        assert sum(t in q for q in inst.sequences) <= params.d


def test_single_sequence_forced_processing():
    gen = generate_with_order(GenParams(p_max=2, k=1, m=6, r_min=2, r_max=4, d=1, seed=3))
    assert gen.instance.k == 1
    assert solve_processing_bfs(gen.instance).optimum == verify_bin_solution(gen.instance, gen.order, 99).max_open


def test_optimum_at_most_pmax():
    for seed in range(15):
        params = GenParams(p_max=1 + seed % 4, k=3, m=8, r_min=2, r_max=4, d=2, seed=seed)
        assert solve_decision_bfs(generate(params)).optimum <= params.p_max


@pytest.mark.parametrize(
    "params",
    [
        GenParams(p_max=2, k=2, m=3, r_min=2, r_max=3, d=1),
        GenParams(p_max=0, k=2, m=4, r_min=2, r_max=3, d=1),
        GenParams(p_max=2, k=0, m=4, r_min=2, r_max=3, d=1),
        GenParams(p_max=2, k=2, m=4, r_min=3, r_max=2, d=1),
        GenParams(p_max=2, k=2, m=4, r_min=0, r_max=2, d=1),
        GenParams(p_max=2, k=2, m=4, r_min=2, r_max=3, d=3),
    ],
)
def test_invalid_parameters(params):
    assert any(level == "error" for level, _ in validate_params(params))
    with pytest.raises(ParameterError):
        generate(params)


def test_warnings():
    found = validate_params(GenParams(p_max=10, k=2, m=4, r_min=2, r_max=3, d=1))
    assert ("warning", "p_max=10 >= m=4: every pallet could get its own place") in found
    assert validate_params(GenParams(p_max=14, k=8, m=100, r_min=10, r_max=20, d=4)) == []
