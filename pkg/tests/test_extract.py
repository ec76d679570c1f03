import itertools
from fractions import Fraction

import pytest

from randsteward.expander import (
    SECOND_EIGENVALUE_BOUND,
    bits_from_vertex,
    torus_side_for_bits,
    vertex_from_bits,
)
from randsteward.extract import (
    ExtractorParams,
    FreshExtractorParams,
    extract,
    fresh_extractor,
    plan_extractor,
    seed_to_labels,
)

from oracles import ref_walk_distribution


def test_plan_goldens():
    assert plan_extractor(8, 0, Fraction(1)).walk_len == 15
    assert plan_extractor(8, 0, Fraction(1)).seed_len == 45
    assert plan_extractor(4, 1, Fraction(1, 8)).walk_len == 43
    assert plan_extractor(6, 0, Fraction(1, 4)).walk_len == 31
    assert plan_extractor(6, 1, Fraction(1, 4)).walk_len == 34
    assert plan_extractor(6, 2, Fraction(1, 4)).walk_len == 37
    assert plan_extractor(12, 4, Fraction(1, 4)).walk_len == 43


def test_plan_matches_fraction_recomputation():
    # the integer comparison in the planner must agree with naive Fraction
    # powering of lam^(2L) * 32 * 2^(t+pad) <= beta^3
    lam = SECOND_EIGENVALUE_BOUND
    for s, t, beta in itertools.product(
        (3, 4, 5, 8, 12), (0, 1, 2, 4), (Fraction(1, 2), Fraction(1, 4), Fraction(1, 16))
    ):
        pad = s % 2
        want = 1
        while lam ** (2 * want) * 32 * 2 ** (t + pad) > beta**3:
            want += 1
        assert plan_extractor(s, t, beta).walk_len == want


def test_plan_depends_only_on_deficit_pad_and_error():
    assert plan_extractor(6, 1, Fraction(1, 4)) != plan_extractor(12, 1, Fraction(1, 4))
    assert (
        plan_extractor(6, 1, Fraction(1, 4)).walk_len
        == plan_extractor(12, 1, Fraction(1, 4)).walk_len
        == 34
    )
    # odd s pays one extra padding bit of deficit
    assert plan_extractor(5, 0, Fraction(1, 4)).walk_len == 34


def test_plan_monotonicity():
    beta = Fraction(1, 4)
    lens = [plan_extractor(8, t, beta).walk_len for t in range(6)]
    assert lens == sorted(lens)
    for loose, tight in [(Fraction(1, 2), Fraction(1, 4)), (Fraction(1, 4), Fraction(1, 64))]:
        assert plan_extractor(8, 2, loose).walk_len <= plan_extractor(8, 2, tight).walk_len


def test_plan_validation():
    with pytest.raises(ValueError):
        plan_extractor(0, 0, Fraction(1, 2))
    with pytest.raises(ValueError):
        plan_extractor(4, -1, Fraction(1, 2))
    with pytest.raises(ValueError):
        plan_extractor(4, 0, Fraction(0))
    with pytest.raises(ValueError):
        plan_extractor(4, 0, Fraction(3, 2))
    with pytest.raises(ValueError):
        fresh_extractor(0)


def test_seed_lengths():
    assert ExtractorParams(s=6, t=1, beta=Fraction(1, 4), walk_len=34).seed_len == 102
    assert fresh_extractor(9).seed_len == 9


def test_seed_to_labels():
    assert seed_to_labels("") == []
    assert seed_to_labels("011101") == [6, 5]
    assert seed_to_labels("000111") == [0, 7]
    with pytest.raises(ValueError):
        seed_to_labels("0110")


def test_fresh_extract_returns_seed():
    params = fresh_extractor(4)
    assert extract(params, "1011", "0100") == "0100"
    with pytest.raises(ValueError):
        extract(params, "101", "0100")
    with pytest.raises(ValueError):
        extract(params, "1011", "010")


def test_walk_extract_golden():
    params = plan_extractor(4, 0, Fraction(1, 2))
    assert params.walk_len == 23
    assert extract(params, "1011", "011" * 23) == "1010"


def test_walk_extract_validates_lengths():
    params = plan_extractor(4, 0, Fraction(1, 2))
    with pytest.raises(ValueError):
        extract(params, "10110", "011" * 23)
    with pytest.raises(ValueError):
        extract(params, "1011", "011")


def test_walk_extract_bijective_in_input():
    params = plan_extractor(4, 0, Fraction(1, 2))
    seed = "101" * params.walk_len
    outputs = {extract(params, format(v, "04b")[::-1], seed) for v in range(16)}
    assert len(outputs) == 16


def _subcube_start(s: int, positions: tuple[int, ...], vals: tuple[str, ...]) -> dict:
    """Integer start weights (one per string) for the subcube fixing the
    given bit positions, mapped onto torus vertices."""
    start: dict = {}
    free_count = s - len(positions)
    for u in range(1 << free_count):
        free = format(u, f"0{free_count}b")[::-1] if free_count else ""
        bits, fi = [], 0
        for i in range(s):
            if i in positions:
                bits.append(vals[positions.index(i)])
            else:
                bits.append(free[fi])
                fi += 1
        v = vertex_from_bits("".join(bits))
        start[v] = start.get(v, 0) + 1
    return start


def _exact_subcube_tv(s: int, t: int, beta: Fraction) -> Fraction:
    """Worst-case exact TV(extracted output, uniform) over all 2^t * C(s, t)
    subcube sources of deficit t, by integer distribution propagation."""
    params = plan_extractor(s, t, beta)
    side = torus_side_for_bits(s)
    worst = Fraction(0)
    for positions in itertools.combinations(range(s), t):
        for vals in itertools.product("01", repeat=t):
            start = _subcube_start(s, positions, vals)
            dist = ref_walk_distribution(side, start, params.walk_len)
            total = (1 << (s - t)) * 8**params.walk_len
            proj: dict = {}
            for v, w in dist.items():
                key = bits_from_vertex(v, s)
                proj[key] = proj.get(key, 0) + w
            diff = sum(
                abs((1 << s) * proj.get(format(i, f"0{s}b")[::-1], 0) - total)
                for i in range(1 << s)
            )
            worst = max(worst, Fraction(diff, 2 * (1 << s) * total))
    return worst


def test_uniform_source_extracts_exactly_uniform():
    # permutation maps leave the uniform distribution invariant, so TV is 0
    assert _exact_subcube_tv(6, 0, Fraction(1, 4)) == 0


def test_padded_uniform_source_extracts_exactly_uniform():
    # odd s: the padded embedding picks one representative per coset of the
    # shift (0, side/2), which commutes with every label map, so the
    # projected output is exactly uniform
    assert _exact_subcube_tv(5, 0, Fraction(1, 4)) == 0


@pytest.mark.parametrize("t", [1, 2])
def test_exact_tv_within_planned_error(t):
    beta = Fraction(1, 4)
    worst = _exact_subcube_tv(6, t, beta)
    assert worst <= beta
    # the plan overshoots on purpose; actual mixing is far below target
    assert worst <= Fraction(1, 100_000)
