import random
from fractions import Fraction

import numpy as np
import pytest

from randsteward.bdt import (
    BlockDecisionTree,
    CapExceeded,
    NodeDistribution,
    dump_tree_json,
    evaluate,
    exact_node_distribution,
    load_tree_json,
    split_blocks,
    table_tree,
    tv_distance,
)

from oracles import ref_tree_distribution

DEMO = table_tree(
    k=2,
    n=1,
    sigma=2,
    tables={(): [0, 1], (0,): [1, 1], (1,): [0, 1]},
)


def random_table_tree(rng: random.Random, k: int, n: int, sigma: int) -> BlockDecisionTree:
    tables = {}
    frontier = [()]
    for _ in range(k):
        nxt = []
        for path in frontier:
            if rng.random() < 0.8:  # leave some nodes implicit (constant 0)
                tables[path] = [rng.randrange(sigma) for _ in range(1 << n)]
            nxt.extend(path + (sym,) for sym in range(sigma))
        frontier = nxt
    return table_tree(k=k, n=n, sigma=sigma, tables=tables)


def test_shape_validation():
    with pytest.raises(ValueError):
        BlockDecisionTree(k=0, n=1, sigma=2, transition=lambda p, b: 0)
    with pytest.raises(ValueError):
        table_tree(k=1, n=2, sigma=2, tables={(): [0, 1]})  # row too short
    with pytest.raises(ValueError):
        table_tree(k=1, n=1, sigma=2, tables={(): [0, 2]})  # symbol out of range


def test_callback_symbol_range_enforced():
    tree = BlockDecisionTree(k=1, n=1, sigma=2, transition=lambda p, b: 5)
    with pytest.raises(ValueError):
        evaluate(tree, ["0"])


def test_evaluate_goldens():
    assert evaluate(DEMO, ["1", "0"]) == (1, 0)
    assert evaluate(DEMO, ["0", "1"]) == (0, 1)
    assert evaluate(DEMO, ["0", "0"]) == (0, 1)  # node (0,) maps everything to 1


def test_evaluate_defaults_missing_nodes_to_zero():
    tree = table_tree(k=3, n=1, sigma=3, tables={(): [2, 1]})
    assert evaluate(tree, ["0", "1", "1"]) == (2, 0, 0)


def test_evaluate_validates_blocks():
    with pytest.raises(ValueError):
        evaluate(DEMO, ["1"])
    with pytest.raises(ValueError):
        evaluate(DEMO, ["10", "0"])


def test_split_blocks():
    assert split_blocks("011011", 2, 3) == ["01", "10", "11"]
    with pytest.raises(ValueError):
        split_blocks("0110", 2, 3)


def test_uniform_distribution_matches_reference():
    rng = random.Random(20240817)
    for k, n, sigma in [(2, 1, 2), (3, 2, 2), (2, 2, 3), (4, 1, 2), (2, 3, 4)]:
        for _ in range(4):
            tree = random_table_tree(rng, k, n, sigma)
            got = exact_node_distribution(tree)
            want = ref_tree_distribution(
                lambda bits: evaluate(tree, split_blocks(bits, n, k)), k, n
            )
            denom = 1 << (n * k)
            assert got.probs == {p: Fraction(c, denom) for p, c in want.items()}
            assert got.total() == 1


def test_counting_agrees_with_enumeration():
    rng = random.Random(7)
    tree = random_table_tree(rng, 3, 2, 3)
    by_counting = exact_node_distribution(tree)
    as_callback = BlockDecisionTree(
        k=tree.k, n=tree.n, sigma=tree.sigma, transition=tree.transition, tables=None
    )
    by_enumeration = exact_node_distribution(as_callback)
    assert by_counting.probs == by_enumeration.probs


def test_identity_generator_reproduces_uniform():
    tree = random_table_tree(random.Random(11), 2, 2, 2)
    uniform = exact_node_distribution(tree)
    seeded = exact_node_distribution(tree, generator=lambda s: s, seed_len=4)
    assert tv_distance(uniform, seeded) == 0


def test_constant_generator_is_a_point_mass():
    dist = exact_node_distribution(DEMO, generator=lambda s: "10", seed_len=3)
    assert dist.probs == {(1, 0): Fraction(1)}
    uniform = exact_node_distribution(DEMO)
    assert tv_distance(dist, uniform) == 1 - uniform.probs[(1, 0)]


def test_tv_distance_basics():
    p = NodeDistribution(k=1, sigma=2, probs={(0,): Fraction(1, 2), (1,): Fraction(1, 2)})
    q = NodeDistribution(k=1, sigma=2, probs={(0,): Fraction(1)})
    assert tv_distance(p, p) == 0
    assert tv_distance(p, q) == tv_distance(q, p) == Fraction(1, 2)
    with pytest.raises(ValueError):
        tv_distance(p, NodeDistribution(k=2, sigma=2, probs={}))


def test_enumeration_caps():
    big = table_tree(k=5, n=5, sigma=2, tables={})
    with pytest.raises(CapExceeded):
        exact_node_distribution(big)
    with pytest.raises(CapExceeded):
        exact_node_distribution(DEMO, generator=lambda s: "00", seed_len=30)
    with pytest.raises(ValueError):
        exact_node_distribution(DEMO, generator=lambda s: "00")  # seed_len missing
    # a permissive cap lets the same instance through
    small = table_tree(k=2, n=1, sigma=2, tables={})
    assert exact_node_distribution(small, cap=2).total() == 1


def test_generator_output_length_checked():
    with pytest.raises(ValueError):
        exact_node_distribution(DEMO, generator=lambda s: "0", seed_len=2)


def test_json_round_trip():
    text = dump_tree_json(DEMO)
    tree = load_tree_json(text)
    for a in "01":
        for b in "01":
            assert evaluate(tree, [a, b]) == evaluate(DEMO, [a, b])
    assert dump_tree_json(tree) == text


def test_json_sparse_nodes_and_errors():
    tree = load_tree_json('{"k": 2, "n": 1, "sigma": 2, "nodes": {"1": [1, 0]}}')
    assert evaluate(tree, ["1", "0"]) == (0, 0)
    with pytest.raises(ValueError):
        load_tree_json('{"k": 1, "n": 1, "sigma": 2, "nodes": {"0,1": [0, 0]}}')
    with pytest.raises(ValueError):
        load_tree_json('{"k": 1, "n": 1}')
    with pytest.raises(ValueError):
        callback = BlockDecisionTree(k=1, n=1, sigma=2, transition=lambda p, b: 0)
        dump_tree_json(callback)
