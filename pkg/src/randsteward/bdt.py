"""Block decision trees: depth-k trees reading n fresh bits per step.

A (k, n, sigma) tree probes its input in k blocks of n bits.  Every internal
node v computes a symbol v(X) in {0, .., sigma-1} from the current block, and
the child taken is indexed by that symbol.  A node is named by the path of
symbols leading to it, so the tree's output *is* its leaf path -- these trees
model everything an adaptive adversary can remember about a protocol, which
is why generator quality is measured as statistical distance between leaf
distributions.

Trees are either table-backed (one row of 2^n symbols per node, block decoded
little-endian as the row index) or callback-backed.  The JSON interchange
form is table-backed:

    {"k": 2, "n": 1, "sigma": 2, "nodes": {"": [0, 1], "0": [1, 1], ...}}

with path keys "s1,s2,..." ("" for the root).  Nodes omitted from the table
default to constant symbol 0, which keeps sparse fixtures small.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .randomness import bits_to_int

ENUMERATION_CAP = 24

Path = tuple[int, ...]


class CapExceeded(ValueError):
    """Exact enumeration was asked to cover more bits than the configured cap."""


@dataclass
class BlockDecisionTree:
    k: int
    n: int
    sigma: int
    transition: Callable[[Path, str], int]
    tables: dict[Path, np.ndarray] | None = None

    def __post_init__(self):
        if self.k < 1 or self.n < 1 or self.sigma < 1:
            raise ValueError("need k >= 1, n >= 1, sigma >= 1")

    def node_symbol(self, path: Path, block: str) -> int:
        sym = self.transition(path, block)
        if not 0 <= sym < self.sigma:
            raise ValueError(f"node {path} produced symbol {sym} outside 0..{self.sigma - 1}")
        return sym


def table_tree(k: int, n: int, sigma: int, tables: dict[Path, np.ndarray]) -> BlockDecisionTree:
    rows = {}
    for path, row in tables.items():
        row = np.asarray(row, dtype=np.int64)
        if row.shape != (1 << n,):
            raise ValueError(f"node {path}: table row must have 2^{n} entries")
        if row.min() < 0 or row.max() >= sigma:
            raise ValueError(f"node {path}: symbols out of range")
        rows[tuple(path)] = row

    def transition(path: Path, block: str) -> int:
        row = rows.get(path)
        if row is None:
            return 0
        return int(row[bits_to_int(block)])

    return BlockDecisionTree(k=k, n=n, sigma=sigma, transition=transition, tables=rows)


def evaluate(tree: BlockDecisionTree, blocks: list[str]) -> Path:
    """Leaf path reached on the given k blocks of n bits."""
    if len(blocks) != tree.k:
        raise ValueError(f"expected {tree.k} blocks, got {len(blocks)}")
    path: Path = ()
    for block in blocks:
        if len(block) != tree.n:
            raise ValueError(f"block {block!r} does not have {tree.n} bits")
        path = path + (tree.node_symbol(path, block),)
    return path


def split_blocks(bits: str, n: int, k: int) -> list[str]:
    if len(bits) != n * k:
        raise ValueError(f"need {n * k} bits, got {len(bits)}")
    return [bits[i * n : (i + 1) * n] for i in range(k)]


@dataclass
class NodeDistribution:
    """Exact leaf-path distribution; probabilities are dyadic rationals."""

    k: int
    sigma: int
    probs: dict[Path, Fraction] = field(default_factory=dict)

    def total(self) -> Fraction:
        return sum(self.probs.values(), Fraction(0))


def tv_distance(p: NodeDistribution, q: NodeDistribution) -> Fraction:
    if (p.k, p.sigma) != (q.k, q.sigma):
        raise ValueError("distributions live on different tree shapes")
    keys = set(p.probs) | set(q.probs)
    return sum(
        (abs(p.probs.get(key, Fraction(0)) - q.probs.get(key, Fraction(0))) for key in keys),
        Fraction(0),
    ) / 2


def exact_node_distribution(
    tree: BlockDecisionTree,
    generator=None,
    seed_len: int | None = None,
    cap: int = ENUMERATION_CAP,
) -> NodeDistribution:
    """Exact leaf distribution, over uniform blocks or over a generator's seeds.

    With no generator the input is U_{nk}; table-backed trees are handled by
    per-node symbol counting (no enumeration), callback trees by enumerating
    all 2^{nk} inputs.  With `generator` (a callable seed_bits -> nk bits) the
    seed space {0,1}^seed_len is enumerated exhaustively.  Either way the cap
    bounds the bits being enumerated.
    """
    if generator is None:
        bits = tree.n * tree.k
        if bits > cap:
            raise CapExceeded(f"uniform enumeration over {bits} bits exceeds cap {cap}")
        if tree.tables is not None:
            return _uniform_by_counting(tree)
        return _uniform_by_enumeration(tree)
    if seed_len is None:
        raise ValueError("seed_len is required when a generator is supplied")
    if seed_len > cap:
        raise CapExceeded(f"seed enumeration over {seed_len} bits exceeds cap {cap}")
    counts: dict[Path, int] = {}
    nk = tree.n * tree.k
    for seed in range(1 << seed_len):
        seed_bits = "".join("1" if seed >> i & 1 else "0" for i in range(seed_len))
        out = generator(seed_bits)
        if len(out) != nk:
            raise ValueError("generator output length mismatch")
        path = evaluate(tree, split_blocks(out, tree.n, tree.k))
        counts[path] = counts.get(path, 0) + 1
    denom = 1 << seed_len
    return NodeDistribution(
        k=tree.k, sigma=tree.sigma,
        probs={path: Fraction(c, denom) for path, c in counts.items()},
    )


def _uniform_by_counting(tree: BlockDecisionTree) -> NodeDistribution:
    # Blocks are independent, so P(path) factors into per-node symbol counts.
    denom_per_level = Fraction(1, 1 << tree.n)
    probs: dict[Path, Fraction] = {}
    zeros = np.zeros(1 << tree.n, dtype=np.int64)

    def descend(path: Path, prob: Fraction) -> None:
        if len(path) == tree.k:
            probs[path] = prob
            return
        row = tree.tables.get(path)
        if row is None:
            row = zeros
        counts = np.bincount(row, minlength=tree.sigma)
        for sym in range(tree.sigma):
            if counts[sym]:
                descend(path + (sym,), prob * counts[sym] * denom_per_level)

    descend((), Fraction(1))
    return NodeDistribution(k=tree.k, sigma=tree.sigma, probs=probs)


def _uniform_by_enumeration(tree: BlockDecisionTree) -> NodeDistribution:
    nk = tree.n * tree.k
    counts: dict[Path, int] = {}
    for value in range(1 << nk):
        bits = "".join("1" if value >> i & 1 else "0" for i in range(nk))
        path = evaluate(tree, split_blocks(bits, tree.n, tree.k))
        counts[path] = counts.get(path, 0) + 1
    return NodeDistribution(
        k=tree.k, sigma=tree.sigma,
        probs={path: Fraction(c, 1 << nk) for path, c in counts.items()},
    )


def load_tree_json(text: str) -> BlockDecisionTree:
    doc = json.loads(text)
    try:
        k, n, sigma = int(doc["k"]), int(doc["n"]), int(doc["sigma"])
        nodes = doc["nodes"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed tree document: {exc}") from exc
    tables: dict[Path, np.ndarray] = {}
    for key, row in nodes.items():
        path = tuple(int(part) for part in key.split(",")) if key else ()
        if len(path) >= k:
            raise ValueError(f"node path {key!r} is too deep for k={k}")
        tables[path] = np.asarray(row, dtype=np.int64)
    return table_tree(k=k, n=n, sigma=sigma, tables=tables)


def dump_tree_json(tree: BlockDecisionTree) -> str:
    if tree.tables is None:
        raise ValueError("only table-backed trees can be serialized")
    nodes = {",".join(map(str, path)): row.tolist() for path, row in tree.tables.items()}
    return json.dumps({"k": tree.k, "n": tree.n, "sigma": tree.sigma, "nodes": nodes})
