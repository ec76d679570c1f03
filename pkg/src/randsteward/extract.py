"""Seeded extractors realized as expander walks.

`plan_extractor(s, t, beta)` sizes a walk extractor whose output on any
input distribution with entropy deficit at most t is beta-close to uniform
even on average over side information -- the "average-case" form needed when
an adversary conditions on what it has already seen.  The plan buys the
average-case property from the ordinary one: an ordinary extractor for
deficit t + log2(2/beta) with error beta/2 is automatically average-case for
deficit t with error beta, so the planner inflates the deficit accordingly
(plus one for the padding bit when s is odd) and halves the error target.

The walk length comes from the spectral mixing bound

    TV(endpoint, uniform) <= (1/2) * lam^len * 2^(t'/2)

for a deficit-t' start on a graph with singular-value bound lam.  We require
lam^len * 2^(t'/2) <= beta/4 (a factor-two margin under the beta/2 target),
i.e. the smallest len with

    len >= (t'/2 + log2(2/beta) + 1) / log2(1/lam).

That comparison is evaluated in exact integer arithmetic by squaring:
lam^(2*len) * 32 * 2^(t + pad) <= beta^3.  Each step consumes 3 seed bits
(degree 8), so the seed is 3 * walk_len bits.  test_extract checks this
planning rule against exhaustively computed TV distances at small s before
anything else relies on it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import expander
from .randomness import bits_to_int


@dataclass(frozen=True)
class ExtractorParams:
    """Walk extractor: s bits in, s bits out, 3*walk_len seed bits."""

    s: int
    t: int
    beta: Fraction
    walk_len: int

    @property
    def seed_len(self) -> int:
        return 3 * self.walk_len


@dataclass(frozen=True)
class FreshExtractorParams:
    """Degenerate extractor that outputs its seed: Ext(x, y) = y.

    Seed length equals the output length, so schedules built on it recycle
    nothing; it exists as the exact baseline for differential testing.
    """

    s: int

    @property
    def seed_len(self) -> int:
        return self.s


def plan_extractor(s: int, t: int, beta: Fraction) -> ExtractorParams:
    """Smallest conformant walk extractor for deficit t and error beta."""
    if s < 1:
        raise ValueError("output length s must be >= 1")
    if t < 0:
        raise ValueError("entropy deficit t must be >= 0")
    beta = Fraction(beta)
    if not 0 < beta <= 1:
        raise ValueError(f"error beta must be in (0, 1], got {beta}")
    pad = s % 2
    lam = expander.SECOND_EIGENVALUE_BOUND
    # lam^(2L) * 32 * 2^(t+pad) <= beta^3, cleared to integers.
    lhs_num = lam.numerator**2 * 32 * 2 ** (t + pad) * beta.denominator**3
    lhs_den = lam.denominator**2
    rhs = beta.numerator**3
    walk_len = 1
    while lhs_num > rhs * lhs_den:
        walk_len += 1
        lhs_num *= lam.numerator**2
        lhs_den *= lam.denominator**2
    return ExtractorParams(s=s, t=t, beta=beta, walk_len=walk_len)


def seed_to_labels(seed_bits: str) -> list[int]:
    """Split a seed into 3-bit little-endian edge labels."""
    if len(seed_bits) % 3:
        raise ValueError("walk seed length must be a multiple of 3")
    return [bits_to_int(seed_bits[i : i + 3]) for i in range(0, len(seed_bits), 3)]


def extract(params, x_bits: str, y_bits: str) -> str:
    """Apply the planned extractor: walk from x along the labels in y."""
    if isinstance(params, FreshExtractorParams):
        if len(x_bits) != params.s or len(y_bits) != params.s:
            raise ValueError("fresh extractor: input and seed must both have length s")
        return y_bits
    if len(x_bits) != params.s:
        raise ValueError(f"input has {len(x_bits)} bits, expected {params.s}")
    if len(y_bits) != params.seed_len:
        raise ValueError(f"seed has {len(y_bits)} bits, expected {params.seed_len}")
    g = expander.GabberGalilGraph(expander.torus_side_for_bits(params.s))
    v = expander.vertex_from_bits(x_bits)
    v = expander.walk(g, v, seed_to_labels(y_bits))
    return expander.bits_from_vertex(v, params.s)


def fresh_extractor(s: int) -> FreshExtractorParams:
    """Baseline backend with seed length s and Ext(x, y) = y."""
    if s < 1:
        raise ValueError("output length s must be >= 1")
    return FreshExtractorParams(s=s)
