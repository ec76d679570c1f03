"""Randomness-efficient samplers for bounded oracles.

Two estimators of E[f] for f: {0,1}^n -> [0, 1]:

* median-of-batches: r batches of t0 = ceil(10/eps^2) pairwise-independent
  points each; a batch mean is eps-accurate with probability >= 3/4 by
  Chebyshev, and the (lower) median of r = ceil(8*log2(1/delta)) batches
  drives the failure below delta.  Points of one batch are g -> a*g + b over
  GF(2^n'), truncated to the low n bits; n' = max(n, ceil(log2 t0)) so the
  field has room for t0 distinct g's.  Batch seeds (a, b) are either fresh
  (2*n'*r bits) or successive vertices of an expander walk on the 2^n' x 2^n'
  torus (2*n' + 3*(r-1) bits).  Estimates stay exact: a batch of 0/1 oracle
  values yields Fraction(count, t0).

* averaging: a single walk on the torus over n_emb = n (+1 if odd) bits whose
  t = ceil(6*ceil(log2(2/delta))/eps^2) vertex labels serve as the sample
  points directly.  Unlike the median form this keeps the estimate an
  empirical mean, which is what the amplifier below needs.

`app_amplify` turns a coin-flipping approximator that is accurate with
probability >= 2/3 into one accurate with probability >= 1 - delta: run it
on the points of a (1/10, delta) averaging sampler and answer the lower
median of its outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .expander import GabberGalilGraph, neighbor, torus_side_for_bits, vertex_from_bits
from .gf2 import field_poly
from .randomness import BitSource, bits_to_int, int_to_bits

MODES = ("walk", "independent")

BATCH_POINTS_FACTOR = 10  # t0 = ceil(10 / eps^2): batch failure <= 1/40
MEDIAN_REPS_FACTOR = 8  # r = ceil(8 * log2(1/delta))
AVERAGING_QUALITY_FACTOR = 6  # t = ceil(6 * ceil(log2(2/delta)) / eps^2)


def lower_median(values: Sequence):
    if not values:
        raise ValueError("median of empty sequence")
    return sorted(values)[(len(values) - 1) // 2]


def _ceil_log2(q: Fraction) -> int:
    """Smallest integer L with 2^L >= q (q > 0)."""
    if q <= 0:
        raise ValueError("argument must be positive")
    L = 0
    while (1 << L) * q.denominator < q.numerator:
        L += 1
    return L


def _exact(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    f = float(value)
    return Fraction(int(f)) if f.is_integer() else Fraction(f)


@dataclass(frozen=True)
class SamplerPlan:
    n: int
    epsilon: Fraction
    delta: Fraction
    mode: str
    t0: int
    r: int
    field_bits: int

    @property
    def seed_bits(self) -> int:
        if self.mode == "independent":
            return 2 * self.field_bits * self.r
        return 2 * self.field_bits + 3 * (self.r - 1)

    @property
    def queries(self) -> int:
        return self.t0 * self.r


def plan_sampler(
    n: int,
    epsilon: Fraction,
    delta: Fraction,
    mode: str = "walk",
    reps_factor: int = MEDIAN_REPS_FACTOR,
) -> SamplerPlan:
    epsilon, delta = Fraction(epsilon), Fraction(delta)
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 < epsilon <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    t0 = math.ceil(BATCH_POINTS_FACTOR / epsilon**2)
    r = max(1, _ceil_log2((1 / delta) ** reps_factor))  # ceil(8 * log2(1/delta))
    field_bits = max(n, (t0 - 1).bit_length())
    return SamplerPlan(
        n=n, epsilon=epsilon, delta=delta, mode=mode, t0=t0, r=r, field_bits=field_bits
    )


class TruthTableOracle:
    """f given as a dense table of 2^n values, indexed by little-endian ints."""

    def __init__(self, table):
        table = np.asarray(table)
        if table.ndim != 1 or table.size & (table.size - 1):
            raise ValueError("table length must be a power of two")
        self.table = table
        self.n = table.size.bit_length() - 1

    def eval_ints(self, xs: np.ndarray) -> np.ndarray:
        return self.table[np.asarray(xs, dtype=np.int64)]

    def cube_total(self):
        return self.table.sum()

    def __call__(self, bits: str):
        return self.table[bits_to_int(bits)].item()


class FnOracle:
    """Adapter running a bits -> value callable pointwise."""

    def __init__(self, n: int, fn: Callable[[str], object]):
        self.n = n
        self.fn = fn

    def eval_ints(self, xs: np.ndarray) -> np.ndarray:
        vals = [self.fn(int_to_bits(int(x), self.n)) for x in xs]
        return np.array(vals, dtype=object)

    def __call__(self, bits: str):
        return self.fn(bits)


def as_oracle(f, n: int):
    if hasattr(f, "eval_ints"):
        return f
    if callable(f):
        return FnOracle(n, f)
    raise TypeError("oracle must expose eval_ints or be callable on bit strings")


def _byte_tables(a: int, field_bits: int) -> list[np.ndarray]:
    """Per-byte lookup tables for g -> a*g in GF(2^field_bits)."""
    poly = field_poly(field_bits)
    top = 1 << field_bits
    powers = []
    cur = a
    for _ in range(field_bits):
        powers.append(cur)
        cur <<= 1
        if cur & top:
            cur ^= poly
    tabs = []
    for base in range(0, field_bits, 8):
        t = np.zeros(1, dtype=np.uint64)
        for bit_val in powers[base : base + 8]:
            t = np.concatenate([t, t ^ np.uint64(bit_val)])
        tabs.append(t)
    return tabs


def _point_indices(start: int, stop: int, field_bits: int) -> list[np.ndarray]:
    """Per-byte gather indices for the range of generator exponents."""
    g = np.arange(start, stop, dtype=np.uint64)
    return [
        (g >> np.uint64(8 * i)) & np.uint64(255)
        for i in range((field_bits + 7) // 8)
    ]


def _points_from_indices(
    tabs: list[np.ndarray], idx: list[np.ndarray], b: int, n: int
) -> np.ndarray:
    acc = tabs[0][idx[0]]
    for i in range(1, len(tabs)):
        acc = acc ^ tabs[i][idx[i]]
    return (acc ^ np.uint64(b)) & np.uint64((1 << n) - 1)


def batch_points(a: int, b: int, t0: int, field_bits: int, n: int) -> np.ndarray:
    """The t0 points a*g + b (g = 0..t0-1) truncated to n bits, as uint64."""
    if t0 > 1 << field_bits:
        raise ValueError("field too small for t0 distinct points")
    return _points_from_indices(
        _byte_tables(a, field_bits), _point_indices(0, t0, field_bits), b, n
    )


@dataclass
class SampleRun:
    plan: SamplerPlan
    batch_means: list[Fraction]
    estimate: Fraction
    bits_used: int


def run_sampler(plan: SamplerPlan, oracle, source: BitSource) -> SampleRun:
    oracle = as_oracle(oracle, plan.n)
    before = source.report.bits_drawn
    seeds = _batch_seeds(plan, source)
    field = 1 << plan.field_bits
    # When t0 nearly exhausts the field, sum the few skipped points instead:
    # g -> a*g + b permutes the field, and truncation to n bits is balanced,
    # so the full-field total is just 2^(field_bits - n) * sum over the cube.
    cube = getattr(oracle, "cube_total", None)
    total = cube() if cube is not None and 2 * plan.t0 > field else None
    if total is not None:
        full_total = _exact(total) * (field >> plan.n)
        idx = _point_indices(plan.t0, field, plan.field_bits)
    else:
        idx = _point_indices(0, plan.t0, plan.field_bits)
    means = []
    for a, b in seeds:
        pts = _points_from_indices(_byte_tables(a, plan.field_bits), idx, b, plan.n)
        batch = _exact(oracle.eval_ints(pts).sum())
        if total is not None:
            batch = full_total - batch
        means.append(batch / plan.t0)
    return SampleRun(
        plan=plan,
        batch_means=means,
        estimate=lower_median(means),
        bits_used=source.report.bits_drawn - before,
    )


def sample_mean(plan: SamplerPlan, oracle, source: BitSource) -> Fraction:
    return run_sampler(plan, oracle, source).estimate


def _batch_seeds(plan: SamplerPlan, source: BitSource) -> list[tuple[int, int]]:
    nf = plan.field_bits
    if plan.mode == "independent":
        seeds = []
        for _ in range(plan.r):
            bits = source.draw(2 * nf, phase="sampler")
            seeds.append((bits_to_int(bits[:nf]), bits_to_int(bits[nf:])))
        return seeds
    # walk mode: batch seeds are successive vertices of a torus walk
    g = GabberGalilGraph(torus_side_for_bits(2 * nf))
    vertex = vertex_from_bits(source.draw(2 * nf, phase="sampler"))
    seeds = [vertex]
    for _ in range(plan.r - 1):
        label = bits_to_int(source.draw(3, phase="sampler"))
        vertex = neighbor(g, vertex, label)
        seeds.append(vertex)
    return seeds


@dataclass(frozen=True)
class AveragingSamplerPlan:
    n: int
    epsilon: Fraction
    delta: Fraction
    t: int

    @property
    def n_emb(self) -> int:
        return self.n + (self.n & 1)

    @property
    def seed_bits(self) -> int:
        return self.n_emb + 3 * (self.t - 1)


def plan_averaging(
    n: int,
    epsilon: Fraction,
    delta: Fraction,
    quality_factor: int = AVERAGING_QUALITY_FACTOR,
) -> AveragingSamplerPlan:
    epsilon, delta = Fraction(epsilon), Fraction(delta)
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 < epsilon <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    t = math.ceil(Fraction(quality_factor * _ceil_log2(2 / delta)) / epsilon**2)
    return AveragingSamplerPlan(n=n, epsilon=epsilon, delta=delta, t=max(1, t))


def averaging_points(plan: AveragingSamplerPlan, source: BitSource) -> np.ndarray:
    """The t walk vertices, truncated to n-bit point labels (uint64)."""
    g = GabberGalilGraph(torus_side_for_bits(plan.n_emb))
    half = plan.n_emb // 2
    vertex = vertex_from_bits(source.draw(plan.n_emb, phase="sampler"))
    mask = (1 << plan.n) - 1
    pts = [(vertex[0] | vertex[1] << half) & mask]
    for _ in range(plan.t - 1):
        label = bits_to_int(source.draw(3, phase="sampler"))
        vertex = neighbor(g, vertex, label)
        pts.append((vertex[0] | vertex[1] << half) & mask)
    return np.array(pts, dtype=np.uint64)


def averaging_sample(plan: AveragingSamplerPlan, source: BitSource) -> list[str]:
    """The t sample points as n-bit strings."""
    return [int_to_bits(int(x), plan.n) for x in averaging_points(plan, source)]


def averaging_mean(plan: AveragingSamplerPlan, oracle, source: BitSource) -> Fraction:
    oracle = as_oracle(oracle, plan.n)
    return _exact(oracle.eval_ints(averaging_points(plan, source)).sum()) / plan.t


def median_amplify(f: Callable[[str], object], plan: AveragingSamplerPlan, source: BitSource):
    """Lower median of f over the points of one averaging-sampler run."""
    return lower_median([f(p) for p in averaging_sample(plan, source)])


@dataclass
class AmplifiedEstimator:
    """Callable on a BitSource; .plan exposes the seed budget."""

    plan: AveragingSamplerPlan
    phi: Callable[[str], object]

    def __call__(self, source: BitSource):
        return median_amplify(self.phi, self.plan, source)


def app_amplify(phi: Callable[[str], object], coin_bits: int, delta) -> AmplifiedEstimator:
    """Amplify a 2/3-confidence coin-flipping approximator to 1 - delta.

    phi(coins) must land in the good interval for >= 2/3 of coin strings;
    the (1/10, delta) averaging sampler pins the bad fraction among its
    points below 1/2, so the median of the sampled outputs is good except
    with probability delta.
    """
    if coin_bits < 1:
        raise ValueError("coin_bits must be >= 1")
    plan = plan_averaging(coin_bits, Fraction(1, 10), Fraction(delta))
    return AmplifiedEstimator(plan=plan, phi=phi)
