"""Finding heavy Fourier coefficients with a steward-driven prefix search.

For F: {0,1}^n -> {-1, +1} and a threshold theta, the goal is every x with
|F_hat(x)| >= theta, where F_hat(x) = 2^-n * sum_y F(y) * (-1)^<x, y>.  The
search grows prefixes u bits at a time (u = floor(log2(1/theta)), at least
1) and keeps a prefix p alive while the subcube weight

    W_p = sum over x extending p of F_hat(x)^2
        = E_{y, y', z} [ F(y z) F(y' z) * (-1)^<p, y xor y'> ]

appears to be at least theta^2 / 2.  Parseval caps the number of survivors,
so each of the k = ceil(n/u) levels asks for at most d = floor(2^u * 4 /
theta^2) weights at once -- one adaptive d-dimensional query per level,
answered by a steward whose accuracy (3d+5)*eps_est = theta^2/4 separates
weights above theta^2 from weights below theta^2/4.

Each level's query is deterministic in the steward's n-bit tape block: the
block seeds a walk-mode median sampler over (y, y', z) points, and all <= d
coordinates reuse the same points (the product F(yz)F(y'z) is shared; only
the parity of p & (y xor y') differs per coordinate).  The total coin cost
is the steward seed, n_tape + O(k log d) bits, against n_tape * k for
freshly seeded levels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .randomness import (
    BitSource,
    BudgetReport,
    TapeSource,
    bits_to_hex,
    bits_to_int,
    hex_to_bits,
    int_to_bits,
)
from .sampler import SamplerPlan, _batch_seeds, batch_points, lower_median, plan_sampler
from .steward import ConcentratedFn, Session, StewardConfig

MATERIALIZE_CAP = 22  # largest n for which a callback F is expanded to a table


@dataclass
class BooleanFunction:
    """F: {0,1}^n -> {-1, +1}, as a dense table and/or a query callback."""

    n: int
    table: np.ndarray | None = None
    query: Callable[[str], int] | None = None

    def __post_init__(self):
        if self.table is None and self.query is None:
            raise ValueError("need a truth table or a query callback")
        if self.table is not None:
            self.table = np.asarray(self.table, dtype=np.int8)
            if self.table.size != 1 << self.n:
                raise ValueError("table length must be 2^n")
            if not np.all(np.abs(self.table) == 1):
                raise ValueError("values must be +-1")

    def materialize(self) -> np.ndarray:
        if self.table is None:
            if self.n > MATERIALIZE_CAP:
                raise ValueError(
                    f"refusing to expand a callback at n={self.n} > {MATERIALIZE_CAP}"
                )
            vals = [self.query(int_to_bits(x, self.n)) for x in range(1 << self.n)]
            self.table = np.asarray(vals, dtype=np.int8)
            if not np.all(np.abs(self.table) == 1):
                raise ValueError("callback values must be +-1")
        return self.table


def as_boolean_function(f, n: int | None = None) -> BooleanFunction:
    if isinstance(f, BooleanFunction):
        return f
    if callable(f):
        if n is None:
            raise ValueError("callable F needs an explicit n")
        return BooleanFunction(n=n, query=f)
    table = np.asarray(f)
    size = table.size
    if size == 0 or size & (size - 1):
        raise ValueError("table length must be a power of two")
    return BooleanFunction(n=size.bit_length() - 1, table=table)


def wht_ints(values) -> np.ndarray:
    """Exact Walsh sums: out[x] = sum_y f(y) * (-1)^<x, y>, int64 butterfly."""
    a = np.asarray(values, dtype=np.int64).copy()
    size = a.size
    if size & (size - 1) or size == 0:
        raise ValueError("length must be a power of two")
    h = 1
    while h < size:
        pairs = a.reshape(-1, 2, h)
        x = pairs[:, 0, :].copy()
        y = pairs[:, 1, :].copy()
        pairs[:, 0, :] = x + y
        pairs[:, 1, :] = x - y
        h *= 2
    return a


@dataclass(frozen=True)
class FourierSpectrum:
    """All 2^n coefficients, held exactly as Walsh sums (2^n times F_hat)."""

    n: int
    sums: np.ndarray

    def coefficient(self, mask: int) -> Fraction:
        return Fraction(int(self.sums[mask]), 1 << self.n)

    def coefficients(self) -> dict[int, Fraction]:
        """Nonzero coefficients, bitmask -> exact value."""
        return {
            int(m): Fraction(int(self.sums[m]), 1 << self.n)
            for m in np.nonzero(self.sums)[0]
        }

    def heavy(self, theta: Fraction) -> list[int]:
        """Masks with |F_hat| >= theta, ascending; exact comparison."""
        theta = Fraction(theta)
        bound = theta * (1 << self.n)
        return [
            int(m)
            for m in range(1 << self.n)
            if abs(int(self.sums[m])) * bound.denominator >= bound.numerator
        ]

    def parseval(self) -> Fraction:
        return Fraction(int((self.sums.astype(object) ** 2).sum()), 1 << (2 * self.n))


def wht(table) -> FourierSpectrum:
    fn = as_boolean_function(table)
    sums = wht_ints(fn.materialize())
    return FourierSpectrum(n=fn.n, sums=sums)


def fourier_coefficients(table) -> tuple[np.ndarray, int]:
    """(Walsh sums, n); divide by 2^n for the actual coefficients."""
    sums = wht_ints(table)
    return sums, sums.size.bit_length() - 1


def heavy_set_exact(table, theta: Fraction) -> list[str]:
    """All x (as bit strings, sorted) with |F_hat(x)| >= theta, exactly."""
    spectrum = wht(table)
    return sorted(int_to_bits(m, spectrum.n) for m in spectrum.heavy(theta))


def subcube_weight_exact(table, prefix: str) -> Fraction:
    """W_prefix = sum of F_hat(x)^2 over x whose first len(prefix) bits are prefix."""
    sums, n = fourier_coefficients(as_boolean_function(table).materialize())
    ell = len(prefix)
    if ell > n:
        raise ValueError("prefix longer than n")
    p = bits_to_int(prefix) if ell else 0
    total = sum(int(sums[p + (s << ell)]) ** 2 for s in range(1 << (n - ell)))
    return Fraction(total, 1 << (2 * n))


def load_truth_table(text: str) -> np.ndarray:
    """Parse 'n=<int>' then hex-packed bits; bit 1 means F = -1, as +-1 int8."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("n="):
        raise ValueError("first line must be n=<int>")
    n = int(lines[0][2:])
    bits = hex_to_bits("".join(lines[1:]), 1 << n)
    return np.array([-1 if b == "1" else 1 for b in bits], dtype=np.int8)


def dump_truth_table(table) -> str:
    table = np.asarray(table)
    n = table.size.bit_length() - 1
    bits = "".join("1" if v < 0 else "0" for v in table)
    return f"n={n}\n{bits_to_hex(bits)}\n"


@dataclass(frozen=True)
class GlParams:
    n: int
    theta: Fraction
    delta: Fraction
    u: int
    k: int
    d: int
    eps_est: Fraction
    est_delta: Fraction
    block_lens: tuple[int, ...]
    prefix_lens: tuple[int, ...]
    plans: tuple[SamplerPlan, ...]

    @property
    def tape_bits(self) -> int:
        return max(plan.seed_bits for plan in self.plans)

    @property
    def keep_threshold(self) -> Fraction:
        return self.theta**2 / 2

    def steward_config(self, kind: str = "main", backend: str = "expander") -> StewardConfig:
        return StewardConfig(
            n=self.tape_bits,
            k=self.k,
            d=self.d,
            epsilon=self.eps_est,
            delta=self.delta / (2 * self.n),
            gamma=self.delta / 2,
            d0=self.d,
            kind=kind,
            backend=backend,
        )


def gl_params(n: int, theta: Fraction, delta: Fraction) -> GlParams:
    theta, delta = Fraction(theta), Fraction(delta)
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 < theta <= 1:
        raise ValueError("theta must lie in (0, 1]")
    if theta * (1 << (n - 1)) < 1:  # theta >= 2^(1-n): otherwise d blows past 2^n
        raise ValueError("theta must be at least 2^(1-n)")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    u = 0
    while (1 << (u + 1)) * theta.numerator <= theta.denominator:  # 2^(u+1) <= 1/theta
        u += 1
    u = max(1, u)
    k = math.ceil(n / u)
    d = ((1 << u) * 4 * theta.denominator**2) // theta.numerator**2
    eps_est = theta**2 / (4 * (3 * d + 5))
    est_delta = delta / (2 * d * n)
    block_lens = tuple(min(u, n - i * u) for i in range(k))
    prefix_lens = tuple(sum(block_lens[: i + 1]) for i in range(k))
    plans = tuple(
        plan_sampler(n + ell, eps_est / 2, est_delta, mode="walk")
        for ell in prefix_lens
    )
    return GlParams(
        n=n, theta=theta, delta=delta, u=u, k=k, d=d,
        eps_est=eps_est, est_delta=est_delta,
        block_lens=block_lens, prefix_lens=prefix_lens, plans=plans,
    )


def _weights_from_tape(
    table: np.ndarray,
    cand_ints: list[int],
    ell: int,
    n: int,
    plan: SamplerPlan,
    tape_bits: str,
) -> list[Fraction]:
    """Median-of-batches estimates of W_p for every candidate, one shared tape.

    Points are (y, y', z) packed little-endian into n + ell bits; the product
    F(yz)F(y'z) is computed once per batch and reweighted per candidate by
    the parity of p & (y xor y').  Each batch's mean of the Boolean variable
    C = 1/2 + product/2 is exact, so W = 2*median(C-means) - 1 comes out as
    Fraction(median of batch product-sums, t0)."""
    src = TapeSource(tape_bits[: plan.seed_bits])
    seeds = _batch_seeds(plan, src)
    signs = np.asarray(table, dtype=np.int64)
    mask_l = np.uint64((1 << ell) - 1)
    sh_l = np.uint64(ell)
    sh_2l = np.uint64(2 * ell)
    sums = np.zeros((len(cand_ints), plan.r), dtype=np.int64)
    for bi, (a, b) in enumerate(seeds):
        v = batch_points(a, b, plan.t0, plan.field_bits, n + ell)
        y = v & mask_l
        yp = (v >> sh_l) & mask_l
        z = v >> sh_2l
        prod = signs[(y | (z << sh_l)).astype(np.int64)]
        prod = prod * signs[(yp | (z << sh_l)).astype(np.int64)]
        diff = y ^ yp
        for ci, p in enumerate(cand_ints):
            par = (np.bitwise_count(diff & np.uint64(p)) & 1).astype(np.int64)
            sums[ci, bi] = (prod * (1 - 2 * par)).sum()
    return [
        Fraction(int(lower_median(sums[ci].tolist())), plan.t0)
        for ci in range(len(cand_ints))
    ]


def estimate_W(
    f,
    prefix: str,
    epsilon: Fraction,
    delta: Fraction,
    source: BitSource,
    mode: str = "walk",
    plan: SamplerPlan | None = None,
) -> Fraction:
    """Standalone W_prefix estimate to accuracy epsilon, failure delta."""
    table = as_boolean_function(f).materialize()
    n = table.size.bit_length() - 1
    ell = len(prefix)
    if ell > n:
        raise ValueError("prefix longer than n")
    if plan is None:
        plan = plan_sampler(n + ell, Fraction(epsilon) / 2, Fraction(delta), mode=mode)
    tape = source.draw(plan.seed_bits, phase="sampler")
    return _weights_from_tape(table, [bits_to_int(prefix)], ell, n, plan, tape)[0]


@dataclass
class GlResult:
    params: GlParams
    strings: list[str]
    aborted: bool
    bits_used: int
    levels_run: int

    @property
    def masks(self) -> list[int]:
        return [bits_to_int(s) for s in self.strings]


def goldreich_levin(
    f, theta: Fraction, delta: Fraction, source: BitSource,
    kind: str = "main", backend: str = "expander", n: int | None = None,
) -> GlResult:
    """Prefix search for {x : |F_hat(x)| >= theta}; misses nothing above theta
    and returns nothing below theta/2, except with probability delta."""
    table = as_boolean_function(f, n).materialize()
    n = table.size.bit_length() - 1
    params = gl_params(n, theta, delta)
    config = params.steward_config(kind=kind, backend=backend)
    session = Session(config, source)
    survivors = [""]
    cap = Fraction(params.d, 1 << params.u)
    for level in range(params.k):
        if len(survivors) > cap:  # only reachable on estimation failure
            return GlResult(
                params=params, strings=[], aborted=True,
                bits_used=session.bits_used, levels_run=level,
            )
        ell = params.prefix_lens[level]
        blen = params.block_lens[level]
        cands = [p + int_to_bits(e, blen) for p in survivors for e in range(1 << blen)]
        cand_ints = [bits_to_int(c) for c in cands]
        plan = params.plans[level]

        def evaluate(tape, _c=cand_ints, _l=ell, _p=plan):
            w = _weights_from_tape(table, _c, _l, n, _p, tape)
            return w + [Fraction(0)] * (params.d - len(w))

        y = session.answer(
            ConcentratedFn(
                oracle=evaluate,
                epsilon=params.eps_est,
                delta=params.d * params.est_delta,
            )
        )
        keep = params.keep_threshold
        survivors = [cands[j] for j in range(len(cands)) if y[j] >= keep]
    return GlResult(
        params=params, strings=sorted(survivors), aborted=False,
        bits_used=session.bits_used, levels_run=params.k,
    )


def gl_randomness_audit(params: GlParams, backend: str = "expander") -> BudgetReport:
    """Coin budget of one run: the steward seed, split tape vs ladder."""
    from .prg import build_schedule

    config = params.steward_config(backend=backend)
    schedule = build_schedule(
        config.n, config.k, config.sigma, config.gamma, backend=backend
    )
    report = BudgetReport()
    report.add("tape", params.tape_bits)
    report.add("ladder", schedule.seed_len - params.tape_bits)
    return report


def gl_audit_dict(params: GlParams, backend: str = "expander") -> dict:
    """Expanded audit for reporting: budgets plus query counts."""
    report = gl_randomness_audit(params, backend=backend)
    return {
        "n": params.n,
        "levels": params.k,
        "d": params.d,
        "tape_bits": params.tape_bits,
        "steward_bits": report.bits_drawn,
        "fresh_bits": params.tape_bits * params.k,
        "per_phase": dict(report.per_phase),
        "sampler_queries_per_level": [plan.queries for plan in params.plans],
    }
