"""Seed-doubling generator fooling block decision trees.

The construction is recursive.  G_0 is the identity on n bits.  Level i+1
splits its seed into x (the level-i seed, s_i bits) and a short fresh part y,
and outputs

    G_{i+1}(x, y) = G_i(x) || G_i(Ext_i(x, y))

so each level doubles the number of n-bit blocks while only paying for an
extractor seed.  Ext_i is an average-case extractor whose entropy deficit
t_i = ceil(2^i * log2(sigma)) matches the number of symbols a depth-2^i tree
can have learned about x, and whose error beta = gamma / 2^levels makes the
per-level losses sum to the target gamma.  The final output is truncated to
n*k bits.

`build_schedule` fixes every length up front, so expansion is deterministic
and the bit budget is auditable before any seed is drawn.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .extract import ExtractorParams, FreshExtractorParams, extract, plan_extractor

LevelParams = Union[ExtractorParams, FreshExtractorParams]

BACKENDS = ("expander", "fresh")


@dataclass(frozen=True)
class PrgSchedule:
    n: int
    k: int
    sigma: int
    gamma: Fraction
    backend: str
    levels: int
    beta: Fraction
    extractors: tuple[LevelParams, ...]
    s: tuple[int, ...]  # s[i] = seed length entering level i; s[levels] = total

    @property
    def seed_len(self) -> int:
        return self.s[self.levels]

    @property
    def output_len(self) -> int:
        return self.n * self.k

    def to_json(self) -> str:
        levels = []
        for i, params in enumerate(self.extractors):
            entry = {
                "level": i,
                "s_in": self.s[i],
                "deficit": getattr(params, "t", None),
                "seed_bits": params.seed_len,
                "s_out": self.s[i + 1],
            }
            if isinstance(params, ExtractorParams):
                entry["walk_len"] = params.walk_len
            levels.append(entry)
        doc = {
            "n": self.n,
            "k": self.k,
            "sigma": self.sigma,
            "gamma": f"{self.gamma.numerator}/{self.gamma.denominator}",
            "backend": self.backend,
            "levels": self.levels,
            "beta": f"{self.beta.numerator}/{self.beta.denominator}",
            "seed_len": self.seed_len,
            "output_len": self.output_len,
            "schedule": levels,
        }
        return json.dumps(doc, indent=2)


def build_schedule(
    n: int,
    k: int,
    sigma: int,
    gamma: Fraction,
    backend: str = "expander",
) -> PrgSchedule:
    """Plan generator lengths for k blocks of n bits against sigma-ary trees."""
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    if sigma < 2:
        raise ValueError("sigma must be at least 2")
    gamma = Fraction(gamma)
    if not 0 < gamma < 1:
        raise ValueError("gamma must lie in (0, 1)")
    if backend not in BACKENDS:
        raise ValueError(f"backend must be one of {BACKENDS}")

    levels = (k - 1).bit_length()  # ceil(log2 k)
    beta = gamma / (1 << levels)
    extractors: list[LevelParams] = []
    s = [n]
    for i in range(levels):
        # t_i = ceil(2^i * log2 sigma) = ceil(log2 sigma^(2^i)), exactly.
        t_i = (sigma ** (1 << i) - 1).bit_length()
        if backend == "fresh":
            params: LevelParams = FreshExtractorParams(s=s[i])
        else:
            params = plan_extractor(s=s[i], t=t_i, beta=beta)
        extractors.append(params)
        s.append(s[i] + params.seed_len)
    return PrgSchedule(
        n=n, k=k, sigma=sigma, gamma=gamma, backend=backend,
        levels=levels, beta=beta,
        extractors=tuple(extractors), s=tuple(s),
    )


def expand(schedule: PrgSchedule, seed_bits: str) -> str:
    """Run the recursion on a full seed and truncate to n*k output bits."""
    if len(seed_bits) != schedule.seed_len:
        raise ValueError(
            f"seed must have {schedule.seed_len} bits, got {len(seed_bits)}"
        )
    return _expand_level(schedule, schedule.levels, seed_bits)[: schedule.output_len]


def _expand_level(schedule: PrgSchedule, level: int, bits: str) -> str:
    if level == 0:
        return bits
    params = schedule.extractors[level - 1]
    s_prev = schedule.s[level - 1]
    x, y = bits[:s_prev], bits[s_prev:]
    left = _expand_level(schedule, level - 1, x)
    right = _expand_level(schedule, level - 1, extract(params, x, y))
    return left + right
