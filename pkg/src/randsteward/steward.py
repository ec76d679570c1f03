"""Randomness stewards: answer k adaptive estimation queries from one seed.

A query is a function f: {0,1}^n -> R^d that the owner promises is
(epsilon, delta)-concentrated: on a uniform input, f lands within epsilon of
some point mu in every coordinate except with probability delta.  The owner
picks each query after seeing the previous answer; the steward must keep
every answer within epsilon' = (3*d0 + 5)*epsilon of the corresponding mu
while spending far fewer than n*k random bits.

The base move is the shift-and-round S0: evaluate W = f(X) on one n-bit
sample, lay down a grid of cells of length L = 2*(d0+1)*epsilon, pick the
smallest shift D in {1..d0+1} such that every coordinate's uncertainty
window [W_j + (2D-1)e, W_j + (2D+1)e] sits inside a single cell, and answer
with the cell midpoint of W_j + 2*D*e.  Each coordinate rules out at most
one shift, so a feasible D always exists; whenever W is epsilon-close to mu
the answer is a function of mu and D alone.  That collapses the owner's view
of a round to sigma = (d0+1)^g + 1 symbols (g = d_pad/d0 groups, plus one
abort symbol), which is what lets the main steward feed S0 from the blocks
of a short-seed generator fooling sigma-ary block decision trees:
n + O(k log d) bits total, failure <= k*delta + gamma.

Baselines: "s0" (fresh n bits per round, rounded), "union" (one sample
reused every round, rounded), "saks-zhou" (one sample, coarse grid u*epsilon
with a fresh random shift each round), "naive-fresh" / "naive-reuse" (raw
answers, fresh or reused sample).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Sequence

from .bdt import split_blocks
from .numeric import Grid, contained_in_one_interval, rat_to_str, round_to_midpoint
from .prg import PrgSchedule, build_schedule, expand
from .randomness import BitSource, draw_uniform_power_of_two

KINDS = ("main", "s0", "union", "saks-zhou", "naive-fresh", "naive-reuse")


class StewardProtocolError(RuntimeError):
    pass


@dataclass(frozen=True)
class StewardConfig:
    n: int
    k: int
    d: int
    epsilon: Fraction
    delta: Fraction
    gamma: Fraction
    d0: int | None = None
    kind: str = "main"
    backend: str = "expander"

    def __post_init__(self):
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        object.__setattr__(self, "delta", Fraction(self.delta))
        object.__setattr__(self, "gamma", Fraction(self.gamma))
        if self.d0 is None:
            object.__setattr__(self, "d0", self.d)
        if self.n < 1 or self.k < 1 or self.d < 1:
            raise ValueError("need n, k, d >= 1")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if not 0 <= self.delta < Fraction(1, 2):
            raise ValueError("delta must lie in [0, 1/2): the task is trivial otherwise")
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")
        if not 1 <= self.d0 <= self.d:
            raise ValueError("d0 must lie in 1..d")
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")

    @property
    def d_pad(self) -> int:
        return math.ceil(self.d / self.d0) * self.d0

    @property
    def groups(self) -> int:
        return self.d_pad // self.d0

    @property
    def sigma(self) -> int:
        """Per-round symbol count of the owner's view; d + 2 when d0 = d."""
        return (self.d0 + 1) ** self.groups + 1

    @property
    def grid(self) -> Grid:
        return Grid(interval_length=2 * (self.d0 + 1) * self.epsilon)

    @property
    def error_bound(self) -> Fraction:
        """Guaranteed accuracy epsilon' of every answer against mu."""
        return (3 * self.d0 + 5) * self.epsilon


@dataclass
class ConcentratedFn:
    """An estimation query: oracle maps an n-bit string to d values.

    epsilon/delta document the declared concentration; mu is the
    concentration point.  The steward reads none of them -- they ride along
    for certification checks and accuracy audits in the harness.
    """

    oracle: Callable[[str], Sequence]
    epsilon: Fraction | None = None
    delta: Fraction | None = None
    mu: tuple[Fraction, ...] | None = None

    @staticmethod
    def wrap(query) -> "ConcentratedFn":
        if isinstance(query, ConcentratedFn):
            return query
        return ConcentratedFn(oracle=query)


def choose_shift(w: Sequence[Fraction], epsilon: Fraction, grid: Grid) -> int:
    """Smallest shift D in {1..len(w)+1} whose windows all stay in one cell.

    The window for coordinate j is [w_j + (2D-1)e, w_j + (2D+1)e]; touching a
    cell's right boundary counts as escaping.  The d0+1 candidate windows of
    one coordinate tile an interval of exactly one cell length, so at most
    one candidate per coordinate is ruled out and a valid D always exists.
    """
    d0 = len(w)
    for delta in range(1, d0 + 2):
        ok = all(
            contained_in_one_interval(
                wj + (2 * delta - 1) * epsilon,
                wj + (2 * delta + 1) * epsilon,
                grid,
            )
            for wj in w
        )
        if ok:
            return delta
    raise AssertionError("no feasible shift in 1..d0+1: arithmetic bug")


def pad_vector(w: Sequence[Fraction], d0: int) -> list[Fraction]:
    padded = list(w)
    while len(padded) % d0:
        padded.append(Fraction(0))
    return padded


def shift_round(
    w: Sequence[Fraction], epsilon: Fraction, d0: int, grid: Grid | None = None
) -> tuple[list[Fraction], list[int]]:
    """Grouped shift-and-round of a padded vector -> (answers, shift per group)."""
    if len(w) % d0:
        raise ValueError("vector length must be a multiple of d0")
    if grid is None:
        grid = Grid(interval_length=2 * (d0 + 1) * epsilon)
    y: list[Fraction] = []
    deltas: list[int] = []
    for start in range(0, len(w), d0):
        group = list(w[start : start + d0])
        delta = choose_shift(group, epsilon, grid)
        deltas.append(delta)
        y.extend(round_to_midpoint(wj + 2 * delta * epsilon, grid) for wj in group)
    return y, deltas


@dataclass
class RoundRecord:
    index: int
    x: str
    w: tuple[Fraction, ...]
    deltas: tuple[int, ...] | None
    y: tuple[Fraction, ...]
    oracle_calls: int = 1


@dataclass
class Transcript:
    config: StewardConfig
    rounds: list[RoundRecord] = field(default_factory=list)
    bits_used: int = 0
    bits_by_phase: dict[str, int] = field(default_factory=dict)

    def responses(self) -> list[tuple[Fraction, ...]]:
        return [r.y for r in self.rounds]

    def to_json(self) -> str:
        cfg = self.config
        doc = {
            "config": {
                "n": cfg.n, "k": cfg.k, "d": cfg.d, "d0": cfg.d0,
                "epsilon": rat_to_str(cfg.epsilon),
                "delta": rat_to_str(cfg.delta),
                "gamma": rat_to_str(cfg.gamma),
                "kind": cfg.kind, "backend": cfg.backend,
            },
            "bits_used": self.bits_used,
            "bits_by_phase": dict(self.bits_by_phase),
            "rounds": [
                {
                    "round": r.index,
                    "x": r.x,
                    "w": [rat_to_str(v) for v in r.w],
                    "deltas": list(r.deltas) if r.deltas is not None else None,
                    "y": [rat_to_str(v) for v in r.y],
                    "oracle_calls": r.oracle_calls,
                }
                for r in self.rounds
            ],
        }
        return json.dumps(doc, indent=2)


class Session:
    """One steward run: up to k rounds of answer(query), one query per round."""

    def __init__(self, config: StewardConfig, source: BitSource):
        self.config = config
        self.source = source
        self.round = 0
        self._bits_at_open = source.report.bits_drawn
        self._phase_at_open = dict(source.report.per_phase)
        self.transcript = Transcript(config=config)
        self.schedule: PrgSchedule | None = None
        kind = config.kind
        if kind == "main":
            self.schedule = build_schedule(
                config.n, config.k, config.sigma, config.gamma, backend=config.backend
            )
            seed = source.draw(self.schedule.seed_len, phase="seed")
            self._blocks = split_blocks(expand(self.schedule, seed), config.n, config.k)
        elif kind in ("union", "saks-zhou", "naive-reuse"):
            self._x = source.draw(config.n, phase="seed")
            if kind == "saks-zhou":
                target = Fraction(2 * config.k * config.d) / config.gamma
                u = 1
                while u < target:
                    u *= 2
                self.u = u
                self._sz_grid = Grid(interval_length=u * config.epsilon)
        # "s0" and "naive-fresh" draw their sample bits inside each round

    @property
    def bits_used(self) -> int:
        return self.source.report.bits_drawn - self._bits_at_open

    def _finish_budget(self):
        self.transcript.bits_used = self.bits_used
        per_phase = {}
        for phase, total in self.source.report.per_phase.items():
            diff = total - self._phase_at_open.get(phase, 0)
            if diff:
                per_phase[phase] = diff
        self.transcript.bits_by_phase = per_phase

    def _next_sample(self) -> str:
        kind = self.config.kind
        if kind == "main":
            return self._blocks[self.round]
        if kind in ("s0", "naive-fresh"):
            return self.source.draw(self.config.n, phase="sample")
        return self._x

    def answer(self, query, d0: int | None = None) -> tuple[Fraction, ...]:
        cfg = self.config
        if self.round >= cfg.k:
            raise StewardProtocolError(f"query budget of {cfg.k} rounds exhausted")
        if d0 is None:
            d0 = cfg.d0
        fn = ConcentratedFn.wrap(query)
        x = self._next_sample()

        calls = 0

        def counted_oracle(bits: str):
            nonlocal calls
            calls += 1
            return fn.oracle(bits)

        w = tuple(Fraction(v) for v in counted_oracle(x))
        if calls != 1:
            raise StewardProtocolError(f"one-query discipline violated: {calls} calls")
        if len(w) != cfg.d:
            raise StewardProtocolError(f"query returned {len(w)} values, expected {cfg.d}")

        kind = cfg.kind
        deltas: tuple[int, ...] | None = None
        if kind in ("main", "s0", "union"):
            grid = Grid(interval_length=2 * (d0 + 1) * cfg.epsilon)
            y_full, delta_list = shift_round(pad_vector(w, d0), cfg.epsilon, d0, grid)
            y = tuple(y_full[: cfg.d])
            deltas = tuple(delta_list)
        elif kind == "saks-zhou":
            delta = draw_uniform_power_of_two(self.source, self.u, phase="shift")
            y = tuple(
                round_to_midpoint(wj + delta * cfg.epsilon, self._sz_grid) for wj in w
            )
            deltas = (delta,)
        else:  # naive-fresh / naive-reuse answer raw
            y = w

        self.transcript.rounds.append(
            RoundRecord(index=self.round, x=x, w=w, deltas=deltas, y=y, oracle_calls=calls)
        )
        self.round += 1
        self._finish_budget()
        return y


def open_session(config: StewardConfig, source: BitSource) -> Session:
    return Session(config, source)


def s0_round(session: Session, f) -> tuple[Fraction, ...]:
    """One ungrouped shift-and-round answer (d0 = d)."""
    return session.answer(f, d0=session.config.d)


def s0_generalized_round(session: Session, f, d0: int) -> tuple[Fraction, ...]:
    """One grouped answer: pad d to a multiple of d0, shift per group of d0."""
    if not 1 <= d0 <= session.config.d:
        raise ValueError("d0 must lie in 1..d")
    return session.answer(f, d0=d0)


Owner = Callable[[int, list], object]


def run_steward(config: StewardConfig, owner: Owner, source: BitSource) -> Transcript:
    """Drive a full session: owner(i, responses_so_far) supplies round i's query."""
    session = Session(config, source)
    responses: list[tuple[Fraction, ...]] = []
    for i in range(config.k):
        query = owner(i, responses)
        responses.append(session.answer(query))
    return session.transcript


def run_main_steward(config: StewardConfig, owner: Owner, source: BitSource) -> Transcript:
    return run_steward(replace(config, kind="main"), owner, source)


def run_union_bound_steward(config: StewardConfig, owner: Owner, source: BitSource) -> Transcript:
    return run_steward(replace(config, kind="union"), owner, source)


def run_saks_zhou_steward(config: StewardConfig, owner: Owner, source: BitSource) -> Transcript:
    return run_steward(replace(config, kind="saks-zhou"), owner, source)


def run_naive(config: StewardConfig, owner: Owner, mode: str, source: BitSource) -> Transcript:
    if mode not in ("fresh", "reuse"):
        raise ValueError("mode must be 'fresh' or 'reuse'")
    return run_steward(replace(config, kind=f"naive-{mode}"), owner, source)


def certify_round(
    y: Sequence[Fraction], mu: Sequence[Fraction], config: StewardConfig
) -> list[int | None]:
    """Per group, the smallest shift consistent with mu, or None for abort.

    When the raw value W was epsilon-close to mu, the chosen shift D gives
    Y_j = Round(mu_j + 2*D*e) in every coordinate, so the scan recovers some
    shift; an inconsistent answer has probability at most delta per round.
    Padding coordinates are invisible to the owner and are skipped.
    """
    if len(y) != config.d or len(mu) != config.d:
        raise ValueError("y and mu must have d coordinates")
    grid = config.grid
    out: list[int | None] = []
    for g in range(config.groups):
        coords = [j for j in range(g * config.d0, (g + 1) * config.d0) if j < config.d]
        found = None
        for delta in range(1, config.d0 + 2):
            if all(
                y[j] == round_to_midpoint(mu[j] + 2 * delta * config.epsilon, grid)
                for j in coords
            ):
                found = delta
                break
        out.append(found)
    return out


def certification_check(
    transcript: Transcript, mus: Sequence[Sequence[Fraction]]
) -> list[tuple[int, ...] | None]:
    """Per round: the tuple of per-group certified shifts, or None (abort)."""
    if len(mus) != len(transcript.rounds):
        raise ValueError("need one mu vector per round")
    out: list[tuple[int, ...] | None] = []
    for record, mu in zip(transcript.rounds, mus):
        groups = certify_round(record.y, [Fraction(v) for v in mu], transcript.config)
        out.append(None if any(g is None for g in groups) else tuple(groups))
    return out
