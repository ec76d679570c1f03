"""Boolean circuit expressions and steward-backed acceptance estimation.

The expression DSL covers variables x0..x{n-1}, constants 0/1, and ~ & ^ |
with precedence NOT > AND > XOR > OR (binary operators left-associative).
Circuits here are expression trees, not gate lists: enough structure to
exercise the adaptive protocol while keeping the parser small.

`acceptance_session` answers up to k adaptively chosen circuits with
estimates of their acceptance probability mu(C) = Pr_x[C(x) = 1].  Round i
wraps a median-of-batches sampler run for C_i into a scalar function of the
steward's tape block: the sampler is planned for accuracy epsilon/8 and
failure delta/(2k), the steward (d = 1, gamma = delta/2) adds a factor
3*1 + 5 = 8, and the reported estimate is clamped to [0,1] -- so every Y_i
is within epsilon of mu(C_i) except with probability delta, at a coin cost
of one steward seed for the whole session.

Two oracle runners ride on the same pipeline: `run_promise_bpp_oracle_algorithm`
answers decision queries by thresholding an estimate at 1/2 (fixed
epsilon = 1/10, so promise margins of 1/3 survive), and
`run_app_oracle_algorithm` serves approximate-probability queries by
median-amplifying a 2/3-confidence estimator before handing it to the
steward.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .randomness import BitSource, TapeSource
from .sampler import (
    SamplerPlan,
    app_amplify,
    plan_sampler,
    sample_mean,
)
from .steward import ConcentratedFn, Session, StewardConfig

PROOF_CONSTANT = 8  # c = 3*d0 + 5 at d0 = d = 1, the error factor of one round

TRUTH_TABLE_CAP = 26  # refuse dense tables beyond 2^26 entries


class CircuitSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} at position {position}")


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Not:
    child: object


@dataclass(frozen=True)
class BinOp:
    op: str  # one of "&", "^", "|"
    left: object
    right: object


CircuitExpr = object

_TOKEN = re.compile(r"\s*(x\d+|[01]|[&^|~()])")

_PRECEDENCE = {"|": 1, "^": 2, "&": 3}


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            stripped = len(text) - len(text[pos:].lstrip())
            if stripped == len(text):
                break
            raise CircuitSyntaxError(f"unexpected character {text[stripped]!r}", stripped)
        tokens.append((m.group(1), m.start(1)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str, n: int):
        self.text = text
        self.n = n
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def pos(self) -> int:
        if self.i < len(self.tokens):
            return self.tokens[self.i][1]
        return len(self.text)

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def parse(self) -> CircuitExpr:
        if not self.tokens:
            raise CircuitSyntaxError("empty expression", 0)
        expr = self.or_level()
        if self.i < len(self.tokens):
            raise CircuitSyntaxError(f"unexpected token {self.peek()!r}", self.pos())
        return expr

    def or_level(self):
        expr = self.xor_level()
        while self.peek() == "|":
            self.take()
            expr = BinOp("|", expr, self.xor_level())
        return expr

    def xor_level(self):
        expr = self.and_level()
        while self.peek() == "^":
            self.take()
            expr = BinOp("^", expr, self.and_level())
        return expr

    def and_level(self):
        expr = self.unary()
        while self.peek() == "&":
            self.take()
            expr = BinOp("&", expr, self.unary())
        return expr

    def unary(self):
        tok = self.peek()
        if tok is None:
            raise CircuitSyntaxError("expression ends early", self.pos())
        if tok == "~":
            self.take()
            return Not(self.unary())
        if tok == "(":
            _, open_pos = self.take()
            expr = self.or_level()
            if self.peek() != ")":
                raise CircuitSyntaxError("unclosed parenthesis", open_pos)
            self.take()
            return expr
        if tok in ("0", "1"):
            self.take()
            return Const(int(tok))
        if tok.startswith("x"):
            _, pos = self.take()
            index = int(tok[1:])
            if index >= self.n:
                raise CircuitSyntaxError(
                    f"variable {tok} out of range for n={self.n}", pos
                )
            return Var(index)
        raise CircuitSyntaxError(f"unexpected token {tok!r}", self.pos())


def parse_circuit(text: str, n: int) -> CircuitExpr:
    if n < 0:
        raise ValueError("n must be nonnegative")
    return _Parser(text, n).parse()


def _print_prec(expr) -> int:
    if isinstance(expr, BinOp):
        return _PRECEDENCE[expr.op]
    return 4  # atoms and ~ bind tightest


def print_circuit(expr: CircuitExpr) -> str:
    if isinstance(expr, Var):
        return f"x{expr.index}"
    if isinstance(expr, Const):
        return str(expr.value)
    if isinstance(expr, Not):
        inner = print_circuit(expr.child)
        if isinstance(expr.child, BinOp):
            inner = f"({inner})"
        return f"~{inner}"
    if isinstance(expr, BinOp):
        prec = _PRECEDENCE[expr.op]
        left = print_circuit(expr.left)
        if _print_prec(expr.left) < prec:
            left = f"({left})"
        right = print_circuit(expr.right)
        if _print_prec(expr.right) <= prec:  # strict: rebuilt tree stays left-deep
            right = f"({right})"
        return f"{left} {expr.op} {right}"
    raise TypeError(f"not a circuit node: {expr!r}")


def circuit_size(expr: CircuitExpr) -> int:
    if isinstance(expr, (Var, Const)):
        return 1
    if isinstance(expr, Not):
        return 1 + circuit_size(expr.child)
    if isinstance(expr, BinOp):
        return 1 + circuit_size(expr.left) + circuit_size(expr.right)
    raise TypeError(f"not a circuit node: {expr!r}")


def eval_on_ints(expr: CircuitExpr, xs: np.ndarray) -> np.ndarray:
    """Evaluate on an array of little-endian point indices -> uint8 0/1."""
    xs = np.asarray(xs, dtype=np.uint64)
    if isinstance(expr, Var):
        return ((xs >> np.uint64(expr.index)) & np.uint64(1)).astype(np.uint8)
    if isinstance(expr, Const):
        return np.full(xs.shape, expr.value, dtype=np.uint8)
    if isinstance(expr, Not):
        return eval_on_ints(expr.child, xs) ^ np.uint8(1)
    if isinstance(expr, BinOp):
        a = eval_on_ints(expr.left, xs)
        b = eval_on_ints(expr.right, xs)
        if expr.op == "&":
            return a & b
        if expr.op == "^":
            return a ^ b
        return a | b
    raise TypeError(f"not a circuit node: {expr!r}")


def eval_circuit(expr: CircuitExpr, bits: str) -> int:
    value = sum(1 << i for i, b in enumerate(bits) if b == "1")
    return int(eval_on_ints(expr, np.array([value], dtype=np.uint64))[0])


def to_truth_table(expr: CircuitExpr, n: int) -> np.ndarray:
    if n > TRUTH_TABLE_CAP:
        raise ValueError(f"dense table at n={n} > {TRUTH_TABLE_CAP} refused")
    return eval_on_ints(expr, np.arange(1 << n, dtype=np.uint64))


def exact_mean(expr: CircuitExpr, n: int) -> Fraction:
    """mu(C) = Pr_x[C(x) = 1] by full enumeration."""
    table = to_truth_table(expr, n)
    return Fraction(int(table.sum()), 1 << n)


class _CircuitOracle:
    def __init__(self, expr: CircuitExpr, n: int):
        self.expr = expr
        self.n = n
        self._total = None

    def eval_ints(self, xs: np.ndarray) -> np.ndarray:
        return eval_on_ints(self.expr, xs)

    def cube_total(self):
        if self.n > TRUTH_TABLE_CAP:
            return None
        if self._total is None:
            self._total = int(to_truth_table(self.expr, self.n).sum())
        return self._total


def _clamp_unit(y: Fraction) -> Fraction:
    return min(max(y, Fraction(0)), Fraction(1))


class AcceptanceSession:
    """Up to k rounds of: give a circuit, get Y = mu(C) +- epsilon in [0,1]."""

    def __init__(
        self,
        n: int,
        k: int,
        epsilon,
        delta,
        source: BitSource,
        kind: str = "main",
        backend: str = "expander",
    ):
        self.n = n
        self.k = k
        self.epsilon = Fraction(epsilon)
        self.delta = Fraction(delta)
        self.plan: SamplerPlan = plan_sampler(
            n, self.epsilon / PROOF_CONSTANT, self.delta / (2 * k), mode="walk"
        )
        self.config = StewardConfig(
            n=self.plan.seed_bits,
            k=k,
            d=1,
            epsilon=self.epsilon / PROOF_CONSTANT,
            delta=self.delta / (2 * k),
            gamma=self.delta / 2,
            kind=kind,
            backend=backend,
        )
        self.session = Session(self.config, source)

    @property
    def bits_used(self) -> int:
        return self.session.bits_used

    @property
    def queries_per_round(self) -> int:
        return self.plan.queries

    def estimate(self, circuit) -> Fraction:
        expr = parse_circuit(circuit, self.n) if isinstance(circuit, str) else circuit
        oracle = _CircuitOracle(expr, self.n)

        def f(tape: str):
            return [sample_mean(self.plan, oracle, TapeSource(tape))]

        y = self.session.answer(
            ConcentratedFn(oracle=f, epsilon=self.config.epsilon, delta=self.config.delta)
        )[0]
        return _clamp_unit(y)


def acceptance_session(
    n: int, k: int, epsilon, delta, source: BitSource,
    kind: str = "main", backend: str = "expander",
) -> AcceptanceSession:
    return AcceptanceSession(n, k, epsilon, delta, source, kind=kind, backend=backend)


def run_promise_bpp_oracle_algorithm(
    outer: Callable[[Callable[[object], int]], object],
    decision_oracle: Callable[[object, str], int],
    n: int,
    k: int,
    delta,
    source: BitSource,
    kind: str = "main",
    backend: str = "expander",
):
    """Run outer(ask); each ask(query) thresholds an estimate of the oracle's
    acceptance probability at 1/2.

    decision_oracle(query, coins) uses n coin bits and errs on at most 1/3 of
    tapes for promise-satisfying queries, so with estimate error below
    epsilon = 1/10 every such answer is correct; overall failure <= delta.
    A session (and its seed) materializes only if outer actually asks.
    """
    epsilon = Fraction(1, 10)
    delta = Fraction(delta)
    plan = plan_sampler(n, epsilon / PROOF_CONSTANT, delta / (2 * k), mode="walk")
    config = StewardConfig(
        n=plan.seed_bits,
        k=k,
        d=1,
        epsilon=epsilon / PROOF_CONSTANT,
        delta=delta / (2 * k),
        gamma=delta / 2,
        kind=kind,
        backend=backend,
    )
    session: list[Session] = []

    def ask(query) -> int:
        if not session:
            session.append(Session(config, source))

        class _Oracle:
            def eval_ints(self, xs):
                from .randomness import int_to_bits

                return np.array(
                    [decision_oracle(query, int_to_bits(int(x), n)) for x in xs],
                    dtype=np.uint8,
                )

        def f(tape: str):
            return [sample_mean(plan, _Oracle(), TapeSource(tape))]

        y = session[0].answer(
            ConcentratedFn(oracle=f, epsilon=config.epsilon, delta=config.delta)
        )[0]
        return 1 if y >= Fraction(1, 2) else 0

    return outer(ask)


def run_app_oracle_algorithm(
    outer: Callable[[Callable[[object], Fraction]], object],
    phi_estimator: Callable[[object, str], object],
    n: int,
    k: int,
    epsilon,
    delta,
    source: BitSource,
    kind: str = "main",
    backend: str = "expander",
):
    """Run outer(ask); ask(w) estimates phi(w) to +-epsilon, all k answers
    good except with probability delta.

    phi_estimator(w, coins) uses n coin bits and lands within epsilon/8 of
    phi(w) on >= 2/3 of tapes.  Median amplification over an averaging
    sampler pushes its failure to delta/(2k); the steward (gamma = delta/2)
    multiplies the accuracy by the round constant 8.  Estimates are not
    clamped -- phi need not be a probability.
    """
    epsilon = Fraction(epsilon)
    delta = Fraction(delta)
    eps_query = epsilon / PROOF_CONSTANT
    probe = app_amplify(lambda coins: 0, n, delta / (2 * k))
    config = StewardConfig(
        n=probe.plan.seed_bits,
        k=k,
        d=1,
        epsilon=eps_query,
        delta=delta / (2 * k),
        gamma=delta / 2,
        kind=kind,
        backend=backend,
    )
    session: list[Session] = []

    def ask(w) -> Fraction:
        if not session:
            session.append(Session(config, source))
        amp = app_amplify(lambda coins: phi_estimator(w, coins), n, delta / (2 * k))

        def f(tape: str):
            return [amp(TapeSource(tape))]

        return session[0].answer(
            ConcentratedFn(oracle=f, epsilon=eps_query, delta=config.delta)
        )[0]

    return outer(ask)
