"""Independent reference implementations used to derive and check test values.

Everything here is deliberately written the slow, obvious way, without
importing the package under test: direct double-loop transforms, Fraction
arithmetic, explicit enumerations.  Run as a script to print the golden
values that the test files freeze as literals.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


# ---------------------------------------------------------------- numeric

def ref_interval_index(w: Fraction, length: Fraction) -> int:
    """Index m with w in [m*L, (m+1)*L), by pure Fraction comparison."""
    w, length = Fraction(w), Fraction(length)
    m = int(w / length)  # truncation, fix up below
    while m * length > w:
        m -= 1
    while (m + 1) * length <= w:
        m += 1
    return m


def ref_midpoint(w: Fraction, length: Fraction) -> Fraction:
    m = ref_interval_index(w, length)
    return (Fraction(2 * m + 1) / 2) * Fraction(length)


def ref_contained(lo: Fraction, hi: Fraction, length: Fraction) -> bool:
    return ref_interval_index(lo, length) == ref_interval_index(hi, length)


def ref_choose_shift(w, epsilon, d0: int) -> int | None:
    """Smallest D in 1..d0+1 with every [w_j+(2D-1)e, w_j+(2D+1)e] in one cell."""
    epsilon = Fraction(epsilon)
    length = 2 * (d0 + 1) * epsilon
    for delta in range(1, d0 + 2):
        if all(
            ref_contained(
                Fraction(wj) + (2 * delta - 1) * epsilon,
                Fraction(wj) + (2 * delta + 1) * epsilon,
                length,
            )
            for wj in w
        ):
            return delta
    return None


# ---------------------------------------------------------------- expander

def ref_gg_neighbor(m: int, v: tuple[int, int], label: int) -> tuple[int, int]:
    """The four affine torus maps and their inverses, straight from the formulas."""
    x, y = v
    if label == 0:
        return ((x + 2 * y) % m, y)
    if label == 1:
        return ((x + 2 * y + 1) % m, y)
    if label == 2:
        return (x, (y + 2 * x) % m)
    if label == 3:
        return (x, (y + 2 * x + 1) % m)
    if label == 4:
        return ((x - 2 * y) % m, y)
    if label == 5:
        return ((x - 2 * y - 1) % m, y)
    if label == 6:
        return (x, (y - 2 * x) % m)
    if label == 7:
        return (x, (y - 2 * x - 1) % m)
    raise ValueError(label)


def ref_walk_distribution(m: int, start_dist: dict, steps: int) -> dict:
    """Exact distribution after `steps` uniform-label steps.

    start_dist and the result map vertex -> integer weight; the implicit
    denominator picks up a factor 8 per step.
    """
    dist = dict(start_dist)
    for _ in range(steps):
        nxt: dict = {}
        for v, w in dist.items():
            for label in range(8):
                u = ref_gg_neighbor(m, v, label)
                nxt[u] = nxt.get(u, 0) + w
        dist = nxt
    return dist


def ref_tv(p: dict, q: dict) -> Fraction:
    keys = set(p) | set(q)
    return sum((abs(Fraction(p.get(k, 0)) - Fraction(q.get(k, 0))) for k in keys),
               Fraction(0)) / 2


# ---------------------------------------------------------------- GF(2^m)

def ref_gf2_mul(a: int, b: int, poly: int, m: int) -> int:
    """Peasant multiplication in GF(2^m) with reducing polynomial `poly`."""
    out = 0
    for i in range(m):
        if b >> i & 1:
            out ^= a << i
    # reduce
    for i in range(2 * m - 2, m - 1, -1):
        if out >> i & 1:
            out ^= poly << (i - m)
    return out


def ref_is_irreducible(poly: int, m: int) -> bool:
    """Brute force: no divisor of degree 1..m//2."""
    for deg in range(1, m // 2 + 1):
        for low in range(1 << deg):
            divisor = (1 << deg) | low
            if ref_poly_mod(poly, divisor) == 0:
                return False
    return True


def ref_poly_mod(a: int, b: int) -> int:
    db = b.bit_length() - 1
    while a.bit_length() - 1 >= db and a:
        a ^= b << (a.bit_length() - 1 - db)
    return a


def ref_affine_points(a: int, b: int, t0: int, poly: int, m: int, n: int) -> list[int]:
    return [(ref_gf2_mul(a, g, poly, m) ^ b) & ((1 << n) - 1) for g in range(t0)]


# ---------------------------------------------------------------- Fourier

def brute_wht(table) -> list[int]:
    """out[mask] = sum_y f(y) * (-1)^popcount(mask & y), O(4^n)."""
    size = len(table)
    out = []
    for mask in range(size):
        acc = 0
        for y in range(size):
            sign = -1 if bin(mask & y).count("1") % 2 else 1
            acc += sign * int(table[y])
        out.append(acc)
    return out


def brute_subcube_weight(table, prefix: str) -> Fraction:
    size = len(table)
    n = size.bit_length() - 1
    sums = brute_wht(table)
    ell = len(prefix)
    p = sum(1 << i for i, bit in enumerate(prefix) if bit == "1")
    total = 0
    for mask in range(size):
        if (mask & ((1 << ell) - 1)) == p:
            total += sums[mask] ** 2
    return Fraction(total, 1 << (2 * n))


# ---------------------------------------------------------------- circuits

def full_paren_python(expr) -> str:
    """Render an AST as a fully parenthesized Python expression on 0/1 ints.

    Independent evaluation path: NOT becomes (1 - .), the binary operators
    map to Python's &, ^, |; full parenthesization sidesteps precedence.
    """
    kind = type(expr).__name__
    if kind == "Var":
        return f"x[{expr.index}]"
    if kind == "Const":
        return str(expr.value)
    if kind == "Not":
        return f"(1 - {full_paren_python(expr.child)})"
    left = full_paren_python(expr.left)
    right = full_paren_python(expr.right)
    return f"({left} {expr.op} {right})"


def ref_eval_circuit(expr, bits: str) -> int:
    x = [1 if b == "1" else 0 for b in bits]
    return eval(full_paren_python(expr), {"x": x})  # noqa: S307 - test oracle


# ---------------------------------------------------------------- trees

def ref_tree_distribution(evaluate, k: int, n: int) -> dict:
    """Path distribution under a uniform (n*k)-bit input, exact counts / 2^(nk)."""
    counts: dict = {}
    for word in itertools.product("01", repeat=n * k):
        bits = "".join(word)
        path = evaluate(bits)
        counts[path] = counts.get(path, 0) + 1
    return counts


# ---------------------------------------------------------------- misc

def lower_median_ref(values):
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def three_sigma_bound(rate_bound: float, trials: int) -> float:
    """rate_bound + 3 * standard error of a Bernoulli at that rate."""
    se = (rate_bound * (1 - rate_bound) / trials) ** 0.5
    return rate_bound + 3 * se


if __name__ == "__main__":
    # golden values frozen into the test files
    L1 = Fraction(1)
    print("interval_index(0, 1)       =", ref_interval_index(0, L1))
    print("interval_index(3/2, 1)     =", ref_interval_index(Fraction(3, 2), L1))
    print("interval_index(-3/10, 1)   =", ref_interval_index(Fraction(-3, 10), L1))
    print("midpoint(3/2, 1)           =", ref_midpoint(Fraction(3, 2), L1))
    print("midpoint(1/5, 1)           =", ref_midpoint(Fraction(1, 5), L1))
    print("midpoint(-3/10, 1)         =", ref_midpoint(Fraction(-3, 10), L1))
    print("contained(3/4, 5/4, 1)     =", ref_contained(Fraction(3, 4), Fraction(5, 4), L1))
    print("contained(5/4, 7/4, 1)     =", ref_contained(Fraction(5, 4), Fraction(7, 4), L1))
    print("contained(1/2, 1, 1)       =", ref_contained(Fraction(1, 2), Fraction(1), L1))
    e = Fraction(1, 4)
    print("choose_shift([1/2], 1/4)   =", ref_choose_shift([Fraction(1, 2)], e, 1))
    print("choose_shift([0], 1/4)     =", ref_choose_shift([Fraction(0)], e, 1))
    print("choose_shift([1/2,5/6],1/6)=",
          ref_choose_shift([Fraction(1, 2), Fraction(5, 6)], Fraction(1, 6), 2))
    print("gg m=4 (1,2) label 0       =", ref_gg_neighbor(4, (1, 2), 0))
    print("gg m=2 (0,0) label 1       =", ref_gg_neighbor(2, (0, 0), 1))
    print("gg m=4 walk (0,0) [2,2]    =", ref_gg_neighbor(4, ref_gg_neighbor(4, (0, 0), 2), 2))

    maj3 = [1 if bin(x).count("1") < 2 else -1 for x in range(8)]
    print("maj3 walsh sums            =", brute_wht(maj3))
    chi1 = [1, -1, 1, -1]
    print("chi{1} n=2 walsh sums      =", brute_wht(chi1))
    print("W_'10'(chi1)               =", brute_subcube_weight(chi1, "10"))
    print("W_'01'(chi1)               =", brute_subcube_weight(chi1, "01"))
