"""Independent reference values: closed forms, brute-force counts and classical expectations.

Nothing here calls the partition enumerators or moment evaluators it is
used to check.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import comb, factorial, prod, sqrt, pi

from scipy import integrate


def double_factorial(k: int) -> int:
    """``k!! = k (k-2) (k-4) ...``, with ``(-1)!! = 0!! = 1``."""
    return prod(range(k, 0, -2)) if k > 0 else 1


def normal_moment(n: int) -> Fraction:
    """``n! / (2^(n/2) (n/2)!)`` for even ``n``, zero for odd."""
    if n % 2:
        return Fraction(0)
    return Fraction(factorial(n), 2 ** (n // 2) * factorial(n // 2))


def catalan(n: int) -> Fraction:
    """Noncrossing pair partitions of ``{1..n}``: ``n! / (((n+2)/2)! (n/2)!)``."""
    if n % 2:
        return Fraction(0)
    return Fraction(factorial(n), factorial((n + 2) // 2) * factorial(n // 2))


def boolean_moment(n: int) -> Fraction:
    return Fraction(0) if n % 2 else Fraction(1)


def arcsine_moment(n: int) -> Fraction:
    """Even moments of the variance-one arcsine law from ``m_{2k+2} = m_{2k} (2k+1)/(k+1)``."""
    if n % 2:
        return Fraction(0)
    m = Fraction(1)
    for k in range(n // 2):
        m = m * Fraction(2 * k + 1, k + 1)
    return m


def arcsine_moment_integral(n: int) -> float:
    """``int x^n / (pi sqrt(2 - x^2)) dx`` over ``(-sqrt 2, sqrt 2)`` by quadrature."""
    r = sqrt(2.0)
    # weight (x+r)^(-1/2) (r-x)^(-1/2) handles both endpoint singularities
    val, _ = integrate.quad(lambda x: x**n / pi, -r, r, weight="alg", wvar=(-0.5, -0.5))
    return val


def arcsine_binomial(n: int) -> Fraction:
    return Fraction(0) if n % 2 else Fraction(comb(n, n // 2), 2 ** (n // 2))


def matchings_bitmask(n: int) -> set[frozenset]:
    """All perfect matchings of ``{1..n}``, enumerated over bitmasks of unmatched points."""
    out: set[frozenset] = set()

    def rec(mask, acc):
        if mask == 0:
            out.add(frozenset(acc))
            return
        low = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << low)
        m = rest
        while m:
            hi = (m & -m).bit_length() - 1
            m &= m - 1
            acc.append((low + 1, hi + 1))
            rec(rest & ~(1 << hi), acc)
            acc.pop()

    if n % 2 == 0:
        rec((1 << n) - 1, [])
    return out


def crossings_of(matching) -> int:
    blocks = list(matching)
    return sum(
        1
        for i, (a, b) in enumerate(blocks)
        for (c, d) in blocks[i + 1:]
        if (a < c < b < d) or (c < a < d < b)
    )


def crossing_census(n: int) -> list[int]:
    """Number of matchings of ``{1..n}`` with ``k`` crossings, ``k = 0, 1, ...``."""
    counts: dict[int, int] = {}
    for m in matchings_bitmask(n):
        k = crossings_of(m)
        counts[k] = counts.get(k, 0) + 1
    return [counts.get(k, 0) for k in range(max(counts) + 1)] if counts else []


def dyck_words(n: int) -> int:
    """Balanced +-1 sequences of length ``n`` with nonnegative prefix sums, by exhaustive scan."""
    total = 0
    for steps in product((1, -1), repeat=n):
        level = 0
        for s in steps:
            level += s
            if level < 0:
                break
        else:
            total += level == 0
    return total


def fubini(n: int) -> int:
    """Ordered set partitions of ``{1..n}``: surjections onto ``{1..b}`` summed over ``b``.

    Surjections are counted exhaustively by tracking the image set of every
    prefix (a DP over bitmasks, equivalent to scanning all ``b^n`` maps).
    """
    total = 0
    for b in range(1, n + 1):
        images = {0: 1}
        for _ in range(n):
            nxt: dict[int, int] = {}
            for mask, c in images.items():
                for v in range(b):
                    key = mask | (1 << v)
                    nxt[key] = nxt.get(key, 0) + c
            images = nxt
        total += images.get((1 << b) - 1, 0)
    return total


def fubini_small(n: int) -> int:
    """Same count by listing every map ``{1..n} -> {1..b}`` (small ``n`` only)."""
    return sum(
        1 for b in range(1, n + 1) for f in product(range(b), repeat=n) if len(set(f)) == b
    )


def bernoulli_sum_moment(n: int, N: int) -> Fraction:
    """``E[((X_1 + ... + X_N) / sqrt N)^n]`` for i.i.d. fair signs, over all ``2^N`` outcomes.

    Odd ``n`` returns the coefficient of ``N^(-1/2)``.
    """
    s = sum(sum(x) ** n for x in product((1, -1), repeat=N))
    return Fraction(s, 2**N) / Fraction(N) ** (n // 2)
