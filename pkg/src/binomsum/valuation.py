"""Valuations, binary digit functions, binomial coefficients and carries.

Rationals are plain :class:`fractions.Fraction` values (always reduced).
A valuation is an ``int`` or the float ``math.inf``; ``inf`` is returned
exactly when the measured rational is zero, so comparisons such as
``observed >= bound`` need no special casing.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

INF = math.inf

Valuation = Union[int, float]
Rational = Union[int, Fraction]


def _nu_int(p: int, n: int) -> int:
    n = abs(n)
    if p == 2:
        return (n & -n).bit_length() - 1
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def nu(p: int, q: Rational) -> Valuation:
    """Exponent of the prime ``p`` in the rational ``q``; ``inf`` for zero."""
    if p < 2:
        raise ValueError(f"p must be a prime >= 2, got {p}")
    q = Fraction(q)
    if q == 0:
        return INF
    return _nu_int(p, q.numerator) - _nu_int(p, q.denominator)


def nu2(q: Rational) -> Valuation:
    if isinstance(q, int):
        return INF if q == 0 else (q & -q).bit_length() - 1
    num = q.numerator
    if num == 0:
        return INF
    den = q.denominator
    return ((num & -num).bit_length() - 1) - ((den & -den).bit_length() - 1)


def nu2_int(n: int) -> Valuation:
    return INF if n == 0 else (n & -n).bit_length() - 1


def nu2_sub(p1: int, q1: int, p2: int, q2: int) -> Valuation:
    """nu2(p1/q1 - p2/q2) for integers with nonzero denominators.

    The two fractions need not be reduced. When the terms have different
    valuations the answer is their minimum and no products are formed.
    """
    if p1 == 0:
        return nu2_int(p2) - nu2_int(q2)
    if p2 == 0:
        return nu2_int(p1) - nu2_int(q1)
    v1 = nu2_int(p1) - nu2_int(q1)
    v2 = nu2_int(p2) - nu2_int(q2)
    if v1 != v2:
        return min(v1, v2)
    return nu2_int(p1 * q2 - p2 * q1) - nu2_int(q1 * q2)


def nu2_difference(a: Rational, b: Rational) -> Valuation:
    a = Fraction(a)
    b = Fraction(b)
    return nu2_sub(a.numerator, a.denominator, b.numerator, b.denominator)


def alpha(n: int) -> int:
    """Number of 1's in the binary expansion of ``n``."""
    if n < 0:
        raise ValueError(f"alpha is defined on naturals, got {n}")
    return bin(n).count("1")


def lg(n: int) -> int:
    """floor(log2(n)) for n >= 1."""
    if n < 1:
        raise ValueError(f"lg requires n >= 1, got {n}")
    return n.bit_length() - 1


def binom(n: int, k: int) -> int:
    """C(n, k), zero when k > n."""
    if n < 0 or k < 0:
        raise ValueError(f"binom requires naturals, got ({n}, {k})")
    return math.comb(n, k)


def carry_count(m: int, n: int) -> int:
    """Number of carries when adding ``m`` and ``n`` in base 2."""
    if m < 0 or n < 0:
        raise ValueError("carry_count requires naturals")
    carries = 0
    carry = 0
    while m or n or carry:
        s = (m & 1) + (n & 1) + carry
        carry = s >> 1
        carries += carry
        m >>= 1
        n >>= 1
    return carries


def kummer_identity_check(m: int, n: int) -> bool:
    """nu2 C(m+n, m) == alpha(m) + alpha(n) - alpha(m+n) == carries(m, n)."""
    v = nu2_int(binom(m + n, m))
    return v == alpha(m) + alpha(n) - alpha(m + n) == carry_count(m, n)
