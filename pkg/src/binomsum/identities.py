"""Exact quantities behind the inequalities about f and their proofs.

Sums of inverse binomial coefficients are formed over the common
denominator N!, using 1/C(N, i) = i!(N-i)!/N!, so a whole sum costs one
integer accumulation and one valuation.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

from .valuation import Valuation, alpha, binom, lg, nu2, nu2_int, nu2_sub


def T(e: int, k: int, i: int) -> Fraction:
    """1/C(2^e+2k+1, i) - 1/C(2k+1, i).

    For i > 2k+1 the second binomial vanishes and its term is taken as 0.
    """
    big = (1 << e) + 2 * k + 1
    if e < 0 or k < 0 or i < 0 or i > big:
        raise ValueError(f"T undefined for e={e}, k={k}, i={i}")
    small = 2 * k + 1
    value = Fraction(1, binom(big, i))
    if i <= small:
        value -= Fraction(1, binom(small, i))
    return value


def inverse_binomial_sum(n: int, lo: int, hi: int) -> Tuple[int, int]:
    """(numerator, n!) with sum_{lo <= i <= hi} 1/C(n, i) = numerator / n!."""
    if not 0 <= lo <= hi + 1 or hi > n:
        raise ValueError(f"bad range [{lo}, {hi}] for n={n}")
    den = math.factorial(n)
    if lo > hi:
        return 0, den
    term = math.factorial(lo) * math.factorial(n - lo)
    total = term
    for i in range(lo, hi):
        term = term * (i + 1) // (n - i)
        total += term
    return total, den


def symm_i_valuation(e: int, k: int) -> Valuation:
    """nu2 of sum_{i=0}^{k} T_i."""
    big, small = (1 << e) + 2 * k + 1, 2 * k + 1
    p1, q1 = inverse_binomial_sum(big, 0, k)
    p2, q2 = inverse_binomial_sum(small, 0, k)
    return nu2_sub(p1, q1, p2, q2)


def symm_ii_valuation(e: int, k: int) -> Valuation:
    """nu2 of sum_{i=k+1}^{2^(e-1)+k} 1/C(2^e+2k+1, i)."""
    big = (1 << e) + 2 * k + 1
    p, q = inverse_binomial_sum(big, k + 1, (1 << (e - 1)) + k)
    return nu2_int(p) - nu2_int(q)


def paired_T_valuations(e: int, k: int) -> List[Valuation]:
    """nu2(T_{2i} + T_{2i+1}) for 0 <= i <= floor((k-1)/2).

    Uses 1/C(N, j) + 1/C(N, j+1) = (N+1) / ((N-j) C(N, j)).
    """
    big, small = (1 << e) + 2 * k + 1, 2 * k + 1
    out = []
    cb = cs = 1  # C(big, 2i), C(small, 2i)
    for i in range((k - 1) // 2 + 1):
        j = 2 * i
        out.append(nu2_sub(big + 1, (big - j) * cb, small + 1, (small - j) * cs))
        # advance both binomials from column j to j + 2
        cb = cb * (big - j) * (big - j - 1) // ((j + 1) * (j + 2))
        cs = cs * (small - j) * (small - j - 1) // ((j + 1) * (j + 2))
    return out


def T_valuation(e: int, k: int, i: int) -> Valuation:
    big, small = (1 << e) + 2 * k + 1, 2 * k + 1
    if i > small:
        return nu2(T(e, k, i))
    return nu2_sub(1, binom(big, i), 1, binom(small, i))


# -- elementary symmetric functions -------------------------------------------


def _elementary_integer(values: Sequence[int]) -> List[int]:
    """Coefficients e_0..e_n of prod(1 + a x), by the prefix recurrence."""
    coeffs = [1]
    for a in values:
        coeffs = [x + a * y for x, y in zip(coeffs + [0], [0] + coeffs)]
    return coeffs


def _sigma_parts(values: Sequence[Fraction]) -> Tuple[List[int], List[int]]:
    """Integer numerators and denominators with sigma_j = nums[j] / dens[j]."""
    values = [Fraction(v) for v in values]
    n = len(values)
    if all(v != 0 and abs(v.numerator) == 1 for v in values):
        # sigma_j(1/a_1, ..., 1/a_n) = e_{n-j}(a) / prod(a)
        recips = [v.numerator * v.denominator for v in values]
        coeffs = _elementary_integer(recips)
        prod = coeffs[n]
        return [coeffs[n - j] for j in range(n + 1)], [prod] * (n + 1)
    # sigma_j(q) = sigma_j(D q) / D^j with D a common denominator
    d = 1
    for v in values:
        d = d * v.denominator // math.gcd(d, v.denominator)
    coeffs = _elementary_integer([int(v * d) for v in values])
    return coeffs, [d**j for j in range(n + 1)]


def elementary_symmetric_all(values: Sequence[Fraction]) -> List[Fraction]:
    nums, dens = _sigma_parts(values)
    return [Fraction(p, q) for p, q in zip(nums, dens)]


def elementary_symmetric(j: int, values: Sequence[Fraction]) -> Fraction:
    """sigma_j(values); sigma_0 = 1."""
    if j < 0 or j > len(values):
        raise ValueError(f"sigma_{j} undefined for {len(values)} values")
    return elementary_symmetric_all(values)[j]


def sigma_valuations(values: Sequence[Fraction]) -> List[Valuation]:
    nums, dens = _sigma_parts(values)
    return [nu2_int(p) - nu2_int(q) for p, q in zip(nums, dens)]


def sumj_identity_check(e: int, a: int, b: int) -> bool:
    """1/C(2^e+a, b) - 1/C(a, b) == -1/C(2^e+a, b) sum_{j>=1} 2^(je) sigma_j(1/a, ..., 1/(a-b+1))."""
    if b > a or b < 0:
        raise ValueError(f"sumj identity needs 0 <= b <= a, got a={a}, b={b}")
    if b == 0:
        return True
    lhs, rhs = sumj_sides(e, a, b)
    return lhs == rhs


def sumj_sides(e: int, a: int, b: int) -> Tuple[Fraction, Fraction]:
    shifted = Fraction(1, binom((1 << e) + a, b))
    if b == 0:
        return Fraction(0), Fraction(0)
    lhs = shifted - Fraction(1, binom(a, b))
    sigmas = elementary_symmetric_all([Fraction(1, m) for m in range(a, a - b, -1)])
    total = sum((Fraction(1 << (j * e)) * sigmas[j] for j in range(1, b + 1)), Fraction(0))
    return lhs, -shifted * total


# -- harmonic segment, carries, digit inequalities -----------------------------


def unit_fraction_sum(lo: int, hi: int) -> Tuple[int, int]:
    """(p, q) with sum_{m=lo}^{hi} 1/m = p/q (not reduced), by binary splitting."""
    if lo < 1:
        raise ValueError("unit fractions need positive denominators")
    if lo > hi:
        return 0, 1
    if lo == hi:
        return 1, lo
    mid = (lo + hi) // 2
    p1, q1 = unit_fraction_sum(lo, mid)
    p2, q2 = unit_fraction_sum(mid + 1, hi)
    return p1 * q2 + p2 * q1, q1 * q2


def harmonic_segment_valuation(ell: int) -> Valuation:
    """nu2 of 1/(2l+2) + ... + 1/(4l+1)."""
    p, q = unit_fraction_sum(2 * ell + 2, 4 * ell + 1)
    return nu2_int(p) - nu2_int(q)


def harmonic_valuation_check(ell: int) -> bool:
    if ell < 1:
        raise ValueError(f"harmonic check needs l >= 1, got {ell}")
    return harmonic_segment_valuation(ell) == -lg(ell) - 2


def carry_bound_check(k: int, i: int) -> bool:
    """nu2 C(k, i) <= lg(k+1) - nu2(k+1)."""
    if i > k or i < 0:
        raise ValueError(f"carry bound needs 0 <= i <= k, got k={k}, i={i}")
    return nu2_int(binom(k, i)) <= lg(k + 1) - nu2_int(k + 1)


def lg_alpha_inequality_check(ell: int) -> bool:
    """2 lg(l+1) >= alpha(l) + lg(l)."""
    if ell < 1:
        raise ValueError(f"inequality needs l >= 1, got {ell}")
    return 2 * lg(ell + 1) >= alpha(ell) + lg(ell)


def thm_b_predicted_valuation(e: int, ell: int) -> int:
    return e - alpha(ell) - lg(ell) - 2


# -- j = 1 dominance -----------------------------------------------------------


def dominance_margin(e: int, sigma_vals: Sequence[Valuation]) -> Optional[Tuple[int, Valuation]]:
    """(v_1, min_{j>=2} v_j) where v_j = nu2(2^(je) sigma_j), or None if inapplicable.

    Inapplicable means sigma_1 = 0 or e <= t with t = -nu2(sigma_1).
    The minimum is ``inf`` when there is no nonzero sigma_j with j >= 2.
    """
    if len(sigma_vals) < 2 or sigma_vals[1] == math.inf:
        return None
    t = -sigma_vals[1]
    if e <= t:
        return None
    v1 = e - t
    rest = [j * e + sigma_vals[j] for j in range(2, len(sigma_vals))]
    return v1, min(rest, default=math.inf)


def j1_dominance_check(e: int, values: Sequence[Fraction]) -> Optional[bool]:
    """True iff v_j > v_1 for every j >= 2 with sigma_j != 0.

    Returns None when the hypotheses (values nonempty, sigma_1 != 0,
    e > t) fail; that is "inapplicable", not a failure.
    """
    if not values:
        return None
    margin = dominance_margin(e, sigma_valuations(values))
    if margin is None:
        return None
    v1, rest = margin
    return rest > v1


@lru_cache(maxsize=None)
def harmonic_sigma_valuations(ell: int) -> Tuple[Valuation, ...]:
    """nu2 sigma_j(1/(2l+2), ..., 1/(4l+1)) for j = 0..2l."""
    return tuple(sigma_valuations([Fraction(1, m) for m in range(2 * ell + 2, 4 * ell + 2)]))
