import random
from fractions import Fraction
from math import comb, inf

import pytest
from hypothesis import given
from hypothesis import strategies as st

from binomsum.valuation import (
    alpha,
    binom,
    carry_count,
    kummer_identity_check,
    lg,
    nu,
    nu2,
    nu2_difference,
    nu2_sub,
)
from conftest import naive_f, naive_nu

rationals = st.fractions().filter(lambda q: q != 0)


def test_nu_examples():
    assert nu(2, Fraction(0)) == inf
    assert nu(2, Fraction(12)) == 2
    assert nu(2, naive_f(2)) == -1
    assert naive_f(2) == Fraction(5, 2)
    assert nu(3, Fraction(18, 5)) == 2
    assert nu(5, Fraction(18, 25)) == -2


def test_infinite_valuation_dominates_every_bound():
    assert nu2(0) >= 10**9
    assert nu2(Fraction(0)) > -10**9


@pytest.mark.parametrize("n,expected", [(0, 0), (7, 3), (12, 2)])
def test_alpha(n, expected):
    assert alpha(n) == expected


@pytest.mark.parametrize("n,expected", [(1, 0), (2, 1), (7, 2)])
def test_lg(n, expected):
    assert lg(n) == expected


def test_lg_rejects_zero():
    with pytest.raises(ValueError):
        lg(0)


def test_binom():
    assert binom(5, 2) == 10
    assert binom(11, 1) == 11
    assert all(binom(n, 0) == 1 for n in range(20))
    assert binom(3, 7) == 0


def test_carry_count():
    assert carry_count(0, 19) == 0
    assert carry_count(1, 1) == 1
    assert carry_count(3, 5) == 3


@pytest.mark.parametrize("m,n,common", [(0, 5, 0), (2, 2, 1), (3, 5, 3)])
def test_kummer_examples(m, n, common):
    assert kummer_identity_check(m, n)
    assert nu2(comb(m + n, m)) == common


def test_valuation_laws_on_random_rationals():
    rng = random.Random(20130111)
    for _ in range(10_000):
        a = Fraction(rng.randint(-10**6, 10**6) or 1, rng.randint(1, 10**6)) * Fraction(2) ** rng.randint(-20, 20)
        b = Fraction(rng.randint(-10**6, 10**6) or 1, rng.randint(1, 10**6)) * Fraction(2) ** rng.randint(-20, 20)
        assert nu2(a * b) == nu2(a) + nu2(b)
        assert nu2(a + b) >= min(nu2(a), nu2(b))
        if nu2(a) != nu2(b):
            assert nu2(a + b) == min(nu2(a), nu2(b))
        assert nu2(a) == naive_nu(2, a)


@given(rationals, rationals)
def test_nu2_sub_matches_fraction_arithmetic(a, b):
    assert nu2_sub(a.numerator, a.denominator, b.numerator, b.denominator) == naive_nu(2, a - b)
    assert nu2_difference(a, b) == nu2_difference(b, a)


@given(st.integers(-10**6, 10**6), st.integers(1, 10**6), st.integers(-10**6, 10**6), st.integers(1, 10**6))
def test_nu2_sub_unreduced_inputs(p1, q1, p2, q2):
    assert nu2_sub(p1, q1, p2, q2) == naive_nu(2, Fraction(p1, q1) - Fraction(p2, q2))


def test_alpha_recursion():
    for n in range(2**16 + 1):
        assert alpha(2 * n) == alpha(n)
        assert alpha(2 * n + 1) == alpha(n) + 1


def test_lg_on_dyadic_blocks():
    for t in range(31):
        assert lg(2**t) == t
        for r in (0, 1, 2**t // 3, 2**t - 1):
            if r < 2**t:
                assert lg(2**t + r) == t


@given(st.integers(0, 2000), st.integers(0, 2000))
def test_kummer_property(m, n):
    assert kummer_identity_check(m, n)


def test_kummer_small_exhaustive():
    assert all(kummer_identity_check(m, n) for m in range(129) for n in range(129))
