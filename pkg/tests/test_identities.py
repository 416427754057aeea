from fractions import Fraction
from itertools import combinations
from math import comb, inf, prod

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from binomsum import identities as ids
from binomsum.fsum import f_direct
from binomsum.valuation import nu2
from conftest import naive_nu


def brute_sigma(j, values):
    return sum((prod(c, start=Fraction(1)) for c in combinations(values, j)), Fraction(0))


def brute_T(e, k, i):
    big, small = 2**e + 2 * k + 1, 2 * k + 1
    t = Fraction(1, comb(big, i))
    return t - Fraction(1, comb(small, i)) if i <= small else t


def test_T_examples():
    assert all(ids.T(e, k, 0) == 0 for e in range(1, 6) for k in range(5))
    assert ids.T(3, 1, 1) == Fraction(-8, 33)
    assert ids.T(3, 2, 2) == Fraction(-17, 195)
    assert nu2(ids.T(3, 2, 2)) == 0
    assert ids.T(4, 2, 2) == Fraction(-2, 21)


def test_T_convention_past_small_row():
    # i > 2k+1: the vanishing binomial contributes nothing
    assert ids.T(3, 1, 5) == Fraction(1, comb(11, 5))
    with pytest.raises(ValueError):
        ids.T(3, 1, 12)


def test_T_valuation_matches_oracle():
    for e in range(1, 6):
        for k in range(2 ** (e - 1)):
            for i in range(2**e + 2 * k + 2):
                assert ids.T_valuation(e, k, i) == naive_nu(2, brute_T(e, k, i))


def test_paired_T_matches_oracle():
    for e in range(1, 7):
        for k in range(2 ** (e - 1)):
            expected = [naive_nu(2, brute_T(e, k, 2 * i) + brute_T(e, k, 2 * i + 1))
                        for i in range((k - 1) // 2 + 1)]
            assert ids.paired_T_valuations(e, k) == expected
    assert ids.paired_T_valuations(3, 0) == []


def test_symm_sums_match_oracle():
    for e in range(1, 7):
        for k in range(2 ** (e - 1)):
            big = 2**e + 2 * k + 1
            s1 = sum((brute_T(e, k, i) for i in range(k + 1)), Fraction(0))
            s2 = sum((Fraction(1, comb(big, i)) for i in range(k + 1, 2 ** (e - 1) + k + 1)), Fraction(0))
            assert ids.symm_i_valuation(e, k) == naive_nu(2, s1)
            assert ids.symm_ii_valuation(e, k) == naive_nu(2, s2)


def test_symm_examples():
    assert ids.symm_i_valuation(3, 1) == 3
    assert ids.symm_i_valuation(2, 0) == inf
    assert ids.symm_ii_valuation(2, 0) == -1  # 1/5 + 1/10 = 3/10
    assert ids.symm_ii_valuation(3, 0) >= 0


def test_symmetric_split_of_the_difference():
    # f(2^e+2k+1) - f(2k+1) = 2 (sum_{i<=k} T_i + sum_{k<i<=2^(e-1)+k} 1/C(2^e+2k+1, i))
    for e in range(1, 6):
        for k in range(2 ** (e - 1)):
            big = 2**e + 2 * k + 1
            s1 = sum((brute_T(e, k, i) for i in range(k + 1)), Fraction(0))
            s2 = sum((Fraction(1, comb(big, i)) for i in range(k + 1, 2 ** (e - 1) + k + 1)), Fraction(0))
            assert f_direct(big) - f_direct(2 * k + 1) == 2 * (s1 + s2)


def test_inverse_binomial_sum():
    p, q = ids.inverse_binomial_sum(7, 2, 4)
    assert Fraction(p, q) == Fraction(1, 21) + Fraction(1, 35) + Fraction(1, 35)
    assert ids.inverse_binomial_sum(7, 3, 2)[0] == 0


def test_sigma_examples():
    values = [Fraction(1, 2), Fraction(1, 3), Fraction(1, 4)]
    assert ids.elementary_symmetric(0, values) == 1
    assert ids.elementary_symmetric(0, []) == 1
    assert ids.elementary_symmetric(1, [Fraction(1, 3)]) == Fraction(1, 3)
    assert ids.elementary_symmetric(2, values) == Fraction(3, 8)
    with pytest.raises(ValueError):
        ids.elementary_symmetric(4, values)


@settings(max_examples=200)
@given(st.lists(st.fractions(max_denominator=50, min_value=-20, max_value=20), max_size=7))
def test_sigma_matches_brute_force(values):
    assert ids.elementary_symmetric_all(values) == [brute_sigma(j, values) for j in range(len(values) + 1)]


def test_sumj_examples():
    lhs, rhs = ids.sumj_sides(2, 3, 1)
    assert lhs == Fraction(1, 7) - Fraction(1, 3) == Fraction(-4, 21)
    assert rhs == -Fraction(1, 7) * 4 * Fraction(1, 3)
    assert ids.sumj_identity_check(2, 3, 1)
    assert ids.sumj_identity_check(5, 9, 0)
    with pytest.raises(ValueError):
        ids.sumj_identity_check(2, 3, 4)


def test_sumj_small_exhaustive():
    assert all(ids.sumj_identity_check(e, a, b) for e in range(5) for a in range(13) for b in range(a + 1))


def test_harmonic_examples():
    assert ids.harmonic_valuation_check(1)
    assert ids.harmonic_segment_valuation(1) == -2  # 1/4 + 1/5 = 9/20
    assert ids.harmonic_segment_valuation(2) == -3
    with pytest.raises(ValueError):
        ids.harmonic_valuation_check(0)


def test_unit_fraction_sum_oracle():
    for lo in range(1, 15):
        for hi in range(lo - 1, 30):
            p, q = ids.unit_fraction_sum(lo, hi)
            assert Fraction(p, q) == sum((Fraction(1, m) for m in range(lo, hi + 1)), Fraction(0))


def test_carry_bound_examples():
    assert ids.carry_bound_check(5, 2)
    for t in range(1, 8):
        k = 2**t - 1
        assert all(nu2(comb(k, i)) == 0 and ids.carry_bound_check(k, i) for i in range(k + 1))
    with pytest.raises(ValueError):
        ids.carry_bound_check(3, 4)


def test_lg_alpha_examples():
    assert ids.lg_alpha_inequality_check(1)
    assert ids.lg_alpha_inequality_check(7)
    with pytest.raises(ValueError):
        ids.lg_alpha_inequality_check(0)


def test_dominance_example():
    values = [Fraction(1, 4), Fraction(1, 5)]
    # t = 2, v_1 = 3, v_2 = 10 + nu2(1/20) = 8
    assert ids.dominance_margin(5, ids.sigma_valuations(values)) == (3, 8)
    assert ids.j1_dominance_check(5, values) is True
    assert ids.j1_dominance_check(5, [Fraction(1, 3)]) is True
    assert ids.j1_dominance_check(2, values) is None  # e <= t
    assert ids.j1_dominance_check(5, [Fraction(1), Fraction(-1)]) is None  # sigma_1 = 0
    assert ids.j1_dominance_check(5, []) is None


def test_harmonic_sigma_valuations_oracle():
    for ell in range(1, 5):
        values = [Fraction(1, m) for m in range(2 * ell + 2, 4 * ell + 2)]
        expected = tuple(naive_nu(2, brute_sigma(j, values)) for j in range(len(values) + 1))
        assert ids.harmonic_sigma_valuations(ell) == expected
