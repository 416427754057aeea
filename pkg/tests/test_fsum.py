import random
from fractions import Fraction
from math import inf

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from binomsum import fsum
from binomsum.fsum import (
    FTable,
    PadicApprox,
    PrecisionExhausted,
    diff_valuation,
    diff_valuation_retry,
    f_direct,
    f_padic,
    f_recurrence,
)
from conftest import naive_nu

# frozen from the term-by-term oracle in conftest.naive_f
F_VALUES = {0: Fraction(1), 1: Fraction(2), 2: Fraction(5, 2), 3: Fraction(8, 3),
            4: Fraction(8, 3), 5: Fraction(13, 5), 6: Fraction(151, 60), 7: Fraction(256, 105)}


@pytest.mark.parametrize("n", sorted(F_VALUES))
def test_f_direct_small(n, oracle_f):
    assert oracle_f(n) == F_VALUES[n]
    assert f_direct(n) == F_VALUES[n]


def test_f_direct_matches_oracle(oracle_f):
    for n in list(range(60)) + [101, 256]:
        assert f_direct(n) == oracle_f(n)


def test_f_recurrence_examples():
    table = FTable(4)
    assert f_recurrence(1, table) == 2
    assert f_recurrence(2, table) == Fraction(5, 2)
    assert f_recurrence(4, table) == Fraction(8, 3)


def test_recurrence_gate_range():
    # same range the gate enforces before FTable is usable
    fsum.validate_recurrence(fsum.RECURRENCE_GATE)
    table = FTable(fsum.RECURRENCE_GATE)
    for n in range(0, fsum.RECURRENCE_GATE + 1, 37):
        assert table[n] == f_direct(n)


def test_gate_failure_raises(monkeypatch):
    monkeypatch.setattr(fsum, "_recurrence_step", lambda prev, n: prev + 1)
    with pytest.raises(fsum.RecurrenceValidationError):
        fsum.validate_recurrence(10)


def test_table_streaming_continues_recurrence():
    table = FTable(100)
    stream = table.stream_from(50)
    for n in range(50, 140):
        m, value = next(stream)
        assert m == n
        assert value == f_direct(n)


def test_f_padic_examples():
    a = f_padic(2, 8)
    assert (a.valuation, a.unit % 256) == (-1, 5)
    b = f_padic(3, 8)
    assert b.valuation == 3 and b.unit == pow(3, -1, 256)
    c = f_padic(0, 4)
    assert c.contains(1) and c.valuation == 0


@pytest.mark.parametrize("precision", [16, 64])
def test_f_padic_contains_exact(precision):
    for n in range(257):
        approx = f_padic(n, precision)
        exact = f_direct(n)
        assert approx.precision == precision
        assert approx.contains(exact)
        # exact / 2^v is a 2-adic unit; its residue mod 2^P is the stored unit
        unit = exact / Fraction(2) ** approx.valuation
        mod = 1 << precision
        assert unit.numerator % 2 == 1 and unit.denominator % 2 == 1
        assert unit.numerator * pow(unit.denominator, -1, mod) % mod == approx.unit


def test_diff_valuation_examples():
    assert diff_valuation(4, 0) == 0
    assert diff_valuation(6, 2) == -2
    assert diff_valuation(9, 9) == inf
    assert diff_valuation(4, 0, "padic") == 0
    assert diff_valuation(6, 2, "padic", 16) == -2


def test_diff_valuation_symmetric():
    rng = random.Random(5)
    for _ in range(50):
        a, b = rng.randrange(600), rng.randrange(600)
        assert diff_valuation(a, b) == diff_valuation(b, a)
        assert diff_valuation(a, b, "padic") == diff_valuation(b, a, "padic")


def test_padic_agrees_with_exact_on_random_pairs():
    rng = random.Random(1)
    for _ in range(60):
        a, b = rng.randrange(1500), rng.randrange(1500)
        if a == b:
            continue
        exact = naive_nu(2, f_direct(a) - f_direct(b))
        try:
            assert diff_valuation(a, b, "padic") == exact
        except PrecisionExhausted:
            assert exact >= 64 - 2 * max(a, b).bit_length()


def test_precision_exhaustion_and_retry():
    # f(5) - f(1) = 3/5 is a unit, so the first attempt succeeds
    assert diff_valuation_retry(5, 1) == (0, 0)
    # at P=1 the two approximations of f(4) and f(3) are indistinguishable
    with pytest.raises(PrecisionExhausted):
        diff_valuation(4, 3, "padic", 1)
    value, retries = diff_valuation_retry(4, 3, precision=1)
    assert value == inf  # f(3) = f(4) exactly; found by the exact fallback
    assert retries == 12
    with pytest.raises(PrecisionExhausted):
        diff_valuation_retry(4, 3, precision=1, fallback=False)


def _approx(q, p):
    return PadicApprox.from_rational(q, p)


nonzero = st.fractions(max_denominator=10**6).filter(lambda q: q != 0)


@settings(max_examples=300)
@given(nonzero, nonzero, st.integers(1, 80), st.integers(1, 80))
def test_padic_arithmetic_is_sound(a, b, pa, pb):
    x, y = _approx(a, pa), _approx(b, pb)
    assert x.contains(a)
    assert (x + y).contains(a + b)
    assert (x - y).contains(a - b)
    assert (x * y).contains(a * b)
    assert x.scale(b).contains(a * b)


def test_zero_flag_semantics():
    z = _approx(Fraction(1, 3), 8) - _approx(Fraction(1, 3), 8)
    assert z.zero and z.absolute_precision == 8
    assert z.contains(0) and z.contains(2**9) and not z.contains(2**7)
    assert (z * _approx(4, 8)).absolute_precision == 10


def test_unit_must_be_odd():
    with pytest.raises(ValueError):
        PadicApprox(0, 2, 8)
