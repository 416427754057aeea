from fractions import Fraction
from math import comb

import pytest

_acceptance = []


def naive_f(n):
    """Term-by-term sum of reciprocal binomials; the oracle for f."""
    return sum((Fraction(1, comb(n, k)) for k in range(n + 1)), Fraction(0))


def naive_nu(p, q):
    """Valuation by repeated division; independent of the bit tricks."""
    q = Fraction(q)
    if q == 0:
        return float("inf")
    v = 0
    num, den = q.numerator, q.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


@pytest.fixture(scope="session")
def oracle_f():
    cache = {}

    def f(n):
        if n not in cache:
            cache[n] = naive_f(n)
        return cache[n]

    return f


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
