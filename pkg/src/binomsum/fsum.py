"""Exact and 2-adic evaluation of f(n) = sum_k 1/C(n, k).

The exact engine works with reduced fractions. The 2-adic engine
(:class:`PadicApprox`) carries a unit modulo 2^P together with a proven
precision, and is cross-checked against the exact values in the tests.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, List, Optional, Tuple

from .valuation import INF, Valuation, nu2_int, nu2_sub

RECURRENCE_GATE = 1500

DEFAULT_PRECISION = 64
MAX_PRECISION = 4096


class PrecisionExhausted(ArithmeticError):
    """Difference is indistinguishable from zero at the working precision."""

    def __init__(self, precision: int):
        super().__init__(f"precision exhausted at P={precision}")
        self.precision = precision


class RecurrenceValidationError(RuntimeError):
    pass


def f_direct(n: int) -> Fraction:
    """Sum of 1/C(n, k) over 0 <= k <= n, evaluated term by term.

    Uses 1/C(n, k) = k!(n-k)!/n!, so the numerator is an integer sum of
    symmetric terms over the common denominator n!.
    """
    if n < 0:
        raise ValueError(f"f is defined on naturals, got {n}")
    nfact = math.factorial(n)
    term = nfact  # k!(n-k)! at k = 0
    total = 0
    for k in range((n + 1) // 2):
        total += term
        term = term * (k + 1) // (n - k)
    total *= 2
    if n % 2 == 0:
        total += term  # middle term k = n/2
    return Fraction(total, nfact)


def _recurrence_step(prev: Fraction, n: int) -> Fraction:
    return prev * Fraction(n + 1, 2 * n) + 1


def iter_f(start: int = 0, first: Optional[Fraction] = None) -> Iterator[Tuple[int, Fraction]]:
    """Yield (n, f(n)) for n = start, start+1, ... via the recurrence.

    ``first`` must be f(start) when start > 0.
    """
    if start == 0:
        value = Fraction(1)
    elif first is None:
        raise ValueError("iter_f needs f(start) for start > 0")
    else:
        value = first
    n = start
    while True:
        yield n, value
        n += 1
        value = _recurrence_step(value, n)


_gate_lock = threading.Lock()
_gate_passed = False


def validate_recurrence(limit: int = RECURRENCE_GATE) -> None:
    """Compare the recurrence against direct summation for all n <= limit.

    Raises :class:`RecurrenceValidationError` on the first mismatch.
    """
    for n, value in iter_f():
        if n > limit:
            break
        if value != f_direct(n):
            raise RecurrenceValidationError(f"recurrence disagrees with direct sum at n={n}")


def ensure_recurrence_validated() -> None:
    global _gate_passed
    if _gate_passed:
        return
    with _gate_lock:
        if not _gate_passed:
            validate_recurrence()
            _gate_passed = True


class FTable:
    """f(0..max_n) built by the recurrence; read-only once built.

    Construction runs the recurrence validation gate once per process.
    """

    def __init__(self, max_n: int = 0):
        ensure_recurrence_validated()
        self.values: List[Fraction] = [Fraction(1)]
        self.extend(max_n)

    @property
    def max_n(self) -> int:
        return len(self.values) - 1

    def extend(self, n: int) -> None:
        values = self.values
        for m in range(len(values), n + 1):
            values.append(_recurrence_step(values[-1], m))

    def __getitem__(self, n: int) -> Fraction:
        return self.values[n]

    def __len__(self) -> int:
        return len(self.values)

    def stream_from(self, start: int) -> Iterator[Tuple[int, Fraction]]:
        """Continue the recurrence past the table without storing values."""
        if start > len(self.values):
            raise ValueError(f"cannot stream from {start}: table ends at {self.max_n}")
        if start == 0:
            return iter_f()
        gen = iter_f(start - 1, self.values[start - 1])
        next(gen)
        return gen


def f_recurrence(n: int, table: Optional[FTable] = None) -> Fraction:
    if table is None:
        table = FTable()
    table.extend(n)
    return table[n]


_shared_lock = threading.Lock()
_shared: Optional[FTable] = None


def shared_table(max_n: int) -> FTable:
    """Process-wide table, grown on demand."""
    global _shared
    with _shared_lock:
        if _shared is None:
            _shared = FTable(max_n)
        elif _shared.max_n < max_n:
            _shared.extend(max_n)
        return _shared


def f_exact(n: int) -> Fraction:
    return shared_table(n)[n]


# -- 2-adic engine -----------------------------------------------------------


@dataclass(frozen=True)
class PadicApprox:
    """A 2-adic number known modulo 2^(valuation + precision).

    Nonzero: the value is 2^valuation * unit (unit odd, mod 2^precision).
    Zero flag: only nu2(x) >= valuation + precision is known.
    """

    valuation: int
    unit: int
    precision: int
    zero: bool = False

    def __post_init__(self):
        if self.precision < 0:
            raise ValueError("precision must be nonnegative")
        if not self.zero and self.unit % 2 == 0:
            raise ValueError("unit must be odd")

    @property
    def absolute_precision(self) -> int:
        return self.valuation + self.precision

    @classmethod
    def from_rational(cls, q, precision: int) -> "PadicApprox":
        q = Fraction(q)
        if q == 0:
            return cls(0, 0, precision, zero=True)
        num, den = q.numerator, q.denominator
        vn, vd = nu2_int(num), nu2_int(den)
        mod = 1 << precision
        unit = (num >> vn) * pow(den >> vd, -1, mod) % mod
        return cls(vn - vd, unit, precision)

    @classmethod
    def _from_residue(cls, base_val: int, residue: int, abs_prec: int) -> "PadicApprox":
        # residue is the value / 2^base_val, known modulo 2^(abs_prec - base_val)
        width = abs_prec - base_val
        if width <= 0:
            return cls(abs_prec, 0, 0, zero=True)
        residue %= 1 << width
        if residue == 0:
            return cls(base_val, 0, width, zero=True)
        t = nu2_int(residue)
        return cls(base_val + t, residue >> t, width - t)

    def __add__(self, other: "PadicApprox") -> "PadicApprox":
        abs_prec = min(self.absolute_precision, other.absolute_precision)
        parts = [x for x in (self, other) if not x.zero]
        if not parts:
            return PadicApprox._from_residue(abs_prec, 0, abs_prec)
        base = min(x.valuation for x in parts)
        if base >= abs_prec:
            return PadicApprox._from_residue(abs_prec, 0, abs_prec)
        residue = sum(x.unit << (x.valuation - base) for x in parts)
        return PadicApprox._from_residue(base, residue, abs_prec)

    def __neg__(self) -> "PadicApprox":
        if self.zero:
            return self
        return PadicApprox(self.valuation, (-self.unit) % (1 << self.precision), self.precision)

    def __sub__(self, other: "PadicApprox") -> "PadicApprox":
        return self + (-other)

    def __mul__(self, other: "PadicApprox") -> "PadicApprox":
        if self.zero or other.zero:
            # lower bound on the valuation of the product
            low_a = self.absolute_precision if self.zero else self.valuation
            low_b = other.absolute_precision if other.zero else other.valuation
            return PadicApprox(low_a + low_b, 0, 0, zero=True)
        prec = min(self.precision, other.precision)
        unit = self.unit * other.unit % (1 << prec)
        return PadicApprox(self.valuation + other.valuation, unit, prec)

    def scale(self, q) -> "PadicApprox":
        """Multiply by an exact nonzero rational; relative precision is kept."""
        q = Fraction(q)
        if q == 0:
            raise ValueError("scale by zero")
        if self.zero:
            return PadicApprox(self.valuation + nu2_int(q.numerator) - nu2_int(q.denominator),
                               0, self.precision, zero=True)
        exact = PadicApprox.from_rational(q, self.precision)
        return self * exact

    def contains(self, q) -> bool:
        """True iff the exact rational q lies in the represented set."""
        q = Fraction(q)
        if self.zero:
            return q == 0 or (nu2_int(q.numerator) - nu2_int(q.denominator)) >= self.absolute_precision
        if q == 0:
            return False
        other = PadicApprox.from_rational(q, self.precision)
        return other.valuation == self.valuation and other.unit == self.unit

    def to_residue(self) -> Tuple[int, int]:
        """(residue, modulus) pair with value*2^-valuation; zero gives (0, 1)."""
        if self.zero:
            return 0, 1
        return self.unit, 1 << self.precision


_inverse_cache: dict = {}
_inverse_lock = threading.Lock()


def _odd_inverses(limit: int, width: int) -> List[int]:
    """inv[m] = m^-1 mod 2^width for odd m <= limit (0 at even m)."""
    with _inverse_lock:
        inv = _inverse_cache.setdefault(width, [0])
        if len(inv) <= limit:
            mod = 1 << width
            for m in range(len(inv), limit + 1):
                inv.append(pow(m, -1, mod) if m & 1 else 0)
        return inv


def _odd_part(m: int) -> Tuple[int, int]:
    v = (m & -m).bit_length() - 1
    return v, m >> v


def _f_residue(n: int, width: int) -> Tuple[int, int]:
    """(base, residue) with f(n) = 2^base * residue modulo 2^(base + width)."""
    mod = 1 << width
    mask = mod - 1
    inv = _odd_inverses(n + 1, width)
    half = []  # (valuation, unit) of 1/C(n, k) for k <= n/2
    v = 0  # nu2 C(n, k)
    u = 1  # inverse of the odd part of C(n, k)
    for k in range(n // 2 + 1):
        half.append((-v, u))
        if k == n // 2:
            break
        # C(n, k+1) = C(n, k) * (n - k) / (k + 1)
        a, oa = _odd_part(n - k)
        b, ob = _odd_part(k + 1)
        v += a - b
        u = u * inv[oa] * ob & mask
    terms = half + half[: (n + 1) // 2][::-1]
    base = min(t for t, _ in terms)
    residue = sum(x << (t - base) for t, x in terms)
    return base, residue


@lru_cache(maxsize=8192)
def f_padic(n: int, precision: int = DEFAULT_PRECISION) -> PadicApprox:
    """f(n) as a 2-adic approximation with relative precision ``precision``.

    Each 1/C(n, k) is split into 2^(-nu2 C) times the inverse of the odd
    part of C; the sum is aligned on the least valuation. The terms are
    known exactly, so guard bits are added until cancellation in the sum
    leaves at least ``precision`` significant bits (f(n) is never zero).
    """
    if precision < 1:
        raise ValueError("precision must be >= 1")
    if n < 0:
        raise ValueError(f"f is defined on naturals, got {n}")
    guard = 2 * n.bit_length() + 16
    while True:
        width = precision + guard
        base, residue = _f_residue(n, width)
        approx = PadicApprox._from_residue(base, residue, base + width)
        if not approx.zero and approx.precision >= precision:
            return PadicApprox(approx.valuation, approx.unit % (1 << precision), precision)
        guard *= 2


def padic_diff(a: PadicApprox, b: PadicApprox) -> Valuation:
    d = a - b
    if d.zero:
        raise PrecisionExhausted(min(a.precision, b.precision))
    return d.valuation


def diff_valuation(n1: int, n2: int, engine: str = "exact",
                   precision: int = DEFAULT_PRECISION,
                   table: Optional[FTable] = None) -> Valuation:
    """nu2(f(n1) - f(n2)).

    The padic engine raises :class:`PrecisionExhausted` when the difference
    vanishes at the working precision.
    """
    if n1 == n2:
        return INF
    if engine == "exact":
        if table is not None and table.max_n >= max(n1, n2):
            a, b = table[n1], table[n2]
        else:
            a, b = f_exact(n1), f_exact(n2)
        return nu2_sub(a.numerator, a.denominator, b.numerator, b.denominator)
    if engine == "padic":
        return padic_diff(f_padic(n1, precision), f_padic(n2, precision))
    raise ValueError(f"unknown engine {engine!r}")


def diff_valuation_retry(n1: int, n2: int, precision: int = DEFAULT_PRECISION,
                         cap: int = MAX_PRECISION, fallback: bool = True,
                         table: Optional[FTable] = None) -> Tuple[Valuation, int]:
    """Padic diff_valuation with the doubling policy.

    Returns (valuation, retries). Past ``cap`` the exact engine answers when
    ``fallback`` is set; otherwise the last PrecisionExhausted propagates.
    """
    retries = 0
    p = precision
    while True:
        try:
            return diff_valuation(n1, n2, "padic", p), retries
        except PrecisionExhausted:
            if p * 2 > cap:
                if fallback:
                    return diff_valuation(n1, n2, "exact", table=table), retries
                raise
            p *= 2
            retries += 1
