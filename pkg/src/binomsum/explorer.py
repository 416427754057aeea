"""2-adic integers given by finite descriptions, and the sequence f(x_j).

A 2-adic integer x is described by one of four spec types. ``reduce``
gives x mod 2^j; ``trace`` follows the distinct points f(x_{e_i}) of the
sequence and the valuations of their successive differences. The
verdicts at the end are heuristics over finite data and never claim
2-definability either way.
"""
from __future__ import annotations

import itertools
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from .fsum import DEFAULT_PRECISION, MAX_PRECISION, diff_valuation_retry, iter_f
from .valuation import INF, Valuation, alpha, lg, nu2_int, nu2_sub

DEFAULT_MAX_EXPONENT = 14
HARD_MAX_EXPONENT = 20

CONSISTENT = "consistent"
INCONSISTENT = "inconsistent"
INCONCLUSIVE = "inconclusive"

CONVERGING = "converging-evidence"
DIVERGING = "diverging-evidence"


class HorizonError(ValueError):
    """The description does not determine enough binary digits."""


class TwoAdicSpec:
    """Base class: subclasses provide ``exponents()`` and ``known_bits``."""

    #: number of low-order bits the description determines (None = all)
    known_bits: Optional[int] = None
    #: True when x is a natural number (finitely many 1 bits)
    terminates: bool = False

    def exponents(self) -> Iterator[int]:
        raise NotImplementedError

    def exponents_below(self, limit: int) -> List[int]:
        return list(itertools.takewhile(lambda t: t < limit, self.exponents()))

    def _check_horizon(self, j: int) -> None:
        if j < 0:
            raise ValueError(f"j must be nonnegative, got {j}")
        if self.known_bits is not None and j > self.known_bits:
            raise HorizonError(f"{self} determines only {self.known_bits} bits, asked for {j}")

    def reduce(self, j: int) -> int:
        """x mod 2^j."""
        self._check_horizon(j)
        return sum(1 << t for t in self.exponents_below(j))


@dataclass(frozen=True)
class Finite(TwoAdicSpec):
    n: int

    terminates = True

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("Finite needs a natural number; use a periodic spec for negatives")

    def exponents(self) -> Iterator[int]:
        n, t = self.n, 0
        while n:
            if n & 1:
                yield t
            n >>= 1
            t += 1

    def reduce(self, j: int) -> int:
        self._check_horizon(j)
        return self.n & ((1 << j) - 1)


class ExponentList(TwoAdicSpec):
    """x = sum 2^(e_i) for a strictly increasing exponent source.

    A finite list describes x only up to and including its last exponent;
    pass an (infinite) iterable to extend it lazily.
    """

    def __init__(self, exponents: Iterable[int]):
        self._source = iter(exponents)
        self._known: List[int] = []
        self._done = False
        if isinstance(exponents, (list, tuple)):
            self._pull(len(exponents))

    def _pull(self, count: int) -> None:
        while not self._done and len(self._known) < count:
            try:
                t = next(self._source)
            except StopIteration:
                self._done = True
                break
            if t < 0 or (self._known and t <= self._known[-1]):
                raise ValueError(f"exponents must be strictly increasing naturals, got {t} "
                                 f"after {self._known[-1:] or 'start'}")
            self._known.append(t)

    @property
    def known_bits(self) -> Optional[int]:
        if not self._done:
            return None
        return self._known[-1] + 1 if self._known else 0

    def exponents(self) -> Iterator[int]:
        i = 0
        while True:
            self._pull(i + 1)
            if i >= len(self._known):
                return
            yield self._known[i]
            i += 1

    def reduce(self, j: int) -> int:
        self._check_horizon(j)
        return sum(1 << t for t in self.exponents_below(j))

    def __repr__(self) -> str:
        tail = "" if self._done else ", ..."
        return f"ExponentList({self._known}{tail})"


@dataclass(frozen=True)
class AffineRule(TwoAdicSpec):
    """Exponents e1, a*e1 + b, a*(a*e1 + b) + b, ..."""

    e1: int
    a: int
    b: int

    def __post_init__(self):
        if self.e1 < 0 or self.a < 1:
            raise ValueError("AffineRule needs e1 >= 0 and a >= 1")
        # (a-1)e + b is nondecreasing in e, so one check covers every step
        if (self.a - 1) * self.e1 + self.b <= 0:
            raise ValueError(f"affine rule a={self.a}, b={self.b} does not increase from e1={self.e1}")

    def exponents(self) -> Iterator[int]:
        t = self.e1
        while True:
            yield t
            t = self.a * t + self.b


@dataclass(frozen=True)
class EventuallyPeriodic(TwoAdicSpec):
    """Bits (least significant first): the preamble, then the block forever."""

    preamble: Tuple[int, ...]
    block: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "preamble", tuple(self.preamble))
        object.__setattr__(self, "block", tuple(self.block))
        if not self.block:
            raise ValueError("periodic block must be nonempty")
        if any(b not in (0, 1) for b in self.preamble + self.block):
            raise ValueError("bits must be 0 or 1")

    @property
    def terminates(self) -> bool:
        return not any(self.block)

    def bit(self, pos: int) -> int:
        if pos < len(self.preamble):
            return self.preamble[pos]
        return self.block[(pos - len(self.preamble)) % len(self.block)]

    def exponents(self) -> Iterator[int]:
        if self.terminates:
            yield from (t for t, b in enumerate(self.preamble) if b)
            return
        for t in itertools.count():
            if self.bit(t):
                yield t

    def reduce(self, j: int) -> int:
        self._check_horizon(j)
        return sum(1 << t for t in range(j) if self.bit(t))


def _bits(text: str) -> Tuple[int, ...]:
    if any(c not in "01" for c in text):
        raise ValueError(f"bit string must use 0/1 only: {text!r}")
    return tuple(int(c) for c in text)


def parse_spec(text: str) -> TwoAdicSpec:
    """Parse ``finite:6``, ``list:0,2,5``, ``affine:e1=0,a=3,b=1`` or ``periodic:pre=01,block=1``."""
    kind, sep, body = text.strip().partition(":")
    if not sep:
        raise ValueError(f"spec needs a '<kind>:' prefix: {text!r}")
    try:
        if kind == "finite":
            return Finite(int(body))
        if kind == "list":
            return ExponentList([int(t) for t in body.split(",") if t.strip()])
        if kind in ("affine", "periodic"):
            fields = {}
            for part in body.split(","):
                key, eq, value = part.partition("=")
                if not eq:
                    raise ValueError(f"expected key=value, got {part!r}")
                fields[key.strip()] = value.strip()
            if kind == "affine":
                return AffineRule(int(fields["e1"]), int(fields["a"]), int(fields["b"]))
            return EventuallyPeriodic(_bits(fields.get("pre", "")), _bits(fields["block"]))
    except KeyError as exc:
        raise ValueError(f"spec {text!r} is missing field {exc}") from None
    raise ValueError(f"unknown spec kind {kind!r}")


def reduce(spec: TwoAdicSpec, j: int) -> int:
    return spec.reduce(j)


def zero_one_excess(spec: TwoAdicSpec, j: int) -> int:
    """(#0 bits) - (#1 bits) among the j low-order positions, leading zeros included."""
    return j - 2 * alpha(spec.reduce(j))


# -- traces --------------------------------------------------------------------


def distance_from_valuation(v: Valuation) -> Fraction:
    """The 2-adic metric value 2^(-v); 0 at v = inf."""
    if v == INF:
        return Fraction(0)
    return Fraction(1, 1 << v) if v >= 0 else Fraction(1 << -v)


@dataclass(frozen=True)
class TraceRow:
    i: int
    e_i: int
    x_prev: int
    step_val: Valuation
    conj1_bound: int
    conj2_bound: Optional[int]
    distance: Fraction
    excess: int

    @property
    def x_next(self) -> int:
        return (1 << self.e_i) + self.x_prev


@dataclass
class ConvergenceTrace:
    spec: TwoAdicSpec
    max_exponent: int
    engine: str
    rows: List[TraceRow] = field(default_factory=list)
    #: distinct points f(x_{e_1}), f(x_{e_2}), ..., f of the last x_next
    points: List[Fraction] = field(default_factory=list)
    #: True when no exponent of x exceeds max_exponent (x a natural number)
    eventually_constant: bool = False


def _f_at(arguments: Sequence[int]) -> dict:
    """f at each requested natural, from one streaming pass of the recurrence."""
    wanted = set(arguments)
    top = max(wanted)
    out = {}
    for n, value in iter_f():
        if n in wanted:
            out[n] = value
        if n >= top:
            break
    return out


def trace(spec: TwoAdicSpec, max_exponent: int = DEFAULT_MAX_EXPONENT, engine: str = "exact",
          precision: int = DEFAULT_PRECISION) -> ConvergenceTrace:
    """One row per exponent e_i <= max_exponent of x.

    Row i compares the distinct points f(x_{e_i}) and f(2^{e_i} + x_{e_i}).
    """
    if max_exponent < 0 or max_exponent > HARD_MAX_EXPONENT:
        raise ValueError(f"max_exponent must lie in [0, {HARD_MAX_EXPONENT}], got {max_exponent}")
    if engine not in ("exact", "padic"):
        raise ValueError(f"unknown engine {engine!r}")
    exps = spec.exponents_below(max_exponent + 1)
    if not exps:
        raise ValueError(f"{spec} has no exponent <= {max_exponent}")
    odd = exps[0] == 0
    out = ConvergenceTrace(spec, max_exponent, engine)
    xs = [0]
    for t in exps:
        xs.append(xs[-1] + (1 << t))
    values = _f_at(xs) if engine == "exact" else {}
    for idx, t in enumerate(exps):
        x_prev, x_next = xs[idx], xs[idx + 1]
        if engine == "exact":
            a, b = values[x_next], values[x_prev]
            v = nu2_sub(a.numerator, a.denominator, b.numerator, b.denominator)
        else:
            v, _ = diff_valuation_retry(x_next, x_prev, precision, MAX_PRECISION)
        c2 = None
        if odd and x_prev % 2 == 1:
            k = (x_prev - 1) // 2
            c2 = t - 2 * lg(k + 3) + 2 * nu2_int(k + 1)
        out.rows.append(TraceRow(idx + 1, t, x_prev, v, t - 2 * alpha(x_prev) - 2, c2,
                                 distance_from_valuation(v), t - 2 * alpha(x_prev)))
    if engine == "exact":
        out.points = [values[x] for x in xs]
    out.eventually_constant = spec.terminates and spec.exponents_below(max_exponent + 1) == list(spec.exponents())
    return out


# -- hypothesis trends and Cauchy diagnostics -------------------------------------


@dataclass
class TrendReport:
    which: str
    values: List[int]
    running_min: List[int]
    verdict: str
    analytic: bool
    note: str = ""


def _running_min_after(values: Sequence[int]) -> List[int]:
    out = list(values)
    for idx in range(len(out) - 2, -1, -1):
        out[idx] = min(out[idx], out[idx + 1])
    return out


def _numeric_verdict(values: Sequence[int]) -> str:
    """Compare the last value with the one halfway through the sequence.

    consistent: growing and positive at both points; inconsistent:
    not growing and nonpositive at the end; otherwise inconclusive.
    """
    if len(values) < 2:
        return INCONCLUSIVE
    last, mid = values[-1], values[(len(values) - 1) // 2]
    if last > mid > 0:
        return CONSISTENT
    if last <= mid and last <= 0:
        return INCONSISTENT
    return INCONCLUSIVE


def _available_horizon(spec: TwoAdicSpec, horizon: int) -> Tuple[int, str]:
    if spec.known_bits is not None and spec.known_bits < horizon:
        return spec.known_bits, f"horizon clamped to the {spec.known_bits} bits the spec determines"
    return horizon, ""


def cor1_hypothesis(spec: TwoAdicSpec, horizon: int) -> TrendReport:
    """Trend of (#0 - #1) in x_j, which should tend to infinity."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    h, note = _available_horizon(spec, horizon)
    values = [zero_one_excess(spec, j) for j in range(1, h + 1)]
    running = _running_min_after(values)
    if spec.terminates:
        return TrendReport("cor1", values, running, CONSISTENT, True,
                           "x is a natural number: excess grows by 1 per leading zero")
    if isinstance(spec, EventuallyPeriodic):
        zeros = spec.block.count(0)
        verdict = CONSISTENT if 2 * zeros > len(spec.block) else INCONSISTENT
        return TrendReport("cor1", values, running, verdict, True,
                           f"fraction of 0's in the periodic block is {zeros}/{len(spec.block)}")
    return TrendReport("cor1", values, running, _numeric_verdict(values), False, note)


def cor2_hypothesis(spec: TwoAdicSpec, horizon: int) -> TrendReport:
    """Trend of e_{i+1} - 2 e_i over exponents below the horizon (needs e_1 = 0)."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if spec.terminates:
        exps = list(spec.exponents())
        diffs = [b - 2 * a for a, b in zip(exps, exps[1:])]
        return TrendReport("cor2", diffs, _running_min_after(diffs), CONSISTENT, True,
                           "finitely many exponents: hypothesis vacuous, x is a natural number")
    h, note = _available_horizon(spec, horizon)
    exps = spec.exponents_below(h)
    diffs = [b - 2 * a for a, b in zip(exps, exps[1:])]
    running = _running_min_after(diffs)
    if exps and exps[0] != 0:
        return TrendReport("cor2", diffs, running, INCONSISTENT, True,
                           "the hypothesis needs e_1 = 0 (x odd)")
    if isinstance(spec, AffineRule):
        a, b = spec.a, spec.b
        if a >= 3:
            return TrendReport("cor2", diffs, running, CONSISTENT, True,
                               f"difference {a - 2}*e_i + {b} tends to infinity")
        if a == 2:
            return TrendReport("cor2", diffs, running, INCONCLUSIVE, True,
                               f"difference is the constant {b}")
        return TrendReport("cor2", diffs, running, INCONSISTENT, True,
                           f"difference {b} - e_i tends to -infinity")
    if isinstance(spec, EventuallyPeriodic):
        return TrendReport("cor2", diffs, running, INCONSISTENT, True,
                           "bounded gaps between 1's: difference tends to -infinity")
    return TrendReport("cor2", diffs, running, _numeric_verdict(diffs), False, note)


@dataclass
class CauchyDiagnostic:
    tail_min: Valuation
    slope: float
    label: str
    heuristic: bool = True
    note: str = "finite data cannot decide 2-definability"


def cauchy_verdict(tr: ConvergenceTrace) -> CauchyDiagnostic:
    """Heuristic reading of the step valuations of a trace.

    converging-evidence: positive least-squares slope and the last half's
    minimum above the first half's; diverging-evidence: the mirror image.
    """
    if not tr.rows:
        raise ValueError("empty trace")
    vals = [r.step_val for r in tr.rows]
    half = len(vals) // 2
    tail_min = min(vals[half:])
    finite = [(r.i, r.step_val) for r in tr.rows if r.step_val != INF]
    slope = 0.0
    if len(finite) >= 2 and len({i for i, _ in finite}) >= 2:
        xs, ys = zip(*finite)
        if len(set(ys)) > 1:
            slope = statistics.linear_regression(xs, ys).slope
    if tr.eventually_constant:
        return CauchyDiagnostic(tail_min, slope, CONVERGING, True,
                                "x is a natural number: the sequence is eventually constant "
                                "(later distances are 0)")
    head_min = min(vals[:half]) if half else None
    if head_min is not None and slope > 0 and tail_min > head_min:
        label = CONVERGING
    elif head_min is not None and slope < 0 and tail_min < head_min:
        label = DIVERGING
    else:
        label = INCONCLUSIVE
    return CauchyDiagnostic(tail_min, slope, label)
