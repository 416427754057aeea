"""Exhaustive, deterministic sweeps over the (e, k, i) grids of each check.

Every check yields :class:`BoundCheckRow` values in lexicographic
(e, k, i) order. :func:`run_sweep` splits each level into contiguous
k-stripes, evaluates them on a process pool when ``workers > 1`` and
merges them back in order, so a report never depends on the worker count.
"""
from __future__ import annotations

import multiprocessing
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterator, List, Optional, Tuple, Union

from . import identities as ids
from .fsum import (
    DEFAULT_PRECISION,
    MAX_PRECISION,
    FTable,
    diff_valuation,
    diff_valuation_retry,
    f_direct,
)
from .valuation import INF, Valuation, alpha, binom, carry_count, lg, nu2, nu2_int, nu2_sub

STREAM_FROM_E = 14

ERange = Union[range, Tuple[int, int]]


@dataclass(frozen=True)
class BoundCheckRow:
    """One verification outcome: ``observed`` against ``bound``.

    ``holds`` is the verdict of the claim for this row; for inequality
    checks it is ``observed >= bound``, identity checks set it from an
    exact comparison.
    """

    e: int
    k: int
    i: Optional[int]
    observed: Valuation
    bound: Valuation
    holds: bool

    @property
    def slack(self) -> Valuation:
        if self.observed == INF:
            return INF
        return self.observed - self.bound

    @property
    def is_equality(self) -> bool:
        return self.observed != INF and self.observed == self.bound

    @property
    def key(self) -> Tuple[int, int, int]:
        return (self.e, self.k, -1 if self.i is None else self.i)


def _ge(e, k, i, observed, bound) -> BoundCheckRow:
    return BoundCheckRow(e, k, i, observed, bound, observed >= bound)


def _eq(e, k, i, observed, bound) -> BoundCheckRow:
    return BoundCheckRow(e, k, i, observed, bound, observed == bound)


@dataclass
class LevelSummary:
    rows: int = 0
    violations: int = 0
    equalities: int = 0
    min_slack: Valuation = INF


@dataclass
class SweepReport:
    check: str
    params: Dict[str, int]
    engine: str
    precision: int
    jobs: int
    rows_total: int = 0
    rows: Optional[List[BoundCheckRow]] = None
    violations: List[BoundCheckRow] = field(default_factory=list)
    equality_cases: List[BoundCheckRow] = field(default_factory=list)
    per_e: Dict[int, LevelSummary] = field(default_factory=dict)
    retries: Dict[int, int] = field(default_factory=dict)
    stopped_early: bool = False
    duration_ms: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def is_finding(self) -> bool:
        """A violation of an unproved statement: a mathematical result, not a bug."""
        return bool(self.violations) and CHECKS[self.check].kind == "conjecture"

    def equality_ks(self) -> Dict[int, List[int]]:
        out: Dict[int, List[int]] = {e: [] for e in self.per_e}
        for row in self.equality_cases:
            out.setdefault(row.e, []).append(row.k)
        return out

    def add(self, row: BoundCheckRow) -> None:
        self.rows_total += 1
        if self.rows is not None:
            self.rows.append(row)
        level = self.per_e.setdefault(row.e, LevelSummary())
        level.rows += 1
        level.min_slack = min(level.min_slack, row.slack)
        if not row.holds:
            self.violations.append(row)
            level.violations += 1
        if row.is_equality:
            self.equality_cases.append(row)
            level.equalities += 1


# -- per-check row generators -------------------------------------------------


@dataclass(frozen=True)
class SweepContext:
    engine: str = "exact"
    precision: int = DEFAULT_PRECISION
    fallback: bool = True
    a_max: int = 30


# Frozen table shared with forked workers (read-only after run_sweep builds it).
_TABLE: Optional[FTable] = None


def _conj_observed(n1: int, n2: int, ctx: SweepContext, retries: Dict[int, int]) -> Valuation:
    if ctx.engine == "exact":
        return diff_valuation(n1, n2, "exact", table=_TABLE)
    value, tries = diff_valuation_retry(n1, n2, ctx.precision, MAX_PRECISION, ctx.fallback, _TABLE)
    retries[tries] = retries.get(tries, 0) + 1
    return value


def conj1_bound(e: int, k: int) -> int:
    return e - 2 * alpha(k) - 2


def conj2_bound(e: int, k: int) -> int:
    return e - 2 * lg(k + 3) + 2 * nu2_int(k + 1)


def symm_i_bound(e: int, k: int) -> int:
    return e - 2 * lg(k + 2) + 2 * nu2_int(k + 1)


def symm_ii_bound(e: int, k: int) -> int:
    return e - 2 * lg(k + 3) + 2 * nu2_int(k + 1) - 1


def thm_a_bound(e: int, k: int) -> int:
    return e - 2 * lg(k + 1) + 2 * nu2_int(k + 1)


def thm_b_bound(e: int, k: int) -> int:
    return e - 2 * lg(k + 2)


def _rows_conj1(e, k, ctx, retries):
    n = (1 << e) + k
    return [_ge(e, k, None, _conj_observed(n, k, ctx, retries), conj1_bound(e, k))]


def _rows_conj2(e, k, ctx, retries):
    m = 2 * k + 1
    return [_ge(e, k, None, _conj_observed((1 << e) + m, m, ctx, retries), conj2_bound(e, k))]


def _rows_symm_i(e, k, ctx, retries):
    return [_ge(e, k, None, ids.symm_i_valuation(e, k), symm_i_bound(e, k))]


def _rows_symm_ii(e, k, ctx, retries):
    return [_ge(e, k, None, ids.symm_ii_valuation(e, k), symm_ii_bound(e, k))]


def _rows_thm_a(e, k, ctx, retries):
    bound = thm_a_bound(e, k)
    return [_ge(e, k, i, v, bound) for i, v in enumerate(ids.paired_T_valuations(e, k))]


def _rows_thm_b(e, k, ctx, retries):
    if k % 2:
        return []
    return [_ge(e, k, None, ids.T_valuation(e, k, k), thm_b_bound(e, k))]


def _rows_thm_b_exact(e, k, ctx, retries):
    if k % 2 or k == 0:
        return []
    ell = k // 2
    return [_eq(e, k, None, ids.T_valuation(e, k, k), ids.thm_b_predicted_valuation(e, ell))]


def _rows_dominance(e, k, ctx, retries):
    # observed: min_{j>=2} v_j; bound: v_1 + 1 (strict dominance)
    if k % 2 or k == 0:
        return []
    margin = ids.dominance_margin(e, ids.harmonic_sigma_valuations(k // 2))
    if margin is None:
        return []
    v1, rest = margin
    return [_ge(e, k, None, rest, v1 + 1)]


def _rows_sumj(e, a, ctx, retries):
    rows = []
    for b in range(a + 1):
        lhs, rhs = ids.sumj_sides(e, a, b)
        rows.append(BoundCheckRow(e, a, b, nu2(lhs), nu2(rhs), lhs == rhs))
    return rows


def _rows_harmonic(e, ell, ctx, retries):
    return [_eq(e, ell, None, ids.harmonic_segment_valuation(ell), -lg(ell) - 2)]


def _rows_carry_bound(e, k, ctx, retries):
    # observed: the ceiling lg(k+1) - nu2(k+1); bound: nu2 C(k, i)
    ceiling = lg(k + 1) - nu2_int(k + 1)
    rows = []
    c = 1
    for i in range(k + 1):
        rows.append(_ge(e, k, i, ceiling, nu2_int(c)))
        c = c * (k - i) // (i + 1)
    return rows


def _rows_lg_alpha(e, ell, ctx, retries):
    return [_ge(e, ell, None, 2 * lg(ell + 1), alpha(ell) + lg(ell))]


def _rows_kummer(e, m, ctx, retries):
    # observed: nu2 C(m+n, m); bound: alpha(m) + alpha(n) - alpha(m+n)
    rows = []
    lo = 0 if m.bit_length() == e else 1 << (e - 1)
    for n in range(lo, 1 << e):
        v = nu2_int(binom(m + n, m))
        digits = alpha(m) + alpha(n) - alpha(m + n)
        rows.append(BoundCheckRow(e, m, n, v, digits, v == digits == carry_count(m, n)))
    return rows


def _rows_recurrence(e, n, ctx, retries):
    direct = f_direct(n)
    rec = _TABLE[n]
    return [BoundCheckRow(e, n, None, nu2(rec), nu2(direct), rec == direct)]


def _rows_engines(e, k, ctx, retries):
    n = (1 << e) + k
    exact = diff_valuation(n, k, "exact", table=_TABLE)
    value, tries = diff_valuation_retry(n, k, ctx.precision, MAX_PRECISION, True, _TABLE)
    retries[tries] = retries.get(tries, 0) + 1
    return [_eq(e, k, None, value, exact)]


def _half_grid(e: int) -> range:
    return range(1 << (e - 1)) if e >= 1 else range(0)


def _bit_length_block(e: int) -> range:
    """Naturals whose bit length is e."""
    return range(0, 1) if e == 0 else range(1 << (e - 1), 1 << e)


def _positive_block(e: int) -> range:
    return range(0) if e == 0 else _bit_length_block(e)


@dataclass(frozen=True)
class Check:
    id: str
    kind: str  # "conjecture" | "proved" | "identity" | "gate"
    grid: Callable[[int, SweepContext], range]
    rows: Callable
    table_max: Optional[Callable[[int], int]] = None
    uses_engine: bool = False
    description: str = ""


CHECKS: Dict[str, Check] = {
    c.id: c
    for c in [
        Check("conj1", "conjecture", lambda e, ctx: range(1 << e), _rows_conj1,
              lambda e: (1 << (e + 1)) - 1, True,
              "nu2(f(2^e+k) - f(k)) >= e - 2 alpha(k) - 2"),
        Check("conj2", "conjecture", lambda e, ctx: _half_grid(e), _rows_conj2,
              lambda e: (1 << (e + 1)) - 1, True,
              "nu2(f(2^e+2k+1) - f(2k+1)) >= e - 2 lg(k+3) + 2 nu2(k+1)"),
        Check("symm_i", "proved", lambda e, ctx: _half_grid(e), _rows_symm_i,
              description="nu2(sum_{i<=k} T_i) >= e - 2 lg(k+2) + 2 nu2(k+1)"),
        Check("symm_ii", "conjecture", lambda e, ctx: _half_grid(e), _rows_symm_ii,
              description="nu2(sum_{k<i<=2^(e-1)+k} 1/C(2^e+2k+1, i)) >= e - 2 lg(k+3) + 2 nu2(k+1) - 1"),
        Check("thm_a", "proved", lambda e, ctx: _half_grid(e), _rows_thm_a,
              description="nu2(T_2i + T_2i+1) >= e - 2 lg(k+1) + 2 nu2(k+1)"),
        Check("thm_b", "proved", lambda e, ctx: _half_grid(e), _rows_thm_b,
              description="nu2(T_k) >= e - 2 lg(k+2), k even"),
        Check("thm_b_exact", "conjecture", lambda e, ctx: _half_grid(e), _rows_thm_b_exact,
              description="nu2(T_2l) == e - alpha(l) - lg(l) - 2"),
        Check("dominance", "proved", lambda e, ctx: _half_grid(e), _rows_dominance,
              description="v_j > v_1 for j >= 2 on 1/(2l+2), ..., 1/(4l+1)"),
        Check("sumj", "identity", lambda e, ctx: range(ctx.a_max + 1), _rows_sumj,
              description="expansion of 1/C(2^e+a, b) - 1/C(a, b) in sigma_j"),
        Check("harmonic", "proved", lambda e, ctx: _positive_block(e), _rows_harmonic,
              description="nu2(1/(2l+2) + ... + 1/(4l+1)) == -lg(l) - 2"),
        Check("carry_bound", "proved", lambda e, ctx: _bit_length_block(e), _rows_carry_bound,
              description="nu2 C(k, i) <= lg(k+1) - nu2(k+1)"),
        Check("lg_alpha", "proved", lambda e, ctx: _positive_block(e), _rows_lg_alpha,
              description="2 lg(l+1) >= alpha(l) + lg(l)"),
        Check("kummer", "identity", lambda e, ctx: range(1 << e), _rows_kummer,
              description="nu2 C(m+n, m) == alpha(m) + alpha(n) - alpha(m+n) == carries"),
        Check("recurrence_vs_direct", "gate", lambda e, ctx: _bit_length_block(e), _rows_recurrence,
              lambda e: (1 << e) - 1,
              description="recurrence table equals direct summation"),
        Check("engines_agree", "gate", lambda e, ctx: range(1 << e), _rows_engines,
              lambda e: (1 << (e + 1)) - 1,
              description="padic and exact engines agree on the conj1 grid"),
    ]
}

CLI_NAMES = {c.replace("_", "-"): c for c in CHECKS}


def _stripes(keys: range, parts: int) -> List[range]:
    if len(keys) == 0:
        return []
    size = max(1, -(-len(keys) // parts))
    return [keys[i:i + size] for i in range(0, len(keys), size)]


def _run_stripe(check_id: str, e: int, keys: range, ctx: SweepContext):
    check = CHECKS[check_id]
    retries: Dict[int, int] = {}
    rows = []
    for k in keys:
        rows.extend(check.rows(e, k, ctx, retries))
    return rows, retries


def _stream_top_level(check_id: str, e: int, ctx: SweepContext, table: FTable) -> Iterator[BoundCheckRow]:
    """conj1/conj2 rows at level e with f(2^e + .) streamed, not stored."""
    base = 1 << e
    for n, value in table.stream_from(base):
        if n >= base << 1:
            return
        off = n - base
        if check_id == "conj1":
            k, small = off, off
            bound = conj1_bound(e, k)
        else:
            if off % 2 == 0:
                continue
            k, small = (off - 1) // 2, off
            bound = conj2_bound(e, k)
        low = table[small]
        obs = diff_valuation_pair(value, low)
        yield _ge(e, k, None, obs, bound)


def diff_valuation_pair(a: Fraction, b: Fraction) -> Valuation:
    return nu2_sub(a.numerator, a.denominator, b.numerator, b.denominator)


def e_bounds(e_range: ERange) -> Tuple[int, int]:
    if isinstance(e_range, range):
        if e_range.step != 1:
            raise ValueError("e ranges must be contiguous")
        return e_range.start, e_range.stop - 1
    lo, hi = e_range
    return lo, hi


def run_sweep(check_id: str, e_range: ERange, engine: str = "exact", workers: int = 1,
              precision: int = DEFAULT_PRECISION, fallback: bool = True, a_max: int = 30,
              keep_rows: bool = True, sink: Optional[Callable[[BoundCheckRow], None]] = None,
              fail_fast: bool = False) -> SweepReport:
    """Evaluate ``check_id`` on every level e in ``e_range`` (inclusive bounds).

    Rows reach ``sink`` and the report in (e, k, i) order. An empty range
    gives an empty, passing report.
    """
    global _TABLE
    if check_id not in CHECKS:
        raise KeyError(f"unknown check {check_id!r}")
    if engine not in ("exact", "padic"):
        raise ValueError(f"unknown engine {engine!r}")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    check = CHECKS[check_id]
    e_min, e_max = e_bounds(e_range)
    if e_min < 0:
        raise ValueError("e must be nonnegative")
    ctx = SweepContext(engine if check.uses_engine else "exact", precision, fallback, a_max)
    report = SweepReport(check_id, {"e_min": e_min, "e_max": e_max}, ctx.engine, precision, workers,
                         rows=[] if keep_rows else None)
    start = time.perf_counter()
    levels = list(range(e_min, e_max + 1))

    stream_top = (check_id in ("conj1", "conj2") and ctx.engine == "exact"
                  and levels and e_max >= STREAM_FROM_E)
    if check.table_max is not None and levels:
        need = check.table_max(e_max)
        if stream_top:
            need = (1 << e_max) - 1
        if _TABLE is None or _TABLE.max_n < need:
            _TABLE = FTable(need)

    def emit(row: BoundCheckRow) -> bool:
        report.add(row)
        if sink is not None:
            sink(row)
        return fail_fast and not row.holds

    def merge_retries(r: Dict[int, int]) -> None:
        for t, c in r.items():
            report.retries[t] = report.retries.get(t, 0) + c

    tasks = []
    for e in levels:
        if stream_top and e == e_max:
            continue
        for stripe in _stripes(check.grid(e, ctx), workers * 4):
            tasks.append((e, stripe))

    stop = False
    if workers == 1 or len(tasks) <= 1:
        results = (_run_stripe(check_id, e, keys, ctx) for e, keys in tasks)
        stop = _consume(results, emit, merge_retries)
    else:
        mp = multiprocessing.get_context("fork")
        with ProcessPoolExecutor(max_workers=workers, mp_context=mp) as pool:
            futures = [pool.submit(_run_stripe, check_id, e, keys, ctx) for e, keys in tasks]
            stop = _consume((f.result() for f in futures), emit, merge_retries)
            if stop:
                for f in futures:
                    f.cancel()

    if stream_top and not stop:
        for row in _stream_top_level(check_id, e_max, ctx, _TABLE):
            if emit(row):
                stop = True
                break
    report.stopped_early = stop
    report.duration_ms = int((time.perf_counter() - start) * 1000)
    return report


def _consume(results, emit, merge_retries) -> bool:
    for rows, retries in results:
        merge_retries(retries)
        for row in rows:
            if emit(row):
                return True
    return False


# -- named entry points --------------------------------------------------------


def conj1_check(e_range: ERange, **kw) -> SweepReport:
    return run_sweep("conj1", e_range, **kw)


def conj2_check(e_range: ERange, **kw) -> SweepReport:
    return run_sweep("conj2", e_range, **kw)


def symm_i_check(e_range: ERange, **kw) -> SweepReport:
    return run_sweep("symm_i", e_range, **kw)


def symm_ii_check(e_range: ERange, **kw) -> SweepReport:
    return run_sweep("symm_ii", e_range, **kw)


def thm_a_check(e_range: ERange, **kw) -> SweepReport:
    return run_sweep("thm_a", e_range, **kw)


def thm_b_check(e_range: ERange, **kw) -> SweepReport:
    return run_sweep("thm_b", e_range, **kw)


def thm_b_exact_valuation_check(e_range: ERange, **kw) -> SweepReport:
    return run_sweep("thm_b_exact", e_range, **kw)


def expected_equality_set(check_id: str, e: int) -> List[int]:
    """Equality cases reported in the literature for the conjectures."""
    if check_id == "conj1":
        return sorted(k for k in {(1 << e) - 4, (1 << e) - 2} if 0 <= k < 1 << e)
    if check_id == "conj2":
        k = (1 << (e - 1)) - 2 if e >= 1 else -1
        return [k] if 0 <= k < (1 << max(e - 1, 0)) else []
    raise KeyError(check_id)


def implication_failures(e_range: ERange) -> List[Tuple[int, int]]:
    """(e, k) where the symm_i and symm_ii rows hold but the conj2 row fails."""
    lo, hi = e_bounds(e_range)
    a = run_sweep("symm_i", (lo, hi))
    b = run_sweep("symm_ii", (lo, hi))
    c = run_sweep("conj2", (lo, hi))
    bad = []
    for ri, rii, rc in zip(a.rows, b.rows, c.rows):
        assert ri.key == rii.key == rc.key
        if ri.holds and rii.holds and not rc.holds:
            bad.append((ri.e, ri.k))
    return bad
