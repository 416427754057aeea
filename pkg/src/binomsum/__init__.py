"""Exact computation of f(n) = sum_k 1/C(n, k), its 2-adic valuations, and
exhaustive checks of the inequalities it is conjectured to satisfy."""

__version__ = "0.1.0"

from .valuation import (  # noqa: E402
    INF,
    alpha,
    binom,
    carry_count,
    kummer_identity_check,
    lg,
    nu,
    nu2,
)
from .fsum import (  # noqa: E402
    FTable,
    PadicApprox,
    PrecisionExhausted,
    diff_valuation,
    f_direct,
    f_padic,
    f_recurrence,
)
from .harness import BoundCheckRow, SweepReport, run_sweep  # noqa: E402
from .explorer import parse_spec, trace  # noqa: E402

__all__ = [
    "INF", "alpha", "binom", "carry_count", "kummer_identity_check", "lg", "nu", "nu2",
    "FTable", "PadicApprox", "PrecisionExhausted", "diff_valuation", "f_direct", "f_padic",
    "f_recurrence", "BoundCheckRow", "SweepReport", "run_sweep", "parse_spec", "trace",
]
