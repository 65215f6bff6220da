"""Reference semantics, evaluated offline.

This is the package's ground truth: a direct transcription of the
quantitative semantics with no incremental state.  Every monitor is tested
against it.  It is deliberately unoptimized, but series are computed
bottom-up per node so that nested windows cost O(n * window) instead of
exploding with formula depth.

Interval convention: the inner minimum of Since runs over the half-open
(t', t], and of Until over [t, t'), so that the unbounded Since recurrence
y[t] = max(x2[t], min(x1[t], y[t-1])) holds exactly.  Prev and Next are the
one-step shifts with an empty-window value at the trace edge.

Internally robustness is carried as plain floats where the poles are IEEE
infinities; ExtReal wraps values only at the public boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .core import (
    Duration,
    ExtReal,
    IoSignature,
    SemanticsMode,
    UnknownVariableError,
    duration_to_samples,
    sign_inf,
)
from .formula import (
    And,
    Always,
    Delay,
    DelayedUntil,
    Eventually,
    Fall,
    Formula,
    Historically,
    Implies,
    Next,
    Not,
    Once,
    Or,
    Pred,
    Prev,
    Rise,
    Since,
    Until,
    predicate_kinds,
    predicate_margin,
    used_variables,
)

INF = math.inf


@dataclass
class DiscreteTrace:
    """Equal-length sample arrays per variable, one value per tick."""

    values: dict  # path -> list of floats
    period: Duration = field(default_factory=lambda: Duration.samples(1))

    def __post_init__(self):
        lengths = {len(v) for v in self.values.values()}
        if len(lengths) > 1:
            raise ValueError("all variables must have the same length")

    @property
    def length(self) -> int:
        for v in self.values.values():
            return len(v)
        return 0

    def valuation(self, t: int) -> dict:
        return {name: series[t] for name, series in self.values.items()}


def _mode_sets(mode: SemanticsMode):
    """The (U, V) variable-kind sets of the relative-robustness modes."""
    if mode is SemanticsMode.STANDARD:
        return frozenset(("input", "output")), frozenset()
    if mode is SemanticsMode.OUTPUT_ROBUSTNESS:
        return frozenset(("output",)), frozenset(("input",))
    return frozenset(("input",)), frozenset()


def predicate_case(kinds: frozenset, mode: SemanticsMode) -> str:
    """Which of the three relative-robustness cases applies to a predicate
    whose variables resolve to ``kinds``: "zero", "finite" or "pole"."""
    u, v = _mode_sets(mode)
    if not kinds <= (u | v):
        return "zero"
    if not kinds <= v:
        return "finite"
    return "pole"


def eval_predicate(pred: Pred, valuation: dict, mode: SemanticsMode,
                   io: IoSignature) -> ExtReal:
    for name in used_variables(pred):
        if name not in valuation:
            raise UnknownVariableError(name)
    case = predicate_case(predicate_kinds(pred, io), mode)
    if case == "zero":
        return ExtReal(0.0)
    f = predicate_margin(pred, valuation)
    if case == "finite":
        return ExtReal(f)
    return sign_inf(f)


def _predicate_series(pred, trace, mode, io):
    case = predicate_case(predicate_kinds(pred, io), mode)
    n = trace.length
    if case == "zero":
        return [0.0] * n
    out = []
    for t in range(n):
        f = predicate_margin(pred, trace.valuation(t))
        if case == "finite":
            out.append(f)
        else:
            out.append(INF if f > 0 else -INF)
    return out


def _bounds_in_samples(interval, period):
    lo = duration_to_samples(interval.lo, period)
    hi = None if interval.hi is None else duration_to_samples(interval.hi, period)
    if hi is not None and hi < lo:
        raise ValueError(f"empty interval after conversion: [{lo}:{hi}] samples")
    return lo, hi


def _series(f: Formula, trace: DiscreteTrace, mode, io):
    n = trace.length
    p = trace.period

    if isinstance(f, Pred):
        return _predicate_series(f, trace, mode, io)
    if isinstance(f, Not):
        return [-x for x in _series(f.operand, trace, mode, io)]
    if isinstance(f, And):
        x1 = _series(f.lhs, trace, mode, io)
        x2 = _series(f.rhs, trace, mode, io)
        return [min(a, b) for a, b in zip(x1, x2)]
    if isinstance(f, Or):
        x1 = _series(f.lhs, trace, mode, io)
        x2 = _series(f.rhs, trace, mode, io)
        return [max(a, b) for a, b in zip(x1, x2)]
    if isinstance(f, Implies):
        x1 = _series(f.lhs, trace, mode, io)
        x2 = _series(f.rhs, trace, mode, io)
        return [max(-a, b) for a, b in zip(x1, x2)]
    if isinstance(f, Prev):
        x = _series(f.operand, trace, mode, io)
        return [-INF] + x[: n - 1] if n else []
    if isinstance(f, Next):
        x = _series(f.operand, trace, mode, io)
        return x[1:] + [-INF] if n else []
    if isinstance(f, Rise):
        x = _series(f.operand, trace, mode, io)
        return [-INF] + [min(-x[t - 1], x[t]) for t in range(1, n)] if n else []
    if isinstance(f, Fall):
        x = _series(f.operand, trace, mode, io)
        return [-INF] + [min(x[t - 1], -x[t]) for t in range(1, n)] if n else []
    if isinstance(f, (Once, Historically)):
        a, b = _bounds_in_samples(f.interval, p)
        x = _series(f.operand, trace, mode, io)
        fold, empty = (max, -INF) if isinstance(f, Once) else (min, INF)
        out = []
        for t in range(n):
            lo = 0 if b is None else max(0, t - b)
            hi = t - a + 1
            window = x[lo:hi] if hi > lo else []
            out.append(fold(window) if window else empty)
        return out
    if isinstance(f, (Eventually, Always)):
        a, b = _bounds_in_samples(f.interval, p)
        x = _series(f.operand, trace, mode, io)
        fold, empty = (max, -INF) if isinstance(f, Eventually) else (min, INF)
        out = []
        for t in range(n):
            lo = t + a
            hi = n if b is None else min(t + b + 1, n)
            window = x[lo:hi] if hi > lo else []
            out.append(fold(window) if window else empty)
        return out
    if isinstance(f, Since):
        a, b = _bounds_in_samples(f.interval, p)
        x1 = _series(f.lhs, trace, mode, io)
        x2 = _series(f.rhs, trace, mode, io)
        out = []
        for t in range(n):
            lo = max(0, t - b) if b is not None else 0
            best = -INF
            for tp in range(lo, t - a + 1):
                inner = min((x1[u] for u in range(tp + 1, t + 1)), default=INF)
                best = max(best, min(x2[tp], inner))
            out.append(best)
        return out
    if isinstance(f, Until):
        a, b = _bounds_in_samples(f.interval, p)
        x1 = _series(f.lhs, trace, mode, io)
        x2 = _series(f.rhs, trace, mode, io)
        out = []
        for t in range(n):
            hi = min(t + b, n - 1) if b is not None else n - 1
            best = -INF
            for tp in range(min(t + a, n), hi + 1):
                inner = min((x1[u] for u in range(t, tp)), default=INF)
                best = max(best, min(x2[tp], inner))
            out.append(best)
        return out
    if isinstance(f, Delay):
        d = duration_to_samples(f.amount, p)
        x = _series(f.operand, trace, mode, io)
        return [-INF] * min(d, n) + x[: max(0, n - d)]
    if isinstance(f, DelayedUntil):
        a, b = _bounds_in_samples(f.interval, p)
        shift = duration_to_samples(f.shift, p)
        if shift != b:
            raise ValueError("delayed until must be shifted by its upper bound")
        x1 = _series(f.lhs, trace, mode, io)
        x2 = _series(f.rhs, trace, mode, io)
        out = []
        for t in range(n):
            if t < b:
                out.append(-INF)
                continue
            best = -INF
            for tp in range(t - b + a, t + 1):
                inner = min((x1[u] for u in range(t - b + 1, tp + 1)), default=INF)
                best = max(best, min(x2[tp], inner))
            out.append(best)
        return out
    raise TypeError(f"cannot evaluate {type(f).__name__}")


def offline_series(f: Formula, trace: DiscreteTrace,
                   mode: SemanticsMode = SemanticsMode.STANDARD,
                   io: IoSignature = IoSignature()) -> list:
    missing = used_variables(f) - set(trace.values)
    if missing:
        raise UnknownVariableError(", ".join(sorted(missing)))
    return [ExtReal.from_float(x) for x in _series(f, trace, mode, io)]


def offline_robustness(f: Formula, trace: DiscreteTrace, t: int,
                       mode: SemanticsMode = SemanticsMode.STANDARD,
                       io: IoSignature = IoSignature()) -> ExtReal:
    if not 0 <= t < trace.length:
        raise IndexError(f"sample index {t} outside trace of length {trace.length}")
    return offline_series(f, trace, mode, io)[t]
