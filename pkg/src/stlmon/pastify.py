"""Temporal depth and the rewrite of bounded-future formulas to past form.

The rewrite Pi(f, d) produces a formula whose value at time t equals f's
value at t - d, for d at least the temporal depth H(f).  Future operators
are absorbed on the way down: each Next eats one step of d, each bounded
eventually/always turns into a once/historically over a window shifted by
its upper bound, and until becomes a DelayedUntil node that replays the
until window from buffered history once it has fully slid into the past.

Until needs one wrinkle.  With H1 = H(f1), H2 = H(f2) the depth rule says
H(f1 U_[a,b] f2) = b + max(H1 - 1, H2), so with m = max(H1 - 1, H2) the
operand streams can be realized online as Pi(f1, m + 1) and Pi(f2, m): the
left stream runs one step later than the right one, and the DelayedUntil
node's inner minimum is defined on the half-open window that exactly
compensates.  In dense time there is no "one step", so both operands share
the shift max(H1, H2) and the node reads the plain half-open window.

All functions here expect interval bounds already normalized to one numeric
space: sample counts (discrete) or seconds (dense).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional

from .core import (
    Duration,
    Interval,
    NotDivisibleError,
    UnboundedFutureError,
    duration_to_samples,
)
from .formula import (
    Always,
    And,
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
    SpecModel,
    Until,
    formula_children,
    replace_children,
    walk,
)

_FUTURE_NODES = (Next, Eventually, Always, Until)


@dataclass(frozen=True)
class HorizonReport:
    """Temporal depth H and syntactic past lookback L of a formula.

    Both live in the formula's normalized time space: sample counts or
    seconds.  past_depth is None when an unbounded past operator makes the
    lookback infinite; it exists to bound warm-up regions in tests and in
    the CLI's row suppression, not in any semantics.
    """

    horizon: object
    past_depth: Optional[object]


def _num(d: Duration):
    return int(d.magnitude) if d.is_samples else d.to_seconds()


def _mkdur(x, discrete: bool) -> Duration:
    return Duration.samples(x) if discrete else Duration(Fraction(x), "s")


def _map_time(f: Formula, on_duration) -> Formula:
    children = tuple(_map_time(c, on_duration) for c in formula_children(f))
    g = replace_children(f, *children)
    if isinstance(g, (Once, Historically, Eventually, Always, Since, Until)):
        iv = g.interval
        hi = None if iv.hi is None else on_duration(iv.hi)
        return replace(g, interval=Interval(on_duration(iv.lo), hi))
    if isinstance(g, Delay):
        return replace(g, amount=on_duration(g.amount))
    if isinstance(g, DelayedUntil):
        iv = g.interval
        return replace(
            g,
            interval=Interval(on_duration(iv.lo), on_duration(iv.hi)),
            shift=on_duration(g.shift),
        )
    return g


def scale_to_samples(f: Formula, period: Duration) -> Formula:
    """Convert every bound to a whole sample count; NotDivisible on failure."""
    return _map_time(
        f, lambda d: Duration.samples(duration_to_samples(d, period)))


def scale_to_seconds(f: Formula) -> Formula:
    def to_seconds(d: Duration) -> Duration:
        if d.is_samples:
            if d.magnitude == 0:
                return Duration(Fraction(0), "s")
            raise NotDivisibleError(
                f"bound of {d} has no meaning without a sampling period")
        return Duration(d.to_seconds(), "s")

    return _map_time(f, to_seconds)


def is_past_only(f: Formula) -> bool:
    return not any(isinstance(node, _FUTURE_NODES) for node in walk(f))


def _hi_or_raise(f) -> object:
    if f.interval.hi is None:
        raise UnboundedFutureError(
            f"unbounded {type(f).__name__.lower()} below the formula root")
    return _num(f.interval.hi)


def _H(f: Formula, discrete: bool):
    zero = 0 if discrete else Fraction(0)
    if isinstance(f, Pred):
        return zero
    if isinstance(f, (Not, Prev, Rise, Fall, Once, Historically, Delay)):
        return _H(f.operand, discrete)
    if isinstance(f, (And, Or, Implies, Since, DelayedUntil)):
        return max(_H(f.lhs, discrete), _H(f.rhs, discrete))
    if isinstance(f, Next):
        if not discrete:
            raise ValueError("next has no dense-time interpretation")
        return _H(f.operand, discrete) + 1
    if isinstance(f, (Eventually, Always)):
        return _hi_or_raise(f) + _H(f.operand, discrete)
    if isinstance(f, Until):
        b = _hi_or_raise(f)
        h1 = _H(f.lhs, discrete)
        h2 = _H(f.rhs, discrete)
        if discrete:
            return b + max(h1 - 1, h2)
        return b + max(h1, h2)
    raise TypeError(f"no depth rule for {type(f).__name__}")


def _L(f: Formula, discrete: bool):
    zero = 0 if discrete else Fraction(0)

    def plus(k, l):
        return None if l is None else k + l

    def lmax(*ls):
        if any(l is None for l in ls):
            return None
        return max(ls)

    if isinstance(f, Pred):
        return zero
    if isinstance(f, Not):
        return _L(f.operand, discrete)
    if isinstance(f, (And, Or, Implies)):
        return lmax(_L(f.lhs, discrete), _L(f.rhs, discrete))
    if isinstance(f, (Prev, Rise, Fall)):
        return plus(1, _L(f.operand, discrete))
    if isinstance(f, Next):
        l = _L(f.operand, discrete)
        return None if l is None else max(l - 1, zero)
    if isinstance(f, (Once, Historically)):
        if f.interval.hi is None:
            return None
        return plus(_num(f.interval.hi), _L(f.operand, discrete))
    if isinstance(f, Since):
        if f.interval.hi is None:
            return None
        return plus(_num(f.interval.hi),
                    lmax(_L(f.lhs, discrete), _L(f.rhs, discrete)))
    if isinstance(f, (Eventually, Always)):
        l = _L(f.operand, discrete)
        return None if l is None else max(l - _num(f.interval.lo), zero)
    if isinstance(f, Until):
        l1 = _L(f.lhs, discrete)
        l2 = _L(f.rhs, discrete)
        if l1 is None or l2 is None:
            return None
        return max(l1, l2 - _num(f.interval.lo), zero)
    if isinstance(f, Delay):
        return plus(_num(f.amount), _L(f.operand, discrete))
    if isinstance(f, DelayedUntil):
        l1 = _L(f.lhs, discrete)
        l2 = _L(f.rhs, discrete)
        if l1 is None or l2 is None:
            return None
        b = _num(f.interval.hi)
        a = _num(f.interval.lo)
        # Discrete left operands arrive delayed one extra step, so the
        # node itself reaches only b-1 back into that stream; dense
        # operands share one shift and the reach is the full b.
        lhs_reach = b - 1 if discrete else b
        return max(lhs_reach + l1, b - a + l2, zero)
    raise TypeError(f"no lookback rule for {type(f).__name__}")


def horizon(f: Formula, discrete: bool = True) -> HorizonReport:
    """Depth report for a normalized formula (see module docstring).

    Raises UnboundedFutureError when an unbounded future operator remains;
    apply rewrite_root first for top-level always/eventually.
    """
    return HorizonReport(_H(f, discrete), _L(f, discrete))


def rewrite_root(f: Formula) -> Formula:
    """Top-level unbounded always/eventually read as prefix robustness."""
    if isinstance(f, Always) and f.interval.hi is None:
        return Historically(f.interval, f.operand)
    if isinstance(f, Eventually) and f.interval.hi is None:
        return Once(f.interval, f.operand)
    return f


def _pi(f: Formula, d, discrete: bool):
    zero = 0 if discrete else Fraction(0)
    if is_past_only(f):
        return Delay(_mkdur(d, discrete), f)
    if isinstance(f, Not):
        return Not(_pi(f.operand, d, discrete))
    if isinstance(f, And):
        return And(_pi(f.lhs, d, discrete), _pi(f.rhs, d, discrete))
    if isinstance(f, Or):
        return Or(_pi(f.lhs, d, discrete), _pi(f.rhs, d, discrete))
    if isinstance(f, Implies):
        # not(lhs) or rhs; kept sugared only where the whole subtree is past
        return Or(Not(_pi(f.lhs, d, discrete)), _pi(f.rhs, d, discrete))
    if isinstance(f, (Once, Historically)):
        return replace(f, operand=_pi(f.operand, d, discrete))
    if isinstance(f, Since):
        return Since(f.interval, _pi(f.lhs, d, discrete), _pi(f.rhs, d, discrete))
    if isinstance(f, (Prev, Rise, Fall)):
        return type(f)(_pi(f.operand, d, discrete))
    if isinstance(f, Next):
        assert d >= 1, "depth exhausted below a next"
        return _pi(f.operand, d - 1, discrete)
    if isinstance(f, (Eventually, Always)):
        b = _hi_or_raise(f)
        a = _num(f.interval.lo)
        window = Interval(_mkdur(zero, discrete), _mkdur(b - a, discrete))
        node = Once if isinstance(f, Eventually) else Historically
        return node(window, _pi(f.operand, d - b, discrete))
    if isinstance(f, Until):
        b = _hi_or_raise(f)
        h1 = _H(f.lhs, discrete)
        h2 = _H(f.rhs, discrete)
        if discrete:
            m = max(h1 - 1, h2)
            lhs = _pi(f.lhs, m + 1, discrete)
        else:
            m = max(h1, h2)
            lhs = _pi(f.lhs, m, discrete)
        rhs = _pi(f.rhs, m, discrete)
        assert d - b - m >= 0, "depth exhausted below an until"
        node = DelayedUntil(f.interval, _mkdur(b, discrete), lhs, rhs)
        return Delay(_mkdur(d - b - m, discrete), node)
    raise TypeError(f"no rewrite rule for {type(f).__name__}")


def _simplify(f: Formula) -> Formula:
    children = tuple(_simplify(c) for c in formula_children(f))
    g = replace_children(f, *children)
    if isinstance(g, Delay):
        if g.amount.magnitude == 0:
            return g.operand
        if isinstance(g.operand, Delay):
            merged = Duration(g.amount.magnitude + g.operand.amount.magnitude,
                              g.amount.unit)
            return Delay(merged, g.operand.operand)
    if isinstance(g, Once) and g.interval.hi is not None \
            and g.interval.lo.magnitude == 0 and g.interval.hi.magnitude == 0:
        return g.operand
    return g


def pastify_formula(f: Formula, *, discrete: bool = True, depth=None) -> Formula:
    """Rewrite a normalized bounded-future formula into past-only form.

    depth overrides the shift d (it must be at least H(f)); by default the
    formula's own horizon is used, which makes the rewrite exact.
    """
    if depth is None:
        depth = _H(f, discrete)
    out = _simplify(_pi(f, depth, discrete))
    assert is_past_only(out)
    return out


def pastify(model: SpecModel,
            period: Duration = Duration.samples(1)) -> SpecModel:
    """Discrete pastification pipeline: scale bounds to samples, rewrite a
    top-level unbounded always/eventually, then apply the past rewrite."""
    rewritten = []
    for name, body, pos in model.assignments:
        g = rewrite_root(scale_to_samples(body, period))
        rewritten.append((name, pastify_formula(g), pos))
    return SpecModel(io=model.io, assignments=rewritten,
                     annotations=list(model.annotations))
