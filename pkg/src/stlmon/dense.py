"""Event-driven dense-time monitoring over piecewise-constant signals.

Signals are right-continuous step functions; a sample (t, v) means the value
is v from t until the next sample.  Each operator maps step functions to
step functions, so evaluation is a sweep over segment boundaries and there
is never any root-finding.  A monitor accumulates input segments, evaluates
the pastified formulas over whatever prefix is fully determined, and emits
each output's new value changes.

Two conventions need calling out.

The discrete semantics reads the inner minimum of since over the half-open
sample window (t', t], excluding the witness sample itself.  The sweeps here
mirror that per piece: a witness piece contributes its right-operand value
against the inner minimum of the left operand over the pieces strictly newer
than it.  For inputs whose pieces are sample cells this reproduces the
discrete recurrence exactly; for coarser pieces it is the natural reading
where a piece stands for the samples inside it.

Because of that, evaluation keeps every incoming breakpoint: merging equal
adjacent values would fuse sample cells and change what "strictly newer"
means.  Only the public operations and the emitted outputs are normalized.

Next, prev, rise, and fall have no dense-time meaning and are rejected at
construction.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from collections import deque

from .core import (
    Diagnostic,
    ExtReal,
    Interval,
    NonMonotoneTimeError,
    SemanticsMode,
    UnknownVariableError,
    ValidationError,
)
from .formula import (
    And,
    Delay,
    DelayedUntil,
    Fall,
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
    predicate_kinds,
    predicate_margin,
    used_variables,
    walk,
)
from .oracle import predicate_case
from .parser import validate
from .pastify import horizon, pastify_formula, rewrite_root, scale_to_seconds

_INF = math.inf

_SAMPLED_ONLY = (Next, Prev, Rise, Fall)


class PiecewiseSignal:
    """Step function holding values[i] on [starts[i], starts[i+1]), with the
    last piece running to `frontier`, the end of determined knowledge.

    Equal adjacent values are allowed; see the module docstring for why the
    evaluator depends on keeping them.
    """

    __slots__ = ("starts", "values", "frontier")

    def __init__(self, starts, values, frontier):
        starts = list(starts)
        values = list(values)
        if not starts:
            raise ValueError("a signal needs at least one segment")
        if len(starts) != len(values):
            raise ValueError("segment starts and values differ in length")
        if starts[0] < 0:
            raise ValueError("signals begin at or after time zero")
        for earlier, later in zip(starts, starts[1:]):
            if not earlier < later:
                raise ValueError("segment starts must strictly increase")
        if frontier < starts[-1]:
            raise ValueError("frontier precedes the last segment")
        self.starts = starts
        self.values = values
        self.frontier = frontier

    @classmethod
    def constant(cls, value: float) -> "PiecewiseSignal":
        return cls([0.0], [value], _INF)

    @property
    def begin(self) -> float:
        return self.starts[0]

    def piece_at(self, t: float) -> int:
        if not self.begin <= t <= self.frontier:
            raise ValueError(f"time {t} outside [{self.begin}, {self.frontier}]")
        return bisect_right(self.starts, t) - 1

    def value_at(self, t: float) -> float:
        return self.values[self.piece_at(t)]

    def segments(self) -> list:
        return list(zip(self.starts, self.values))

    def normalized(self) -> "PiecewiseSignal":
        starts = []
        values = []
        for t, v in zip(self.starts, self.values):
            if values and values[-1] == v:
                continue
            starts.append(t)
            values.append(v)
        return PiecewiseSignal(starts, values, self.frontier)

    def __eq__(self, other):
        if not isinstance(other, PiecewiseSignal):
            return NotImplemented
        return (self.starts == other.starts and self.values == other.values
                and self.frontier == other.frontier)

    def __repr__(self):
        body = ", ".join(f"({t}, {v})" for t, v in self.segments())
        return f"PiecewiseSignal([{body}], frontier={self.frontier})"


def _sweep(signals, fn):
    """Apply fn over the union of breakpoints on the common domain, keeping
    every breakpoint.  None when the domains do not meet."""
    begin = max(s.begin for s in signals)
    end = min(s.frontier for s in signals)
    if end < begin:
        return None
    cuts = {begin}
    for s in signals:
        cuts.update(t for t in s.starts if begin < t <= end)
    times = sorted(cuts)
    values = [fn(*(s.value_at(t) for s in signals)) for t in times]
    return PiecewiseSignal(times, values, end)


def _bounds_seconds(interval: Interval):
    lo = float(interval.lo.to_seconds())
    hi = None if interval.hi is None else float(interval.hi.to_seconds())
    return lo, hi


def pw_combine(op: str, s1: PiecewiseSignal, s2: PiecewiseSignal) -> PiecewiseSignal:
    """Pointwise min or max on the intersection of the domains."""
    if op not in ("min", "max"):
        raise ValueError(f"bad combine op {op!r}")
    out = _sweep((s1, s2), min if op == "min" else max)
    if out is None:
        raise ValueError("signals do not overlap")
    return out.normalized()


def _window_extremum(kind, s, a, b, frontier):
    identity = -_INF if kind == "max" else _INF
    better = (lambda x, y: x >= y) if kind == "max" else (lambda x, y: x <= y)
    begin = s.begin
    first = begin + a
    starts = s.starts

    # Candidates keep the operand's own breakpoints too, so warm-up regions
    # stay as finely cut as the input (the module docstring explains why).
    cuts = {begin}
    cuts.update(r for r in starts if begin < r <= frontier)
    for r in starts:
        for shifted in (r + a,) if b is None else (r + a, r + b):
            if first <= shifted <= frontier:
                cuts.add(shifted)
    if first <= frontier:
        cuts.add(first)
    candidates = sorted(cuts)

    times = []
    values = []
    if b is None:
        acc = identity
        entered = 0
        for tau in candidates:
            if tau < first:
                times.append(tau)
                values.append(identity)
                continue
            while entered < len(starts) and starts[entered] + a <= tau:
                v = s.values[entered]
                acc = v if better(v, acc) else acc
                entered += 1
            times.append(tau)
            values.append(acc)
        return PiecewiseSignal(times, values, frontier)

    wedge = deque()  # (exit_time, value), values strictly "better" in front
    entered = 0
    for tau in candidates:
        if tau < first:
            times.append(tau)
            values.append(identity)
            continue
        while entered < len(starts) and starts[entered] + a <= tau:
            exit_time = (starts[entered + 1] + b
                         if entered + 1 < len(starts) else _INF)
            v = s.values[entered]
            while wedge and not better(wedge[-1][1], v):
                wedge.pop()
            wedge.append((exit_time, v))
            entered += 1
        while wedge and wedge[0][0] <= tau:
            wedge.popleft()
        times.append(tau)
        values.append(wedge[0][1])
    return PiecewiseSignal(times, values, frontier)


def pw_window_extremum(kind: str, s: PiecewiseSignal, interval: Interval,
                       frontier: float) -> PiecewiseSignal:
    """o(t) = extremum of s over [t-b, t-a] clipped to the signal's domain.

    Defined for t in [s.begin, frontier]; the caller may push frontier up to
    s.frontier + a, beyond which the window is no longer covered.  While the
    clipped window is empty (t < begin + a) the value is the fold identity.
    """
    if kind not in ("min", "max"):
        raise ValueError(f"bad extremum kind {kind!r}")
    a, b = _bounds_seconds(interval)
    if frontier > s.frontier + a:
        raise ValueError("window is not determined through the frontier")
    return _window_extremum(kind, s, a, b, frontier).normalized()


def _merged_pair(s1, s2, end):
    # end may exceed an operand frontier (since reads s2 only back-shifted
    # by its lower bound); the clamped tail values are never consulted.
    begin = max(s1.begin, s2.begin)
    cuts = {begin}
    cuts.update(t for t in s1.starts if begin < t <= end)
    cuts.update(t for t in s2.starts if begin < t <= end)
    times = sorted(cuts)
    v1 = [s1.value_at(min(t, s1.frontier)) for t in times]
    v2 = [s2.value_at(min(t, s2.frontier)) for t in times]
    return times, v1, v2


def _since(s1, s2, a, b, frontier):
    begin = max(s1.begin, s2.begin)
    if frontier < begin:
        raise ValueError(f"empty evaluation domain [{begin}, {frontier}]")
    times, v1, v2 = _merged_pair(s1, s2, frontier)

    def piece(t):
        return bisect_right(times, t) - 1

    def value(tau):
        w_hi = tau - a
        if w_hi < begin:
            return -_INF
        w_lo = begin if b is None else max(tau - b, begin)
        j_hi = piece(w_hi)
        run1 = _INF
        for k in range(piece(tau), j_hi, -1):
            run1 = min(run1, v1[k])
        out = -_INF
        for j in range(j_hi, piece(w_lo) - 1, -1):
            cand = v2[j] if run1 >= v2[j] else run1
            if cand > out:
                out = cand
            run1 = min(run1, v1[j])
        return out

    cuts = {begin}
    for r in times:
        for shifted in (r, r + a) if b is None else (r, r + a, r + b):
            if begin <= shifted <= frontier:
                cuts.add(shifted)
    if begin + a <= frontier:
        cuts.add(begin + a)
    candidates = sorted(cuts)
    return PiecewiseSignal(candidates, [value(t) for t in candidates], frontier)


def pw_since(s1: PiecewiseSignal, s2: PiecewiseSignal, interval: Interval,
             frontier: float) -> PiecewiseSignal:
    """Since over piecewise-constant operands by an event sweep.

    o(t) is the best witness over the pieces meeting [t-b, t-a]: a witness
    piece contributes min of its right-operand value and the inner minimum
    of s1 over the pieces strictly newer than itself (the witness piece's
    own s1 value is excluded; see the module docstring).
    """
    a, b = _bounds_seconds(interval)
    if frontier > min(s1.frontier, s2.frontier + a):
        raise ValueError("since is not determined through the frontier")
    return _since(s1, s2, a, b, frontier).normalized()


def _delayed_until(s1, s2, a, b, frontier):
    begin = max(s1.begin, s2.begin)
    if frontier < begin:
        raise ValueError(f"empty evaluation domain [{begin}, {frontier}]")
    times, v1, v2 = _merged_pair(s1, s2, frontier)

    def piece(t):
        return bisect_right(times, t) - 1

    def value(tau):
        base = tau - b
        if base < begin:
            return -_INF
        j_top = piece(tau)
        j_wlo = piece(base + a) if base + a <= tau else j_top + 1
        run1 = _INF
        out = -_INF
        for k in range(piece(base), j_top + 1):
            if k >= j_wlo:
                witness = max(times[k], base + a)
                inner = min(run1, v1[k]) if witness > max(times[k], base) else run1
                cand = v2[k] if inner >= v2[k] else inner
                if cand > out:
                    out = cand
            run1 = min(run1, v1[k])
        return out

    cuts = {begin}
    for r in times:
        for shifted in (r, r + a, r + b - a, r + b):
            if begin <= shifted <= frontier:
                cuts.add(shifted)
    if begin + b <= frontier:
        cuts.add(begin + b)
    candidates = sorted(cuts)
    return PiecewiseSignal(candidates, [value(t) for t in candidates], frontier)


def _delay_signal(s: PiecewiseSignal, amount: float) -> PiecewiseSignal:
    if amount == 0:
        return s
    begin = s.begin
    starts = [begin]
    values = [-_INF]
    for r in s.starts:
        if begin < r < begin + amount:
            starts.append(r)
            values.append(-_INF)
    for r, v in zip(s.starts, s.values):
        starts.append(r + amount)
        values.append(v)
    return PiecewiseSignal(starts, values, s.frontier + amount)


def _eval(f, env, mode, io):
    if isinstance(f, Pred):
        case = predicate_case(predicate_kinds(f, io), mode)
        names = sorted(used_variables(f))
        if case == "zero":
            fn = lambda *vals: 0.0
        else:
            def fn(*vals):
                m = predicate_margin(f, dict(zip(names, vals)))
                if case == "finite":
                    return m
                return _INF if m > 0 else -_INF
        if not names:
            return PiecewiseSignal.constant(fn())
        return _sweep([env[v] for v in names], fn)
    if isinstance(f, Not):
        s = _eval(f.operand, env, mode, io)
        if s is None:
            return None
        return PiecewiseSignal([*s.starts], [-v for v in s.values], s.frontier)
    if isinstance(f, (And, Or, Implies)):
        s1 = _eval(f.lhs, env, mode, io)
        s2 = _eval(f.rhs, env, mode, io)
        if s1 is None or s2 is None:
            return None
        fn = {And: min, Or: max, Implies: lambda x, y: max(-x, y)}[type(f)]
        return _sweep((s1, s2), fn)
    if isinstance(f, (Once, Historically)):
        s = _eval(f.operand, env, mode, io)
        if s is None:
            return None
        a, b = _bounds_seconds(f.interval)
        kind = "max" if isinstance(f, Once) else "min"
        return _window_extremum(kind, s, a, b, s.frontier + a)
    if isinstance(f, Since):
        s1 = _eval(f.lhs, env, mode, io)
        s2 = _eval(f.rhs, env, mode, io)
        if s1 is None or s2 is None:
            return None
        a, b = _bounds_seconds(f.interval)
        end = min(s1.frontier, s2.frontier + a)
        if end < max(s1.begin, s2.begin):
            return None
        return _since(s1, s2, a, b, end)
    if isinstance(f, Delay):
        s = _eval(f.operand, env, mode, io)
        if s is None:
            return None
        return _delay_signal(s, float(f.amount.to_seconds()))
    if isinstance(f, DelayedUntil):
        s1 = _eval(f.lhs, env, mode, io)
        s2 = _eval(f.rhs, env, mode, io)
        if s1 is None or s2 is None:
            return None
        a, b = _bounds_seconds(f.interval)
        assert float(f.shift.to_seconds()) == b
        end = min(s1.frontier, s2.frontier)
        if end < max(s1.begin, s2.begin):
            return None
        return _delayed_until(s1, s2, a, b, end)
    raise TypeError(f"{type(f).__name__} cannot appear in a dense formula")


class DenseMonitor:
    """Dense-time evaluation of a validated model over sample batches.

    dense_update appends (time, value) events per variable and returns each
    formula's newly determined output segments, normalized across calls.
    Output never extends past the slowest input's frontier and is never
    retracted.
    """

    def __init__(self, model: SpecModel,
                 mode: SemanticsMode = SemanticsMode.STANDARD):
        if isinstance(mode, str):
            mode = SemanticsMode.from_string(mode)
        diagnostics = validate(model)
        for name, body, _pos in model.assignments:
            for node in walk(body):
                if isinstance(node, _SAMPLED_ONLY):
                    kind = type(node).__name__.lower()
                    diagnostics.append(Diagnostic(
                        f"{kind} in formula {name} has no dense-time"
                        " interpretation", None, None))
        if diagnostics:
            raise ValidationError(diagnostics)
        self._mode = mode
        self._io = model.io
        self._formulas = []
        used = set()
        lookbacks = []
        for name, body, _pos in model.assignments:
            used |= used_variables(body)
            rewritten = rewrite_root(scale_to_seconds(body))
            past = pastify_formula(rewritten, discrete=False)
            report = horizon(past, discrete=False)
            lookbacks.append(report.past_depth)
            self._formulas.append((name, past))
        targets = [name for name, _, _ in model.assignments]
        extra = {
            path for path in model.io.declared()
            if not any(u != path and u.startswith(path + ".") for u in used)
            and not any(tg == path or tg.startswith(path + ".") for tg in targets)
        }
        self._required = frozenset(used | extra)
        if any(l is None for l in lookbacks):
            self._lookback = None
        else:
            self._lookback = float(max(lookbacks, default=0))
        self._times = {v: [] for v in self._required}
        self._values = {v: [] for v in self._required}
        self._emitted = {name: None for name, _ in self._formulas}
        self._last_value = {name: None for name, _ in self._formulas}

    @property
    def required_variables(self) -> frozenset:
        return self._required

    def frontier(self):
        """Min over variables of the last received time; None before every
        variable has data."""
        if not self._required:
            return _INF
        if any(not self._times[v] for v in self._required):
            return None
        return min(self._times[v][-1] for v in self._required)

    def dense_update(self, batch) -> dict:
        items = batch.items() if isinstance(batch, dict) else batch
        staged = []
        last_seen = {}
        for var, events in items:
            if var not in self._required:
                raise UnknownVariableError(var)
            if var not in last_seen:
                last_seen[var] = self._times[var][-1] if self._times[var] else -_INF
            for t, v in events:
                t = float(t)
                if t <= last_seen[var]:
                    raise NonMonotoneTimeError(
                        f"sample for {var} at {t} does not advance past"
                        f" {last_seen[var]}")
                if t < 0:
                    raise NonMonotoneTimeError(
                        f"sample for {var} at negative time {t}")
                last_seen[var] = t
                staged.append((var, t, float(v)))
        for var, t, v in staged:
            self._times[var].append(t)
            self._values[var].append(v)

        results = {name: [] for name, _ in self._formulas}
        fn = self.frontier()
        if fn is None:
            return results

        env = {
            v: PiecewiseSignal(self._times[v], self._values[v],
                               self._times[v][-1])
            for v in self._required
        }
        for name, past in self._formulas:
            signal = _eval(past, env, self._mode, self._io)
            if signal is None:
                continue
            end = min(signal.frontier, fn)
            seen = self._emitted[name]
            if seen is not None and end <= seen:
                continue
            for start, value in signal.segments():
                if start > end:
                    break
                if seen is not None and start <= seen:
                    continue
                if value != self._last_value[name]:
                    results[name].append((start, ExtReal.from_float(value)))
                    self._last_value[name] = value
            self._emitted[name] = end

        emitted = list(self._emitted.values())
        if self._lookback is not None and emitted \
                and all(e is not None for e in emitted):
            cut = min(emitted) - self._lookback
            for var in self._required:
                times = self._times[var]
                keep = bisect_right(times, cut) - 1
                if keep > 0:
                    del times[:keep]
                    del self._values[var][:keep]
        return results
