"""Online discrete-time monitoring with state bounded by the formula windows.

Each pastified formula compiles to a postorder list of small state machines,
one per node.  An update pushes one sample through the list: pointwise nodes
are stateless, delays and bounded windows keep ring buffers, sliding extrema
use monotone wedges, and the unbounded past operators collapse to scalar
recurrences.  Buffer capacities are fixed at construction from the interval
bounds, so memory never depends on how many updates have been processed.

Values are plain floats internally with math.inf as the poles; update()
wraps results into ExtReal at the boundary.
"""

from __future__ import annotations

import math
from collections import deque

from .core import (
    Duration,
    DuplicateVariableError,
    ExtReal,
    MissingVariableError,
    OutOfOrderUpdateError,
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
    Not,
    Once,
    Or,
    Pred,
    Prev,
    Rise,
    Since,
    SpecModel,
    formula_children,
    predicate_kinds,
    predicate_margin,
    used_variables,
)
from .oracle import predicate_case
from .parser import validate
from .pastify import horizon, pastify_formula, rewrite_root, scale_to_samples

_INF = math.inf


class Wedge:
    """Sliding-window extremum in amortized O(1) per sample.

    The deque holds (index, value) pairs with values strictly monotone from
    the front (decreasing for a max-wedge, increasing for a min-wedge), so
    the front pair is the extremum of the last `width` samples.  Each sample
    enters and leaves at most once; push/pop totals and the high-water mark
    feed the resource tests.
    """

    __slots__ = ("width", "kind", "_q", "pushes", "pops", "max_len")

    def __init__(self, width: int, kind: str):
        if width < 1:
            raise ValueError("window width must be at least one sample")
        if kind not in ("max", "min"):
            raise ValueError(f"bad wedge kind {kind!r}")
        self.width = width
        self.kind = kind
        self._q = deque()
        self.pushes = 0
        self.pops = 0
        self.max_len = 0

    def update(self, t: int, value: float) -> float:
        q = self._q
        if self.kind == "max":
            while q and q[-1][1] <= value:
                q.pop()
                self.pops += 1
        else:
            while q and q[-1][1] >= value:
                q.pop()
                self.pops += 1
        q.append((t, value))
        self.pushes += 1
        oldest = t - self.width + 1
        while q[0][0] < oldest:
            q.popleft()
            self.pops += 1
        if len(q) > self.max_len:
            self.max_len = len(q)
        return q[0][1]

    def __len__(self) -> int:
        return len(self._q)

    def reset(self) -> None:
        self._q.clear()
        self.pushes = 0
        self.pops = 0
        self.max_len = 0


class _PredState:
    cells = 0
    wedges = ()

    def __init__(self, pred: Pred, mode: SemanticsMode, io):
        self._pred = pred
        self._case = predicate_case(predicate_kinds(pred, io), mode)

    def step(self, t, args, valuation):
        if self._case == "zero":
            return 0.0
        margin = predicate_margin(self._pred, valuation)
        if self._case == "finite":
            return margin
        return _INF if margin > 0 else -_INF

    def reset(self):
        pass


class _FnState:
    cells = 0
    wedges = ()

    def __init__(self, fn):
        self._fn = fn

    def step(self, t, args, valuation):
        return self._fn(*args)

    def reset(self):
        pass


class _PrevState:
    cells = 1
    wedges = ()

    def __init__(self):
        self._last = -_INF

    def step(self, t, args, valuation):
        out = self._last if t else -_INF
        self._last = args[0]
        return out

    def reset(self):
        self._last = -_INF


class _EdgeState:
    """Shared shape of rise and fall: compare the sample with its predecessor."""

    cells = 1
    wedges = ()

    def __init__(self, rising: bool):
        self._rising = rising
        self._last = -_INF

    def step(self, t, args, valuation):
        v = args[0]
        if t == 0:
            out = -_INF
        elif self._rising:
            out = min(-self._last, v)
        else:
            out = min(self._last, -v)
        self._last = v
        return out

    def reset(self):
        self._last = -_INF


class _DelayState:
    wedges = ()

    def __init__(self, amount: int):
        self._d = amount
        self._buf = [-_INF] * amount
        self.cells = amount

    def step(self, t, args, valuation):
        if self._d == 0:
            return args[0]
        i = t % self._d
        out = self._buf[i]
        self._buf[i] = args[0]
        return out

    def reset(self):
        self._buf = [-_INF] * self._d


class _WindowState:
    """Once/Historically over [a, b] or [a, inf): delay-by-a plus either a
    wedge of width b-a+1 or a scalar running extremum."""

    def __init__(self, a: int, b, kind: str):
        self._a = a
        self._identity = -_INF if kind == "max" else _INF
        self._kind = kind
        self._ring = [0.0] * a
        if b is None:
            self._wedge = None
            self._acc = self._identity
            self.cells = a + 1
        else:
            self._wedge = Wedge(b - a + 1, kind)
            self.cells = a + self._wedge.width
        self.wedges = () if self._wedge is None else (self._wedge,)

    def step(self, t, args, valuation):
        v = args[0]
        if self._a:
            i = t % self._a
            z = self._ring[i]
            self._ring[i] = v
            if t < self._a:
                return self._identity
        else:
            z = v
        if self._wedge is None:
            if self._kind == "max":
                self._acc = max(self._acc, z)
            else:
                self._acc = min(self._acc, z)
            return self._acc
        return self._wedge.update(t, z)

    def reset(self):
        self._ring = [0.0] * self._a
        if self._wedge is None:
            self._acc = self._identity
        else:
            self._wedge.reset()


class _SinceState:
    """Since over [a, inf).

    The classic recurrence y[t] = max(x2[t], min(x1[t], y[t-1])) handles
    a = 0 directly.  For a > 0 the same recurrence runs a samples late on
    buffered operands, and the result joins the running minimum of x1 over
    the a newest samples.
    """

    def __init__(self, a: int):
        self._a = a
        self._ring1 = [0.0] * a
        self._ring2 = [0.0] * a
        self._y = -_INF
        self._wedge = Wedge(a, "min") if a else None
        self.cells = 2 * a + 1 + a
        self.wedges = () if self._wedge is None else (self._wedge,)

    def step(self, t, args, valuation):
        v1, v2 = args
        if self._a == 0:
            self._y = max(v2, min(v1, self._y))
            return self._y
        recent = self._wedge.update(t, v1)
        i = t % self._a
        if t >= self._a:
            z1 = self._ring1[i]
            z2 = self._ring2[i]
            self._y = max(z2, min(z1, self._y))
        self._ring1[i] = v1
        self._ring2[i] = v2
        if t < self._a:
            return -_INF
        return min(self._y, recent)

    def reset(self):
        self._ring1 = [0.0] * self._a
        self._ring2 = [0.0] * self._a
        self._y = -_INF
        if self._wedge is not None:
            self._wedge.reset()


class _SinceBoundedState:
    """Since over [a, b]: ring buffers of the last b+1 operand samples and a
    descending scan carrying the partial minimum of x1 over (t', t]."""

    wedges = ()

    def __init__(self, a: int, b: int):
        self._a = a
        self._b = b
        self._size = b + 1
        self._ring1 = [0.0] * self._size
        self._ring2 = [0.0] * self._size
        self.cells = 2 * self._size

    def step(self, t, args, valuation):
        size = self._size
        self._ring1[t % size] = args[0]
        self._ring2[t % size] = args[1]
        out = -_INF
        run1 = _INF
        lo = max(t - self._b, 0)
        hi = t - self._a
        for tp in range(t, lo - 1, -1):
            if tp <= hi:
                out = max(out, min(self._ring2[tp % size], run1))
            run1 = min(run1, self._ring1[tp % size])
        return out

    def reset(self):
        self._ring1 = [0.0] * self._size
        self._ring2 = [0.0] * self._size


class _DelayedUntilState:
    """Replays the until window once it has fully slid into the past: the
    value at t is the until robustness of the buffered operand streams at
    t-b, with the left stream already delayed one extra step upstream."""

    wedges = ()

    def __init__(self, a: int, b: int):
        self._a = a
        self._b = b
        self._size = b + 1
        self._ring1 = [0.0] * self._size
        self._ring2 = [0.0] * self._size
        self.cells = 2 * self._size

    def step(self, t, args, valuation):
        size = self._size
        self._ring1[t % size] = args[0]
        self._ring2[t % size] = args[1]
        if t < self._b:
            return -_INF
        base = t - self._b
        out = -_INF
        run1 = _INF
        for tp in range(base, t + 1):
            if tp > base:
                run1 = min(run1, self._ring1[tp % size])
            if tp >= base + self._a:
                out = max(out, min(self._ring2[tp % size], run1))
        return out

    def reset(self):
        self._ring1 = [0.0] * self._size
        self._ring2 = [0.0] * self._size


_POINTWISE = {
    Not: lambda a: -a,
    And: min,
    Or: max,
    Implies: lambda a, b: max(-a, b),
}


def _samples(duration: Duration) -> int:
    return int(duration.magnitude)


def _build(f, mode, io, states):
    kids = tuple(_build(c, mode, io, states) for c in formula_children(f))
    if isinstance(f, Pred):
        state = _PredState(f, mode, io)
    elif type(f) in _POINTWISE:
        state = _FnState(_POINTWISE[type(f)])
    elif isinstance(f, Prev):
        state = _PrevState()
    elif isinstance(f, Rise):
        state = _EdgeState(rising=True)
    elif isinstance(f, Fall):
        state = _EdgeState(rising=False)
    elif isinstance(f, Delay):
        state = _DelayState(_samples(f.amount))
    elif isinstance(f, (Once, Historically)):
        hi = None if f.interval.hi is None else _samples(f.interval.hi)
        kind = "max" if isinstance(f, Once) else "min"
        state = _WindowState(_samples(f.interval.lo), hi, kind)
    elif isinstance(f, Since):
        a = _samples(f.interval.lo)
        if f.interval.hi is None:
            state = _SinceState(a)
        else:
            state = _SinceBoundedState(a, _samples(f.interval.hi))
    elif isinstance(f, DelayedUntil):
        b = _samples(f.interval.hi)
        assert _samples(f.shift) == b, "delayed until must be shifted by its bound"
        state = _DelayedUntilState(_samples(f.interval.lo), b)
    else:
        raise TypeError(f"{type(f).__name__} cannot appear in a pastified formula")
    states.append((state, kids))
    return len(states) - 1


class DiscreteMonitor:
    """Time-triggered evaluation of a validated model, one value per update.

    The model's formulas are pastified at construction; update(t, samples)
    then returns each formula's pastified robustness at index t, which
    equals the original formula's robustness at t - H once t >= L + H.
    """

    def __init__(self, model: SpecModel,
                 period: Duration = Duration.samples(1),
                 mode: SemanticsMode = SemanticsMode.STANDARD):
        if isinstance(mode, str):
            mode = SemanticsMode.from_string(mode)
        diagnostics = validate(model)
        if diagnostics:
            raise ValidationError(diagnostics)
        self._io = model.io
        self.reports = {}
        self._programs = []
        used = set()
        for name, body, _pos in model.assignments:
            used |= used_variables(body)
            rewritten = rewrite_root(scale_to_samples(body, period))
            self.reports[name] = horizon(rewritten)
            states = []
            _build(pastify_formula(rewritten), mode, model.io, states)
            self._programs.append((name, states))
        targets = [name for name, _, _ in model.assignments]
        extra = {
            path for path in model.io.declared()
            if not any(u != path and u.startswith(path + ".") for u in used)
            and not any(tg == path or tg.startswith(path + ".") for tg in targets)
        }
        self._required = frozenset(used | extra)
        self._t = 0

    @property
    def required_variables(self) -> frozenset:
        return self._required

    def update(self, t: int, samples) -> dict:
        if t != self._t:
            raise OutOfOrderUpdateError(f"expected update {self._t}, got {t}")
        pairs = samples.items() if isinstance(samples, dict) else samples
        valuation = {}
        for name, value in pairs:
            if name in valuation:
                raise DuplicateVariableError(name)
            valuation[name] = float(value)
        missing = self._required - valuation.keys()
        if missing:
            raise MissingVariableError(", ".join(sorted(missing)))
        for name in valuation:
            if name not in self._required:
                raise UnknownVariableError(name)
        results = {}
        for name, states in self._programs:
            values = []
            for state, kids in states:
                values.append(
                    state.step(t, tuple(values[k] for k in kids), valuation))
            results[name] = ExtReal.from_float(values[-1])
        self._t = t + 1
        return results

    def reset(self) -> None:
        for _name, states in self._programs:
            for state, _kids in states:
                state.reset()
        self._t = 0

    def state_cells(self) -> int:
        """Allocated buffer, wedge, and accumulator capacity, a constant."""
        return sum(state.cells
                   for _name, states in self._programs
                   for state, _kids in states)

    def wedge_stats(self) -> tuple:
        """(pushes, pops, longest length) summed over every wedge."""
        pushes = pops = longest = 0
        for _name, states in self._programs:
            for state, _kids in states:
                for wedge in state.wedges:
                    pushes += wedge.pushes
                    pops += wedge.pops
                    longest = max(longest, wedge.max_len)
        return pushes, pops, longest
