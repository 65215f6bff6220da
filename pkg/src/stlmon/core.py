"""Shared value types: extended reals, durations, intervals, io signatures.

Everything in this module is immutable after construction and safe to share
between monitors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional


class SpecError(Exception):
    """Base class for every error raised by this package."""


class ParseError(SpecError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Diagnostic:
    message: str
    line: int = 0
    col: int = 0

    def __str__(self) -> str:
        if self.line:
            return f"{self.line}:{self.col}: {self.message}"
        return self.message


class ValidationError(SpecError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


class NotDivisibleError(SpecError):
    """A duration does not convert to a whole number of samples."""


class UnboundedFutureError(SpecError):
    """A future operator below the formula root carries an infinite bound."""


class OutOfOrderUpdateError(SpecError):
    pass


class MissingVariableError(SpecError):
    pass


class DuplicateVariableError(SpecError):
    pass


class UnknownVariableError(SpecError):
    pass


class NonMonotoneTimeError(SpecError):
    pass


class TraceFormatError(SpecError):
    def __init__(self, message: str, row: int = 0):
        super().__init__(f"row {row}: {message}" if row else message)
        self.row = row


class NonUniformTimeError(TraceFormatError):
    pass


# ---------------------------------------------------------------------------
# Extended reals


class ExtReal:
    """A robustness value: a finite real or one of the two poles.

    The poles exist because interface-aware semantics maps some predicates to
    "satisfied/violated no matter what".  They are injected only at predicate
    leaves and only ever flow through negation, min and max, so this type
    deliberately defines no arithmetic: adding to a pole is a ``TypeError``
    instead of a silent IEEE ``nan``.

    Construct finite values with ``ExtReal(x)``; the poles are the module
    constants ``POS_INF`` and ``NEG_INF``.
    """

    __slots__ = ("_v",)

    def __init__(self, value: float):
        v = float(value)
        if not math.isfinite(v):
            raise ValueError(
                "ExtReal(...) takes a finite value; use POS_INF / NEG_INF"
            )
        self._v = v

    @staticmethod
    def _pole(sign: int) -> "ExtReal":
        obj = object.__new__(ExtReal)
        obj._v = math.inf if sign > 0 else -math.inf
        return obj

    @staticmethod
    def from_float(value: float) -> "ExtReal":
        """Accepts IEEE infinities and maps them onto the poles."""
        v = float(value)
        if math.isnan(v):
            raise ValueError("nan is not a robustness value")
        if math.isinf(v):
            return POS_INF if v > 0 else NEG_INF
        return ExtReal(v)

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self._v)

    def as_float(self) -> float:
        """The underlying float; poles come out as IEEE infinities."""
        return self._v

    def neg(self) -> "ExtReal":
        out = object.__new__(ExtReal)
        out._v = -self._v
        return out

    __neg__ = neg

    def __eq__(self, other) -> bool:
        return isinstance(other, ExtReal) and self._v == other._v

    def __lt__(self, other: "ExtReal") -> bool:
        return self._v < other._v

    def __le__(self, other: "ExtReal") -> bool:
        return self._v <= other._v

    def __gt__(self, other: "ExtReal") -> bool:
        return self._v > other._v

    def __ge__(self, other: "ExtReal") -> bool:
        return self._v >= other._v

    def __hash__(self) -> int:
        return hash(self._v)

    def __repr__(self) -> str:
        if self._v == math.inf:
            return "POS_INF"
        if self._v == -math.inf:
            return "NEG_INF"
        return f"ExtReal({self._v!r})"


POS_INF = ExtReal._pole(+1)
NEG_INF = ExtReal._pole(-1)


def ext_max(values: Iterable[ExtReal]) -> ExtReal:
    """Maximum with the empty-set convention ``ext_max([]) == NEG_INF``."""
    best = NEG_INF
    for v in values:
        if v._v > best._v:
            best = v
    return best


def ext_min(values: Iterable[ExtReal]) -> ExtReal:
    """Minimum with the empty-set convention ``ext_min([]) == POS_INF``."""
    best = POS_INF
    for v in values:
        if v._v < best._v:
            best = v
    return best


def sign_inf(a: float) -> ExtReal:
    """The pole carrying the sign of ``a``: positive gives +oo, zero and
    negative give -oo."""
    if not math.isfinite(a):
        raise ValueError("sign_inf expects a finite value")
    return POS_INF if a > 0 else NEG_INF


# ---------------------------------------------------------------------------
# Durations and intervals

_UNIT_SCALE = {
    "s": Fraction(1),
    "ms": Fraction(1, 10**3),
    "us": Fraction(1, 10**6),
    "ns": Fraction(1, 10**9),
}

TIME_UNITS = tuple(_UNIT_SCALE)


def _decimal_text(value: Fraction) -> str:
    """Exact decimal rendering when the denominator is a power of 10*2*5."""
    num, den = value.numerator, value.denominator
    if den == 1:
        return str(num)
    # scale denominator to a power of ten if possible
    d = den
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return str(float(value))
    digits = max(twos, fives)
    scaled = num * 10**digits // den
    sign = "-" if scaled < 0 else ""
    scaled = abs(scaled)
    whole, frac = divmod(scaled, 10**digits)
    return f"{sign}{whole}.{str(frac).rjust(digits, '0')}"


@dataclass(frozen=True)
class Duration:
    """A nonnegative span of time: either a count of samples or a magnitude
    with a unit from {s, ms, us, ns}.

    Magnitudes are exact rationals so unit conversion never rounds.
    """

    magnitude: Fraction
    unit: str  # "samples" or one of TIME_UNITS

    def __post_init__(self):
        if self.unit != "samples" and self.unit not in _UNIT_SCALE:
            raise ValueError(f"unknown time unit {self.unit!r}")
        if not isinstance(self.magnitude, Fraction):
            object.__setattr__(self, "magnitude", Fraction(self.magnitude))
        if self.magnitude < 0:
            raise ValueError("durations are nonnegative")

    @staticmethod
    def samples(n) -> "Duration":
        return Duration(Fraction(n), "samples")

    @staticmethod
    def of(text: str, unit: str) -> "Duration":
        try:
            mag = Fraction(Decimal(text))
        except (InvalidOperation, ValueError) as exc:
            raise ValueError(f"bad duration magnitude {text!r}") from exc
        return Duration(mag, unit)

    @staticmethod
    def seconds(value) -> "Duration":
        return Duration(Fraction(value), "s")

    @property
    def is_samples(self) -> bool:
        return self.unit == "samples"

    def to_seconds(self) -> Fraction:
        if self.is_samples:
            raise ValueError("a sample count has no length in seconds")
        return self.magnitude * _UNIT_SCALE[self.unit]

    def __str__(self) -> str:
        if self.is_samples:
            return _decimal_text(self.magnitude)
        return f"{_decimal_text(self.magnitude)}{self.unit}"


ZERO_SAMPLES = Duration.samples(0)


def duration_to_samples(d: Duration, period: Duration) -> int:
    """Express ``d`` as a whole number of periods.

    Sample-count durations must already be integers; timed durations divide
    by the period exactly or raise ``NotDivisibleError``.
    """
    if d.is_samples:
        if d.magnitude.denominator != 1:
            raise NotDivisibleError(f"{d} is not a whole number of samples")
        return int(d.magnitude)
    if period.is_samples:
        raise NotDivisibleError(
            f"cannot convert {d} without a timed period (got period in samples)"
        )
    ratio = d.to_seconds() / period.to_seconds()
    if ratio.denominator != 1:
        raise NotDivisibleError(f"{d} is not a multiple of the period {period}")
    return int(ratio)


@dataclass(frozen=True)
class Interval:
    """A temporal window ``[lo, hi]``; ``hi is None`` means unbounded."""

    lo: Duration
    hi: Optional[Duration]

    def __post_init__(self):
        if self.hi is not None:
            lo, hi = self.lo, self.hi
            # Only comparable when the kinds agree (or one side is zero);
            # mixed-unit intervals get checked again after conversion.
            if lo.is_samples == hi.is_samples:
                if (lo.to_seconds() if not lo.is_samples else lo.magnitude) > (
                    hi.to_seconds() if not hi.is_samples else hi.magnitude
                ):
                    raise ValueError(f"empty interval [{lo}:{hi}]")
            elif lo.magnitude == 0:
                pass
            elif hi.magnitude == 0 and lo.magnitude != 0:
                raise ValueError(f"empty interval [{lo}:{hi}]")

    @property
    def unbounded(self) -> bool:
        return self.hi is None

    def __str__(self) -> str:
        hi = "inf" if self.hi is None else str(self.hi)
        return f"[{self.lo}:{hi}]"


FULL_PAST = Interval(ZERO_SAMPLES, None)


# ---------------------------------------------------------------------------
# Semantics modes and io signatures


class SemanticsMode(Enum):
    STANDARD = "standard"
    OUTPUT_ROBUSTNESS = "output-robustness"
    INPUT_VACUITY = "input-vacuity"

    @staticmethod
    def from_string(text: str) -> "SemanticsMode":
        for mode in SemanticsMode:
            if mode.value == text:
                return mode
        raise ValueError(
            f"unknown semantics {text!r}; expected one of "
            + ", ".join(m.value for m in SemanticsMode)
        )


@dataclass(frozen=True)
class IoSignature:
    """Input/output declarations keyed by variable path.

    A dotted path used in a formula inherits the signature of its longest
    declared prefix, so declaring ``cmd`` as input covers ``cmd.linear.x``.
    Paths with no declared prefix are undeclared.
    """

    kinds: dict = field(default_factory=dict)  # path -> "input" | "output"

    def declared(self) -> frozenset:
        return frozenset(self.kinds)

    def resolve(self, path: str) -> Optional[str]:
        if path in self.kinds:
            return self.kinds[path]
        parts = path.split(".")
        for cut in range(len(parts) - 1, 0, -1):
            prefix = ".".join(parts[:cut])
            if prefix in self.kinds:
                return self.kinds[prefix]
        return None

    def with_declaration(self, path: str, kind: str) -> "IoSignature":
        if kind not in ("input", "output"):
            raise ValueError(f"bad io kind {kind!r}")
        if path in self.kinds:
            raise ValueError(f"variable {path} declared twice")
        merged = dict(self.kinds)
        merged[path] = kind
        return IoSignature(merged)

    def __bool__(self) -> bool:
        return bool(self.kinds)
