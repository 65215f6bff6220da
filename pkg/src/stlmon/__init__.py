"""Online robustness monitoring for signal temporal logic.

The package parses textual specifications, rewrites bounded-future formulas
into equivalent past-only ones, and evaluates quantitative robustness online
over discrete or densely timed traces.
"""

from .core import (
    Diagnostic,
    Duration,
    DuplicateVariableError,
    ExtReal,
    Interval,
    IoSignature,
    MissingVariableError,
    NEG_INF,
    NonMonotoneTimeError,
    NonUniformTimeError,
    NotDivisibleError,
    OutOfOrderUpdateError,
    POS_INF,
    ParseError,
    SemanticsMode,
    SpecError,
    TraceFormatError,
    UnboundedFutureError,
    UnknownVariableError,
    ValidationError,
    duration_to_samples,
    ext_max,
    ext_min,
    sign_inf,
)
from .bench import BenchResult, run_bench
from .dense import DenseMonitor, PiecewiseSignal, pw_combine, pw_since, pw_window_extremum
from .discrete import DiscreteMonitor
from .oracle import DiscreteTrace, offline_robustness, offline_series, predicate_case
from .parser import format_formula, parse, parse_spec, validate
from .pastify import (
    HorizonReport,
    horizon,
    pastify_formula,
    rewrite_root,
    scale_to_samples,
    scale_to_seconds,
)
from .traceio import read_dense_batches, read_discrete_trace, read_series, write_series

__all__ = [
    "BenchResult",
    "DenseMonitor",
    "Diagnostic",
    "DiscreteMonitor",
    "DiscreteTrace",
    "Duration",
    "DuplicateVariableError",
    "ExtReal",
    "HorizonReport",
    "Interval",
    "IoSignature",
    "MissingVariableError",
    "NEG_INF",
    "NonMonotoneTimeError",
    "NonUniformTimeError",
    "NotDivisibleError",
    "OutOfOrderUpdateError",
    "POS_INF",
    "ParseError",
    "PiecewiseSignal",
    "SemanticsMode",
    "SpecError",
    "TraceFormatError",
    "UnboundedFutureError",
    "UnknownVariableError",
    "ValidationError",
    "duration_to_samples",
    "ext_max",
    "ext_min",
    "format_formula",
    "horizon",
    "offline_robustness",
    "offline_series",
    "parse",
    "parse_spec",
    "pastify_formula",
    "predicate_case",
    "pw_combine",
    "pw_since",
    "pw_window_extremum",
    "read_dense_batches",
    "read_discrete_trace",
    "read_series",
    "rewrite_root",
    "run_bench",
    "scale_to_samples",
    "scale_to_seconds",
    "sign_inf",
    "validate",
    "write_series",
]
