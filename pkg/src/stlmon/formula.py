"""Formula and expression trees.

Nodes are frozen dataclasses; rewrites build new trees.  The two node
families are arithmetic expressions (inside predicates) and formulas.
``Delay`` and ``DelayedUntil`` never come out of the parser: the pastifier
introduces them when it rewrites bounded-future operators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Union

from .core import Duration, Interval, IoSignature

# ---------------------------------------------------------------------------
# Expressions

Expr = Union["Lit", "Var", "Neg", "Abs", "BinOp"]


@dataclass(frozen=True)
class Lit:
    value: Fraction


@dataclass(frozen=True)
class Var:
    path: str
    pos: Optional[tuple] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Neg:
    operand: Expr


@dataclass(frozen=True)
class Abs:
    operand: Expr


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    lhs: Expr
    rhs: Expr


def expr_var_nodes(expr: Expr) -> list:
    if isinstance(expr, Var):
        return [expr]
    if isinstance(expr, Lit):
        return []
    if isinstance(expr, (Neg, Abs)):
        return expr_var_nodes(expr.operand)
    return expr_var_nodes(expr.lhs) + expr_var_nodes(expr.rhs)


def expr_variables(expr: Expr) -> frozenset:
    return frozenset(v.path for v in expr_var_nodes(expr))


def eval_expr(expr: Expr, valuation: dict) -> float:
    if isinstance(expr, Lit):
        return float(expr.value)
    if isinstance(expr, Var):
        return valuation[expr.path]
    if isinstance(expr, Neg):
        return -eval_expr(expr.operand, valuation)
    if isinstance(expr, Abs):
        return abs(eval_expr(expr.operand, valuation))
    a = eval_expr(expr.lhs, valuation)
    b = eval_expr(expr.rhs, valuation)
    if expr.op == "+":
        return a + b
    if expr.op == "-":
        return a - b
    if expr.op == "*":
        return a * b
    return a / b


# ---------------------------------------------------------------------------
# Formulas

COMPARISONS = (">=", ">", "<=", "<", "==", "!=")


@dataclass(frozen=True)
class Pred:
    """An atomic predicate: a comparison, or a bare expression read as its
    own margin."""

    lhs: Expr
    op: Optional[str] = None
    rhs: Optional[Expr] = None

    def __post_init__(self):
        if (self.op is None) != (self.rhs is None):
            raise ValueError("comparison operator and right side go together")
        if self.op is not None and self.op not in COMPARISONS:
            raise ValueError(f"bad comparison {self.op!r}")


@dataclass(frozen=True)
class Not:
    operand: "Formula"


@dataclass(frozen=True)
class And:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class Or:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class Implies:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class Next:
    operand: "Formula"


@dataclass(frozen=True)
class Prev:
    operand: "Formula"


@dataclass(frozen=True)
class Rise:
    operand: "Formula"


@dataclass(frozen=True)
class Fall:
    operand: "Formula"


@dataclass(frozen=True)
class Once:
    interval: Interval
    operand: "Formula"


@dataclass(frozen=True)
class Historically:
    interval: Interval
    operand: "Formula"


@dataclass(frozen=True)
class Eventually:
    interval: Interval
    operand: "Formula"


@dataclass(frozen=True)
class Always:
    interval: Interval
    operand: "Formula"


@dataclass(frozen=True)
class Since:
    interval: Interval
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class Until:
    interval: Interval
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class Delay:
    """Reads its operand ``amount`` of time in the past."""

    amount: Duration
    operand: "Formula"


@dataclass(frozen=True)
class DelayedUntil:
    """Until evaluated ``shift`` behind real time.

    At time t it scans the window that an until anchored at t - shift would
    scan, which by then lies entirely in the past.  The left operand stream
    is expected to run one step further delayed than the right one.
    """

    interval: Interval
    shift: Duration
    lhs: "Formula"
    rhs: "Formula"


Formula = Union[
    Pred, Not, And, Or, Implies, Next, Prev, Rise, Fall,
    Once, Historically, Eventually, Always, Since, Until,
    Delay, DelayedUntil,
]

UNARY_NODES = (Not, Next, Prev, Rise, Fall, Once, Historically,
               Eventually, Always, Delay)
BINARY_NODES = (And, Or, Implies, Since, Until, DelayedUntil)


def formula_children(f: Formula) -> tuple:
    if isinstance(f, Pred):
        return ()
    if isinstance(f, UNARY_NODES):
        return (f.operand,)
    return (f.lhs, f.rhs)


def replace_children(f: Formula, *children: Formula) -> Formula:
    if isinstance(f, Pred):
        assert not children
        return f
    if isinstance(f, UNARY_NODES):
        (child,) = children
        return replace(f, operand=child)
    lhs, rhs = children
    return replace(f, lhs=lhs, rhs=rhs)


def walk(f: Formula):
    """Preorder traversal."""
    yield f
    for child in formula_children(f):
        yield from walk(child)


def pred_var_nodes(pred: Pred) -> list:
    out = expr_var_nodes(pred.lhs)
    if pred.rhs is not None:
        out = out + expr_var_nodes(pred.rhs)
    return out


def used_variables(f: Formula) -> frozenset:
    out = frozenset()
    for node in walk(f):
        if isinstance(node, Pred):
            out |= frozenset(v.path for v in pred_var_nodes(node))
    return out


def predicate_margin(pred: Pred, valuation: dict) -> float:
    """The finite robustness of a predicate before any interface casing.

    Comparisons desugar to signed differences; an equality is the negated
    distance, so it is positive nowhere.  A bare expression is its value.
    """
    lhs = eval_expr(pred.lhs, valuation)
    if pred.op is None:
        out = lhs
    else:
        rhs = eval_expr(pred.rhs, valuation)
        if pred.op in (">=", ">"):
            out = lhs - rhs
        elif pred.op in ("<=", "<"):
            out = rhs - lhs
        elif pred.op == "==":
            out = -abs(lhs - rhs)
        else:
            out = abs(lhs - rhs)
    if not math.isfinite(out):
        raise ValueError(f"predicate produced a non-finite value: {out!r}")
    return out


def predicate_kinds(pred: Pred, io: IoSignature) -> frozenset:
    """Resolved io kinds of the variables a predicate reads.

    With no declarations at all, every variable counts as an output.
    Undeclared variables under a nonempty signature have already been
    rejected by validation, so ``resolve`` is total here.
    """
    names = used_variables(pred)
    if not io:
        return frozenset(("output",)) if names else frozenset()
    return frozenset(io.resolve(name) for name in names)


# ---------------------------------------------------------------------------
# Specification model


@dataclass
class SpecModel:
    """A parsed specification: declarations, named formulas, annotations.

    Assignments keep source order and duplicates so the validator can point
    at a clashing name; ``formulas`` is the deduplicated (first-wins) view.
    """

    io: IoSignature = field(default_factory=IoSignature)
    assignments: list = field(default_factory=list)  # (name, Formula, pos)
    annotations: list = field(default_factory=list)  # (name, raw text)

    @property
    def formulas(self) -> dict:
        out = {}
        for name, body, _pos in self.assignments:
            out.setdefault(name, body)
        return out

    def variables(self) -> frozenset:
        out = frozenset()
        for _name, body, _pos in self.assignments:
            out |= used_variables(body)
        return out
