"""Specification text to SpecModel, and the inverse formatter.

Hand-written tokenizer plus recursive descent.  Binding strength, weakest
first: implies, until/since, or, and, not / temporal prefixes, comparison,
additive, multiplicative, unary minus / abs / parens / atoms.

A parenthesized group is parsed as a formula; when it turns out to be a bare
arithmetic expression continued by an arithmetic or comparison operator, it
is unwrapped back into the expression grammar.  That keeps one grammar for
`(a + b) > 2` and `(a > 2) and b > 1` without backtracking.
"""

from __future__ import annotations

import re
from bisect import bisect_right
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Optional

from .core import (
    Diagnostic,
    Duration,
    Interval,
    IoSignature,
    ParseError,
    ValidationError,
    ZERO_SAMPLES,
    _decimal_text,
)
from .formula import (
    Abs,
    Always,
    And,
    BinOp,
    Delay,
    DelayedUntil,
    Eventually,
    Fall,
    Formula,
    Historically,
    Implies,
    Lit,
    Neg,
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
    Var,
    pred_var_nodes,
    walk,
)

KEYWORDS = frozenset(
    (
        "input", "output", "from", "import",
        "always", "eventually", "once", "historically",
        "next", "prev", "rise", "fall", "until", "since",
        "not", "and", "or", "implies", "abs",
    )
)

_TEMPORAL_WINDOW = {
    "always": Always,
    "eventually": Eventually,
    "once": Once,
    "historically": Historically,
}
_TEMPORAL_SHIFT = {"next": Next, "prev": Prev, "rise": Rise, "fall": Fall}

_CMP_OPS = ("<=", ">=", "==", "!=", "<", ">")
_EXPR_CONT = _CMP_OPS + ("+", "-", "*", "/")
_TIME_UNITS = ("s", "ms", "us", "ns")
_EXPR_NODES = (Lit, Var, Neg, Abs, BinOp)

_NUM_RE = re.compile(r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*(?:\.[A-Za-z_][A-Za-z0-9_]*)*")
_PUNCTS = ("<=", ">=", "==", "!=", "<", ">", "=",
           "+", "-", "*", "/", "(", ")", "[", "]", ":", ",", "@")


@dataclass(frozen=True)
class Token:
    kind: str  # num | ident | punct | eof
    text: str
    line: int
    col: int
    offset: int


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.i = 0
        self._cache = None  # (token, end index)
        self._line_starts = [0]
        for idx, ch in enumerate(text):
            if ch == "\n":
                self._line_starts.append(idx + 1)

    def _pos(self, offset: int):
        line = bisect_right(self._line_starts, offset)
        return line, offset - self._line_starts[line - 1] + 1

    def _skip_ws(self, i: int) -> int:
        text = self.text
        n = len(text)
        while i < n:
            c = text[i]
            if c == "#":
                while i < n and text[i] != "\n":
                    i += 1
            elif c.isspace():
                i += 1
            else:
                break
        return i

    def _lex(self):
        i = self._skip_ws(self.i)
        text = self.text
        if i >= len(text):
            line, col = self._pos(len(text))
            return Token("eof", "", line, col, len(text)), i
        line, col = self._pos(i)
        m = _NUM_RE.match(text, i)
        if m:
            return Token("num", m.group(), line, col, i), m.end()
        m = _IDENT_RE.match(text, i)
        if m:
            return Token("ident", m.group(), line, col, i), m.end()
        for p in _PUNCTS:
            if text.startswith(p, i):
                return Token("punct", p, line, col, i), i + len(p)
        raise ParseError(f"unexpected character {text[i]!r}", line, col)

    def peek(self) -> Token:
        if self._cache is None:
            self._cache = self._lex()
        return self._cache[0]

    def next(self) -> Token:
        tok, end = self._cache if self._cache is not None else self._lex()
        self._cache = None
        self.i = end
        return tok

    def rest_of_line(self) -> str:
        """Raw text to end of line, comments stripped.  Only valid when no
        token is buffered."""
        assert self._cache is None
        text = self.text
        j = self.i
        while j < len(text) and text[j] != "\n":
            j += 1
        raw = text[self.i:j]
        self.i = j
        cut = raw.find("#")
        if cut != -1:
            raw = raw[:cut]
        return raw.strip()

    def raw_parens(self) -> str:
        """Verbatim text up to the ')' matching an already-consumed '('."""
        assert self._cache is None
        text = self.text
        start = self.i
        depth = 1
        j = start
        while j < len(text):
            c = text[j]
            if c == "(":
                depth += 1
            elif c == ")":
                depth -= 1
                if depth == 0:
                    break
            j += 1
        if depth:
            line, col = self._pos(start)
            raise ParseError("unterminated annotation", line, col)
        self.i = j + 1
        return text[start:j].strip()


class _Parser:
    def __init__(self, text: str):
        self.lx = _Lexer(text)

    def _err(self, message: str, tok: Optional[Token] = None):
        tok = tok or self.lx.peek()
        raise ParseError(message, tok.line, tok.col)

    def _keyword(self, tok: Token) -> Optional[str]:
        if tok.kind == "ident":
            low = tok.text.lower()
            if low in KEYWORDS:
                return low
        return None

    def _at_keyword(self, *names: str) -> bool:
        return self._keyword(self.lx.peek()) in names

    def _expect_punct(self, p: str) -> Token:
        tok = self.lx.peek()
        if tok.kind != "punct" or tok.text != p:
            found = repr(tok.text) if tok.text else "end of input"
            self._err(f"expected {p!r}, found {found}")
        return self.lx.next()

    def _expect_plain_ident(self, what: str) -> Token:
        tok = self.lx.peek()
        if tok.kind != "ident" or self._keyword(tok):
            self._err(f"expected {what}")
        return self.lx.next()

    # -- statements

    def parse_model(self) -> SpecModel:
        io = IoSignature()
        assignments = []
        annotations = []
        while True:
            tok = self.lx.peek()
            if tok.kind == "eof":
                break
            if tok.kind == "punct" and tok.text == "@":
                self.lx.next()
                name = self._expect_plain_ident("annotation name")
                self._expect_punct("(")
                annotations.append((name.text, self.lx.raw_parens()))
                continue
            kw = self._keyword(tok)
            if kw in ("from", "import"):
                self.lx.next()
                raw = self.lx.rest_of_line()
                annotations.append(("import", f"{tok.text} {raw}".strip()))
                continue
            if kw in ("input", "output"):
                self.lx.next()
                path = self._expect_plain_ident("variable name")
                nxt = self.lx.peek()
                if nxt.kind == "ident" and nxt.line == tok.line and not self._keyword(nxt):
                    path = self.lx.next()  # first ident was an opaque type
                try:
                    io = io.with_declaration(path.text, kw)
                except ValueError as exc:
                    self._err(str(exc), path)
                continue
            if kw is not None:
                self._err(f"unexpected keyword {tok.text!r}")
            if tok.kind != "ident":
                found = repr(tok.text) if tok.text else "end of input"
                self._err(f"expected a statement, found {found}")
            name = self.lx.next()
            self._expect_punct("=")
            body = self._formula()
            assignments.append((name.text, body, (name.line, name.col)))
        return SpecModel(io=io, assignments=assignments, annotations=annotations)

    # -- formula grammar, weakest binding first

    def _formula(self) -> Formula:
        return self._implies()

    def _implies(self):
        lhs = self._until_since()
        if self._at_keyword("implies"):
            self.lx.next()
            return Implies(lhs, self._implies())
        return lhs

    def _until_since(self):
        lhs = self._or()
        while self._at_keyword("until", "since"):
            kw = self.lx.next()
            interval = self._optional_interval()
            if interval is None:
                interval = Interval(ZERO_SAMPLES, None)
            rhs = self._or()
            node = Until if kw.text.lower() == "until" else Since
            lhs = node(interval, lhs, rhs)
        return lhs

    def _or(self):
        lhs = self._and()
        while self._at_keyword("or"):
            self.lx.next()
            lhs = Or(lhs, self._and())
        return lhs

    def _and(self):
        lhs = self._prefix()
        while self._at_keyword("and"):
            self.lx.next()
            lhs = And(lhs, self._prefix())
        return lhs

    def _prefix(self):
        kw = self._keyword(self.lx.peek())
        if kw == "not":
            self.lx.next()
            return Not(self._prefix())
        if kw in _TEMPORAL_WINDOW:
            self.lx.next()
            interval = self._optional_interval()
            if interval is None:
                interval = Interval(ZERO_SAMPLES, None)
            return _TEMPORAL_WINDOW[kw](interval, self._prefix())
        if kw in _TEMPORAL_SHIFT:
            self.lx.next()
            return _TEMPORAL_SHIFT[kw](self._prefix())
        return self._comparison()

    # -- predicate grammar; these levels pass finished formulas through

    @staticmethod
    def _as_expr(value):
        if isinstance(value, Pred) and value.op is None:
            return value.lhs
        return value

    def _comparison(self):
        first = self._additive()
        tok = self.lx.peek()
        if tok.kind == "punct" and tok.text in _CMP_OPS:
            if not isinstance(first, _EXPR_NODES):
                self._err("left side of a comparison must be arithmetic")
            self.lx.next()
            second = self._as_expr(self._additive())
            if not isinstance(second, _EXPR_NODES):
                self._err("right side of a comparison must be arithmetic")
            return Pred(first, tok.text, second)
        if isinstance(first, _EXPR_NODES):
            return Pred(first)
        return first

    def _additive(self):
        lhs = self._multiplicative()
        while isinstance(lhs, _EXPR_NODES):
            tok = self.lx.peek()
            if tok.kind != "punct" or tok.text not in ("+", "-"):
                break
            self.lx.next()
            rhs = self._as_expr(self._multiplicative())
            if not isinstance(rhs, _EXPR_NODES):
                self._err("expected an arithmetic operand")
            lhs = BinOp(tok.text, lhs, rhs)
        return lhs

    def _multiplicative(self):
        lhs = self._unary()
        while isinstance(lhs, _EXPR_NODES):
            tok = self.lx.peek()
            if tok.kind != "punct" or tok.text not in ("*", "/"):
                break
            self.lx.next()
            rhs = self._as_expr(self._unary())
            if not isinstance(rhs, _EXPR_NODES):
                self._err("expected an arithmetic operand")
            lhs = BinOp(tok.text, lhs, rhs)
        return lhs

    def _unary(self):
        tok = self.lx.peek()
        if tok.kind == "punct" and tok.text == "-":
            self.lx.next()
            operand = self._as_expr(self._unary())
            if not isinstance(operand, _EXPR_NODES):
                self._err("expected an arithmetic operand", tok)
            return Neg(operand)
        kw = self._keyword(tok)
        if kw == "abs":
            self.lx.next()
            self._expect_punct("(")
            inner = self._as_expr(self._additive())
            if not isinstance(inner, _EXPR_NODES):
                self._err("abs() takes an arithmetic argument")
            self._expect_punct(")")
            return Abs(inner)
        if tok.kind == "punct" and tok.text == "(":
            self.lx.next()
            inner = self._formula()
            self._expect_punct(")")
            nxt = self.lx.peek()
            if (
                isinstance(inner, Pred)
                and inner.op is None
                and nxt.kind == "punct"
                and nxt.text in _EXPR_CONT
            ):
                return inner.lhs
            return inner
        if tok.kind == "num":
            self.lx.next()
            return Lit(Fraction(Decimal(tok.text)))
        if tok.kind == "ident" and kw is None:
            self.lx.next()
            return Var(tok.text, (tok.line, tok.col))
        if tok.kind == "eof":
            self._err("unexpected end of input")
        self._err(f"unexpected {tok.text!r}")

    # -- intervals

    def _optional_interval(self) -> Optional[Interval]:
        tok = self.lx.peek()
        if tok.kind != "punct" or tok.text != "[":
            return None
        self.lx.next()
        lo = self._bound()
        sep = self.lx.peek()
        if sep.kind == "punct" and sep.text in (":", ","):
            self.lx.next()
        else:
            self._err("expected ':' or ',' in interval")
        nxt = self.lx.peek()
        if nxt.kind == "ident" and nxt.text.lower() == "inf":
            self.lx.next()
            hi = None
        else:
            hi = self._bound()
        self._expect_punct("]")
        try:
            return Interval(lo, hi)
        except ValueError as exc:
            raise ParseError(str(exc), tok.line, tok.col) from None

    def _bound(self) -> Duration:
        tok = self.lx.peek()
        if tok.kind != "num":
            self._err("expected a number in interval bound")
        self.lx.next()
        unit = "samples"
        nxt = self.lx.peek()
        if nxt.kind == "ident" and nxt.text.lower() in _TIME_UNITS:
            unit = self.lx.next().text.lower()
        return Duration.of(tok.text, unit)


def parse(text: str) -> SpecModel:
    """Syntax only; raises ParseError."""
    return _Parser(text).parse_model()


def validate(model: SpecModel) -> list:
    """Checks a SpecModel; returns diagnostics instead of raising."""
    diags = []
    seen = set()
    for name, _body, pos in model.assignments:
        line, col = pos if pos else (0, 0)
        if name in seen:
            diags.append(Diagnostic(f"duplicate formula name {name!r}", line, col))
        seen.add(name)
    declared = bool(model.io)
    for _name, body, pos in model.assignments:
        line, col = pos if pos else (0, 0)
        for node in walk(body):
            if declared and isinstance(node, Pred):
                for var in pred_var_nodes(node):
                    vline, vcol = var.pos if var.pos else (line, col)
                    if model.io.resolve(var.path) is None:
                        diags.append(Diagnostic(
                            f"undeclared variable {var.path!r}", vline, vcol))
            elif isinstance(node, Until) and node.interval.hi is None:
                diags.append(Diagnostic(
                    "until needs a finite upper bound for online monitoring",
                    line, col))
    return diags


def parse_spec(text: str) -> SpecModel:
    """Parse and validate; the one entry point callers should use."""
    model = parse(text)
    diags = validate(model)
    if diags:
        raise ValidationError(diags)
    return model


# ---------------------------------------------------------------------------
# Formatting

_EXPR_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}

_WINDOW_KEYWORDS = {
    Once: "once",
    Historically: "historically",
    Eventually: "eventually",
    Always: "always",
}
_SHIFT_KEYWORDS = {Next: "next", Prev: "prev", Rise: "rise", Fall: "fall"}
_BOOL_KEYWORDS = {And: "and", Or: "or", Implies: "implies"}

_PARENTHESIZED_OPERANDS = (Not, And, Or, Implies, Since, Until, DelayedUntil)


def format_expr(expr, min_prec: int = 0) -> str:
    if isinstance(expr, Lit):
        return _decimal_text(expr.value)
    if isinstance(expr, Var):
        return expr.path
    if isinstance(expr, Abs):
        return f"abs({format_expr(expr.operand)})"
    if isinstance(expr, Neg):
        return f"-{format_expr(expr.operand, 3)}"
    prec = _EXPR_PREC[expr.op]
    out = f"{format_expr(expr.lhs, prec)} {expr.op} {format_expr(expr.rhs, prec + 1)}"
    return f"({out})" if prec < min_prec else out


def _format_interval(iv: Interval) -> str:
    hi = "inf" if iv.hi is None else str(iv.hi)
    return f"[{iv.lo}:{hi}]"


def _is_default_interval(iv: Interval) -> bool:
    return iv.hi is None and iv.lo.magnitude == 0


def _operand(f: Formula) -> str:
    text = format_formula(f)
    if isinstance(f, _PARENTHESIZED_OPERANDS):
        return f"({text})"
    return text


def format_formula(f: Formula) -> str:
    """Canonical text; parsing it back yields a structurally equal formula.

    The pastifier's internal nodes print as `delay[d]` and `until@[d]`; those
    spellings are for inspection output and are not part of the input
    grammar.
    """
    if isinstance(f, Pred):
        if f.op is None:
            return format_expr(f.lhs)
        return f"{format_expr(f.lhs)} {f.op} {format_expr(f.rhs)}"
    if isinstance(f, Not):
        inner = format_formula(f.operand)
        if isinstance(f.operand, (Delay, DelayedUntil)):
            return f"not {inner}"
        return f"not ({inner})"
    if isinstance(f, (And, Or, Implies)):
        kw = _BOOL_KEYWORDS[type(f)]
        return f"{_operand(f.lhs)} {kw} {_operand(f.rhs)}"
    if isinstance(f, (Since, Until)):
        kw = "since" if isinstance(f, Since) else "until"
        if not _is_default_interval(f.interval):
            kw += _format_interval(f.interval)
        return f"{_operand(f.lhs)} {kw} {_operand(f.rhs)}"
    if isinstance(f, DelayedUntil):
        kw = f"until@[{f.shift}]{_format_interval(f.interval)}"
        return f"{_operand(f.lhs)} {kw} {_operand(f.rhs)}"
    if isinstance(f, (Once, Historically, Eventually, Always)):
        kw = _WINDOW_KEYWORDS[type(f)]
        child = format_formula(f.operand)
        if _is_default_interval(f.interval):
            return f"{kw}({child})"
        return f"{kw}{_format_interval(f.interval)} ({child})"
    if isinstance(f, (Next, Prev, Rise, Fall)):
        return f"{_SHIFT_KEYWORDS[type(f)]}({format_formula(f.operand)})"
    if isinstance(f, Delay):
        return f"delay[{f.amount}] ({format_formula(f.operand)})"
    raise TypeError(f"cannot format {type(f).__name__}")
