"""Seeded random generators shared by the property and acceptance tests."""

import random
from fractions import Fraction

from stlmon.core import Duration, Interval, IoSignature
from stlmon.formula import (
    Abs,
    Always,
    And,
    BinOp,
    Eventually,
    Fall,
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
    Until,
    Var,
)

DEFAULT_VARS = ("a", "b", "c", "sig.x")


def gen_lit(rng: random.Random) -> Lit:
    # Nonnegative on purpose: the parser spells negative literals as Neg(Lit).
    return Lit(Fraction(rng.randint(0, 16), rng.choice((1, 1, 2, 4))))


def gen_expr(rng, variables=DEFAULT_VARS, depth=2):
    if depth == 0 or rng.random() < 0.4:
        if rng.random() < 0.7:
            return Var(rng.choice(variables))
        return gen_lit(rng)
    kind = rng.randrange(4)
    if kind == 0:
        return Neg(gen_expr(rng, variables, depth - 1))
    if kind == 1:
        return Abs(gen_expr(rng, variables, depth - 1))
    if kind == 2 and rng.random() < 0.4:
        # constant divisor keeps evaluation finite
        return BinOp("/", gen_expr(rng, variables, depth - 1),
                     Lit(Fraction(rng.choice((1, 2, 4)))))
    return BinOp(rng.choice(("+", "-", "*")),
                 gen_expr(rng, variables, depth - 1),
                 gen_expr(rng, variables, depth - 1))


def gen_pred(rng, variables=DEFAULT_VARS):
    op = rng.choice((">=", ">", "<=", "<", "==", "!=", None))
    lhs = gen_expr(rng, variables, rng.randrange(3))
    if op is None:
        return Pred(lhs)
    return Pred(lhs, op, gen_expr(rng, variables, rng.randrange(2)))


def gen_interval(rng, bound_max=8, unbounded_ok=False, timed=False):
    if unbounded_ok and rng.random() < 0.3:
        return Interval(Duration.samples(rng.randint(0, bound_max)), None)
    if timed and rng.random() < 0.3:
        lo = rng.randint(0, bound_max) * 100
        span = rng.randint(0, bound_max) * 100
        return Interval(Duration.of(str(lo), "ms"),
                        Duration.of(str(lo + span), "ms"))
    lo = rng.randint(0, bound_max)
    return Interval(Duration.samples(lo),
                    Duration.samples(lo + rng.randint(0, bound_max)))


def gen_formula(rng, depth=3, *, variables=DEFAULT_VARS, future=True,
                bound_max=8, timed=False, unbounded_until=False,
                bounded_past=False, dense=False):
    """A random formula of the given depth.

    future=False keeps to the past fragment.  bounded_past=True forbids
    unbounded once/historically/since so the lookback stays finite.
    dense=True stays inside the fragment both monitors interpret alike:
    no prev/rise/fall/next, and until operands come from the past fragment.
    unbounded_until exists only for parser round-trip tests; such formulas
    fail validation on purpose.
    """
    if depth == 0:
        return gen_pred(rng, variables)

    def sub(**over):
        opts = dict(variables=variables, future=future, bound_max=bound_max,
                    timed=timed, unbounded_until=unbounded_until,
                    bounded_past=bounded_past, dense=dense)
        opts.update(over)
        return gen_formula(rng, depth - 1, **opts)

    past_iv = dict(unbounded_ok=not bounded_past, timed=timed)

    kinds = ["pred", "not", "and", "or", "implies",
             "once", "historically", "since"]
    if not dense:
        kinds += ["prev", "rise", "fall"]
    if future:
        kinds += ["eventually", "always", "until"]
        if not dense:
            kinds += ["next"]
    kind = rng.choice(kinds)
    if kind == "pred":
        return gen_pred(rng, variables)
    if kind == "not":
        return Not(sub())
    if kind == "and":
        return And(sub(), sub())
    if kind == "or":
        return Or(sub(), sub())
    if kind == "implies":
        return Implies(sub(), sub())
    if kind == "prev":
        return Prev(sub())
    if kind == "rise":
        return Rise(sub())
    if kind == "fall":
        return Fall(sub())
    if kind == "next":
        return Next(sub())
    if kind == "once":
        return Once(gen_interval(rng, bound_max, **past_iv), sub())
    if kind == "historically":
        return Historically(gen_interval(rng, bound_max, **past_iv), sub())
    if kind == "since":
        return Since(gen_interval(rng, bound_max, **past_iv), sub(), sub())
    if kind == "eventually":
        return Eventually(gen_interval(rng, bound_max, timed=timed), sub())
    if kind == "always":
        return Always(gen_interval(rng, bound_max, timed=timed), sub())
    unbounded = unbounded_until and rng.random() < 0.2
    iv = (Interval(Duration.samples(rng.randint(0, bound_max)), None)
          if unbounded else gen_interval(rng, bound_max, timed=timed))
    if dense:
        return Until(iv, sub(future=False), sub(future=False))
    return Until(iv, sub(), sub())


def gen_io(rng, used):
    """A random interface declaration covering exactly the used variables;
    sometimes empty, sometimes declaring a dotted variable by its prefix."""
    if rng.random() < 0.3 or not used:
        return IoSignature()
    io = IoSignature()
    for v in sorted(used):
        path = v.split(".")[0] if rng.random() < 0.3 else v
        if io.resolve(path) is None:
            io = io.with_declaration(path, rng.choice(("input", "output")))
    return io


def gen_trace(rng, variables, n, lo=-10.0, hi=10.0):
    """Per-variable sample arrays with values drawn uniformly in [lo, hi]."""
    return {v: [rng.uniform(lo, hi) for _ in range(n)] for v in variables}
