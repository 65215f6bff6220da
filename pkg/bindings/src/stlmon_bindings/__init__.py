"""Scripting front end for the stlmon monitors.

A specification object is configured, parsed once, then fed samples.
Configuration calls after parse, and updates before it, raise
LifecycleError.  Values cross this boundary as plain floats: poles map
to IEEE infinities, and NaN is rejected outright in either direction.
"""

import math
import threading

from stlmon import (
    DenseMonitor,
    DiscreteMonitor,
    IoSignature,
    SemanticsMode,
    parse_spec,
)

__all__ = ["DenseSpecification", "DiscreteSpecification", "LifecycleError"]


class LifecycleError(RuntimeError):
    """A call arrived out of declare, parse, update order."""


def _no_nan(value, what):
    value = float(value)
    if math.isnan(value):
        raise ValueError(f"{what} is NaN")
    return value


class _BoundSpecification:
    """One named formula bound to a monitor; subclasses pick the flavor.

    Access is serialized through a lock, so a shared instance never sees
    interleaved calls; it is still one monitor with one clock, not a way
    to fan updates out across threads.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._io = IoSignature()
        self._mode = SemanticsMode.STANDARD
        self._monitor = None
        self._target = None

    def declare_var(self, name, io_type):
        """Register a variable signature; only valid before parse."""
        with self._lock:
            self._before_parse("declare_var")
            self._io = self._io.with_declaration(name, io_type)

    def set_semantics(self, mode):
        """Pick standard, output-robustness or input-vacuity semantics."""
        with self._lock:
            self._before_parse("set_semantics")
            self._mode = SemanticsMode.from_string(mode)

    def parse(self, spec_text):
        """Parse the specification text and build the monitor, once.

        The text must define exactly one named formula.  Declarations made
        through declare_var are merged with those in the text; declaring
        the same variable in both places is an error.
        """
        with self._lock:
            self._before_parse("parse")
            model = parse_spec(spec_text)
            if len(model.assignments) != 1:
                raise ValueError(
                    "expected exactly one named formula, found"
                    f" {len(model.assignments)}")
            io = model.io
            for path, kind in sorted(self._io.kinds.items()):
                io = io.with_declaration(path, kind)
            model.io = io
            self._target = model.assignments[0][0]
            self._monitor = self._make_monitor(model)

    def _before_parse(self, op):
        if self._monitor is not None:
            raise LifecycleError(f"{op} is only valid before parse")

    def _parsed(self):
        if self._monitor is None:
            raise LifecycleError("update is only valid after parse")
        return self._monitor

    def _make_monitor(self, model):
        raise NotImplementedError


class DiscreteSpecification(_BoundSpecification):
    """Sample-indexed flavor: one float per update."""

    def _make_monitor(self, model):
        return DiscreteMonitor(model, mode=self._mode)

    def update(self, time_index, samples):
        """Feed one row of (name, value) samples at the given index."""
        with self._lock:
            monitor = self._parsed()
            pairs = samples.items() if isinstance(samples, dict) else samples
            row = [(name, _no_nan(value, f"sample for {name}"))
                   for name, value in pairs]
            return monitor.update(time_index, row)[self._target].as_float()


class DenseSpecification(_BoundSpecification):
    """Event-driven flavor: newly determined (time, value) steps per update."""

    def _make_monitor(self, model):
        return DenseMonitor(model, mode=self._mode)

    def update(self, batches):
        """Feed per-variable (time, value) events; times advance per variable."""
        with self._lock:
            monitor = self._parsed()
            items = batches.items() if isinstance(batches, dict) else batches
            clean = []
            for name, events in items:
                clean.append((name, [
                    (_no_nan(t, f"time for {name}"),
                     _no_nan(v, f"sample for {name}"))
                    for t, v in events
                ]))
            segments = monitor.dense_update(clean)[self._target]
            return [(t, v.as_float()) for t, v in segments]
