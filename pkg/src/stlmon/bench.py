"""Per-update timing of the discrete monitor at growing window bounds.

One spec shape, ``out = always[0:k] (a + b > -2)``, exercises exactly the
part whose cost could grow with k: the sliding-window extremum.  Each run
feeds seeded samples, discards the first k updates so the window is
saturated, and reports wall time per update.  With the wedge the mean
should stay flat as k grows; numbers are reported, never judged here.

Timing uses perf_counter_ns around the update call alone, with garbage
collection paused so a collection pause never lands inside a lap.
"""

from __future__ import annotations

import gc
import math
import random
import statistics
from dataclasses import dataclass
from time import perf_counter_ns

from .discrete import DiscreteMonitor
from .parser import parse

__all__ = [
    "DEFAULT_BOUNDS",
    "BenchResult",
    "bench_monitor",
    "format_table",
    "run_bench",
    "sample_stream",
]

DEFAULT_BOUNDS = (100, 1_000, 10_000, 100_000, 1_000_000)

WINDOW_SPEC = "out = always[0:{k}] (a + b > -2)"


@dataclass(frozen=True)
class BenchResult:
    """Per-update wall times, in seconds, for one window bound."""

    k: int
    n_updates: int
    mean: float
    median: float
    p99: float


def bench_monitor(k: int) -> DiscreteMonitor:
    return DiscreteMonitor(parse(WINDOW_SPEC.format(k=k)))


def sample_stream(pattern: str, seed: int):
    """Endless (a, b) pairs: uniform noise, or the wedge's worst case.

    A strictly increasing margin is adversarial for the window minimum;
    nothing ever gets evicted early, so the wedge reaches full length.
    """
    if pattern == "random":
        rng = random.Random(seed)
        while True:
            yield rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)
    elif pattern == "increasing":
        i = 0
        while True:
            yield 0.5 * i, 0.5 * i
            i += 1
    else:
        raise ValueError(f"unknown input pattern {pattern!r}")


def run_bench(k_list, n_updates: int, seed: int = 0,
              pattern: str = "random"):
    """Time n_updates updates for each bound, skipping the k warm-up laps."""
    if not k_list:
        raise ValueError("need at least one window bound")
    results = []
    for k in k_list:
        if n_updates <= k:
            raise ValueError(
                f"n_updates={n_updates} leaves no laps after "
                f"the k={k} warm-up")
        monitor = bench_monitor(k)
        stream = sample_stream(pattern, seed)
        laps = []
        was_enabled = gc.isenabled()
        gc.disable()
        try:
            for i in range(n_updates):
                a, b = next(stream)
                sample = (("a", a), ("b", b))
                t0 = perf_counter_ns()
                monitor.update(i, sample)
                t1 = perf_counter_ns()
                if i >= k:
                    laps.append(t1 - t0)
        finally:
            if was_enabled:
                gc.enable()
        laps.sort()
        p99 = laps[min(len(laps) - 1, math.ceil(0.99 * len(laps)) - 1)]
        results.append(BenchResult(
            k=k,
            n_updates=n_updates,
            mean=1e-9 * (sum(laps) / len(laps)),
            median=1e-9 * statistics.median(laps),
            p99=1e-9 * p99,
        ))
    return results


def format_table(results) -> str:
    header = "{:>9}  {:>11}  {:>12}  {:>12}  {:>12}".format(
        "k", "updates", "mean (s)", "median (s)", "p99 (s)")
    lines = [header]
    for r in results:
        lines.append("{:>9}  {:>11}  {:>12.3e}  {:>12.3e}  {:>12.3e}".format(
            r.k, r.n_updates, r.mean, r.median, r.p99))
    return "\n".join(lines)
