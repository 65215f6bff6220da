"""Figure rendering for evaluation output and timing results.

The Agg backend is forced before pyplot loads: figures only ever go to
files here, so the CLI must not touch a display even when one exists.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["plot_bench", "plot_series"]


def _finite(value) -> float:
    v = value.as_float() if hasattr(value, "as_float") else float(value)
    return v if math.isfinite(v) else math.nan


def plot_series(path, series) -> None:
    """Step plot of each formula's robustness over time.

    Pole values have no place on a finite axis and appear as gaps.
    """
    fig, ax = plt.subplots(figsize=(9.0, 4.0))
    drew = False
    for name, points in series.items():
        if not points:
            continue
        ax.step([t for t, _v in points],
                [_finite(v) for _t, v in points],
                where="post", label=name)
        drew = True
    ax.axhline(0.0, color="grey", linewidth=0.8)
    ax.set_xlabel("time")
    ax.set_ylabel("robustness")
    if drew:
        ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_bench(path, results) -> None:
    """Per-update wall time against the window bound, on log axes."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ks = [r.k for r in results]
    for field, style in (("mean", "o-"), ("median", "s--"), ("p99", "^:")):
        ax.plot(ks, [getattr(r, field) for r in results], style, label=field)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("window bound k (samples)")
    ax.set_ylabel("seconds per update")
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
