"""Static SVG rendering of sweep tables and size histograms.

Figures are drawn directly on matplotlib Figure objects (no pyplot, no global
backend state), so emission works headless and leaves the caller's matplotlib
configuration untouched.
"""

from __future__ import annotations

from collections import Counter

from matplotlib.figure import Figure

from .errors import ParameterError
from .synth import ExperimentTable


def emit_plot_svg(table: ExperimentTable, metric: str, path) -> None:
    """Plot a metric's mean vs the kappa_bar buckets with a stderr band.

    Raises on an unknown metric or an empty table before touching the output
    path, so no file is created on error.
    """
    rows = sorted(table.rows_for(metric), key=lambda row: row.kappa_bar)
    if not rows:
        known = ", ".join(table.metrics()) or "none"
        raise ParameterError(f"no rows for metric {metric!r} (table has: {known})")
    x = [row.kappa_bar for row in rows]
    mean = [row.mean for row in rows]
    lo = [row.mean - row.stderr for row in rows]
    hi = [row.mean + row.stderr for row in rows]
    fig = Figure(figsize=(6.0, 4.0))
    ax = fig.add_subplot()
    ax.fill_between(x, lo, hi, alpha=0.25, linewidth=0)
    ax.plot(x, mean, marker="o")
    ax.set_xlabel("kappa_bar (realized bucket mean)")
    ax.set_ylabel(metric)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg")


def emit_histogram_svg(counts: Counter, path) -> None:
    """Bar chart of selected-size counts (``k_hat`` histogram)."""
    if not counts:
        raise ParameterError("empty histogram")
    values = sorted(counts)
    fig = Figure(figsize=(6.0, 4.0))
    ax = fig.add_subplot()
    ax.bar(values, [counts[v] for v in values], width=0.9)
    ax.set_xlabel("k_hat")
    ax.set_ylabel("count")
    fig.tight_layout()
    fig.savefig(path, format="svg")
