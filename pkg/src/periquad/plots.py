"""Matplotlib rendering of convergence tables to image files."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .study import StudyTable

__all__ = ["render_convergence_figure"]

_MARKERS = ("o", "s", "^", "d", "v", "*")


def render_convergence_figure(tables, path, title=None, reference_slope=2.0):
    """Log-log plot of error against the swept parameter, one line per table.

    A dashed reference line with the given slope is anchored to the
    first series; pass ``reference_slope=None`` to omit it (useful for
    stagnating fixed-ratio sweeps).
    """
    if isinstance(tables, StudyTable):
        tables = [tables]
    if not tables:
        raise ValueError("no tables to plot")

    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    for table, marker in zip(tables, _MARKERS * (1 + len(tables) // len(_MARKERS))):
        params = [r.h for r in table.rows]
        if len(set(params)) == 1:  # fixed-mesh sweep: delta varies instead
            params = [r.delta for r in table.rows]
            xlabel = "horizon delta"
        else:
            xlabel = "mesh size h"
        label = f"case {table.case.value}, {table.scheme.value}"
        if table.kernel_kind:
            label = f"{table.kernel_kind} {label}"
        ax.loglog(params, table.errors, marker=marker, lw=1.2, ms=4, label=label)

    if reference_slope is not None:
        first = tables[0]
        params = [r.h for r in first.rows]
        if len(set(params)) == 1:
            params = [r.delta for r in first.rows]
        anchor = first.errors[0]
        ref = [anchor * (p / params[0]) ** reference_slope for p in params]
        ax.loglog(params, ref, "k--", lw=1.0, label=f"slope {reference_slope:g}")

    ax.set_xlabel(xlabel)
    ax.set_ylabel(r"$L_\infty$ error")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
