"""Figure rendering for sweep results.

Renders the two standard views of a sweep next to its CSV: mean weighted
completion time per algorithm against the axis (with the certified bound
as a dashed curve), and the mean ratio to the certified bound.  Files
are written, never shown; the Agg backend keeps this headless-safe.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .errors import ValidationError
from .report import DUAL_BOUND_ROW, SweepPoint

_AXIS_LABELS = {
    "p": "largest initial flow count p",
    "n": "number of coflows n",
}


def _series(points: list[SweepPoint]):
    by_algorithm: dict[str, list[SweepPoint]] = {}
    for pt in points:
        by_algorithm.setdefault(pt.algorithm, []).append(pt)
    for name in by_algorithm:
        by_algorithm[name].sort(key=lambda pt: pt.axis_value)
    return by_algorithm


def save_sweep_figures(points: list[SweepPoint], axis: str, output_prefix) -> list[Path]:
    """Write ``<prefix>_objective.png`` and ``<prefix>_ratio.png``."""
    if not points:
        raise ValidationError("nothing to plot: the sweep produced no points")
    xlabel = _AXIS_LABELS.get(axis, axis)
    prefix = Path(output_prefix)
    by_algorithm = _series(points)
    written = []

    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for name, pts in sorted(by_algorithm.items()):
        xs = [pt.axis_value for pt in pts]
        ys = [pt.mean_j for pt in pts]
        if name == DUAL_BOUND_ROW:
            ax.plot(xs, ys, "k--", marker="s", label="certified bound")
        else:
            ax.plot(xs, ys, marker="o", label=name)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("mean weighted completion time")
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    target = prefix.parent / (prefix.name + "_objective.png")
    fig.savefig(target, dpi=150)
    plt.close(fig)
    written.append(target)

    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for name, pts in sorted(by_algorithm.items()):
        if name == DUAL_BOUND_ROW:
            continue
        xs = [pt.axis_value for pt in pts]
        ys = [pt.mean_ratio_vs_dual for pt in pts]
        ax.plot(xs, ys, marker="o", label=name)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("mean ratio to certified bound")
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    target = prefix.parent / (prefix.name + "_ratio.png")
    fig.savefig(target, dpi=150)
    plt.close(fig)
    written.append(target)

    return written
