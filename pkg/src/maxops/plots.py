"""Figure rendering for fields and verification reports.

Figures are written straight to files with the Agg backend so the package
works headless; every renderer returns the path it wrote.  The delimited
outputs stay the source of truth, plots are a convenience layer on top.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .grid import SampledFunction
from .maximal import MaximalField

__all__ = ["save_field_plot", "save_report_plot"]

_DPI = 130


def save_field_plot(field: MaximalField | SampledFunction, path, title: str = "") -> str:
    """Render a maximal field or sampled function: curve in 1D, image in 2D."""
    grid = field.grid
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    if grid.dim == 1:
        ax.plot(grid.axis_coords(0), field.values, lw=1.2, color="tab:blue")
        ax.set_xlabel("x")
        ax.set_ylabel("value")
    else:
        lo, hi = grid.hull()
        im = ax.imshow(
            field.values.T,
            origin="lower",
            extent=(lo[0], hi[0], lo[1], hi[1]),
            aspect="auto",
            cmap="viridis",
        )
        fig.colorbar(im, ax=ax, label="value")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return str(path)


def _plot_inequality(report, ax) -> None:
    coords = np.atleast_2d(report.coords)
    x = coords[:, 0]
    order = np.argsort(x, kind="stable")
    ax.plot(x[order], report.lhs[order], lw=1.0, label="left side", color="tab:red")
    ax.plot(
        x[order],
        report.rhs[order] + report.tolerance,
        lw=1.0,
        label="right side + tolerance",
        color="tab:blue",
    )
    bad = report.lhs > report.rhs + report.tolerance
    if np.any(bad):
        ax.scatter(x[bad], report.lhs[bad], s=12, color="black", zorder=3, label="violations")
    ax.set_xlabel("x" if report.name != "avg-envelope" else "radius")
    ax.set_ylabel("margin terms")
    ax.legend(loc="best", fontsize=8)


def _plot_convergence(report, ax) -> None:
    keys = list(report.observables)
    if not keys:
        return
    if len(keys) == 1:
        ys = report.observables[keys[0]]
        ax.plot(range(len(ys)), ys, marker="o", ms=4, lw=1.0, label=keys[0])
        ax.set_xlabel("index")
    else:
        xs = report.observables[keys[0]]
        for key in keys[1:]:
            ax.plot(xs, report.observables[key], marker="o", ms=4, lw=1.0, label=key)
        ax.set_xlabel(keys[0])
    drawn = set()
    for check in report.checks:
        thr = check.get("threshold")
        if thr is not None and thr not in drawn:
            ax.axhline(thr, ls="--", lw=0.8, color="gray")
            drawn.add(thr)
    ax.set_yscale("symlog", linthresh=1e-6)
    ax.legend(loc="best", fontsize=8)


def save_report_plot(report, path) -> str:
    """Render an inequality margin plot or a convergence observable plot."""
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    if hasattr(report, "lhs"):
        _plot_inequality(report, ax)
    else:
        _plot_convergence(report, ax)
    ax.set_title(report.name)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return str(path)
