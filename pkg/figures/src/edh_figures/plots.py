"""The three standard figures, built from tables and saved to disk.

Rendering is deliberately boring: fixed style, fixed dpi, Agg backend, no
timestamps in the output metadata and a pinned svg hash salt, so the same
CSV always produces byte-identical image files.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .tables import (
    AVERAGE_ROW,
    CorrelationsTable,
    ScalingTable,
    SchemaError,
    SpectrumTable,
    load_correlations,
    load_scaling,
    load_spectrum,
)

STYLE = {
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 150,
    "savefig.dpi": 150,
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "legend.framealpha": 0.9,
    "svg.hashsalt": "edh-figures",
}

HIGHLIGHT_COLORS = ("tab:red", "tab:green", "tab:orange", "tab:purple")


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: inputs, figure number, marks, output path."""

    inputs: tuple[Path, ...]
    figure: int
    out: Path
    highlights: tuple[int, ...] = field(default=())
    ref_site: int = 1

    def __post_init__(self):
        if self.figure not in (1, 2, 3):
            raise ValueError(f"figure must be 1, 2 or 3, got {self.figure}")
        if not self.inputs:
            raise ValueError("at least one input table is required")
        if self.ref_site < 1:
            raise ValueError(f"ref_site must be >= 1, got {self.ref_site}")
        if Path(self.out).suffix.lower() not in (".png", ".svg"):
            raise ValueError(f"output must be .png or .svg, got {self.out}")


def _single_input(spec: FigureSpec, label: str) -> Path:
    if len(spec.inputs) != 1:
        raise SchemaError(f"the {label} figure takes exactly one table, "
                          f"got {len(spec.inputs)}")
    return spec.inputs[0]


def _save(fig, out: Path) -> Path:
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    metadata = {"Date": None} if out.suffix.lower() == ".svg" else None
    fig.savefig(out, metadata=metadata)
    plt.close(fig)
    return out


def build_spectrum_figure(table: SpectrumTable, highlights: tuple[int, ...] = ()):
    """Scatter of coherence length against energy, chosen states ringed."""
    fig, ax = plt.subplots()
    ax.scatter(table.energy, table.length, s=10, c="tab:blue", alpha=0.6,
               linewidths=0, zorder=2)
    for k, state in enumerate(highlights):
        row = table.locate(state)
        ax.scatter([table.energy[row]], [table.length[row]], s=130,
                   facecolors="none",
                   edgecolors=HIGHLIGHT_COLORS[k % len(HIGHLIGHT_COLORS)],
                   linewidths=1.6, zorder=3, label=f"state {state}")
    ax.set_xlabel("energy")
    ax.set_ylabel("coherence length")
    if highlights:
        ax.legend(loc="upper right")
    return fig


def build_scaling_figure(table: ScalingTable):
    """Peak and average lengths against size, one pair of curves per branch,
    with a least-squares line through the peaks when there is anything to fit.
    """
    fig, ax = plt.subplots()
    for k, eps in enumerate(table.eps_branches):
        branch = table.branch(eps)
        color = f"C{k}"
        ax.plot(branch.L, branch.l_max, marker="o", color=color,
                label=f"peak, eps={eps:g}")
        ax.plot(branch.L, branch.l_av, marker="s", linestyle="--", color=color,
                alpha=0.7, label=f"average, eps={eps:g}")
        if len(set(branch.L.tolist())) >= 2:
            slope, intercept = np.polyfit(branch.L, branch.l_max, 1)
            ends = np.array([branch.L.min(), branch.L.max()])
            ax.plot(ends, slope * ends + intercept, linestyle=":", color=color,
                    alpha=0.9, label=f"fit {slope:.2f} L {intercept:+.2f}")
        else:
            warnings.warn(f"eps={eps:g}: fit omitted, need at least two "
                          "distinct sizes", stacklevel=2)
    ax.set_xlabel("number of sites")
    ax.set_ylabel("coherence length")
    ax.legend(loc="upper left", fontsize=8)
    return fig


def build_correlations_figure(table: CorrelationsTable,
                              highlights: tuple[int, ...] = (),
                              ref_site: int = 1):
    """One curve of |rho[ref, j]| per chosen state; default draws them all.

    The spectrum-average row (index -1) is drawn last, black and dashed, so
    individual states are read against it.
    """
    chosen = list(highlights) if highlights else list(table.states)
    if highlights and AVERAGE_ROW in table.states and AVERAGE_ROW not in chosen:
        chosen.append(AVERAGE_ROW)
    chosen.sort(key=lambda s: s == AVERAGE_ROW)   # average goes last

    fig, ax = plt.subplots()
    for state in chosen:
        values = table.row(state)
        if state == AVERAGE_ROW:
            ax.plot(table.sites, values, color="black", linestyle="--",
                    linewidth=2.0, label="spectrum average")
        else:
            ax.plot(table.sites, values, marker="o", markersize=4,
                    label=f"state {state}")
    ax.set_xlabel("site j")
    ax.set_ylabel(f"|correlation({ref_site}, j)|")
    ax.set_xticks(table.sites)
    ax.legend(loc="best", fontsize=8)
    return fig


def plot_spectrum_profile(spec: FigureSpec) -> Path:
    table = load_spectrum(_single_input(spec, "spectrum"))
    with plt.rc_context(STYLE):
        return _save(build_spectrum_figure(table, spec.highlights), spec.out)


def plot_scaling(spec: FigureSpec) -> Path:
    table = load_scaling(list(spec.inputs))
    with plt.rc_context(STYLE):
        return _save(build_scaling_figure(table), spec.out)


def plot_correlations(spec: FigureSpec) -> Path:
    table = load_correlations(_single_input(spec, "correlations"))
    with plt.rc_context(STYLE):
        return _save(build_correlations_figure(table, spec.highlights,
                                               spec.ref_site), spec.out)


RENDERERS = {1: plot_spectrum_profile, 2: plot_scaling, 3: plot_correlations}


def render(spec: FigureSpec) -> Path:
    return RENDERERS[spec.figure](spec)
