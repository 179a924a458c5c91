"""Renderers: curve galleries and scaled-density panels.

Both are pure functions of the input files named in the FigureSpec;
axes, bandwidths, and styles are fixed so re-rendering reproduces the
image byte for byte.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .figspec import CURVE_COLUMNS, SIM_COLUMNS, FigureSpec, load_csv
from .kde import gaussian_kde


def _reference_circle(ax):
    ang = np.linspace(-math.pi, math.pi, 512)
    ax.plot(np.cos(ang), np.sin(ang), color="0.75", lw=1.0, label="unit circle")


def load_marker(path) -> tuple[float, float]:
    """Projection marker from a `project` JSON capture."""
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"projection JSON missing: {p}")
    payload = json.loads(p.read_text())
    return float(payload["px"]), float(payload["py"])


def render_curve_gallery(spec: FigureSpec, markers: dict | None = None):
    """One panel per labelled curve CSV: the set in black over the gray
    unit reference circle, the source mean at the origin in red and its
    projection in green.  Returns the matplotlib figure."""
    labels = list(spec.inputs)
    if not labels:
        raise ValueError("gallery spec lists no inputs")
    markers = markers or {}
    ncol = len(labels)
    fig, axes = plt.subplots(1, ncol, figsize=(3.0 * ncol, 3.2))
    if ncol == 1:
        axes = [axes]
    for ax, label in zip(axes, labels):
        data = load_csv(spec.inputs[label], CURVE_COLUMNS)
        _reference_circle(ax)
        ax.plot(data["x"], data["y"], color="black", lw=1.4, label="curve")
        ax.plot([0.0], [0.0], "o", color="red", ms=5, label="mean")
        if label in markers:
            mx, my = markers[label]
            ax.plot([mx], [my], "o", color="green", ms=5, label="projection")
        ax.set_title(label, fontsize=9)
        ax.set_xlim(-1.7, 2.3)
        ax.set_ylim(-2.0, 2.0)
        ax.set_aspect("equal")
        ax.tick_params(labelsize=7)
    fig.tight_layout()
    return fig


def _fig2_panel(ax, spec: FigureSpec):
    grid = np.linspace(-2.5, 2.5, 801)
    for label, n in zip(spec.inputs, spec.n_values):
        data = load_csv(spec.inputs[label], SIM_COLUMNS)
        scaled = 0.5 * math.log(n) * data["t_n"]
        ax.plot(grid, gaussian_kde(scaled, grid), lw=1.2, label=f"n={n:g}")
    ax.plot(grid, np.exp(-0.5 * grid**2) / math.sqrt(2.0 * math.pi),
            ls="--", color="0.4", lw=1.0, label="standard normal")
    uni = np.where(np.abs(grid) <= 1.0, 0.5, 0.0)
    ax.plot(grid, uni, ls=":", color="0.4", lw=1.0, label="uniform(-1,1)")
    ax.set_xlim(-2.5, 2.5)
    ax.set_ylim(0.0, 2.4)
    ax.set_xlabel("(log(n)/2) t_n")
    ax.set_ylabel("density")
    ax.legend(fontsize=7)


def _fig3_panel(ax, spec: FigureSpec):
    # the scaled statistic exp(sqrt(n)) t_n overflows doubles, so both
    # axes are handled as explicit log10 coordinates: for t_n > 0
    #   log10 u = (sqrt(n) + log t_n) / log 10
    # and the density transforms as f_U(u) = f_W(log u) / u
    ln10 = math.log(10.0)
    drew = False
    for label, n in zip(spec.inputs, spec.n_values):
        data = load_csv(spec.inputs[label], SIM_COLUMNS)
        t_pos = data["t_n"][data["t_n"] > 0.0]  # positive axis only
        if t_pos.size < 2:
            continue
        w = math.sqrt(n) + np.log(t_pos)
        lo, hi = np.percentile(w, [1.0, 99.0])
        wgrid = np.linspace(lo, hi, 400)
        dens_w = gaussian_kde(w, wgrid)
        keep = dens_w > 0.0
        log10_u = wgrid[keep] / ln10
        log10_f = np.log10(dens_w[keep]) - log10_u
        ax.plot(log10_u, log10_f, lw=1.2, label=f"n={n:g}")
        drew = True
    if not drew:
        raise ValueError("no positive-axis samples to draw")
    ug = np.linspace(-3.0, 3.0, 400)
    u = 10.0**ug
    normal_log10 = -np.log10(math.sqrt(2.0 * math.pi)) - u * u / (2.0 * ln10)
    ax.plot(ug, normal_log10, ls="--", color="0.4", lw=1.0, label="standard normal")
    ax.plot([-3.0, 0.0], [math.log10(0.5)] * 2, ls=":", color="0.4", lw=1.0,
            label="uniform(-1,1)")
    ax.set_xlim(-60.0, 10.0)
    ax.set_ylim(-12.0, 2.0)
    ax.set_xlabel("log10 of exp(sqrt(n)) t_n")
    ax.set_ylabel("log10 density")
    ax.legend(fontsize=7)


def render_density(spec: FigureSpec):
    """Scaled-parameter density panels: fig2 on linear axes with the
    two-point limit's +-1 modes, fig3 as an explicit log-log plot of the
    positive half.  Returns the matplotlib figure."""
    if len(spec.inputs) != len(spec.n_values):
        raise ValueError("inputs and n_values must align")
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    if spec.figure_id == "fig2":
        _fig2_panel(ax, spec)
    elif spec.figure_id == "fig3":
        _fig3_panel(ax, spec)
    else:
        raise ValueError(f"no density layout for {spec.figure_id!r}")
    fig.tight_layout()
    return fig


def save(fig, path) -> None:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=150)
    plt.close(fig)
