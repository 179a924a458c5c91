"""Produce figure inputs by invoking the projmean CLI.

This is the only bridge to the simulation side: everything arrives as
CSV files or captured `project` JSON, never as in-process imports.
"""

from __future__ import annotations

import subprocess
import sys
from pathlib import Path

DENSITY_N = (100, 10_000, 1_000_000)


def run_cli(args: list[str], capture: bool = False) -> str:
    proc = subprocess.run(
        [sys.executable, "-m", "projmean", *args],
        capture_output=True,
        text=True,
    )
    if proc.returncode != 0:
        raise RuntimeError(
            f"projmean {' '.join(args)} failed ({proc.returncode}): {proc.stderr}"
        )
    return proc.stdout if capture else ""


def _curve_args(family: str, gamma: float | None, delta: float | None) -> list[str]:
    args = ["--family", family]
    if gamma is not None:
        args += ["--gamma", repr(gamma)]
    if delta is not None:
        args += ["--delta", repr(delta)]
    return args


def gen_curve(data_dir, label, family, gamma=None, delta=None, points=800) -> Path:
    out = Path(data_dir) / f"curve_{label}.csv"
    if not out.exists():
        run_cli(["curve", "sample", *_curve_args(family, gamma, delta),
                 "--points", str(points), "--out", str(out)])
    return out


def gen_projection(data_dir, label, family, gamma=None, delta=None,
                   x=0.0, y=0.0) -> Path:
    out = Path(data_dir) / f"proj_{label}.json"
    if not out.exists():
        payload = run_cli(
            ["project", *_curve_args(family, gamma, delta),
             "--x", repr(x), "--y", repr(y)],
            capture=True,
        )
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(payload)
    return out


def gen_simulation(data_dir, label, family, gamma, n, reps, seed) -> Path:
    out = Path(data_dir) / f"sim_{label}_n{n}.csv"
    if not out.exists():
        run_cli(["simulate", "--family", family, "--gamma", repr(gamma),
                 "--n", str(n), "--reps", str(reps), "--seed", str(seed),
                 "--out", str(out)])
    return out


GALLERY_PANELS = {
    "fig1": [
        ("non-unique: circle", "circle", None, 0.0),
        ("slow: poly g=0.5", "poly", 0.5, None),
        ("parametric: poly g=1", "poly", 1.0, None),
        ("fast: poly g=4", "poly", 4.0, None),
        ("sticky: kink", "kink", None, None),
    ],
    "fig4": [
        ("poly g=0.25", "poly", 0.25, None),
        ("poly g=1", "poly", 1.0, None),
        ("poly g=4", "poly", 4.0, None),
        ("log g=4", "log", 4.0, None),
    ],
    "fig5": [
        ("offset circle d=0.3", "circle", None, 0.3),
    ],
}

DENSITY_FAMILY = {"fig2": ("log", 1.0), "fig3": ("exp", 1.0)}


def ensure_gallery_inputs(figure_id, data_dir):
    inputs = {}
    markers = {}
    for label, family, gamma, delta in GALLERY_PANELS[figure_id]:
        slug = label.split()[-1].replace("=", "").replace(".", "")
        key = f"{figure_id}_{family}_{slug}"
        inputs[label] = str(gen_curve(data_dir, key, family, gamma, delta))
        markers[label] = str(gen_projection(data_dir, key, family, gamma, delta))
    return inputs, markers


def ensure_density_inputs(figure_id, data_dir, reps=2000, seed=42,
                          n_values=DENSITY_N):
    family, gamma = DENSITY_FAMILY[figure_id]
    inputs = {}
    for n in n_values:
        path = gen_simulation(data_dir, f"{family}{gamma:g}", family, gamma,
                              n, reps, seed)
        inputs[f"n={n}"] = str(path)
    return inputs, tuple(n_values)
