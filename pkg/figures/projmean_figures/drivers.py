"""One driver per figure plus the make-all entry.

Each driver ensures its inputs exist under --data-dir (generating them
through the projmean CLI when absent), renders, and writes a PNG.
"""

from __future__ import annotations

import argparse
from pathlib import Path

from .figspec import FigureSpec
from .generate import DENSITY_N, ensure_density_inputs, ensure_gallery_inputs
from .render import load_marker, render_curve_gallery, render_density, save


def _parser(figure_id: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog=figure_id)
    p.add_argument("--data-dir", default="figdata")
    p.add_argument("--out", default=None)
    p.add_argument("--reps", type=int, default=2000)
    p.add_argument("--seed", type=int, default=42)
    return p


def _gallery_driver(figure_id: str, argv=None) -> int:
    args = _parser(figure_id).parse_args(argv)
    out = args.out or str(Path("figout") / f"{figure_id}.png")
    inputs, marker_files = ensure_gallery_inputs(figure_id, args.data_dir)
    spec = FigureSpec(figure_id=figure_id, inputs=inputs, output=out)
    markers = {label: load_marker(path) for label, path in marker_files.items()}
    save(render_curve_gallery(spec, markers), out)
    print(f"{figure_id}: wrote {out}")
    return 0


def _density_driver(figure_id: str, argv=None) -> int:
    args = _parser(figure_id).parse_args(argv)
    out = args.out or str(Path("figout") / f"{figure_id}.png")
    inputs, n_values = ensure_density_inputs(
        figure_id, args.data_dir, reps=args.reps, seed=args.seed,
        n_values=DENSITY_N,
    )
    spec = FigureSpec(figure_id=figure_id, inputs=inputs, n_values=n_values,
                      output=out)
    save(render_density(spec), out)
    print(f"{figure_id}: wrote {out}")
    return 0


def fig1(argv=None) -> int:
    return _gallery_driver("fig1", argv)


def fig2(argv=None) -> int:
    return _density_driver("fig2", argv)


def fig3(argv=None) -> int:
    return _density_driver("fig3", argv)


def fig4(argv=None) -> int:
    return _gallery_driver("fig4", argv)


def fig5(argv=None) -> int:
    return _gallery_driver("fig5", argv)


def make_all(argv=None) -> int:
    args = _parser("make_all").parse_args(argv)
    rc = 0
    for driver, fid in ((fig1, "fig1"), (fig2, "fig2"), (fig3, "fig3"),
                        (fig4, "fig4"), (fig5, "fig5")):
        rc |= driver(
            ["--data-dir", args.data_dir, "--reps", str(args.reps),
             "--seed", str(args.seed)]
            + (["--out", str(Path(args.out) / f"{fid}.png")] if args.out else [])
        )
    return rc
