"""Command-line interface.

One executable, machine-first output: every data-producing subcommand
emits CSV ('#'-prefixed metadata lines, comma separators, '.' decimals,
17 significant digits - doubles round-trip losslessly) or JSON.  Each
subcommand that verifies a limit statement names the claim it tests in
its metadata header.  Files written with --out get a sibling
``<out>.manifest.json`` recording the resolved flags and the output
digest; replaying the manifest's argv reproduces the bytes exactly.

Exit codes: 0 success, 1 validation failure, 2 usage error.
Flag precedence: command line > --config JSON > built-in defaults.
``PML_THREADS`` caps simulation workers (0 = auto); it never changes
numeric output.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .curve import Curve, circle_curve, kink_curve, curve_from_rate, simple_curve_from_rate
from .diagnostics import check_a1, check_a1_prime, circle_g_expansion, probe_medial_axis
from .errors import DomainError, ProjmeanError
from .montecarlo import (
    ExperimentConfig,
    SourceDistribution,
    check_corollary_i,
    check_sticky,
    check_theorem1,
    run_experiment,
)
from .projection import Projector
from .rate_functions import make_exp, make_log, make_poly

__all__ = ["main", "dispatch", "rerun_manifest"]

_FAMILIES = ("poly", "log", "exp", "circle", "kink", "simple-poly", "simple-log")

_DEFAULTS: dict[str, dict] = {
    "families": {"gamma": 1.0},
    "curve-sample": {"family": "poly", "gamma": 1.0, "b": None, "delta": 0.3,
                     "points": 1000, "out": None},
    "project": {"family": "poly", "gamma": 1.0, "b": None, "delta": 0.3,
                "x": None, "y": None},
    "simulate": {"family": "poly", "gamma": 1.0, "b": None, "delta": 0.3,
                 "dist": "normal_y", "sigma": 1.0, "sigma_x": 0.0,
                 "correlation": 0.0, "n": 400, "reps": 1000, "seed": 0,
                 "shortcut": "auto", "out": None},
    "verify-theorem1": {"family": "poly", "gamma": 2.0, "b": None,
                        "dist": "normal_y", "sigma": 1.0, "sigma_x": 0.0,
                        "correlation": 0.0, "n": 400,
                        "reps": 20000, "seed": 0, "s": "0,0.5,1,2",
                        "tol_cdf": 0.02, "tol_vanish": 0.01, "out": None},
    "verify-cor-i": {"gamma": 1.0, "b": None, "dist": "normal_y", "sigma": 1.0,
                     "sigma_x": 0.0, "correlation": 0.0,
                     "n": 400, "reps": 20000, "seed": 0, "tol_ks": 0.03,
                     "s_grid": "-3,-2.5,-2,-1.5,-1,-0.5,0,0.5,1,1.5,2,2.5,3",
                     "out": None},
    "verify-sticky": {"sigma": 0.1, "n": 100, "reps": 1000, "seed": 0,
                      "threshold": 0.99, "out": None},
    "diagnose-a1": {"family": "poly", "gamma": 2.0, "b": None, "c": 1.0,
                    "ys": "", "target": 1.0, "expect": None, "out": None},
    "diagnose-a1prime": {"family": "poly", "gamma": 2.0, "b": None, "c": 1.0,
                         "ys": "", "target": 1.0, "expect": None, "out": None},
    "diagnose-reach": {"family": "poly", "gamma": 0.5, "b": None,
                       "deltas": "0.01,0.05,0.1", "out": None},
    "diagnose-circle": {"delta": 0.3, "ts": "0.5,0.2,0.1,0.05,0.02,0.01",
                        "out": None},
}


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _parse_floats(text: str) -> list[float]:
    items = [s for s in str(text).split(",") if s.strip()]
    return [float(s) for s in items]


class _Usage(Exception):
    pass


def _resolve(sub: str, args: argparse.Namespace, config: dict) -> dict:
    out = {}
    for dest, default in _DEFAULTS[sub].items():
        val = getattr(args, dest, None)
        if val is None:
            val = config.get(dest, default)
        out[dest] = val
    return out


def _build_rate(family: str, gamma: float, b):
    base = family.removeprefix("simple-")
    maker = {"poly": make_poly, "log": make_log, "exp": make_exp}.get(base)
    if maker is None:
        raise _Usage(f"--family {family} has no rate function")
    return maker(gamma, b)


def _build_curve(family: str, gamma: float, b, delta: float) -> Curve:
    if family == "circle":
        return circle_curve(delta)
    if family == "kink":
        return kink_curve()
    rf = _build_rate(family, gamma, b)
    if family.startswith("simple-"):
        return simple_curve_from_rate(rf)
    return curve_from_rate(rf)


def _meta_lines(sub: str, claim: str, params: dict) -> list[str]:
    flat = " ".join(f"{k}={_fmt(v)}" for k, v in params.items() if v is not None)
    return [
        f"# projmean {sub}",
        f"# claim: {claim}",
        f"# {flat}",
        f"# version={__version__}",
    ]


def _write_csv(out, meta: list[str], header: list[str], rows) -> str | None:
    lines = list(meta)
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
        return None
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
    return hashlib.sha256(text.encode()).hexdigest()


def _write_manifest(sub: str, resolved: dict, out: str, digest: str) -> None:
    if sub == "curve-sample":
        argv = ["curve", "sample"]
    elif sub.startswith(("verify-", "diagnose-")):
        argv = list(sub.split("-", 1))
    else:
        argv = [sub]
    for key, val in resolved.items():
        if val is None:
            continue
        argv.extend([f"--{key.replace('_', '-')}", _fmt(val)])
    manifest = {
        "subcommand": sub,
        "argv": argv,
        "seed": resolved.get("seed"),
        "version": __version__,
        "outputs": [{"path": str(out), "sha256": digest}],
    }
    with open(str(out) + ".manifest.json", "w", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def rerun_manifest(path: str) -> int:
    """Re-execute the argv recorded in a manifest; the output bytes must
    reproduce the recorded digest."""
    with open(path) as fh:
        manifest = json.load(fh)
    return dispatch(manifest["argv"])


# ---------------------------------------------------------------------------
# subcommand bodies
# ---------------------------------------------------------------------------


def _cmd_families(p: dict) -> int:
    gamma = float(p["gamma"])
    rows = []
    for fam, maker, f_form, g_form in (
        ("poly", make_poly, "y^gamma", "x^(1/gamma)"),
        ("log", make_log, "(-log y)^(-gamma)", "exp(-x^(-1/gamma))"),
        ("exp", make_exp, "exp(-y^(-gamma))", "(-log x)^(-1/gamma)"),
    ):
        rf = maker(gamma)
        rows.append((fam, f_form, g_form, rf.b, rf.B, rf.y_min))
    meta = _meta_lines("families", "built-in rate families and their default domains",
                       {"gamma": gamma})
    _write_csv(None, meta, ["family", "f", "g", "default_b", "default_B", "y_min"], rows)
    return 0


def _cumulative_arclength(curve: Curve, ts: np.ndarray) -> np.ndarray:
    """Signed arc length at each grid t, accumulated segment by segment."""
    from ._quadrature import adaptive_simpson

    out = np.zeros_like(ts)
    spd = lambda u: float(curve.speed(u))
    order = np.argsort(np.abs(ts), kind="stable")
    acc_pos = 0.0
    last_pos = 0.0
    acc_neg = 0.0
    last_neg = 0.0
    for i in order:
        t = ts[i]
        if t >= 0.0:
            acc_pos += adaptive_simpson(spd, last_pos, t, 1e-12)
            last_pos = t
            out[i] = acc_pos
        else:
            acc_neg += adaptive_simpson(spd, last_neg, t, 1e-12)
            last_neg = t
            out[i] = acc_neg
    return out


def _cmd_curve_sample(p: dict) -> int:
    curve = _build_curve(p["family"], float(p["gamma"]), p["b"], float(p["delta"]))
    npts = int(p["points"])
    if npts < 2:
        raise _Usage("--points must be at least 2")
    ts = np.linspace(-curve.B, curve.B, npts)
    px, py = curve.points(ts)
    r = curve._r_vec(np.abs(ts))
    spd = curve.speed(ts)
    arc = _cumulative_arclength(curve, ts)
    rows = zip(ts.tolist(), px.tolist(), py.tolist(), r.tolist(), spd.tolist(), arc.tolist())
    meta = _meta_lines(
        "curve sample",
        "curve trace q(t) = r(|t|)(cos t, sin t) with speed and arc length",
        {k: p[k] for k in ("family", "gamma", "b", "delta", "points")},
    )
    digest = _write_csv(p["out"], meta, ["t", "x", "y", "r", "speed", "arclength"], rows)
    if p["out"] is not None and digest:
        _write_manifest("curve-sample", p, p["out"], digest)
    return 0


def _cmd_project(p: dict) -> int:
    if p["x"] is None or p["y"] is None:
        raise _Usage("project requires --x and --y")
    curve = _build_curve(p["family"], float(p["gamma"]), p["b"], float(p["delta"]))
    res = Projector(curve).project((float(p["x"]), float(p["y"])))
    payload = {
        "t": res.t_star,
        "px": res.point.x,
        "py": res.point.y,
        "sq_dist": res.sq_dist,
        "multiplicity": res.multiplicity,
    }
    sys.stdout.write(json.dumps(payload) + "\n")
    return 0


def _experiment_config(p: dict) -> ExperimentConfig:
    shortcut = {"auto": None, "on": True, "off": False}[p.get("shortcut", "auto")]
    source = SourceDistribution(
        kind=p["dist"],
        sigma=float(p["sigma"]),
        sigma_x=float(p.get("sigma_x", 0.0)),
        correlation=float(p.get("correlation", 0.0)),
    )
    fam = p["family"]
    return ExperimentConfig(
        family=fam,
        gamma=float(p["gamma"]) if p.get("gamma") is not None else None,
        b=float(p["b"]) if p.get("b") is not None else None,
        delta=float(p["delta"]) if fam == "circle" else None,
        source=source,
        n=int(p["n"]),
        reps=int(p["reps"]),
        seed=int(p["seed"]),
        gaussian_shortcut=shortcut,
    )


def _cmd_simulate(p: dict) -> int:
    cfg = _experiment_config(p)
    res = run_experiment(cfg)
    rows = zip(range(cfg.reps), res.t_n.tolist(), res.m1.tolist(), res.m2.tolist())
    meta = _meta_lines("simulate", "projected sample means m_n = proj(mean of n draws)",
                       cfg.metadata())
    digest = _write_csv(p["out"], meta, ["replicate", "t_n", "m1", "m2"], rows)
    if p["out"] is not None and digest:
        _write_manifest("simulate", p, p["out"], digest)
    return 0


def _cmd_verify_theorem1(p: dict) -> int:
    p = dict(p, family=p["family"], delta=None)
    cfg = _experiment_config({**p, "shortcut": "auto"})
    table = check_theorem1(
        cfg,
        s_values=_parse_floats(p["s"]),
        tol_cdf=float(p["tol_cdf"]),
        tol_vanish=float(p["tol_vanish"]),
    )
    meta = _meta_lines(
        "verify theorem1",
        "theorem1 identity-scale table: P(t_n <= f(s/sqrt(n))) -> Phi(s/sigma); "
        "mirrored and m2 variants; P(|m1-1| >= f(s/sqrt(n))) -> 0",
        cfg.metadata(),
    )
    for s in table.underflowed_s:
        meta.append(f"# flagged: threshold f(s/sqrt(n)) underflows at s={_fmt(s)}")
    rows = [
        (r.s, r.statistic, r.empirical, r.theoretical, r.abs_diff, int(r.passed))
        for r in table.rows
    ]
    digest = _write_csv(
        p["out"], meta, ["s", "statistic", "empirical", "theoretical", "abs_diff", "pass"], rows
    )
    if p["out"] is not None and digest:
        _write_manifest("verify-theorem1", p, p["out"], digest)
    return 0 if table.passed else 1


def _cmd_verify_cor_i(p: dict) -> int:
    cfg = _experiment_config({**p, "family": "poly", "shortcut": "auto"})
    res = check_corollary_i(cfg, s_grid=_parse_floats(p["s_grid"]),
                            tol_ks=float(p["tol_ks"]))
    meta = _meta_lines(
        "verify cor-i",
        "cor-i poly scaled law: n^(gamma/2) t_n -> T, "
        "P(T <= s) = Phi(sgn(s)|s|^(1/gamma)/sigma)",
        cfg.metadata(),
    )
    meta.append(f"# ks={_fmt(res.ks)} tol={_fmt(res.tol_ks)} ks_pass={int(res.passed)}")
    rows = [
        (r.s, r.statistic, r.empirical, r.theoretical, r.abs_diff, int(r.passed))
        for r in res.rows
    ]
    digest = _write_csv(
        p["out"], meta, ["s", "statistic", "empirical", "theoretical", "abs_diff", "pass"], rows
    )
    if p["out"] is not None and digest:
        _write_manifest("verify-cor-i", p, p["out"], digest)
    return 0 if res.passed else 1


def _cmd_verify_sticky(p: dict) -> int:
    cfg = ExperimentConfig(
        family="kink",
        source=SourceDistribution(kind="normal_y", sigma=float(p["sigma"])),
        n=int(p["n"]),
        reps=int(p["reps"]),
        seed=int(p["seed"]),
    )
    res = check_sticky(cfg, threshold=float(p["threshold"]))
    meta = _meta_lines(
        "verify sticky",
        "sticky kink set: P(m_n = (1,0)) -> 1",
        cfg.metadata(),
    )
    rows = [("", "fraction_at_mean", res.fraction, 1.0, 1.0 - res.fraction,
             int(res.passed))]
    digest = _write_csv(
        p["out"], meta, ["s", "statistic", "empirical", "theoretical", "abs_diff", "pass"], rows
    )
    if p["out"] is not None and digest:
        _write_manifest("verify-sticky", p, p["out"], digest)
    return 0 if res.passed else 1


def _default_ys(family: str) -> list[float]:
    # decreasing dyadics, kept above each family's admissible floor
    if family == "exp":
        return [2.0**-k for k in range(4, 10)]
    return [2.0**-k for k in range(4, 13)]


def _cmd_diagnose_a(p: dict, prime: bool) -> int:
    rf = _build_rate(p["family"], float(p["gamma"]), p["b"])
    ys = _parse_floats(p["ys"]) if p["ys"] else _default_ys(rf.family)
    check = check_a1_prime if prime else check_a1
    trace = check(rf, float(p["c"]), ys, target=float(p["target"]))
    name = "a1prime" if prime else "a1"
    kind = "f(y + c y f(y) (y + f(y)))" if prime else "f(y + c y (y + f(y)))"
    meta = _meta_lines(
        f"diagnose {name}",
        f"{name} perturbation-stability ratios {kind} / f(y) -> target",
        {"family": p["family"], "gamma": p["gamma"], "c": p["c"],
         "target": p["target"]},
    )
    meta.append(f"# verdict={trace.verdict}")
    rows = [
        (y, r, trace.target, abs(r / trace.target - 1.0))
        for y, r in zip(trace.ys, trace.ratios)
    ]
    digest = _write_csv(p["out"], meta, ["y", "ratio", "target", "rel_dev"], rows)
    if p["out"] is not None and digest:
        _write_manifest(f"diagnose-{name}", p, p["out"], digest)
    if p["expect"] is not None and trace.verdict != p["expect"]:
        sys.stderr.write(f"verdict {trace.verdict}, expected {p['expect']}\n")
        return 1
    return 0


def _cmd_diagnose_reach(p: dict) -> int:
    curve = _build_curve(p["family"], float(p["gamma"]), p["b"], 0.0)
    probes = probe_medial_axis(curve, _parse_floats(p["deltas"]))
    meta = _meta_lines(
        "diagnose reach",
        "medial-axis probes at (-delta, 0): multiplicity of closest points",
        {"family": p["family"], "gamma": p["gamma"]},
    )
    rows = [
        (
            pr.delta,
            pr.multiplicity,
            int(pr.degenerate),
            pr.minimizers[0] if pr.minimizers else "",
            pr.minimizers[-1] if pr.minimizers else "",
        )
        for pr in probes
    ]
    digest = _write_csv(
        p["out"], meta, ["delta", "multiplicity", "degenerate", "t_smallest", "t_largest"], rows
    )
    if p["out"] is not None and digest:
        _write_manifest("diagnose-reach", p, p["out"], digest)
    return 0


def _cmd_diagnose_circle(p: dict) -> int:
    rows_in = circle_g_expansion(float(p["delta"]), _parse_floats(p["ts"]))
    meta = _meta_lines(
        "diagnose circle",
        "offset-circle slope: g_circle(t) = delta/(delta+1) t + O(t^2)",
        {"delta": p["delta"]},
    )
    rows = [(r.t, r.g_value, r.linear_term, r.ratio) for r in rows_in]
    digest = _write_csv(p["out"], meta, ["t", "g", "linear", "ratio"], rows)
    if p["out"] is not None and digest:
        _write_manifest("diagnose-circle", p, p["out"], digest)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_curve_flags(sp, delta: bool = True):
    sp.add_argument("--family", choices=_FAMILIES)
    sp.add_argument("--gamma", type=float)
    sp.add_argument("--b", type=float)
    if delta:
        sp.add_argument("--delta", type=float)


def _add_experiment_flags(sp):
    sp.add_argument("--dist", choices=("normal_y", "normal_xy", "uniform_y",
                                       "point_mass_x0"))
    sp.add_argument("--sigma", type=float)
    sp.add_argument("--sigma-x", dest="sigma_x", type=float)
    sp.add_argument("--correlation", type=float)
    sp.add_argument("--n", type=int)
    sp.add_argument("--reps", type=int)
    sp.add_argument("--seed", type=int)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="projmean",
        description="rate-controlled planar curves, projections, and limit-law checks",
    )
    parser.add_argument("--config", help="JSON file supplying defaults for any flag")
    sub = parser.add_subparsers(dest="command")

    sp = sub.add_parser("families", help="list built-in rate families")
    sp.add_argument("--gamma", type=float)

    curve = sub.add_parser("curve", help="curve exports").add_subparsers(dest="curve_cmd")
    sp = curve.add_parser("sample", help="sample t,x,y,r,speed,arclength to CSV")
    _add_curve_flags(sp)
    sp.add_argument("--points", type=int)
    sp.add_argument("--out")

    sp = sub.add_parser("project", help="project one point, JSON output")
    _add_curve_flags(sp)
    sp.add_argument("--x", type=float)
    sp.add_argument("--y", type=float)

    sp = sub.add_parser("simulate", help="replicate simulation to CSV")
    _add_curve_flags(sp)
    _add_experiment_flags(sp)
    sp.add_argument("--shortcut", choices=("auto", "on", "off"))
    sp.add_argument("--out")

    ver = sub.add_parser("verify", help="limit-law verification tables").add_subparsers(
        dest="verify_cmd"
    )
    sp = ver.add_parser("theorem1")
    _add_curve_flags(sp, delta=False)
    _add_experiment_flags(sp)
    sp.add_argument("--s")
    sp.add_argument("--tol-cdf", dest="tol_cdf", type=float)
    sp.add_argument("--tol-vanish", dest="tol_vanish", type=float)
    sp.add_argument("--out")
    sp = ver.add_parser("cor-i")
    sp.add_argument("--gamma", type=float)
    sp.add_argument("--b", type=float)
    _add_experiment_flags(sp)
    sp.add_argument("--s-grid", dest="s_grid")
    sp.add_argument("--tol-ks", dest="tol_ks", type=float)
    sp.add_argument("--out")
    sp = ver.add_parser("sticky")
    sp.add_argument("--sigma", type=float)
    sp.add_argument("--n", type=int)
    sp.add_argument("--reps", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--threshold", type=float)
    sp.add_argument("--out")

    dia = sub.add_parser("diagnose", help="assumption and geometry probes").add_subparsers(
        dest="diagnose_cmd"
    )
    for name in ("a1", "a1prime"):
        sp = dia.add_parser(name)
        _add_curve_flags(sp, delta=False)
        sp.add_argument("--c", type=float)
        sp.add_argument("--ys")
        sp.add_argument("--target", type=float)
        sp.add_argument("--expect", choices=("converging", "diverging", "inconclusive"))
        sp.add_argument("--out")
    sp = dia.add_parser("reach")
    _add_curve_flags(sp, delta=False)
    sp.add_argument("--deltas")
    sp.add_argument("--out")
    sp = dia.add_parser("circle")
    sp.add_argument("--delta", type=float)
    sp.add_argument("--ts")
    sp.add_argument("--out")

    return parser


def dispatch(argv) -> int:
    """Parse and run one invocation; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0

    config: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            sys.stderr.write(f"cannot read --config: {exc}\n")
            return 2

    cmd = args.command
    if cmd == "curve":
        cmd = f"curve-{getattr(args, 'curve_cmd', None)}"
    elif cmd == "verify":
        cmd = f"verify-{getattr(args, 'verify_cmd', None)}"
    elif cmd == "diagnose":
        cmd = f"diagnose-{getattr(args, 'diagnose_cmd', None)}"
    if cmd is None or cmd.endswith("None"):
        parser.print_usage(sys.stderr)
        return 2

    try:
        p = _resolve(cmd, args, config)
        if cmd == "families":
            return _cmd_families(p)
        if cmd == "curve-sample":
            return _cmd_curve_sample(p)
        if cmd == "project":
            return _cmd_project(p)
        if cmd == "simulate":
            return _cmd_simulate(p)
        if cmd == "verify-theorem1":
            return _cmd_verify_theorem1(p)
        if cmd == "verify-cor-i":
            return _cmd_verify_cor_i(p)
        if cmd == "verify-sticky":
            return _cmd_verify_sticky(p)
        if cmd == "diagnose-a1":
            return _cmd_diagnose_a(p, prime=False)
        if cmd == "diagnose-a1prime":
            return _cmd_diagnose_a(p, prime=True)
        if cmd == "diagnose-reach":
            return _cmd_diagnose_reach(p)
        if cmd == "diagnose-circle":
            return _cmd_diagnose_circle(p)
        parser.print_usage(sys.stderr)
        return 2
    except _Usage as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 2
    except (DomainError, ProjmeanError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


def main() -> int:
    return dispatch(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
