"""Seeded, reproducible simulation of projected sample means.

One experiment draws R independent sample means of size n from a
centered planar source, projects each onto the chosen curve, and
records the projection parameter t_n and the projected point
(m1, m2).  Everything downstream (identity-scale tables, scaled-law
KS distances, stickiness fractions) consumes those three arrays.

Reproducibility contract: replicate i draws from its own counter-based
stream derived from (master seed, i) via ``SeedSequence(seed,
spawn_key=(i,))`` feeding a Philox generator, and replicates are
processed in fixed-size chunks.  Results are therefore bit-identical
for any worker count and any chunking of the replicate range; the
``PML_THREADS`` environment variable only caps the worker pool.

For normal sources the sample mean is itself Gaussian with covariance
scaled by 1/n, so by default the mean is drawn directly from that exact
law (400x fewer draws, identical distribution); the flag recording the
choice travels with every summary.  The two-point source uses the exact
binomial law of its mean the same way.  Uniform sources always average
n genuine draws.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .asymptotics import phi
from .curve import (
    Curve,
    circle_curve,
    curve_from_rate,
    kink_curve,
    simple_curve_from_rate,
)
from .errors import DomainError
from .projection import Projector
from .rate_functions import RateFunction, make_exp, make_log, make_poly

__all__ = [
    "SourceDistribution",
    "ExperimentConfig",
    "EmpiricalSummary",
    "ExperimentResult",
    "draw_sample_mean",
    "run_experiment",
    "empirical_prob_leq",
    "ks_distance",
    "check_theorem1",
    "check_corollary_i",
    "check_sticky",
    "check_g_scale",
    "Theorem1Row",
    "Theorem1Table",
    "resolve_threads",
]

_CHUNK = 2048  # fixed chunk size; part of the determinism contract

_SOURCE_KINDS = ("normal_y", "normal_xy", "uniform_y", "point_mass_x0")
_FAMILIES = ("poly", "log", "exp", "circle", "kink", "simple-poly", "simple-log")


@dataclass(frozen=True)
class SourceDistribution:
    """Centered planar source with Var(Y) = sigma^2 > 0.

    kinds: ``normal_y`` Y ~ N(0, sigma^2), X = 0;
    ``normal_xy`` jointly Gaussian (sigma_x, sigma, correlation);
    ``uniform_y`` Y uniform on (-sqrt(3) sigma, sqrt(3) sigma), X = 0;
    ``point_mass_x0`` X a point mass at 0 and Y = +-sigma equiprobably.
    """

    kind: str
    sigma: float
    sigma_x: float = 0.0
    correlation: float = 0.0

    def __post_init__(self):
        if self.kind not in _SOURCE_KINDS:
            raise DomainError(f"unknown source kind {self.kind!r}")
        if not (self.sigma > 0.0) or not math.isfinite(self.sigma):
            raise DomainError(f"sigma must be positive, got {self.sigma}")
        if self.sigma_x < 0.0:
            raise DomainError("sigma_x must be nonnegative")
        if not (-1.0 < self.correlation < 1.0):
            raise DomainError("correlation must lie in (-1, 1)")
        if self.kind != "normal_xy" and (self.sigma_x != 0.0 or self.correlation != 0.0):
            raise DomainError("sigma_x/correlation apply to normal_xy only")


def _stream(seed: int, replicate: int) -> np.random.Generator:
    """Counter-based stream for one replicate."""
    ss = np.random.SeedSequence(seed, spawn_key=(replicate,))
    return np.random.Generator(np.random.Philox(ss))


def draw_sample_mean(
    source: SourceDistribution,
    n: int,
    stream: np.random.Generator,
    shortcut: bool = True,
) -> tuple[float, float]:
    """Mean of n independent draws from the source.

    With ``shortcut`` the normal kinds sample the mean's exact Gaussian
    law directly, and point_mass_x0 its exact binomial law; uniform_y
    always averages n draws.
    """
    if n < 1:
        raise DomainError("sample size must be at least 1")
    k = source.kind
    rt = math.sqrt(n)
    if k == "normal_y":
        if shortcut:
            return 0.0, source.sigma * stream.standard_normal() / rt
        return 0.0, source.sigma * float(np.mean(stream.standard_normal(n)))
    if k == "normal_xy":
        rho = source.correlation
        if shortcut:
            u = stream.standard_normal()
            v = stream.standard_normal()
            xm = source.sigma_x * u / rt
            ym = source.sigma * (rho * u + math.sqrt(1.0 - rho * rho) * v) / rt
            return xm, ym
        u = stream.standard_normal(n)
        v = stream.standard_normal(n)
        xs = source.sigma_x * u
        ys = source.sigma * (rho * u + math.sqrt(1.0 - rho * rho) * v)
        return float(np.mean(xs)), float(np.mean(ys))
    if k == "uniform_y":
        half = math.sqrt(3.0) * source.sigma
        return 0.0, float(np.mean(stream.uniform(-half, half, size=n)))
    # point_mass_x0: mean of n independent +-sigma signs; the binomial
    # count is the exact law of that mean
    heads = int(stream.binomial(n, 0.5))
    return 0.0, source.sigma * (2.0 * heads - n) / n


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one simulation: curve, source, sizes, seed."""

    family: str
    source: SourceDistribution
    n: int
    reps: int
    seed: int
    gamma: float | None = None
    b: float | None = None
    delta: float | None = None
    gaussian_shortcut: bool | None = None  # None = per-kind default

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise DomainError(f"unknown curve family {self.family!r}")
        if self.n < 1 or self.reps < 1:
            raise DomainError("n and reps must be at least 1")
        if self.family in ("poly", "log", "exp", "simple-poly", "simple-log"):
            if self.gamma is None:
                raise DomainError(f"family {self.family!r} needs gamma")
        if self.family == "circle" and self.delta is None:
            raise DomainError("circle family needs delta")

    def rate_function(self) -> RateFunction | None:
        base = self.family.removeprefix("simple-")
        if base == "poly":
            return make_poly(self.gamma, self.b)
        if base == "log":
            return make_log(self.gamma, self.b)
        if base == "exp":
            return make_exp(self.gamma, self.b)
        return None

    def build_curve(self) -> Curve:
        if self.family == "circle":
            return circle_curve(self.delta)
        if self.family == "kink":
            return kink_curve()
        rf = self.rate_function()
        if self.family.startswith("simple-"):
            return simple_curve_from_rate(rf)
        return curve_from_rate(rf)

    def resolve_shortcut(self) -> bool:
        if self.gaussian_shortcut is not None:
            return self.gaussian_shortcut
        return self.source.kind != "uniform_y"

    def metadata(self) -> dict:
        md = {
            "family": self.family,
            "dist": self.source.kind,
            "sigma": self.source.sigma,
            "n": self.n,
            "reps": self.reps,
            "seed": self.seed,
            "shortcut": int(self.resolve_shortcut()),
        }
        if self.gamma is not None:
            md["gamma"] = self.gamma
        if self.b is not None:
            md["b"] = self.b
        if self.delta is not None:
            md["delta"] = self.delta
        if self.source.kind == "normal_xy":
            md["sigma_x"] = self.source.sigma_x
            md["correlation"] = self.source.correlation
        return md


@dataclass(frozen=True)
class EmpiricalSummary:
    """Sorted per-replicate statistics plus the config they came from."""

    values: np.ndarray = field(repr=False)
    count: int
    metadata: dict

    @classmethod
    def from_values(cls, values: np.ndarray, metadata: dict) -> "EmpiricalSummary":
        v = np.sort(np.asarray(values, dtype=float))
        return cls(values=v, count=v.size, metadata=dict(metadata))

    def prob_leq(self, threshold: float) -> float:
        """Fraction of statistics <= threshold (binary search)."""
        return float(np.searchsorted(self.values, threshold, side="right")) / self.count

    def prob_geq(self, threshold: float) -> float:
        """Fraction of statistics >= threshold."""
        below = float(np.searchsorted(self.values, threshold, side="left"))
        return 1.0 - below / self.count

    def scaled(self, factor: float) -> "EmpiricalSummary":
        md = dict(self.metadata)
        md["scale_factor"] = md.get("scale_factor", 1.0) * factor
        return EmpiricalSummary.from_values(self.values * factor, md)

    def ks_distance(self, reference_cdf: Callable[[np.ndarray], np.ndarray]) -> float:
        """Two-sided sup-distance between the empirical CDF and a reference
        CDF continuous at the sample points."""
        n = self.count
        F = np.asarray(reference_cdf(self.values), dtype=float)
        up = np.arange(1, n + 1) / n
        lo = np.arange(0, n) / n
        return float(max(np.max(up - F), np.max(F - lo)))


def empirical_prob_leq(summary: EmpiricalSummary, threshold: float) -> float:
    """Fraction of replicate statistics <= threshold."""
    return summary.prob_leq(threshold)


def ks_distance(
    summary: EmpiricalSummary, reference_cdf: Callable[[np.ndarray], np.ndarray]
) -> float:
    """Kolmogorov-Smirnov distance of a summary against a reference CDF."""
    return summary.ks_distance(reference_cdf)


@dataclass(frozen=True)
class ExperimentResult:
    """Raw replicate-aligned outputs of one experiment."""

    config: ExperimentConfig
    t_n: np.ndarray = field(repr=False)
    m1: np.ndarray = field(repr=False)
    m2: np.ndarray = field(repr=False)
    shortcut_used: bool = True

    def statistic(self, name: str) -> np.ndarray:
        if name == "t_n":
            return self.t_n
        if name == "m1":
            return self.m1
        if name == "m2":
            return self.m2
        raise DomainError(f"unknown statistic {name!r}")

    def summary(self, name: str) -> EmpiricalSummary:
        md = self.config.metadata()
        md["statistic"] = name
        return EmpiricalSummary.from_values(self.statistic(name), md)


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: explicit argument wins, then PML_THREADS (0 = auto),
    then auto.  Thread count never changes results, only wall time."""
    if threads is None:
        env = os.environ.get("PML_THREADS", "").strip()
        if env:
            threads = int(env)
        else:
            threads = 0
    if threads < 0:
        raise DomainError("thread count must be nonnegative")
    auto = os.cpu_count() or 1
    return auto if threads == 0 else min(threads, auto)


def run_experiment(cfg: ExperimentConfig, threads: int | None = None) -> ExperimentResult:
    """Run R replicates: draw the sample mean, project it, record
    (t_n, m1, m2).  Deterministic for a fixed config at any thread count."""
    curve = cfg.build_curve()
    projector = Projector(curve)
    shortcut = cfg.resolve_shortcut()
    R = cfg.reps
    t_n = np.empty(R)
    m1 = np.empty(R)
    m2 = np.empty(R)

    def work(lo: int, hi: int) -> None:
        xs = np.empty(hi - lo)
        ys = np.empty(hi - lo)
        for i in range(lo, hi):
            xs[i - lo], ys[i - lo] = draw_sample_mean(
                cfg.source, cfg.n, _stream(cfg.seed, i), shortcut=shortcut
            )
        res = projector.project_batch(xs, ys)
        t_n[lo:hi] = res["t"]
        m1[lo:hi] = res["px"]
        m2[lo:hi] = res["py"]

    spans = [(lo, min(lo + _CHUNK, R)) for lo in range(0, R, _CHUNK)]
    nworkers = resolve_threads(threads)
    if nworkers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=nworkers) as pool:
            list(pool.map(lambda s: work(*s), spans))
    else:
        for lo, hi in spans:
            work(lo, hi)
    return ExperimentResult(config=cfg, t_n=t_n, m1=m1, m2=m2, shortcut_used=shortcut)


# ---------------------------------------------------------------------------
# verification checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Theorem1Row:
    s: float
    statistic: str
    empirical: float
    theoretical: float
    abs_diff: float
    passed: bool


@dataclass(frozen=True)
class Theorem1Table:
    rows: tuple[Theorem1Row, ...]
    underflowed_s: tuple[float, ...]
    tol_cdf: float
    tol_vanish: float

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows) and not self.underflowed_s


def check_theorem1(
    cfg: ExperimentConfig,
    s_values=(0.0, 0.5, 1.0, 2.0),
    tol_cdf: float = 0.02,
    tol_vanish: float = 0.01,
    vanish_s=(1.0,),
    threads: int | None = None,
    result: ExperimentResult | None = None,
) -> Theorem1Table:
    """Identity-scale verification table.

    For each s: the empirical P(t_n <= f(s/sqrt(n))) and its mirrored and
    projected-coordinate variants against Phi(s/sigma).  The vanishing
    check P(|m1 - 1| >= f(s/sqrt(n))) -> 0 is asserted at the calibrated
    points ``vanish_s`` only: at small s it is far from its limit at any
    desk-scale n, and the exp family approaches 2(1 - Phi(s/sigma))
    rather than 0 (the first coordinate's deviation t_n g(t_n) lives on
    the same log-scale as the threshold, so its prefactor never becomes
    negligible there).  s values whose threshold underflows f's floor
    are flagged and skipped.
    """
    rf = cfg.rate_function()
    if rf is None:
        raise DomainError("the identity-scale table needs a rate-function family")
    res = result if result is not None else run_experiment(cfg, threads=threads)
    sigma = cfg.source.sigma
    t_sum = res.summary("t_n")
    m2_sum = res.summary("m2")
    m1_dev = EmpiricalSummary.from_values(np.abs(res.m1 - 1.0), res.config.metadata())

    rows: list[Theorem1Row] = []
    underflowed: list[float] = []
    for s in s_values:
        s = float(s)
        if s < 0.0:
            raise DomainError("s values must be nonnegative")
        thr = float(rf.f(s / math.sqrt(cfg.n)))
        if s > 0.0 and thr == 0.0:
            underflowed.append(s)
            continue
        theo = phi(s / sigma)
        pairs = (
            ("t", t_sum.prob_leq(thr)),
            ("neg_t", t_sum.prob_geq(-thr)),
            ("m2", m2_sum.prob_leq(thr)),
            ("neg_m2", m2_sum.prob_geq(-thr)),
        )
        for name, emp in pairs:
            rows.append(
                Theorem1Row(
                    s=s,
                    statistic=name,
                    empirical=emp,
                    theoretical=theo,
                    abs_diff=abs(emp - theo),
                    passed=abs(emp - theo) <= tol_cdf,
                )
            )
        if thr > 0.0 and s in tuple(float(v) for v in vanish_s):
            vanish = m1_dev.prob_geq(thr)
            rows.append(
                Theorem1Row(
                    s=s,
                    statistic="m1_dev",
                    empirical=vanish,
                    theoretical=0.0,
                    abs_diff=vanish,
                    passed=vanish <= tol_vanish,
                )
            )
    return Theorem1Table(
        rows=tuple(rows),
        underflowed_s=tuple(underflowed),
        tol_cdf=tol_cdf,
        tol_vanish=tol_vanish,
    )


@dataclass(frozen=True)
class ScaledLawResult:
    rows: tuple[Theorem1Row, ...]
    ks: float
    tol_ks: float

    @property
    def passed(self) -> bool:
        return self.ks <= self.tol_ks


def check_corollary_i(
    cfg: ExperimentConfig,
    s_grid=None,
    tol_ks: float = 0.03,
    threads: int | None = None,
    result: ExperimentResult | None = None,
) -> ScaledLawResult:
    """Poly-family scaled law: n^{gamma/2} t_n against
    Phi(sgn(s)|s|^{1/gamma}/sigma), as pointwise CDF rows plus the KS
    distance over the whole sample."""
    if cfg.family not in ("poly", "simple-poly"):
        raise DomainError("the poly scaled law applies to the poly family")
    from .asymptotics import poly_limit_cdf

    res = result if result is not None else run_experiment(cfg, threads=threads)
    gamma = cfg.gamma
    sigma = cfg.source.sigma
    scale = cfg.n ** (gamma / 2.0)
    scaled = res.summary("t_n").scaled(scale)
    ks = scaled.ks_distance(lambda v: poly_limit_cdf(v, gamma, sigma))
    if s_grid is None:
        s_grid = np.arange(-3.0, 3.0 + 1e-9, 0.5)
    rows = []
    for s in np.asarray(s_grid, dtype=float):
        emp = scaled.prob_leq(float(s))
        theo = float(poly_limit_cdf(float(s), gamma, sigma))
        rows.append(
            Theorem1Row(
                s=float(s),
                statistic="cdf_scaled_t",
                empirical=emp,
                theoretical=theo,
                abs_diff=abs(emp - theo),
                passed=abs(emp - theo) <= tol_ks,
            )
        )
    return ScaledLawResult(rows=tuple(rows), ks=ks, tol_ks=tol_ks)


@dataclass(frozen=True)
class StickyResult:
    fraction: float
    threshold: float

    @property
    def passed(self) -> bool:
        return self.fraction >= self.threshold


def check_sticky(
    cfg: ExperimentConfig,
    threshold: float = 0.99,
    threads: int | None = None,
    result: ExperimentResult | None = None,
) -> StickyResult:
    """Fraction of replicates whose projected mean lands exactly on the
    population mean (1, 0); the kink set pins it there."""
    res = result if result is not None else run_experiment(cfg, threads=threads)
    exact = (res.m1 == 1.0) & (res.m2 == 0.0)
    return StickyResult(fraction=float(np.mean(exact)), threshold=threshold)


@dataclass(frozen=True)
class GScaleResult:
    ks: float
    tol_ks: float

    @property
    def passed(self) -> bool:
        return self.ks <= self.tol_ks


def check_g_scale(
    cfg: ExperimentConfig,
    tol_ks: float = 0.03,
    threads: int | None = None,
    result: ExperimentResult | None = None,
) -> GScaleResult:
    """Universal scale check: sqrt(n) g(t_n) (signed through t_n) against
    N(0, sigma^2).  g is the curve's own radius derivative, so this one
    statement covers every rate family and the circle alike."""
    res = result if result is not None else run_experiment(cfg, threads=threads)
    curve = cfg.build_curve()
    g_abs = curve.radius_derivative(np.abs(res.t_n))
    stat = math.sqrt(cfg.n) * np.sign(res.t_n) * g_abs
    summ = EmpiricalSummary.from_values(stat, cfg.metadata())
    sigma = cfg.source.sigma
    ks = summ.ks_distance(lambda v: phi(v / sigma))
    return GScaleResult(ks=ks, tol_ks=tol_ks)
