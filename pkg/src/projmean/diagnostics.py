"""Numeric probes of the side conditions behind the projection asymptotics.

Three groups:

* perturbation-stability traces.  The direct parameter asymptotics rest
  on one of two limits as y -> 0,

      A1 :  f(y + c y (y + f(y))) / f(y)        -> 1
      A1':  f(y + c y f(y) (y + f(y))) / f(y)   -> 1     (for all real c),

  with A1 implying A1'.  The poly and log families satisfy A1; the exp
  family fails it in a quantified way - its A1 ratio tends to e^c, which
  is exactly the constant that shows up in its projection parameter -
  while satisfying A1'.  ``check_a1``/``check_a1_prime`` tabulate the
  ratios on a decreasing y sequence and classify the trace against a
  target limit.

* medial-axis probes: project points (-delta, 0) just left of the curve
  and report how many closest points they see.  Curves whose g is o(t)
  at 0 keep the reach at most 1 and such points see two; curves with g
  above linear scale see one.

* the circle comparison g_circle(t) = delta/(delta+1) t + O(t^2), which
  pins why an offset circle only rescales the y direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curve import Curve
from .errors import DomainError
from .projection import Projector, _loss_curve
from .rate_functions import RateFunction

__all__ = [
    "RatioTrace",
    "MedialProbe",
    "CircleExpansionRow",
    "check_a1",
    "check_a1_prime",
    "probe_medial_axis",
    "circle_g_expansion",
]

#: Relative closeness to the target required at the smallest y.
_CONV_TOL = 0.05
#: Trailing points whose deviations must shrink monotonically.
_CONV_TAIL = 4


@dataclass(frozen=True)
class RatioTrace:
    """Perturbation ratios along a decreasing y sequence."""

    ys: tuple[float, ...]
    ratios: tuple[float, ...]
    target: float
    verdict: str  # converging | diverging | inconclusive


def _trace(
    rf: RateFunction, c: float, y_sequence, target: float, prime: bool
) -> RatioTrace:
    ys = [float(y) for y in y_sequence]
    if len(ys) < 2:
        raise DomainError("need at least two y values")
    if any(y2 >= y1 for y1, y2 in zip(ys, ys[1:])):
        raise DomainError("y sequence must be strictly decreasing")
    ratios = []
    for y in ys:
        if y <= 0.0 or y > rf.b:
            raise DomainError(f"y = {y} outside (0, {rf.b}]")
        fy = float(rf.f(y))
        if fy == 0.0:
            raise DomainError(f"f({y}) underflowed; raise the y sequence")
        bump = c * y * (y + fy) * (fy if prime else 1.0)
        pert = y + bump
        if pert < 0.0 or pert > rf.b:
            raise DomainError(
                f"perturbed argument {pert} leaves [0, {rf.b}] at y = {y}"
            )
        ratios.append(float(rf.f(pert)) / fy)

    devs = [abs(r / target - 1.0) for r in ratios]
    tail = devs[-_CONV_TAIL:]
    shrinking = all(b <= a * (1.0 + 1e-9) for a, b in zip(tail, tail[1:]))
    growing = all(b >= a * (1.0 - 1e-9) for a, b in zip(tail, tail[1:]))
    if devs[-1] <= _CONV_TOL and shrinking:
        verdict = "converging"
    elif devs[-1] > _CONV_TOL and growing:
        verdict = "diverging"
    else:
        verdict = "inconclusive"
    return RatioTrace(
        ys=tuple(ys), ratios=tuple(ratios), target=float(target), verdict=verdict
    )


def check_a1(
    rf: RateFunction, c: float, y_sequence, target: float = 1.0
) -> RatioTrace:
    """Trace of f(y + c y (y + f(y))) / f(y) along the sequence, classified
    against ``target`` (1 for families satisfying the condition; e^c is
    the exp family's actual limit)."""
    return _trace(rf, c, y_sequence, target, prime=False)


def check_a1_prime(
    rf: RateFunction, c: float, y_sequence, target: float = 1.0
) -> RatioTrace:
    """Trace of f(y + c y f(y) (y + f(y))) / f(y); the weaker condition
    that every built-in family satisfies."""
    return _trace(rf, c, y_sequence, target, prime=True)


@dataclass(frozen=True)
class MedialProbe:
    """Projection census of one probe point (-delta, 0)."""

    delta: float
    multiplicity: int
    minimizers: tuple[float, ...]
    degenerate: bool = False  # every parameter equidistant (circle center)


def probe_medial_axis(curve: Curve, delta_list) -> tuple[MedialProbe, ...]:
    """Project (-delta, 0) for each delta in (0, 0.5] and report the
    minimizer census.  A probe that is equidistant from the whole curve
    (the circle's own center) is flagged degenerate instead."""
    projector = Projector(curve)
    probes = []
    for delta in delta_list:
        d = float(delta)
        if not (0.0 < d <= 0.5):
            raise DomainError(f"probe delta must lie in (0, 0.5], got {d}")
        z = (-d, 0.0)
        tscan = np.linspace(-curve.B, curve.B, 512)
        L = _loss_curve(curve, tscan, z[0], z[1])
        if float(np.max(L) - np.min(L)) <= 1e-12 * (1.0 + float(np.max(L))):
            probes.append(
                MedialProbe(delta=d, multiplicity=0, minimizers=(), degenerate=True)
            )
            continue
        res = projector.project(z)
        probes.append(
            MedialProbe(
                delta=d,
                multiplicity=res.multiplicity,
                minimizers=res.all_minimizers,
            )
        )
    return tuple(probes)


@dataclass(frozen=True)
class CircleExpansionRow:
    t: float
    g_value: float
    linear_term: float
    ratio: float


def circle_g_expansion(delta: float, t_list) -> tuple[CircleExpansionRow, ...]:
    """Tabulate the offset circle's radius derivative against its leading
    linear term delta/(delta+1) t; the ratio must approach 1 like 1 + O(t).
    delta = 0 collapses both sides to 0 (unit circle)."""
    if delta < 0.0:
        raise DomainError("delta must be nonnegative")
    rows = []
    slope = delta / (delta + 1.0)
    for t in t_list:
        t = float(t)
        if not (0.0 < t <= 0.5):
            raise DomainError(f"t must lie in (0, 0.5], got {t}")
        c = math.cos(t)
        s = math.sin(t)
        g = delta * s - c * s * delta * delta / math.sqrt(
            c * c * delta * delta + 2.0 * delta + 1.0
        )
        lin = slope * t
        ratio = g / lin if lin != 0.0 else math.nan
        rows.append(CircleExpansionRow(t=t, g_value=g, linear_term=lin, ratio=ratio))
    return tuple(rows)
