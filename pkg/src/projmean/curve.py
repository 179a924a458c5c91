"""Planar curves controlled by a rate function.

The central construction: given a rate pair (f, g) with g = f^{-1},

    r(t) = 1 + integral_0^t g(x) dx          (radius, t in [0, B])
    q(t) = r(|t|) (cos t, sin t)             (curve point, t in [-B, B])

so the curve passes through (1, 0) at t = 0 and peels away from the unit
circle at a speed set by g.  Three reference sets share the interface:

* ``simple_qcurve``  q(t) = (1 + |t| g(|t|), t), a graph-style variant
  (supported for poly gamma > 1 and log rate families only; outside the
  poly gamma > 1 range no projection asymptotics are claimed),
* ``circle``         the circle of radius 1 + delta centred at
  (-delta, 0), written in the same polar-around-the-origin form,
* ``kink``           the sticky wedge {(1 + |y|, y)}, parameterized by
  its y coordinate.

Radius evaluation is exact (closed form) for the poly and circle kinds.
For the log/exp kinds the cumulative integral is tabulated once at
Chebyshev-spaced nodes and corrected on demand with Gauss-Legendre
panels in the integrand's own transformed scale; the slow independent
route ``radius_quadrature`` (adaptive Simpson in t) is kept alongside
for cross-checking.  Curves are immutable after construction (tables are
built eagerly) and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ._quadrature import (
    adaptive_simpson,
    weighted_power_segment,
    weighted_power_tail,
)
from .errors import DomainError
from .rate_functions import RateFunction

__all__ = [
    "PlanarPoint",
    "Curve",
    "curve_from_rate",
    "simple_curve_from_rate",
    "circle_curve",
    "kink_curve",
]

#: Node count of the cumulative radius table (intervals; nodes = N + 1).
_TABLE_N = 4096

#: Transformed coordinate beyond which the weighted tail is below the
#: smallest positive double and the integral contribution is exactly 0.
_W_MAX = 760.0


class PlanarPoint(NamedTuple):
    """A point of the Euclidean plane."""

    x: float
    y: float


class _RadiusTable:
    """Cumulative integral of g for the log/exp families.

    Both families become ``factor * v^p e^-v`` after substituting the
    decreasing transform w(x):

        exp family: w(x) = -log(x),      p = -1/gamma,     factor = 1
        log family: w(x) = x^(-1/gamma), p = -gamma - 1,   factor = gamma

    The table stores the cumulative integral at Chebyshev-spaced t nodes
    plus a uniform head table in w for arguments below the first node,
    where minimizers of the projection problem routinely live.
    """

    def __init__(self, family: str, gamma: float, B: float):
        self.family = family
        self.gamma = gamma
        self.B = B
        if family == "exp":
            self.p = -1.0 / gamma
            self.factor = 1.0
        elif family == "log":
            self.p = -gamma - 1.0
            self.factor = gamma
        else:  # pragma: no cover - internal misuse
            raise ValueError(family)

        k = np.arange(_TABLE_N + 1)
        self.nodes = B * np.sin(0.5 * np.pi * k / _TABLE_N) ** 2
        self.nodes[-1] = B
        self.t1 = float(self.nodes[1])

        wn = self._w(self.nodes[1:])
        wn = np.minimum(wn, _W_MAX)
        self.w_nodes = wn

        # head table: uniform in w on [w(t1), W_MAX], cumulative tail
        # integrals accumulated from the far end so each entry keeps full
        # relative accuracy at its own magnitude
        w1 = float(wn[0])
        if w1 >= _W_MAX - 1.0:
            self.head_w = None
            head_total = 0.0
        else:
            hw = np.linspace(w1, _W_MAX, _TABLE_N + 1)
            seg = weighted_power_segment(self.p, hw[:-1], hw[1:])
            tail = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])
            self.head_w = hw
            self.head_tail = tail
            head_total = float(tail[0])

        panels = self.factor * weighted_power_segment(self.p, wn[1:], wn[:-1])
        cum = np.cumsum(panels.astype(np.longdouble))
        C = np.empty(_TABLE_N + 1)
        C[0] = 0.0
        C[1] = self.factor * head_total
        C[2:] = C[1] + cum.astype(float)
        self.C = C

    def _w(self, x: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", over="ignore"):
            if self.family == "exp":
                return -np.log(x)
            return np.power(x, -1.0 / self.gamma)

    def _head_integral(self, w: np.ndarray) -> np.ndarray:
        """factor * int_{w}^{inf} v^p e^-v dv for w >= w(t1)."""
        out = np.zeros_like(w)
        live = w < _W_MAX
        if self.head_w is None or not np.any(live):
            return out
        wl = np.minimum(w[live], _W_MAX)
        j = np.searchsorted(self.head_w, wl, side="left")
        j = np.clip(j, 0, len(self.head_w) - 1)
        wj = self.head_w[j]
        out[live] = self.factor * (
            self.head_tail[j] + weighted_power_segment(self.p, wl, wj)
        )
        return out

    def integral(self, t: np.ndarray) -> np.ndarray:
        """int_0^t g, elementwise for t in [0, B]."""
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        pos = t > 0.0
        if not np.any(pos):
            return out
        tp = t[pos]
        w = np.minimum(self._w(tp), _W_MAX)
        res = np.zeros_like(tp)
        head = tp <= self.t1
        if np.any(head):
            res[head] = self._head_integral(w[head])
        body = ~head
        if np.any(body):
            k = np.searchsorted(self.nodes, tp[body], side="right") - 1
            k = np.clip(k, 1, _TABLE_N)
            wk = self.w_nodes[k - 1]
            res[body] = self.C[k] + self.factor * weighted_power_segment(
                self.p, w[body], wk
            )
        out[pos] = res
        return out


@dataclass(frozen=True, eq=False)
class Curve:
    """One of the planar sets: rate curve, graph variant, circle, kink.

    ``B`` is the half-range of the parameter; q(-t) mirrors q(t) across
    the x axis for every kind.
    """

    kind: str
    rate: RateFunction | None = None
    delta: float | None = None
    B: float = 0.0
    _table: _RadiusTable | None = field(default=None, repr=False)

    # -- vectorized primitives on |t| (no domain checks; hot paths) ------

    def _r_vec(self, ta: np.ndarray) -> np.ndarray:
        ta = np.asarray(ta, dtype=float)
        if self.kind in ("qcurve", "simple_qcurve"):
            rf = self.rate
            if rf.family == "poly":
                gam = rf.gamma
                with np.errstate(under="ignore"):
                    return 1.0 + gam / (1.0 + gam) * np.power(ta, (1.0 + gam) / gam)
            return 1.0 + self._table.integral(ta)
        if self.kind == "circle":
            d = self.delta
            c = np.cos(ta)
            return np.sqrt(c * c * d * d + 2.0 * d + 1.0) - c * d
        # kink: distance from the origin
        return np.hypot(1.0 + ta, ta)

    def _g_vec(self, ta: np.ndarray) -> np.ndarray:
        ta = np.asarray(ta, dtype=float)
        if self.kind in ("qcurve", "simple_qcurve"):
            return self.rate.g_unchecked(ta)
        if self.kind == "circle":
            d = self.delta
            c = np.cos(ta)
            s = np.sin(ta)
            return d * s - c * s * d * d / np.sqrt(c * c * d * d + 2.0 * d + 1.0)
        raise DomainError("radius derivative is undefined for the kink set")

    def _tg_prime(self, ta: np.ndarray) -> np.ndarray:
        """d/dt [t g(t)] at t = ta >= 0, for the simple_qcurve kind."""
        rf = self.rate
        ta = np.asarray(ta, dtype=float)
        if rf.family == "poly":
            inv = 1.0 / rf.gamma
            with np.errstate(under="ignore"):
                return (1.0 + inv) * np.power(ta, inv)
        # log family: g(t) (1 + t^(-1/gamma)/gamma), underflow-safe
        inv = 1.0 / rf.gamma
        out = np.zeros_like(ta)
        pos = ta > 0.0
        with np.errstate(over="ignore", under="ignore"):
            w = np.power(ta[pos], -inv)
            live = w < 1000.0
            e = np.exp(-w[live])
            vals = np.zeros_like(w)
            vals[live] = e * (1.0 + inv * w[live])
        out[pos] = vals
        return out

    def _points_vec(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        t = np.asarray(t, dtype=float)
        ta = np.abs(t)
        if self.kind in ("qcurve", "circle"):
            r = self._r_vec(ta)
            return r * np.cos(t), r * np.sin(t)
        if self.kind == "simple_qcurve":
            return 1.0 + ta * self._g_vec(ta), t.copy()
        return 1.0 + ta, t.copy()  # kink

    # -- public scalar/array operations ----------------------------------

    def _check_range(self, t, lo: float = None) -> np.ndarray:
        arr = np.asarray(t, dtype=float)
        low = -self.B if lo is None else lo
        if np.any(arr < low - 1e-12) or np.any(arr > self.B * (1.0 + 1e-12)):
            raise DomainError(
                f"parameter outside [{low}, {self.B}] for kind {self.kind!r}"
            )
        if not np.all(np.isfinite(arr)):
            raise DomainError("parameter must be finite")
        return arr

    def radius(self, t):
        """r(t) for t in [0, B]; exact closed form for poly/circle kinds,
        tabulated quadrature (absolute error well under 1e-12) otherwise."""
        arr = self._check_range(t, lo=0.0)
        out = self._r_vec(arr)
        return float(out) if np.ndim(t) == 0 else out

    def radius_derivative(self, t):
        """dr/dt = g(t) for t in [0, B] (closed form for the circle)."""
        arr = self._check_range(t, lo=0.0)
        out = self._g_vec(arr)
        return float(out) if np.ndim(t) == 0 else out

    def radius_quadrature(self, t: float, tol: float = 1e-13) -> float:
        """Independent slow route for r(t): adaptive Simpson over g in the
        original parameter.  Used to cross-check the table route."""
        self._check_range(t, lo=0.0)
        g = lambda x: float(self._g_vec(np.asarray(x, dtype=float)))
        return 1.0 + adaptive_simpson(g, 0.0, float(t), tol)

    def point(self, t: float) -> PlanarPoint:
        """q(t) for t in [-B, B]."""
        arr = self._check_range(t)
        px, py = self._points_vec(arr)
        return PlanarPoint(float(px), float(py))

    def points(self, t) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized q(t); returns coordinate arrays."""
        arr = self._check_range(t)
        return self._points_vec(arr)

    def speed(self, t):
        """|dq/dt|.  Polar kinds use
        sqrt((g cos t - r sin t)^2 + (g sin t + r cos t)^2); the value is
        even in t and tends to 1 as t -> 0 for rate curves."""
        arr = self._check_range(t)
        ta = np.abs(arr)
        if self.kind in ("qcurve", "circle"):
            g = self._g_vec(ta)
            r = self._r_vec(ta)
            c = np.cos(ta)
            s = np.sin(ta)
            out = np.sqrt((g * c - r * s) ** 2 + (g * s + r * c) ** 2)
        elif self.kind == "simple_qcurve":
            out = np.sqrt(1.0 + self._tg_prime(ta) ** 2)
        else:
            out = np.full_like(ta, math.sqrt(2.0))
        return float(out) if np.ndim(t) == 0 else out

    def arc_length(self, t: float) -> float:
        """Signed arc length int_0^t |dq/du| du (absolute error <= 1e-10)."""
        arr = float(self._check_range(t))
        if arr == 0.0:
            return 0.0
        if self.kind == "kink":
            return math.sqrt(2.0) * arr
        spd = lambda u: float(self.speed(u))
        val = adaptive_simpson(spd, 0.0, abs(arr), 1e-11)
        return math.copysign(val, arr)


def curve_from_rate(rf: RateFunction) -> Curve:
    """The rate curve q(t) = r(|t|)(cos t, sin t) on [-B, B]."""
    table = None
    if rf.family in ("log", "exp"):
        table = _RadiusTable(rf.family, rf.gamma, rf.B)
    elif rf.family != "poly":
        raise DomainError(
            "rate curves require a built-in family (poly, log, exp); "
            "custom pairs lack the quadrature transform"
        )
    return Curve(kind="qcurve", rate=rf, B=rf.B, _table=table)


def simple_curve_from_rate(rf: RateFunction) -> Curve:
    """The graph variant q(t) = (1 + |t| g(|t|), t), extended to t < 0 by
    symmetry.  Restricted to poly gamma > 1 and log families; projection
    asymptotics are only claimed for poly gamma > 1."""
    ok = (rf.family == "poly" and rf.gamma is not None and rf.gamma > 1.0) or (
        rf.family == "log"
    )
    if not ok:
        raise DomainError(
            "simple_qcurve supports poly (gamma > 1) and log families only"
        )
    return Curve(kind="simple_qcurve", rate=rf, B=rf.B)


def circle_curve(delta: float, B: float = math.pi) -> Curve:
    """Circle of radius 1 + delta centred at (-delta, 0), in polar form
    around the origin: r(t) = sqrt(cos(t)^2 delta^2 + 2 delta + 1)
    - cos(t) delta, t in [-pi, pi].  delta = 0 gives the unit circle."""
    if delta < 0.0 or not math.isfinite(delta):
        raise DomainError(f"delta must be nonnegative and finite, got {delta}")
    if not (0.0 < B <= math.pi):
        raise DomainError(f"circle parameter half-range must lie in (0, pi], got {B}")
    return Curve(kind="circle", delta=delta, B=B)


def kink_curve(B: float = 10.0) -> Curve:
    """The sticky wedge {(1 + |y|, y) : |y| <= B}, parameterized by y."""
    if not (B > 0.0) or not math.isfinite(B):
        raise DomainError(f"kink half-range must be positive and finite, got {B}")
    return Curve(kind="kink", B=B)
