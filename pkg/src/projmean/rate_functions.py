"""Rate functions and their inverses.

A rate function is a strictly increasing continuous f on [0, b] with
f(0) = 0.  Writing B = f(b), its inverse g = f^{-1} maps [0, B] back to
[0, b].  The pair (f, g) is the single input that determines the planar
curve built in :mod:`projmean.curve` and, through it, the convergence
rate of projected sample means.

Built-in families
-----------------
poly   f(y) = y^gamma              g(x) = x^(1/gamma)
log    f(y) = (-log y)^(-gamma)    g(x) = exp(-x^(-1/gamma))      (0 < y < 1)
exp    f(y) = exp(-y^(-gamma))     g(x) = (-log x)^(-1/gamma)

All families are pinned to f(0) := 0.  Because exp(-y^(-gamma))
underflows IEEE doubles long before y reaches 0, each family carries an
underflow floor ``y_min``: evaluations of f below the floor return
exactly 0 and round-trip validation is restricted to [y_min, b].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError

__all__ = [
    "RateFunction",
    "ValidationReport",
    "make_poly",
    "make_log",
    "make_exp",
    "make_custom",
    "validate",
]

#: Hard cap on B = f(b); keeps the polar curve construction injective.
B_CAP = math.pi / 2.0

#: f values below this threshold are treated as underflowed.
UNDERFLOW_MIN = 1e-300

#: Safety factor applied when choosing a default b for a family.
_DEFAULT_MARGIN = 0.9

_ArrayLike = float | np.ndarray


def _as_array(x: _ArrayLike) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


@dataclass(frozen=True)
class RateFunction:
    """A validated (f, g) pair on [0, b] x [0, B].

    Immutable after construction; instances may be freely shared across
    threads.  ``gamma`` is None for caller-supplied custom pairs.
    """

    family: str
    gamma: float | None
    b: float
    B: float
    y_min: float
    _f_raw: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    _g_raw: Callable[[np.ndarray], np.ndarray] = field(repr=False)

    def f(self, y: _ArrayLike) -> _ArrayLike:
        """Evaluate f on [0, b]; values below the underflow floor map to 0."""
        arr, scalar = _as_array(y)
        if np.any(arr < 0.0) or np.any(arr > self.b * (1.0 + 1e-12)):
            raise DomainError(f"f argument outside [0, {self.b}]")
        with np.errstate(divide="ignore", over="ignore", under="ignore"):
            out = np.where(arr < self.y_min, 0.0, self._f_raw(np.maximum(arr, self.y_min)))
        return float(out) if scalar else out

    def g(self, x: _ArrayLike) -> _ArrayLike:
        """Evaluate the inverse g on [0, B]."""
        arr, scalar = _as_array(x)
        if np.any(arr < 0.0) or np.any(arr > self.B * (1.0 + 1e-12)):
            raise DomainError(f"g argument outside [0, {self.B}]")
        out = self.g_unchecked(arr)
        return float(out) if scalar else out

    def g_unchecked(self, x: np.ndarray) -> np.ndarray:
        """g without the domain check; hot path for curve evaluation."""
        with np.errstate(divide="ignore", over="ignore", under="ignore"):
            return self._g_raw(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of the numeric (f, g) contract check; failures are recorded,
    never raised."""

    family: str
    grid_size: int
    passed: bool
    monotone_ok: bool
    endpoints_ok: bool
    cap_ok: bool
    worst_roundtrip: float
    roundtrip_tol: float
    violations: tuple[tuple[float, float], ...]
    messages: tuple[str, ...]


def _default_b(family: str, gamma: float) -> float:
    # B target = margin * min(sup f, B_CAP); sup f is 1 for the exp family
    # and unbounded for poly/log.
    if family == "exp":
        target = _DEFAULT_MARGIN * min(1.0, B_CAP)
        return (-math.log(target)) ** (-1.0 / gamma)
    target = _DEFAULT_MARGIN * B_CAP
    if family == "poly":
        return target ** (1.0 / gamma)
    if family == "log":
        return math.exp(-(target ** (-1.0 / gamma)))
    raise ValueError(f"no default b for family {family!r}")


def _check_common(gamma: float, b: float, B: float) -> None:
    if not (gamma > 0.0) or not math.isfinite(gamma):
        raise DomainError(f"gamma must be positive and finite, got {gamma}")
    if not (b > 0.0) or not math.isfinite(b):
        raise DomainError(f"b must be positive and finite, got {b}")
    if B > B_CAP * (1.0 + 1e-12):
        raise DomainError(f"B = f(b) = {B} exceeds the pi/2 cap; shrink b")


def make_poly(gamma: float, b: float | None = None) -> RateFunction:
    """f(y) = y^gamma on [0, b].  Requires b^gamma <= pi/2."""
    if b is None:
        b = _default_b("poly", gamma)
    B = b**gamma
    _check_common(gamma, b, B)
    inv = 1.0 / gamma
    return RateFunction(
        family="poly",
        gamma=gamma,
        b=b,
        B=B,
        y_min=1e-150,
        _f_raw=lambda y: np.power(y, gamma),
        _g_raw=lambda x: np.power(x, inv),
    )


def make_log(gamma: float, b: float | None = None) -> RateFunction:
    """f(y) = (-log y)^(-gamma) on [0, b], b in (0, 1)."""
    if b is None:
        b = _default_b("log", gamma)
    if not (0.0 < b < 1.0):
        raise DomainError(f"log family needs 0 < b < 1, got {b}")
    B = (-math.log(b)) ** (-gamma)
    _check_common(gamma, b, B)
    inv = 1.0 / gamma
    return RateFunction(
        family="log",
        gamma=gamma,
        b=b,
        B=B,
        y_min=1e-150,
        _f_raw=lambda y: np.power(-np.log(y), -gamma),
        _g_raw=lambda x: np.exp(-np.power(x, -inv)),
    )


def make_exp(gamma: float, b: float | None = None) -> RateFunction:
    """f(y) = exp(-y^(-gamma)) on [0, b]."""
    if b is None:
        b = _default_b("exp", gamma)
    B = math.exp(-(b ** (-gamma)))
    _check_common(gamma, b, B)
    inv = 1.0 / gamma
    # smallest y with f(y) >= UNDERFLOW_MIN
    y_min = (-math.log(UNDERFLOW_MIN)) ** (-1.0 / gamma)
    return RateFunction(
        family="exp",
        gamma=gamma,
        b=b,
        B=B,
        y_min=y_min,
        _f_raw=lambda y: np.exp(-np.power(y, -gamma)),
        _g_raw=lambda x: np.power(-np.log(x), -inv),
    )


def make_custom(
    f: Callable[[np.ndarray], np.ndarray],
    g: Callable[[np.ndarray], np.ndarray],
    b: float,
    y_min: float = 1e-150,
    name: str = "custom",
) -> RateFunction:
    """Wrap a caller-supplied pair.  Both directions are required: the
    library validates but never inverts numerically, since inversion
    error would silently dominate everything downstream."""
    if not (b > 0.0) or not math.isfinite(b):
        raise DomainError(f"b must be positive and finite, got {b}")
    B = float(f(np.asarray(b, dtype=float)))
    if not math.isfinite(B) or B <= 0.0:
        raise DomainError(f"f(b) must be positive and finite, got {B}")
    if B > B_CAP * (1.0 + 1e-12):
        raise DomainError(f"B = f(b) = {B} exceeds the pi/2 cap; shrink b")
    return RateFunction(
        family=name, gamma=None, b=b, B=B, y_min=y_min, _f_raw=f, _g_raw=g
    )


def validate(rf: RateFunction, grid_size: int) -> ValidationReport:
    """Numerically enforce the (f, g) contract on a grid.

    Checks: f(0) = g(0) = 0, strict monotonicity of f on [0, b], the
    round trip |g(f(y)) - y| <= 1e-12 (1 + y) on a log-spaced grid over
    [y_min, b], and the B <= pi/2 cap.
    """
    if grid_size < 16:
        raise DomainError("grid_size must be at least 16")
    tol = 1e-12
    messages: list[str] = []

    with np.errstate(divide="ignore", over="ignore", under="ignore", invalid="ignore"):
        f0 = float(rf._f_raw(np.asarray(0.0)))
        g0 = float(rf._g_raw(np.asarray(0.0)))
    # families pin f(0) := 0; the raw formulas all underflow to exactly 0 there
    endpoints_ok = f0 == 0.0 and g0 == 0.0
    if not endpoints_ok:
        messages.append(f"endpoint values f(0)={f0}, g(0)={g0} not pinned to 0")

    y_lin = np.linspace(0.0, rf.b, grid_size)
    with np.errstate(divide="ignore", over="ignore", under="ignore"):
        fv = np.where(y_lin < rf.y_min, 0.0, rf._f_raw(np.maximum(y_lin, rf.y_min)))
    bad = np.nonzero(np.diff(fv) <= 0.0)[0]
    monotone_ok = bad.size == 0
    violations = tuple(
        (float(y_lin[i]), float(y_lin[i + 1])) for i in bad[:8]
    )
    if not monotone_ok:
        messages.append(f"{bad.size} monotonicity violations on the grid")

    y_geo = np.geomspace(max(rf.y_min, 1e-300), rf.b, grid_size)
    with np.errstate(divide="ignore", over="ignore", under="ignore"):
        rt = rf._g_raw(rf._f_raw(y_geo))
    rel = np.abs(rt - y_geo) / (1.0 + y_geo)
    worst = float(np.max(rel)) if rel.size else 0.0
    if worst > tol:
        messages.append(f"worst round-trip error {worst:.3e} exceeds {tol:.0e}")

    cap_ok = rf.B <= B_CAP * (1.0 + 1e-12)
    if not cap_ok:
        messages.append(f"B = {rf.B} exceeds pi/2")

    passed = endpoints_ok and monotone_ok and cap_ok and worst <= tol
    return ValidationReport(
        family=rf.family,
        grid_size=grid_size,
        passed=passed,
        monotone_ok=monotone_ok,
        endpoints_ok=endpoints_ok,
        cap_ok=cap_ok,
        worst_roundtrip=worst,
        roundtrip_tol=tol,
        violations=violations,
        messages=tuple(messages),
    )
