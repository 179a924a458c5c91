"""Closed-form limit distributions for the projection parameter.

Under a centered source with Var(Y) = sigma^2, the scaled projection
parameter of the sample mean obeys family-specific limit laws:

* identity scale: P(t_n <= f(s / sqrt(n))) -> Phi(s / sigma) for s >= 0;
* poly family, n^{gamma/2} t_n -> T with
  P(T <= s) = Phi(sgn(s) |s|^{1/gamma} / sigma);
* log family, (log(n)/2)^gamma t_n -> uniform on {-1, +1};
* exp family, exp((sqrt(n)/c)^gamma) t_n -> mass 2 p_c - 1 at 0 and
  mass 1 - p_c at each of +-infinity, with p_c = Phi(c / sigma).

These are the reference CDFs and masses the Monte Carlo module tests
against.  All functions are pure and stateless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .errors import DomainError

__all__ = [
    "phi",
    "theorem1_limit",
    "poly_limit_cdf",
    "log_limit_cdf",
    "exp_limit_masses",
    "LimitLaw",
]

_SQRT2 = math.sqrt(2.0)


def phi(x):
    """Standard normal CDF via the complementary error function
    (absolute error well below 1e-12)."""
    arr = np.asarray(x, dtype=float)
    out = 0.5 * erfc(-arr / _SQRT2)
    return float(out) if np.ndim(x) == 0 else out


def theorem1_limit(s, sigma: float):
    """Phi(s / sigma) for s >= 0: the limiting value of
    P(t_n <= f(s / sqrt(n)))."""
    if sigma <= 0.0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    arr = np.asarray(s, dtype=float)
    if np.any(arr < 0.0):
        raise DomainError("the identity-scale limit is stated for s >= 0")
    out = phi(arr / sigma)
    return float(out) if np.ndim(s) == 0 else out


def poly_limit_cdf(s, gamma: float, sigma: float):
    """CDF of the poly-family limit: Phi(sgn(s) |s|^{1/gamma} / sigma).
    sgn(0) = 0, so the value at 0 is 1/2."""
    if gamma <= 0.0 or sigma <= 0.0:
        raise DomainError("gamma and sigma must be positive")
    arr = np.asarray(s, dtype=float)
    with np.errstate(under="ignore"):
        z = np.sign(arr) * np.power(np.abs(arr), 1.0 / gamma) / sigma
    out = phi(z)
    return float(out) if np.ndim(s) == 0 else out


def log_limit_cdf(s: float):
    """CDF of the two-point limit uniform on {-1, +1}.

    Away from the jumps: 0 below -1, 1/2 between, 1 above.  Querying a
    jump point returns the interval (left limit, right limit) instead of
    a single number - the comparison is ill-posed exactly there.
    """
    s = float(s)
    if not math.isfinite(s):
        raise DomainError("s must be finite")
    if s == -1.0:
        return (0.0, 0.5)
    if s == 1.0:
        return (0.5, 1.0)
    if s < -1.0:
        return 0.0
    if s < 1.0:
        return 0.5
    return 1.0


def exp_limit_masses(c: float, sigma: float) -> tuple[float, float, float]:
    """Limit masses (at +inf, at 0, at -inf) of the exp-family scaled
    parameter, with p_c = Phi(c / sigma): (1 - p_c, 2 p_c - 1, 1 - p_c)."""
    if c <= 0.0 or sigma <= 0.0:
        raise DomainError("c and sigma must be positive")
    p_c = phi(c / sigma)
    return (1.0 - p_c, 2.0 * p_c - 1.0, 1.0 - p_c)


@dataclass(frozen=True)
class LimitLaw:
    """Bundle of one reference law, dispatching on its kind.

    kinds: ``theorem1`` (needs sigma), ``poly_T`` (gamma, sigma),
    ``log_pm1`` (parameter-free), ``exp_mass`` (c, sigma).
    """

    kind: str
    sigma: float = 1.0
    gamma: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        if self.sigma <= 0.0:
            raise DomainError("sigma must be positive")
        if self.gamma <= 0.0:
            raise DomainError("gamma must be positive")

    def cdf(self, s):
        if self.kind == "theorem1":
            return theorem1_limit(s, self.sigma)
        if self.kind == "poly_T":
            return poly_limit_cdf(s, self.gamma, self.sigma)
        if self.kind == "log_pm1":
            return log_limit_cdf(s)
        raise DomainError(f"no CDF for limit-law kind {self.kind!r}")

    def masses(self) -> tuple[float, float, float]:
        if self.kind != "exp_mass":
            raise DomainError(f"masses are defined for exp_mass, not {self.kind!r}")
        return exp_limit_masses(self.c, self.sigma)
