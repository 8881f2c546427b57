"""Limit laws of normalized record counts under a functional random walk.

``G1`` is the law of the upper-record count over ``sqrt(n)``: a half-normal
with variance 2. ``G2`` is the law of the total count over ``sqrt(n)``: a
Maxwell (chi with three degrees of freedom) distribution.
"""

from __future__ import annotations

import enum
import math

import numpy as np
from scipy import optimize, special

from .core import InvalidArgumentError

__all__ = ["LimitLaw", "pdf", "cdf", "quantile"]

_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


class LimitLaw(str, enum.Enum):
    G1 = "g1"
    G2 = "g2"


def pdf(law: LimitLaw | str, x):
    """Density; zero for negative ``x``. Accepts scalars or arrays."""
    law = LimitLaw(law)
    x = np.asarray(x, dtype=float)
    if law is LimitLaw.G1:
        out = np.exp(-(x**2) / 4.0) / math.sqrt(math.pi)
    else:
        out = _SQRT_2_OVER_PI * x**2 * np.exp(-(x**2) / 2.0)
    out = np.where(x >= 0, out, 0.0)
    return float(out) if out.ndim == 0 else out


def cdf(law: LimitLaw | str, x):
    """Closed-form distribution function.

    ``F1(x) = erf(x / 2)`` and
    ``F2(x) = erf(x / sqrt 2) - sqrt(2 / pi) x exp(-x^2 / 2)`` for ``x >= 0``.
    """
    law = LimitLaw(law)
    x = np.asarray(x, dtype=float)
    with np.errstate(invalid="ignore"):
        if law is LimitLaw.G1:
            out = special.erf(x / 2.0)
        else:
            out = special.erf(x / math.sqrt(2.0)) - _SQRT_2_OVER_PI * x * np.exp(-(x**2) / 2.0)
    out = np.where(np.isposinf(x), 1.0, out)
    out = np.clip(np.where(x >= 0, out, 0.0), 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def quantile(law: LimitLaw | str, alpha: float) -> float:
    """Solve ``cdf(law, x) = alpha`` by Brent's method on a fixed bracket."""
    law = LimitLaw(law)
    if not 0.0 < alpha < 1.0:
        raise InvalidArgumentError(f"alpha must be in (0, 1), got {alpha!r}")
    hi = 10.0 if law is LimitLaw.G2 else 20.0
    return float(optimize.brentq(lambda x: cdf(law, x) - alpha, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps))
