"""Model weights from penalized information criteria.

Two nested models differ by one linear constraint. With residual degrees of
freedom ``m = n - p`` and penalty ``d``, the criteria are

    MIC_full        = m * log(m * sigma2_hat / n) + d * p
    MIC_constrained = m * log((tau_hat^2 / v_tau + m * sigma2_hat) / n) + d * (p - 1)

and GIC uses the multiplier ``n`` instead of ``m`` in front of the logs
(d = 2 gives AIC, d = log(n) gives BIC). Exponentiating half the criterion
difference gives the constrained-model weight

    w(z; d) = 1 / (1 + (1 + z/m)^{m/2} * exp(-d/2)),   z = gamma_hat^2,

evaluated in log space so huge z cannot overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import special

from . import distributions
from .errors import InputError


def mic_weight(gamma_sq, d: float, m: int):
    """Constrained-model weight 1 / (1 + (1 + z/m)^{m/2} e^{-d/2})."""
    m = distributions._check_df(m)
    return _ic_weight(gamma_sq, d, m, m)


def gic_weight(gamma_sq, d: float, n: int, m: int):
    """GIC variant with exponent n/2; requires n > m."""
    m = distributions._check_df(m)
    if not isinstance(n, (int, np.integer)) or n <= m:
        raise InputError(f"gic weight requires integer n > m, got n={n!r}, m={m}")
    return _ic_weight(gamma_sq, d, int(n), m)


def _ic_weight(gamma_sq, d: float, mult: int, m: int):
    if d < 0:
        raise InputError(f"penalty d must be nonnegative, got {d}")
    z = np.asarray(gamma_sq, dtype=float)
    if np.any(z < 0):
        raise InputError("gamma_sq must be nonnegative")
    z = np.minimum(z, 1e300)
    # w = 1 / (1 + exp(g)) with g = (mult/2) log(1 + z/m) - d/2
    g = 0.5 * mult * np.log1p(z / m) - 0.5 * d
    out = special.expit(-g)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class WeightSpec:
    """A weight function on gamma_hat^2, evaluated as ``value(z, m)``.

    kind 'mic' and 'gic' are the information-criterion families above;
    'none' is the constant-zero weight (plain full-model t interval);
    'custom' wraps a user callable, accepted after a sampled monotonicity
    check only (continuity and the decay-to-zero limit are not verified).
    """

    kind: str
    d: float = math.nan
    n: Optional[int] = None
    fn: Optional[Callable] = None

    @classmethod
    def mic(cls, d: float) -> "WeightSpec":
        if d < 0:
            raise InputError(f"penalty d must be nonnegative, got {d}")
        return cls(kind="mic", d=float(d))

    @classmethod
    def gic(cls, d: float, n: int) -> "WeightSpec":
        if d < 0:
            raise InputError(f"penalty d must be nonnegative, got {d}")
        if not isinstance(n, (int, np.integer)) or n < 2:
            raise InputError(f"gic requires integer n >= 2, got {n!r}")
        return cls(kind="gic", d=float(d), n=int(n))

    @classmethod
    def none(cls) -> "WeightSpec":
        return cls(kind="none")

    @classmethod
    def custom(cls, fn: Callable) -> "WeightSpec":
        grid = np.concatenate([[0.0], np.logspace(-6.0, 6.0, 121)])
        vals = np.asarray([float(fn(z)) for z in grid])
        if np.any(~np.isfinite(vals)) or np.any(vals < -1e-12) or np.any(vals > 1.0 + 1e-12):
            raise InputError("custom weight must map [0, inf) into [0, 1]")
        if np.any(np.diff(vals) > 1e-9):
            raise InputError("custom weight must be nonincreasing (sampled check failed)")
        return cls(kind="custom", fn=fn)

    def value(self, gamma_sq, m: int):
        if self.kind == "mic":
            return mic_weight(gamma_sq, self.d, m)
        if self.kind == "gic":
            return gic_weight(gamma_sq, self.d, self.n, m)
        if self.kind == "none":
            z = np.asarray(gamma_sq, dtype=float)
            return np.zeros_like(z) if z.ndim else 0.0
        z = np.asarray(gamma_sq, dtype=float)
        if z.ndim == 0:
            return float(self.fn(float(z)))
        return np.asarray([float(self.fn(v)) for v in z.ravel()]).reshape(z.shape)

    def label(self) -> str:
        if self.kind == "mic":
            return f"mic(d={self.d:g})"
        if self.kind == "gic":
            return f"gic(d={self.d:g}, n={self.n})"
        return self.kind


@dataclass(frozen=True)
class CriteriaPair:
    """Criterion values for the constrained (crit1) and full (crit2) models."""

    crit1: float
    crit2: float

    @property
    def prefers_full(self) -> bool:
        # ties go to the full model
        return self.crit2 <= self.crit1


def criteria(summary, d: float, family: str = "mic") -> CriteriaPair:
    """Information criteria for both models from a fitted summary."""
    if d < 0:
        raise InputError(f"penalty d must be nonnegative, got {d}")
    if family not in ("mic", "gic"):
        raise InputError(f"family must be 'mic' or 'gic', got {family!r}")
    if summary.sigma2_hat <= 0.0:
        raise InputError("criteria undefined for a perfect fit (sigma2_hat = 0)")
    mult = summary.m if family == "mic" else summary.n
    n, p, m = summary.n, summary.p, summary.m
    crit2 = mult * math.log(m * summary.sigma2_hat / n) + d * p
    crit1 = mult * math.log(summary.rss_star / n) + d * (p - 1)
    return CriteriaPair(crit1=crit1, crit2=crit2)


def cp_pair(summary) -> tuple[float, float]:
    """Mallows' Cp for the constrained model (cp1) and full model (cp2 = p)."""
    if summary.sigma2_hat <= 0.0:
        raise InputError("Cp undefined for a perfect fit (sigma2_hat = 0)")
    n, p, m = summary.n, summary.p, summary.m
    cp1 = summary.rss_star / summary.sigma2_hat - n + 2 * p - 1
    cp2 = float(p)
    return cp1, cp2


def cp_equivalent_d(m: int) -> float:
    """Penalty d at which the MIC rule reproduces the Cp rule: m log(1 + 2/m)."""
    m = distributions._check_df(m)
    return m * math.log1p(2.0 / m)


def mic_significance_level(d: float, m: int) -> float:
    """Significance level of the test equivalent to the MIC model choice.

    Choosing the full model iff MIC_full <= MIC_constrained is the same as
    rejecting tau = 0 when gamma_hat^2 >= m (exp(d/m) - 1); under tau = 0,
    gamma_hat is t-distributed with m degrees of freedom, so the level is
    2 (1 - G_m(sqrt(m (exp(d/m) - 1)))).
    """
    m = distributions._check_df(m)
    if d < 0:
        raise InputError(f"penalty d must be nonnegative, got {d}")
    threshold = math.sqrt(m * math.expm1(d / m))
    return 2.0 * (1.0 - distributions.student_t_cdf(threshold, m))
