"""Distribution primitives: standard normal, Student t, and the residual
scale ratio W = sigma_hat / sigma (so that m * W^2 is chi-square with m
degrees of freedom).

All functions accept scalars or numpy arrays and broadcast elementwise.
Quantiles are computed by bracketed bisection with a Newton polish against
our own CDFs, so CDF/quantile round-trips close to ~1e-13 by construction.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import special

from .errors import InputError

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


class DistributionError(InputError):
    """Invalid argument to a distribution primitive."""


def _check_df(m) -> int:
    if isinstance(m, bool) or not isinstance(m, (int, np.integer)):
        raise DistributionError(f"degrees of freedom must be an integer, got {m!r}")
    if m < 1:
        raise DistributionError(f"degrees of freedom must be >= 1, got {m}")
    return int(m)


def _check_finite(name: str, x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DistributionError(f"{name} must be finite, got {x!r}")
    return arr if arr.ndim else float(arr)


# ---------------------------------------------------------------------------
# standard normal
# ---------------------------------------------------------------------------

def normal_cdf(x):
    """Standard normal CDF, accurate to ~1e-16 via erfc."""
    x = _check_finite("x", x)
    return _norm_cdf(x)


def normal_pdf(x):
    """Standard normal density."""
    x = _check_finite("x", x)
    return _norm_pdf(x)


def normal_quantile(p):
    """Inverse standard normal CDF; rejects p outside (0, 1)."""
    p = np.asarray(p, dtype=float)
    if np.any((p <= 0.0) | (p >= 1.0)):
        raise DistributionError("normal quantile requires 0 < p < 1")
    out = special.ndtri(p)
    return out if out.ndim else float(out)


def _norm_cdf(x):
    return 0.5 * special.erfc(-np.asarray(x, dtype=float) / _SQRT2)


def _norm_pdf(x):
    x = np.asarray(x, dtype=float)
    return _INV_SQRT_2PI * np.exp(-0.5 * x * x)


# ---------------------------------------------------------------------------
# Student t with integer degrees of freedom
# ---------------------------------------------------------------------------

def student_t_cdf(x, m: int):
    """CDF of the Student t distribution with m degrees of freedom.

    Evaluated through the regularized incomplete beta function:
    for x >= 0,  F(x) = 1 - I_{m/(m+x^2)}(m/2, 1/2) / 2, and by
    symmetry F(-x) = 1 - F(x) holds exactly in floating point.
    """
    m = _check_df(m)
    x = _check_finite("x", x)
    return _t_cdf(x, m)


def _t_cdf(x, m: int):
    x = np.asarray(x, dtype=float)
    # guard x*x overflow: |x| > 1e154 is indistinguishable from the limit
    ax = np.minimum(np.abs(x), 1e154)
    tail = 0.5 * special.betainc(0.5 * m, 0.5, m / (m + ax * ax))
    out = np.where(x >= 0.0, 1.0 - tail, tail)
    return out if out.ndim else float(out)


def student_t_pdf(x, m: int):
    """Density of the Student t distribution with m degrees of freedom."""
    m = _check_df(m)
    x = _check_finite("x", x)
    return _t_pdf(x, m)


@lru_cache(maxsize=256)
def _t_pdf_norm_const(m: int) -> float:
    return math.exp(math.lgamma(0.5 * (m + 1)) - math.lgamma(0.5 * m)) / math.sqrt(m * math.pi)


def _t_pdf(x, m: int):
    x = np.asarray(x, dtype=float)
    ax = np.minimum(np.abs(x), 1e154)
    logkern = -0.5 * (m + 1) * np.log1p(ax * ax / m)
    out = _t_pdf_norm_const(m) * np.exp(logkern)
    return out if out.ndim else float(out)


def student_t_quantile(p: float, m: int) -> float:
    """Inverse Student t CDF.

    Bracketed bisection plus Newton polish on the incomplete-beta CDF;
    round-trips student_t_cdf(student_t_quantile(p, m), m) == p to ~1e-13.
    """
    m = _check_df(m)
    if not (0.0 < p < 1.0):
        raise DistributionError(f"t quantile requires 0 < p < 1, got {p}")
    return _t_quantile_cached(float(p), m)


@lru_cache(maxsize=65536)
def _t_quantile_cached(p: float, m: int) -> float:
    if p == 0.5:
        return 0.0
    if p < 0.5:
        return -_t_quantile_cached(1.0 - p, m)
    # expand upper bracket; t tails are heavy for small m
    lo, hi = 0.0, 2.0
    while _t_cdf(hi, m) < p:
        lo = hi
        hi *= 2.0
        if hi > 1e300:  # pragma: no cover - p < 1 guarantees termination
            break
    return _invert_cdf(lambda q: _t_cdf(q, m), lambda q: _t_pdf(q, m), p, lo, hi)


def _invert_cdf(cdf, pdf, p: float, lo: float, hi: float) -> float:
    """Find q with cdf(q) = p inside [lo, hi] (cdf strictly increasing)."""
    for _ in range(12):
        mid = 0.5 * (lo + hi)
        if cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    q = 0.5 * (lo + hi)
    for _ in range(100):
        resid = cdf(q) - p
        if abs(resid) <= 1e-15:
            return q
        slope = pdf(q)
        step = resid / slope if slope > 0.0 else math.nan
        qn = q - step
        if not math.isfinite(qn) or not (lo <= qn <= hi):
            qn = 0.5 * (lo + hi)
        if cdf(qn) < p:
            lo = qn
        else:
            hi = qn
        if qn == q:
            return q
        q = qn
    return q


# ---------------------------------------------------------------------------
# scale ratio W = sigma_hat / sigma,  m W^2 ~ chi-square_m
# ---------------------------------------------------------------------------

def sigma_ratio_pdf(w, m: int):
    """Density q_m(w) = 2 (m/2)^{m/2} / Gamma(m/2) * w^{m-1} exp(-m w^2 / 2)."""
    m = _check_df(m)
    w = np.asarray(w, dtype=float)
    if np.any(w <= 0.0):
        raise DistributionError("sigma ratio pdf requires w > 0")
    logc = math.log(2.0) + 0.5 * m * math.log(0.5 * m) - math.lgamma(0.5 * m)
    out = np.exp(logc + (m - 1) * np.log(w) - 0.5 * m * w * w)
    return out if out.ndim else float(out)


def sigma_ratio_cdf(w, m: int):
    """P(W <= w) = P(chi-square_m <= m w^2)."""
    m = _check_df(m)
    w = np.asarray(w, dtype=float)
    if np.any(w <= 0.0):
        raise DistributionError("sigma ratio cdf requires w > 0")
    out = special.gammainc(0.5 * m, 0.5 * m * w * w)
    return out if out.ndim else float(out)


def sigma_ratio_quantile(p: float, m: int) -> float:
    """Inverse of sigma_ratio_cdf, by bracketed bisection + Newton polish."""
    m = _check_df(m)
    if not (0.0 < p < 1.0):
        raise DistributionError(f"sigma ratio quantile requires 0 < p < 1, got {p}")
    return _sigma_ratio_quantile_cached(float(p), m)


@lru_cache(maxsize=65536)
def _sigma_ratio_quantile_cached(p: float, m: int) -> float:
    cdf = lambda w: float(special.gammainc(0.5 * m, 0.5 * m * w * w))
    lo, hi = 1.0, 1.0
    while cdf(hi) < p:
        hi *= 2.0
    while cdf(lo) > p:
        lo *= 0.5
        if lo < 1e-300:  # pragma: no cover
            break
    pdf = lambda w: float(sigma_ratio_pdf(w, m))
    return _invert_cdf(cdf, pdf, p, lo, hi)


def sigma_ratio_mean(m: int) -> float:
    """E[W] = sqrt(2/m) * Gamma((m+1)/2) / Gamma(m/2)."""
    m = _check_df(m)
    return math.exp(
        0.5 * (math.log(2.0) - math.log(m))
        + math.lgamma(0.5 * (m + 1))
        - math.lgamma(0.5 * m)
    )


def chi2_cdf(x, k: int):
    """Chi-square CDF with k degrees of freedom (regularized lower gamma)."""
    k = _check_df(k)
    x = np.asarray(x, dtype=float)
    out = special.gammainc(0.5 * k, np.maximum(x, 0.0) * 0.5)
    return out if out.ndim else float(out)
