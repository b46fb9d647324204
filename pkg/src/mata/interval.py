"""Model-averaged tail-area (MATA) interval construction.

For weight w on gamma_hat^2, correlation rho and residual degrees of
freedom m, the averaged tail function is

    k(a, g) = w(g^2) * G_{m+1}( sqrt((m+1)/(m+g^2)) * (a - rho g) / sqrt(1-rho^2) )
            + (1 - w(g^2)) * G_m(a),

strictly increasing in a. The interval endpoints come from the two roots
a_l(g), a_u(g) of k = 1 - alpha/2 and k = alpha/2 at g = gamma_hat:

    [theta_hat - sqrt(v_theta) sigma_hat a_l,  theta_hat - sqrt(v_theta) sigma_hat a_u].

The centre/half-width decomposition b = (a_l + a_u)/2, s = (a_l - a_u)/2
(b odd, s even in g) is what the coverage and length integrals consume.

Root finding is a bracketed, bisection-safeguarded Newton iteration on an
analytic bracket: the root always lies between the two single-component
solutions a1 (weight-one term alone) and a2 = G_m^{-1}(u), because k is a
pointwise mixture of two increasing CDFs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import distributions as dist
from .errors import InputError, NumericalError
from .weights import WeightSpec

# beyond this |gamma| the weight term is dropped and the plain t endpoints
# are returned; also keeps gamma^2 far from overflow
GAMMA_SHORTCUT = 1e8
# residual tolerance on |k(a) - u|
RESID_TOL = 1e-13
MAX_ITER = 200
# stop inserting into the per-config solution cache beyond this size
CACHE_CAP = 1 << 21


@dataclass(frozen=True)
class ProblemConfig:
    """Known quantities (m, rho, alpha) plus the weight specification."""

    m: int
    rho: float
    alpha: float
    weight: WeightSpec

    def __post_init__(self):
        dist._check_df(self.m)
        if not abs(self.rho) < 1.0:
            raise InputError(f"|rho| must be < 1, got {self.rho}")
        if not 0.0 < self.alpha < 1.0:
            raise InputError(f"alpha must be in (0, 1), got {self.alpha}")
        if not isinstance(self.weight, WeightSpec):
            raise InputError("weight must be a WeightSpec")


@dataclass(frozen=True)
class TailSolution:
    """Roots of both tail equations at one gamma, with b/s decomposition."""

    gamma: float
    a_lower: float
    a_upper: float
    b: float
    s: float

    def __post_init__(self):
        if not self.a_lower > self.a_upper:
            raise NumericalError(
                f"tail roots out of order at gamma={self.gamma}: "
                f"a_lower={self.a_lower}, a_upper={self.a_upper}"
            )


@dataclass(frozen=True)
class Interval:
    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise NumericalError(f"empty interval [{self.lower}, {self.upper}]")

    @property
    def width(self) -> float:
        return self.upper - self.lower


def k_value(a, gamma, cfg: ProblemConfig):
    """The averaged tail function k(a, gamma); accepts scalars or arrays."""
    a_arr = np.asarray(a, dtype=float)
    g_arr = np.asarray(gamma, dtype=float)
    if not (np.all(np.isfinite(a_arr)) and np.all(np.isfinite(g_arr))):
        raise InputError("k_value requires finite a and gamma")
    m, rho = cfg.m, cfg.rho
    g = np.clip(g_arr, -1e150, 1e150)
    w = cfg.weight.value(g * g, m)
    scale = np.sqrt((m + 1.0) / (m + g * g)) / math.sqrt(1.0 - rho * rho)
    r1 = scale * (a_arr - rho * g)
    out = w * dist._t_cdf(r1, m + 1) + (1.0 - w) * dist._t_cdf(a_arr, m)
    return out if out.ndim else float(out)


class TailSolver:
    """Vectorized tail-equation solver for one ProblemConfig.

    Solutions of the standard pair (u = 1 - alpha/2 and u = alpha/2) are
    cached per exact gamma value, so repeated quadrature nodes are free and
    caching can never alter a result.
    """

    def __init__(self, cfg: ProblemConfig):
        self.cfg = cfg
        self.m = cfg.m
        self.rho = cfg.rho
        self.c_rho = math.sqrt(1.0 - cfg.rho * cfg.rho)
        self.u_hi = 1.0 - 0.5 * cfg.alpha
        self.u_lo = 0.5 * cfg.alpha
        self.t_limit = dist.student_t_quantile(self.u_hi, cfg.m)
        self._cache: dict[float, tuple[float, float]] = {}

    # -- scalar conveniences -------------------------------------------------

    def solution(self, gamma: float) -> TailSolution:
        al, au = self.pair(np.asarray([gamma]))
        al, au = float(al[0]), float(au[0])
        return TailSolution(
            gamma=float(gamma),
            a_lower=al,
            a_upper=au,
            b=0.5 * (al + au),
            s=0.5 * (al - au),
        )

    # -- batched interface ---------------------------------------------------

    def pair(self, gamma: np.ndarray, cache: bool = True):
        """(a_lower, a_upper) arrays for an array of gamma values."""
        gamma = np.asarray(gamma, dtype=float)
        flat = gamma.ravel()
        al = np.empty_like(flat)
        au = np.empty_like(flat)
        miss_idx = []
        if cache and self._cache:
            for i, g in enumerate(flat):
                hit = self._cache.get(g)
                if hit is None:
                    miss_idx.append(i)
                else:
                    al[i], au[i] = hit
        else:
            miss_idx = range(len(flat))
        miss_idx = np.fromiter(miss_idx, dtype=np.intp)
        if miss_idx.size:
            g_miss = flat[miss_idx]
            al_m = self.solve(self.u_hi, g_miss)
            au_m = self.solve(self.u_lo, g_miss)
            al[miss_idx] = al_m
            au[miss_idx] = au_m
            if cache and len(self._cache) < CACHE_CAP:
                for g, x, y in zip(g_miss, al_m, au_m):
                    self._cache[g] = (x, y)
        return al.reshape(gamma.shape), au.reshape(gamma.shape)

    def b_s(self, gamma: np.ndarray, cache: bool = True):
        al, au = self.pair(gamma, cache=cache)
        return 0.5 * (al + au), 0.5 * (al - au)

    def solve(self, u: float, gamma: np.ndarray) -> np.ndarray:
        """Solve k(a, gamma) = u elementwise over gamma."""
        if not 0.0 < u < 1.0:
            raise InputError(f"tail level u must be in (0, 1), got {u}")
        m, rho, c_rho = self.m, self.rho, self.c_rho
        gamma = np.asarray(gamma, dtype=float)
        if not np.all(np.isfinite(gamma)):
            raise InputError("gamma must be finite")
        out = np.empty_like(gamma)

        far = np.abs(gamma) > GAMMA_SHORTCUT
        if np.any(far):
            out[far] = dist.student_t_quantile(u, m)
        near = ~far
        if not np.any(near):
            return out
        g = gamma[near]

        q1 = dist.student_t_quantile(u, m + 1)
        q2 = dist.student_t_quantile(u, m)
        z = g * g
        w = np.asarray(self.cfg.weight.value(z, m), dtype=float)
        spread = np.sqrt((m + z) / (m + 1.0))
        a1 = rho * g + q1 * spread * c_rho
        a2 = np.full_like(g, q2)
        lo = np.minimum(a1, a2)
        hi = np.maximum(a1, a2)
        pad = 0.05 * (hi - lo) + 1e-12
        lo = lo - pad
        hi = hi + pad

        inv_spread = np.sqrt((m + 1.0) / (m + z)) / c_rho
        a = np.clip(w * a1 + (1.0 - w) * a2, lo, hi)

        active = np.arange(g.size)
        for _ in range(MAX_ITER):
            aa = a[active]
            gg = g[active]
            ww = w[active]
            isp = inv_spread[active]
            r1 = isp * (aa - rho * gg)
            resid = ww * dist._t_cdf(r1, m + 1) + (1.0 - ww) * dist._t_cdf(aa, m) - u
            ok = np.abs(resid) <= RESID_TOL
            if np.all(ok):
                active = active[~ok]
                break
            pos = resid > 0.0
            hi[active[pos]] = np.minimum(hi[active[pos]], aa[pos])
            lo[active[~pos]] = np.maximum(lo[active[~pos]], aa[~pos])
            slope = ww * dist._t_pdf(r1, m + 1) * isp + (1.0 - ww) * dist._t_pdf(aa, m)
            with np.errstate(divide="ignore", invalid="ignore"):
                step = resid / slope
            a_new = aa - step
            bad = ~np.isfinite(a_new) | (a_new <= lo[active]) | (a_new >= hi[active])
            a_new[bad] = 0.5 * (lo[active][bad] + hi[active][bad])
            a[active] = a_new
            active = active[~ok]
        if active.size:
            raise NumericalError(
                f"tail solve did not converge for u={u} at gamma={g[active[:5]]}, "
                f"bracket=[{lo[active[0]]}, {hi[active[0]]}]"
            )
        out[near] = a
        return out


# module-level solver reuse so the scalar API benefits from the cache
_SOLVERS: dict[ProblemConfig, TailSolver] = {}


def get_solver(cfg: ProblemConfig) -> TailSolver:
    solver = _SOLVERS.get(cfg)
    if solver is None:
        if len(_SOLVERS) > 64:
            _SOLVERS.clear()
        solver = TailSolver(cfg)
        _SOLVERS[cfg] = solver
    return solver


def solve_tail(u: float, gamma: float, cfg: ProblemConfig) -> float:
    """The root a of k(a, gamma) = u, to residual 1e-12."""
    if not np.isfinite(gamma):
        raise InputError("gamma must be finite")
    return float(get_solver(cfg).solve(float(u), np.asarray([float(gamma)]))[0])


def tail_solution(gamma: float, cfg: ProblemConfig) -> TailSolution:
    """Both tail roots at gamma plus the centre/half-width decomposition."""
    if not np.isfinite(gamma):
        raise InputError("gamma must be finite")
    return get_solver(cfg).solution(float(gamma))


def delta_u(u: float, x: float, y: float, cfg: ProblemConfig) -> float:
    """Solve h(delta, x, y) = u, where h is the averaged tail function in
    the scaled coordinates x (shift) and y > 0 (scale):

        h(delta, x, y) = w(x^2/y^2) G_{m+1}(r1) + (1 - w(x^2/y^2)) G_m(delta / y),
        r1 = sqrt((m+1)/(m + x^2/y^2)) * (delta - rho x) / (y sqrt(1 - rho^2)).

    The root is bracketed by the two single-component solutions
    delta1 = rho x + G_{m+1}^{-1}(u) y sqrt((m + x^2/y^2)/(m+1)) sqrt(1-rho^2)
    and delta2 = G_m^{-1}(u) y, again because h is a mixture of increasing
    CDFs of delta.
    """
    if y <= 0.0:
        raise InputError(f"scale y must be positive, got {y}")
    if not 0.0 < u < 1.0:
        raise InputError(f"tail level u must be in (0, 1), got {u}")
    if not (np.isfinite(x) and np.isfinite(y)):
        raise InputError("x and y must be finite")
    m, rho = cfg.m, cfg.rho
    c_rho = math.sqrt(1.0 - rho * rho)
    z = (x / y) ** 2
    w = float(cfg.weight.value(min(z, 1e300), m))
    q1 = dist.student_t_quantile(u, m + 1)
    q2 = dist.student_t_quantile(u, m)
    d1 = rho * x + q1 * y * math.sqrt((m + z) / (m + 1.0)) * c_rho
    d2 = q2 * y
    lo, hi = min(d1, d2), max(d1, d2)
    pad = 0.05 * (hi - lo) + 1e-12 * max(1.0, abs(lo), abs(hi))
    lo -= pad
    hi += pad

    inv_spread = math.sqrt((m + 1.0) / (m + z)) / (y * c_rho)

    def h_resid(delta: float) -> tuple[float, float]:
        r1 = inv_spread * (delta - rho * x)
        val = w * dist._t_cdf(r1, m + 1) + (1.0 - w) * dist._t_cdf(delta / y, m)
        slope = (
            w * dist._t_pdf(r1, m + 1) * inv_spread
            + (1.0 - w) * dist._t_pdf(delta / y, m) / y
        )
        return val - u, slope

    delta = w * d1 + (1.0 - w) * d2
    delta = min(max(delta, lo), hi)
    for _ in range(MAX_ITER):
        resid, slope = h_resid(delta)
        if abs(resid) <= RESID_TOL:
            return delta
        if resid > 0.0:
            hi = min(hi, delta)
        else:
            lo = max(lo, delta)
        nxt = delta - resid / slope if slope > 0.0 else math.nan
        if not math.isfinite(nxt) or not (lo < nxt < hi):
            nxt = 0.5 * (lo + hi)
        if nxt == delta:
            return delta
        delta = nxt
    raise NumericalError(
        f"delta solve did not converge: u={u}, x={x}, y={y}, bracket=[{lo}, {hi}]"
    )


def mata_interval(summary, alpha: float, weight: WeightSpec) -> Interval:
    """Build the averaged interval for theta from a fitted summary."""
    cfg = ProblemConfig(m=summary.m, rho=summary.rho, alpha=alpha, weight=weight)
    sol = tail_solution(summary.gamma_hat, cfg)
    half_scale = math.sqrt(summary.v_theta) * math.sqrt(summary.sigma2_hat)
    return Interval(
        lower=summary.theta_hat - half_scale * sol.a_lower,
        upper=summary.theta_hat - half_scale * sol.a_upper,
    )
