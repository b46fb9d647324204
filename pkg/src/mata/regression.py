"""Least-squares ingestion: fit the full model and reduce the data to the
sufficient statistics that drive everything downstream.

The full model is Y = X beta + noise with p linearly independent columns.
Interest parameter: theta = a' beta; constraint parameter: tau = c' beta - t.
The constrained model sets tau = 0. Everything the averaged interval needs
is (theta_hat, tau_hat, sigma2_hat, v_theta, v_tau, rho, gamma_hat, m, n, p).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import InputError

# singular values below RANK_RTOL * s_max count as zero
RANK_RTOL = 1e-10
# |rho| at or above this means a and c are numerically collinear
RHO_LIMIT = 1.0 - 1e-10


class DataError(InputError):
    """Malformed input file or inconsistent specification vectors."""


class RankDeficientError(InputError):
    def __init__(self, columns):
        self.columns = tuple(columns)
        super().__init__(
            f"model matrix is rank deficient; dependent column set {self.columns}"
        )


@dataclass(frozen=True)
class DesignData:
    """Model matrix, responses and the specification vectors (a, c, t)."""

    X: np.ndarray
    Y: np.ndarray
    a: np.ndarray
    c: np.ndarray
    t: float

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.X, dtype=float))
        Y = np.asarray(self.Y, dtype=float).ravel()
        a = np.asarray(self.a, dtype=float).ravel()
        c = np.asarray(self.c, dtype=float).ravel()
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
            raise DataError("X and Y must be finite")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(c))):
            raise DataError("a and c must be finite")
        n, p = X.shape
        if Y.shape[0] != n:
            raise DataError(f"X has {n} rows but Y has {Y.shape[0]} entries")
        if a.shape[0] != p or c.shape[0] != p:
            raise DataError(
                f"a and c must have length p={p}, got {a.shape[0]} and {c.shape[0]}"
            )
        if np.all(a == 0.0):
            raise DataError("a must be nonzero")
        if np.all(c == 0.0):
            raise DataError("c must be nonzero")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "t", float(self.t))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class RegressionSummary:
    """Sufficient statistics of the fitted full model."""

    theta_hat: float
    tau_hat: float
    sigma2_hat: float
    v_theta: float
    v_tau: float
    rho: float
    gamma_hat: float
    m: int
    n: int
    p: int
    rss: float
    rss_star: float


def fit_summary(data: DesignData) -> RegressionSummary:
    """Fit by singular value decomposition and extract the summary.

    The SVD route gives the (X'X)^{-1} quadratic forms v_theta, v_tau and
    the correlation rho stably, without forming normal equations.
    """
    X, Y = data.X, data.Y
    n, p = X.shape
    m = n - p
    if m < 1:
        raise InputError(f"need n > p for a residual scale estimate; n={n}, p={p}")

    U, S, Vt = np.linalg.svd(X, full_matrices=False)
    tol = RANK_RTOL * S[0]
    small = S <= tol
    if np.any(small):
        involved = np.any(np.abs(Vt[small]) > 1e-8, axis=0)
        raise RankDeficientError(np.nonzero(involved)[0])

    coef = Vt.T @ ((U.T @ Y) / S)
    resid = Y - X @ coef
    rss = float(resid @ resid)
    sigma2_hat = rss / m
    if sigma2_hat <= 0.0:
        raise InputError("residuals are identically zero; the scale is not estimable")

    # quadratic forms x' (X'X)^{-1} y = (V' x / S) . (V' y / S)
    wa = (Vt @ data.a) / S
    wc = (Vt @ data.c) / S
    v_theta = float(wa @ wa)
    v_tau = float(wc @ wc)
    cross = float(wa @ wc)
    rho = cross / np.sqrt(v_theta * v_tau)
    if abs(rho) >= RHO_LIMIT:
        raise InputError(
            f"a and c are numerically collinear through (X'X)^(-1): |rho| = {abs(rho):.2e}"
        )

    theta_hat = float(data.a @ coef)
    tau_hat = float(data.c @ coef) - data.t
    gamma_hat = tau_hat / (np.sqrt(sigma2_hat) * np.sqrt(v_tau))
    rss_star = tau_hat**2 / v_tau + m * sigma2_hat
    return RegressionSummary(
        theta_hat=theta_hat,
        tau_hat=tau_hat,
        sigma2_hat=sigma2_hat,
        v_theta=v_theta,
        v_tau=v_tau,
        rho=float(rho),
        gamma_hat=float(gamma_hat),
        m=m,
        n=n,
        p=p,
        rss=rss,
        rss_star=float(rss_star),
    )


def load_dataset(path, response_column, a, c, t, intercept: bool = False) -> DesignData:
    """Read a UTF-8 comma-separated file with a header row into DesignData.

    The response is picked by header name or 0-based column index; every
    other column becomes a predictor, in file order. With ``intercept=True``
    a column of ones is prepended, and a and c must then have length
    (number of predictors) + 1.
    """
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    rows = [r for r in rows if r and not all(cell.strip() == "" for cell in r)]
    if not rows:
        raise DataError(f"{path}: empty file, expected a header row and data rows")
    header = [h.strip() for h in rows[0]]
    if len(rows) < 2:
        raise DataError(f"{path}: no data rows after the header")

    if isinstance(response_column, int) and not isinstance(response_column, bool):
        if not (0 <= response_column < len(header)):
            raise DataError(
                f"response column index {response_column} out of range for {len(header)} columns"
            )
        resp_idx = response_column
    else:
        name = str(response_column).strip()
        if name not in header:
            raise DataError(f"response column {name!r} not found in header {header}")
        resp_idx = header.index(name)

    ncol = len(header)
    values = np.empty((len(rows) - 1, ncol))
    for i, row in enumerate(rows[1:], start=1):
        if len(row) != ncol:
            raise DataError(f"row {i}: expected {ncol} fields, got {len(row)}")
        for j, cell in enumerate(row):
            text = cell.strip()
            if text == "":
                raise DataError(f"missing value at row {i}, column {header[j]!r}")
            try:
                values[i - 1, j] = float(text)
            except ValueError:
                raise DataError(
                    f"non-numeric value {text!r} at row {i}, column {header[j]!r}"
                ) from None

    Y = values[:, resp_idx]
    pred_idx = [j for j in range(ncol) if j != resp_idx]
    X = values[:, pred_idx]
    if intercept:
        X = np.column_stack([np.ones(X.shape[0]), X])
    p = X.shape[1]
    a = np.asarray(a, dtype=float).ravel()
    c = np.asarray(c, dtype=float).ravel()
    if a.shape[0] != p or c.shape[0] != p:
        raise DataError(
            f"a and c must have length {p} "
            f"({'with' if intercept else 'without'} the intercept column), "
            f"got {a.shape[0]} and {c.shape[0]}"
        )
    return DesignData(X=X, Y=Y, a=a, c=c, t=float(t))
