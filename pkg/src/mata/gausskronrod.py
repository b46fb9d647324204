"""Gauss-Kronrod panel rules, generated at import time.

Recurrence coefficients of the Kronrod extension are computed exactly in
rational arithmetic with Laurie's algorithm (BIT 37, 1997), then nodes and
weights come from the symmetric tridiagonal eigenproblem (Golub-Welsch).
No tabulated constants; a unit test pins degree exactness to 3n + 1.

The embedded n-point Gauss rule shares nodes with the (2n+1)-point Kronrod
rule, so one batch of integrand values yields both the panel value (Kronrod)
and the error estimate |Kronrod - Gauss|.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np


def _kronrod_jacobi(n: int, alpha, beta):
    """Jacobi matrix of the (2n+1)-node Kronrod rule (exact rationals)."""
    a = [Fraction(0)] * (2 * n + 1)
    b = [Fraction(0)] * (2 * n + 1)
    for i in range((3 * n) // 2 + 2):
        if i < 2 * n + 1:
            a[i] = alpha[i]
            b[i] = beta[i]
    s = [Fraction(0)] * (n // 2 + 2)
    t = [Fraction(0)] * (n // 2 + 2)
    t[1] = b[n + 1]
    for m in range(n - 1):
        u = Fraction(0)
        for k in range((m + 1) // 2, -1, -1):
            l = m - k
            u = u + (a[k + n + 1] - a[l]) * t[k + 1] + b[k + n + 1] * s[k] - b[l] * s[k + 1]
            s[k + 1] = u
        s, t = t, s
    for j in range(n // 2, -1, -1):
        s[j + 1] = s[j]
    for m in range(n - 1, 2 * n - 2):
        u = Fraction(0)
        j = 0
        for k in range(m + 1 - n, (m - 1) // 2 + 1):
            l = m - k
            j = n - 1 - l
            u = u - (a[k + n + 1] - a[l]) * t[j + 1] - b[k + n + 1] * s[j + 1] + b[l] * s[j + 2]
            s[j + 1] = u
        if m % 2 == 0:
            k = m // 2
            a[k + n + 1] = a[k] + (s[j + 1] - b[k + n + 1] * s[j + 2]) / t[j + 2]
        else:
            k = (m + 1) // 2
            b[k + n + 1] = s[j + 1] / s[j + 2]
        s, t = t, s
    a[2 * n] = a[n - 1] - b[2 * n] * s[1] / t[1]
    return a, b


def _gauss_from_jacobi(a, b):
    a = np.array([float(x) for x in a])
    b = np.array([float(x) for x in b])
    J = np.diag(a) + np.diag(np.sqrt(b[1:]), 1) + np.diag(np.sqrt(b[1:]), -1)
    vals, vecs = np.linalg.eigh(J)
    return vals, b[0] * vecs[0, :] ** 2


@dataclass(frozen=True)
class PanelRule:
    """Nodes on [-1, 1] with Kronrod weights and embedded-Gauss weights.

    ``weights_gauss`` is aligned with ``nodes`` and is zero at Kronrod-only
    nodes, so the error estimate is |(w_kronrod - w_gauss) . f|.
    """

    nodes: np.ndarray
    weights: np.ndarray
    weights_gauss: np.ndarray

    @property
    def size(self) -> int:
        return self.nodes.size


def kronrod_rule(n: int) -> PanelRule:
    """Build the (2n+1)-point Kronrod rule with embedded n-point Gauss."""
    N = 2 * n + 2
    alpha = [Fraction(0)] * N
    beta = [Fraction(0)] * N
    beta[0] = Fraction(2)
    for k in range(1, N):
        beta[k] = Fraction(k * k, 4 * k * k - 1)
    a, b = _kronrod_jacobi(n, alpha, beta)
    xk, wk = _gauss_from_jacobi(a, b)
    order = np.argsort(xk)
    xk, wk = xk[order], wk[order]

    xg, wg = np.polynomial.legendre.leggauss(n)
    wg_full = np.zeros_like(wk)
    for node, weight in zip(xg, wg):
        i = int(np.argmin(np.abs(xk - node)))
        if abs(xk[i] - node) > 1e-10:
            raise RuntimeError("Gauss nodes are not embedded in the Kronrod rule")
        wg_full[i] = weight
    return PanelRule(nodes=xk, weights=wk, weights_gauss=wg_full)


RULE21 = kronrod_rule(10)
