"""Gegenbauer (ultraspherical) polynomials for the probability measure

    dmu_gamma(x) = C(gamma) * (1 - x^2)^gamma dx   on [-1, 1],

normalized so the total mass is one.  The working family ``R_n`` is scaled
to ``R_n(1) = 1``; the orthonormal family multiplies in the norm factor
returned by :func:`orthonormal_scale`.  By convention ``R_n = 0`` for
negative degree.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

__all__ = [
    "measure_constant",
    "gegenbauer",
    "gegenbauer_table",
    "gegenbauer_derivative",
    "orthonormal_scale",
    "gegenbauer_orthonormal",
    "orthonormal_table",
]


def _check_gamma(gamma: float) -> float:
    gamma = float(gamma)
    if not gamma > -1.0:
        raise ValueError(f"measure exponent must exceed -1, got {gamma}")
    return gamma


def measure_constant(gamma: float) -> float:
    """Normalizing constant Gamma(2g+2) / (2^(2g+1) Gamma(g+1)^2).

    Multiplying ``(1-x^2)^gamma`` by this constant makes the weight a
    probability density on [-1, 1].
    """
    gamma = _check_gamma(gamma)
    log_c = (
        gammaln(2.0 * gamma + 2.0)
        - (2.0 * gamma + 1.0) * math.log(2.0)
        - 2.0 * gammaln(gamma + 1.0)
    )
    return float(math.exp(log_c))


def gegenbauer(n: int, gamma: float, x):
    """Value of ``R_n`` at ``x`` (scalar or ndarray), with ``R_n(1) = 1``.

    Degrees below zero return 0 by convention.  Uses the three-term
    recurrence

        (k + 2g) R_k = (2k + 2g - 1) x R_{k-1} - (k - 1) R_{k-2},

    which keeps the endpoint normalization exactly.
    """
    n = int(n)
    gamma = _check_gamma(gamma)
    x = np.asarray(x, dtype=float)
    if n < 0:
        return np.zeros_like(x) if x.ndim else 0.0
    if n == 0:
        out = np.ones_like(x)
        return out if x.ndim else float(out)
    prev = np.ones_like(x)
    cur = x.copy()
    for k in range(2, n + 1):
        prev, cur = cur, ((2.0 * k + 2.0 * gamma - 1.0) * x * cur - (k - 1.0) * prev) / (
            k + 2.0 * gamma
        )
    return cur if x.ndim else float(cur)


def gegenbauer_table(n_max: int, gamma: float, x) -> np.ndarray:
    """All values ``R_0..R_{n_max}`` at once, shape ``(n_max+1,) + x.shape``."""
    n_max = int(n_max)
    if n_max < 0:
        raise ValueError("table length must be nonnegative")
    gamma = _check_gamma(gamma)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = x
    for k in range(2, n_max + 1):
        out[k] = ((2.0 * k + 2.0 * gamma - 1.0) * x * out[k - 1] - (k - 1.0) * out[k - 2]) / (
            k + 2.0 * gamma
        )
    return out


def derivative_factor(n: int, gamma: float) -> float:
    """Scalar in ``R_n' = factor * R_{n-1}`` at the shifted parameter."""
    return n * (n + 2.0 * gamma + 1.0) / (2.0 * (gamma + 1.0))


def gegenbauer_derivative(n: int, gamma: float, x):
    """Derivative of ``R_n``: ``n (n + 2g + 1) / (2 (g + 1)) R_{n-1}`` at
    parameter ``gamma + 1``.  Zero for ``n <= 0``."""
    n = int(n)
    gamma = _check_gamma(gamma)
    if n <= 0:
        x = np.asarray(x, dtype=float)
        return np.zeros_like(x) if x.ndim else 0.0
    return derivative_factor(n, gamma) * gegenbauer(n - 1, gamma + 1.0, x)


def orthonormal_scale(n: int, gamma: float) -> float:
    """Positive scale making ``scale * R_n`` a unit vector in L2(dmu).

    The squared reciprocal is
    ``Gamma(2g+2) n! / ((2n + 2g + 1) Gamma(n + 2g + 1))``.
    """
    n = int(n)
    if n < 0:
        raise ValueError("degree must be nonnegative")
    gamma = _check_gamma(gamma)
    log_sq = (
        math.log(2.0 * n + 2.0 * gamma + 1.0)
        + gammaln(n + 2.0 * gamma + 1.0)
        - gammaln(2.0 * gamma + 2.0)
        - gammaln(n + 1.0)
    )
    return float(math.exp(0.5 * log_sq))


def _scale_table(n_max: int, gamma: float) -> np.ndarray:
    ns = np.arange(n_max + 1, dtype=float)
    log_sq = (
        np.log(2.0 * ns + 2.0 * gamma + 1.0)
        + gammaln(ns + 2.0 * gamma + 1.0)
        - gammaln(2.0 * gamma + 2.0)
        - gammaln(ns + 1.0)
    )
    return np.exp(0.5 * log_sq)


def gegenbauer_orthonormal(n: int, gamma: float, x):
    """Orthonormal polynomial value(s): ``orthonormal_scale(n) * R_n(x)``."""
    if int(n) < 0:
        x = np.asarray(x, dtype=float)
        return np.zeros_like(x) if x.ndim else 0.0
    return orthonormal_scale(n, gamma) * gegenbauer(n, gamma, x)


def orthonormal_table(n_max: int, gamma: float, x) -> np.ndarray:
    """Orthonormal values for all degrees up to ``n_max`` on a grid."""
    table = gegenbauer_table(n_max, gamma, x)
    scales = _scale_table(n_max, _check_gamma(gamma))
    table *= scales.reshape((-1,) + (1,) * (table.ndim - 1))
    return table
