"""Low-level numeric helpers: signed log-gamma arithmetic, Pochhammer
symbols, terminating Gauss hypergeometric sums, and log-log power-law fits.

Everything here works in log space where overflow is a risk.  The sign
convention for gamma at its poles is: ``sign == 0`` encodes a pole, so the
reciprocal of gamma at a nonpositive integer is exactly zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np
from scipy.special import gammaln

__all__ = [
    "AsymptoticFit",
    "log_gamma_signed",
    "log_pochhammer",
    "pochhammer",
    "hyp2f1_terminating",
    "fit_power_law",
]

# Direct-product Pochhammer stays exact and cheap up to this length.
_PRODUCT_CUTOFF = 40


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0.0 and x == math.floor(x)


def log_gamma_signed(x: float) -> tuple[float, float]:
    """Return ``(log|Gamma(x)|, sign)`` with ``sign == 0`` at poles.

    For any non-pole ``x``, ``exp(log_abs) * sign`` reconstructs
    ``Gamma(x)``.  At nonpositive integers the function has a pole; the
    returned pair is ``(inf, 0.0)`` so that reciprocals collapse to zero.
    """
    x = float(x)
    if _is_nonpositive_integer(x):
        return math.inf, 0.0
    if x > 0.0:
        return float(gammaln(x)), 1.0
    # Negative non-integer: |Gamma| via scipy, sign from the reflection
    # formula (Gamma alternates sign between consecutive negative integers).
    sign = 1.0 if math.floor(x) % 2 == 0 else -1.0
    return float(gammaln(x)), sign


def log_pochhammer(a: float, n: int) -> tuple[float, float]:
    """Signed log of the rising factorial ``(a)_n = Gamma(a+n)/Gamma(a)``.

    ``n`` may be any integer (negative lengths follow the gamma-ratio
    definition).  Returns ``(log_abs, sign)``; ``sign == 0`` means the
    product is exactly zero (the numerator reciprocal hit a pole, or the
    product contains a zero factor).
    """
    a = float(a)
    n = int(n)
    if n == 0:
        return 0.0, 1.0
    if n > 0 and n <= _PRODUCT_CUTOFF:
        log_abs = 0.0
        sign = 1.0
        for k in range(n):
            f = a + k
            if f == 0.0:
                return -math.inf, 0.0
            log_abs += math.log(abs(f))
            sign *= math.copysign(1.0, f)
        return log_abs, sign
    top, s_top = log_gamma_signed(a + n)
    bot, s_bot = log_gamma_signed(a)
    if s_bot == 0.0:
        # 1/Gamma vanishes at the pole; Gamma(a+n) finite => product is 0.
        if s_top != 0.0:
            return -math.inf, 0.0
        raise ValueError(f"pochhammer({a}, {n}) is an indeterminate pole ratio")
    if s_top == 0.0:
        raise ValueError(f"pochhammer({a}, {n}) hits a gamma pole in the numerator")
    return top - bot, s_top * s_bot


def pochhammer(a: float, n: int) -> float:
    """Rising factorial ``(a)_n``; exact for small integer inputs.

    ``(a)_0 == 1``.  Negative ``n`` follows the gamma-ratio extension.
    """
    a = float(a)
    n = int(n)
    if n == 0:
        return 1.0
    if 0 < n <= _PRODUCT_CUTOFF:
        out = 1.0
        for k in range(n):
            out *= a + k
        return out
    log_abs, sign = log_pochhammer(a, n)
    if sign == 0.0:
        return 0.0
    return sign * math.exp(log_abs)


def hyp2f1_terminating(n: int, b: float, c: float, z: float) -> float:
    """Terminating Gauss series ``2F1(-n, b; c; z)`` summed exactly.

    Computes ``sum_{k=0}^{n} (-n)_k (b)_k / ((c)_k k!) z^k`` in extended
    precision (the terms alternate and can cancel by many orders for z
    near 1), then rounds once to float.

    Raises ValueError for negative ``n`` or when ``c`` is a nonpositive
    integer greater than ``-n`` (a pole inside the summation range).
    """
    n = int(n)
    if n < 0:
        raise ValueError("series length must be nonnegative")
    if _is_nonpositive_integer(c) and c > -n:
        raise ValueError(f"c={c} puts a denominator pole inside the sum")
    # Worst-case cancellation grows like the largest binomial-type term;
    # n digits of headroom on top of a fixed base is generously safe.
    with mp.workdps(30 + int(1.2 * n)):
        total = mp.mpf(0)
        term = mp.mpf(1)
        bb = mp.mpf(b)
        cc = mp.mpf(c)
        zz = mp.mpf(z)
        for k in range(n + 1):
            total += term
            if k == n:
                break
            term *= (k - n) * (bb + k) * zz / ((cc + k) * (k + 1))
        return float(total)


@dataclass(frozen=True)
class AsymptoticFit:
    """Least-squares power-law fit ``value ~ C * (n+1)^slope``."""

    slope: float
    intercept: float
    r_squared: float
    n_range: tuple[int, int]


def fit_power_law(samples) -> AsymptoticFit:
    """Fit ``log|value| = slope * log(n+1) + intercept`` by least squares.

    ``samples`` is a sequence of ``(n, value)`` pairs with strictly
    increasing nonnegative ``n`` and nonzero values; at least 8 samples
    are required so a slope is meaningful.
    """
    pairs = [(int(n), float(v)) for n, v in samples]
    if len(pairs) < 8:
        raise ValueError(f"need at least 8 samples, got {len(pairs)}")
    ns = np.array([p[0] for p in pairs], dtype=float)
    vals = np.array([p[1] for p in pairs], dtype=float)
    if np.any(ns < 0):
        raise ValueError("sample indices must be nonnegative")
    if np.any(np.diff(ns) <= 0):
        raise ValueError("sample indices must be strictly increasing")
    if np.any(vals == 0.0) or not np.all(np.isfinite(vals)):
        raise ValueError("sample values must be nonzero and finite")
    x = np.log(ns + 1.0)
    y = np.log(np.abs(vals))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_res = float(np.dot(resid, resid))
    ss_tot = float(np.dot(y - y.mean(), y - y.mean()))
    if ss_tot <= ss_res * 1e-30 or ss_tot == 0.0:
        r_squared = 1.0  # constant data fit exactly by a flat line
    else:
        r_squared = max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    return AsymptoticFit(
        slope=float(slope),
        intercept=float(intercept),
        r_squared=r_squared,
        n_range=(int(ns[0]), int(ns[-1])),
    )
