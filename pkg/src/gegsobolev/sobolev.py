"""Orthogonal polynomials for the Gegenbauer measure augmented with
endpoint masses on values and first derivatives:

    <f, g> = integral(f g dmu_alpha) + M (f(1) g(1) + f(-1) g(-1))
                                     + N (f'(1) g'(1) + f'(-1) g'(-1)),

with alpha > -1/2 and M, N >= 0.  The orthogonal family ``B_n`` is a
three-block combination of parameter-shifted Gegenbauer polynomials,

    B_n = t4 (1-x^2)^2 R_{n-4}[alpha+4] + t2 (1-x^2) R_{n-2}[alpha+2]
          + c R_n[alpha],

whose scalar weights come from closed-form gamma-ratio expressions.  The
orthonormal family is ``Q_n = scale * B_n`` where the scale is computed
numerically from a degree-exact quadrature plus the mass terms.

Two evaluation paths coexist on purpose.  The fast float path works in
log-gamma space with sign tracking.  A high-precision path recomputes the
scalar weights and the endpoint data with mpmath, because the endpoint
derivative of ``B_n`` is a difference of two nearly equal terms whose
relative size grows like a power of n; by n ~ 250 the cancellation
exceeds what double precision can represent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath as mp
import numpy as np

from .gegenbauer import (
    derivative_factor,
    gegenbauer,
    gegenbauer_table,
    orthonormal_scale,
    orthonormal_table,
)
from .numerics import log_pochhammer
from .quadrature import QuadRule, build_rule, integrate

__all__ = [
    "SobolevParams",
    "BoundaryData",
    "SobolevFunction",
    "ConnectionCoeffs",
    "BasisTable",
    "sobolev_inner",
    "connection_abc",
    "sobolev_orthogonal",
    "sobolev_scale",
    "connection_coeffs",
    "sobolev_orthonormal",
    "sobolev_orthonormal_derivative",
    "endpoint_data",
    "basis_table",
    "printed_norm_identity",
]

# Working precision for the endpoint/coefficient path.  The endpoint
# derivative loses about (2 alpha + 6) log10(n) digits to cancellation;
# 60 digits covers n up to ~300 at alpha = 1.5 with room to spare.
_MP_DPS = 60


@dataclass(frozen=True)
class SobolevParams:
    """Measure exponent and the two nonnegative endpoint masses."""

    alpha: float
    mass_value: float
    mass_deriv: float

    def __post_init__(self):
        if not self.alpha > -0.5:
            raise ValueError(f"alpha must exceed -1/2, got {self.alpha}")
        if self.mass_value < 0.0 or self.mass_deriv < 0.0:
            raise ValueError("masses must be nonnegative")


@dataclass(frozen=True)
class BoundaryData:
    """Values and first derivatives at the endpoints +1 and -1."""

    value_plus: float
    value_minus: float
    deriv_plus: float
    deriv_minus: float


@dataclass(frozen=True)
class SobolevFunction:
    """A function together with its designated endpoint data.

    ``evaluator`` must accept an ndarray and return values elementwise.
    The boundary data is part of the object: the inner product never
    re-derives endpoint values or derivatives from the evaluator.
    """

    evaluator: object
    boundary: BoundaryData

    def __call__(self, x):
        return self.evaluator(np.asarray(x, dtype=float))

    @classmethod
    def from_smooth(cls, f, df) -> "SobolevFunction":
        """Wrap a smooth function given its derivative callable."""
        boundary = BoundaryData(
            value_plus=float(f(1.0)),
            value_minus=float(f(-1.0)),
            deriv_plus=float(df(1.0)),
            deriv_minus=float(df(-1.0)),
        )
        return cls(evaluator=f, boundary=boundary)


@dataclass(frozen=True)
class ConnectionCoeffs:
    """Everything needed to evaluate one orthonormal basis element.

    ``a, b, c`` are the scalar weights of the three-block form of
    ``B_n``; ``scale`` normalizes it; ``q4, q2, q0`` multiply the
    orthonormal parameter-shifted blocks so that

        Q_n = q4 (1-x^2)^2 P_{n-4}[alpha+4] + q2 (1-x^2) P_{n-2}[alpha+2]
              + q0 P_n[alpha].
    """

    n: int
    a: float
    b: float
    c: float
    scale: float
    classical_scale: float
    q4: float
    q2: float
    q0: float


def _check_rule(params: SobolevParams, rule: QuadRule):
    if abs(rule.gamma - params.alpha) > 1e-12:
        raise ValueError(
            f"rule is for exponent {rule.gamma}, inner product needs {params.alpha}"
        )


def sobolev_inner(params: SobolevParams, rule: QuadRule, f: SobolevFunction, g: SobolevFunction) -> float:
    """Inner product <f, g>: quadrature part plus endpoint mass terms."""
    _check_rule(params, rule)
    part = integrate(rule, lambda x: np.asarray(f(x), dtype=float) * np.asarray(g(x), dtype=float))
    fb, gb = f.boundary, g.boundary
    part += params.mass_value * (
        fb.value_plus * gb.value_plus + fb.value_minus * gb.value_minus
    )
    part += params.mass_deriv * (
        fb.deriv_plus * gb.deriv_plus + fb.deriv_minus * gb.deriv_minus
    )
    return float(part)


# ---------------------------------------------------------------------------
# scalar connection weights: fast log-space float path
# ---------------------------------------------------------------------------


def _log_reciprocal_factorial(m: int) -> tuple[float, float]:
    """Signed log of 1/m! with the pole convention: zero for m < 0."""
    if m < 0:
        return -math.inf, 0.0
    return -math.lgamma(m + 1.0), 1.0


def _exp_term(*factors: tuple[float, float]) -> float:
    """Product of signed-log factors, returned as a float."""
    log_abs = 0.0
    sign = 1.0
    for la, s in factors:
        if s == 0.0:
            return 0.0
        log_abs += la
        sign *= s
    return sign * math.exp(log_abs)


def connection_abc(params: SobolevParams, n: int) -> tuple[float, float, float]:
    """The scalar weights (a, b, c) of the three-block form of ``B_n``.

    Each gamma-ratio product is evaluated in log space with sign
    tracking; reciprocals of factorials at negative arguments are zero,
    which silently removes the terms that do not apply at small n.
    """
    n = int(n)
    if n < 0:
        raise ValueError("degree must be nonnegative")
    al = params.alpha
    M = params.mass_value
    N = params.mass_deriv

    a = 0.0
    if N > 0.0:
        if M > 0.0:
            a += 4.0 * M * N * _exp_term(
                log_pochhammer(2.0 * al + 3.0, n),
                log_pochhammer(2.0 * al + 3.0, n - 2),
                (-math.log((al + 1.0) * (al + 2.0)), 1.0),
                _log_reciprocal_factorial(n),
                _log_reciprocal_factorial(n - 2),
            )
        a += 2.0 * N * _exp_term(
            log_pochhammer(2.0 * al + 3.0, n - 1),
            (-math.log(al + 1.0), 1.0),
            _log_reciprocal_factorial(n - 1),
        )

    b = 0.0
    if N > 0.0:
        b -= 0.5 * N * (n - 2.0) * (n + 2.0 * al + 3.0) * _exp_term(
            log_pochhammer(2.0 * al + 3.0, n - 1),
            (-math.log((al + 1.0) * (al + 3.0)), 1.0),
            _log_reciprocal_factorial(n - 1),
        )
    if M > 0.0:
        # the gamma-ratio extension handles lengths n-2 < 0 at n = 0, 1
        b -= 2.0 * M * _exp_term(
            log_pochhammer(2.0 * al + 3.0, n - 2),
            _log_reciprocal_factorial(n),
        )

    c = 1.0
    if N > 0.0 and n >= 3:
        c -= 0.5 * N * _exp_term(
            log_pochhammer(2.0 * al + 3.0, n + 1),
            (-math.log((al + 1.0) * (al + 2.0) * (al + 3.0)), 1.0),
            _log_reciprocal_factorial(n - 3),
        )
    return a, b, c


def _block_prefactors(alpha: float, n: int, a: float, b: float):
    """Scalars t4, t2 multiplying the shifted blocks of ``B_n``.

    t4 = a (n+2a+1)_4 n(n-1)(n-2)(n-3) / (64 (a+2)(a+3)(a+1)_4)
    t2 = b (n+2a+1)_2 n(n-1) / (4 (a+1)(a+2)),

    both zero below the degree where their block enters.
    """
    t4 = 0.0
    t2 = 0.0
    if n >= 2:
        p2 = (n + 2.0 * alpha + 1.0) * (n + 2.0 * alpha + 2.0)
        t2 = b * p2 * n * (n - 1.0) / (4.0 * (alpha + 1.0) * (alpha + 2.0))
    if n >= 4:
        p4 = 1.0
        fall4 = 1.0
        poch_al = 1.0
        for j in range(4):
            p4 *= n + 2.0 * alpha + 1.0 + j
            fall4 *= n - j
            poch_al *= alpha + 1.0 + j
        t4 = a * p4 * fall4 / (64.0 * (alpha + 2.0) * (alpha + 3.0) * poch_al)
    return t4, t2


def sobolev_orthogonal(params: SobolevParams, n: int, x):
    """Value(s) of the (unnormalized) orthogonal polynomial ``B_n``."""
    n = int(n)
    a, b, c = connection_abc(params, n)
    t4, t2 = _block_prefactors(params.alpha, n, a, b)
    x = np.asarray(x, dtype=float)
    out = c * np.asarray(gegenbauer(n, params.alpha, x), dtype=float)
    if n >= 2 and t2 != 0.0:
        out = out + t2 * (1.0 - x**2) * gegenbauer(n - 2, params.alpha + 2.0, x)
    if n >= 4 and t4 != 0.0:
        out = out + t4 * (1.0 - x**2) ** 2 * gegenbauer(n - 4, params.alpha + 4.0, x)
    return out if x.ndim else float(out)


# ---------------------------------------------------------------------------
# high-precision coefficient and endpoint path
# ---------------------------------------------------------------------------


def _mp_rows(alpha: float, mass_value: float, mass_deriv: float, n_max: int):
    """Connection weights and endpoint data for all degrees <= n_max.

    Computed with mpmath via incremental products (no gamma calls), then
    rounded once to float.  Returns dict of float arrays: a, b, c, t4,
    t2, and the endpoint data of ``B_n`` (value/derivative at +1; the
    -1 data follows from parity).
    """
    with mp.workdps(_MP_DPS):
        al = mp.mpf(alpha)
        M = mp.mpf(mass_value)
        N = mp.mpf(mass_deriv)
        one = mp.mpf(1)
        # poch[k] = (2 alpha + 3)_k, fact[k] = k!
        poch = [one]
        fact = [one]
        for k in range(1, n_max + 2):
            poch.append(poch[-1] * (2 * al + 2 + k))
            fact.append(fact[-1] * k)

        out = {key: np.empty(n_max + 1) for key in ("a", "b", "c", "t4", "t2", "val1", "der1")}
        for n in range(n_max + 1):
            a = mp.mpf(0)
            if N > 0:
                if n >= 1:
                    a += 2 * N * poch[n - 1] / ((al + 1) * fact[n - 1])
                if n >= 2 and M > 0:
                    a += 4 * M * N * poch[n] * poch[n - 2] / (
                        (al + 1) * (al + 2) * fact[n] * fact[n - 2]
                    )
            b = mp.mpf(0)
            if N > 0 and n >= 1:
                b -= N * poch[n - 1] * (n - 2) * (n + 2 * al + 3) / (
                    2 * (al + 1) * (al + 3) * fact[n - 1]
                )
            if M > 0:
                if n >= 2:
                    ratio = poch[n - 2] / fact[n]
                elif n == 1:
                    ratio = 1 / (2 * al + 2)
                else:
                    ratio = 1 / ((2 * al + 1) * (2 * al + 2))
                b -= 2 * M * ratio
            c = one
            if N > 0 and n >= 3:
                c -= N * poch[n + 1] / (2 * (al + 1) * (al + 2) * (al + 3) * fact[n - 3])

            t4 = mp.mpf(0)
            t2 = mp.mpf(0)
            if n >= 2:
                t2 = b * (n + 2 * al + 1) * (n + 2 * al + 2) * n * (n - 1) / (
                    4 * (al + 1) * (al + 2)
                )
            if n >= 4:
                p4 = (n + 2 * al + 1) * (n + 2 * al + 2) * (n + 2 * al + 3) * (n + 2 * al + 4)
                t4 = a * p4 * n * (n - 1) * (n - 2) * (n - 3) / (
                    64 * (al + 2) * (al + 3) * (al + 1) * (al + 2) * (al + 3) * (al + 4)
                )
            # endpoint data of B_n at +1: only the blocks with at most one
            # (1-x^2) factor survive differentiation there
            der1 = -2 * t2 + c * n * (n + 2 * al + 1) / (2 * (al + 1))
            for key, val in (("a", a), ("b", b), ("c", c), ("t4", t4), ("t2", t2),
                             ("val1", c), ("der1", der1)):
                out[key][n] = float(val)
        return out


def _norm_rule_size(n_max: int) -> int:
    """Node count exact past degree 2 n_max + 8, rounded for cache reuse."""
    needed = n_max + 8
    return ((needed + 31) // 32) * 32


@dataclass(frozen=True)
class BasisTable:
    """Vectorized connection data for all degrees up to ``n_max``."""

    params: SobolevParams
    n_max: int
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    t4: np.ndarray
    t2: np.ndarray
    scale: np.ndarray
    q4: np.ndarray
    q2: np.ndarray
    q0: np.ndarray
    value_plus: np.ndarray
    value_minus: np.ndarray
    deriv_plus: np.ndarray
    deriv_minus: np.ndarray

    def values(self, x) -> np.ndarray:
        """Orthonormal values Q_0..Q_{n_max} on a grid, one row per degree."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        al = self.params.alpha
        w = 1.0 - x**2
        out = self.q0[:, None] * orthonormal_table(self.n_max, al, x)
        if self.n_max >= 2:
            p2 = orthonormal_table(self.n_max - 2, al + 2.0, x)
            out[2:] += self.q2[2:, None] * (w * p2)
        if self.n_max >= 4:
            p4 = orthonormal_table(self.n_max - 4, al + 4.0, x)
            out[4:] += self.q4[4:, None] * (w**2 * p4)
        return out

    def derivatives(self, x) -> np.ndarray:
        """Derivatives of the orthonormal values on a grid."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        al = self.params.alpha
        w = 1.0 - x**2
        out = self.q0[:, None] * _orthonormal_derivative_table(self.n_max, al, x)
        if self.n_max >= 2:
            p2 = orthonormal_table(self.n_max - 2, al + 2.0, x)
            d2 = _orthonormal_derivative_table(self.n_max - 2, al + 2.0, x)
            out[2:] += self.q2[2:, None] * (-2.0 * x * p2 + w * d2)
        if self.n_max >= 4:
            p4 = orthonormal_table(self.n_max - 4, al + 4.0, x)
            d4 = _orthonormal_derivative_table(self.n_max - 4, al + 4.0, x)
            out[4:] += self.q4[4:, None] * (-4.0 * x * w * p4 + w**2 * d4)
        return out

    def boundary(self, n: int) -> BoundaryData:
        return BoundaryData(
            value_plus=float(self.value_plus[n]),
            value_minus=float(self.value_minus[n]),
            deriv_plus=float(self.deriv_plus[n]),
            deriv_minus=float(self.deriv_minus[n]),
        )


def _orthonormal_derivative_table(n_max: int, gamma: float, x) -> np.ndarray:
    """Derivatives of orthonormal classical polynomials on a grid."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros((n_max + 1,) + x.shape)
    if n_max >= 1:
        shifted = gegenbauer_table(n_max - 1, gamma + 1.0, x)
        for k in range(1, n_max + 1):
            out[k] = (
                orthonormal_scale(k, gamma) * derivative_factor(k, gamma) * shifted[k - 1]
            )
    return out


@lru_cache(maxsize=32)
def _basis_table_cached(alpha: float, mass_value: float, mass_deriv: float, n_max: int) -> BasisTable:
    params = SobolevParams(alpha, mass_value, mass_deriv)
    rows = _mp_rows(alpha, mass_value, mass_deriv, n_max)
    parity = np.where(np.arange(n_max + 1) % 2 == 0, 1.0, -1.0)
    b_val_plus = rows["val1"]
    b_val_minus = parity * rows["val1"]
    b_der_plus = rows["der1"]
    b_der_minus = -parity * rows["der1"]

    # squared norms: degree-exact quadrature for the integral part
    rule = build_rule(alpha, _norm_rule_size(n_max))
    xs, ws = rule.nodes, rule.weights
    w1 = 1.0 - xs**2
    bmat = rows["c"][:, None] * gegenbauer_table(n_max, alpha, xs)
    if n_max >= 2:
        r2 = gegenbauer_table(n_max - 2, alpha + 2.0, xs)
        bmat[2:] += rows["t2"][2:, None] * (w1 * r2)
    if n_max >= 4:
        r4 = gegenbauer_table(n_max - 4, alpha + 4.0, xs)
        bmat[4:] += rows["t4"][4:, None] * (w1**2 * r4)
    norm_sq = np.einsum("ij,j,ij->i", bmat, ws, bmat)
    norm_sq += mass_value * (b_val_plus**2 + b_val_minus**2)
    norm_sq += mass_deriv * (b_der_plus**2 + b_der_minus**2)
    scale = 1.0 / np.sqrt(norm_sq)

    ns = np.arange(n_max + 1)
    beta0 = np.array([orthonormal_scale(k, alpha) for k in ns])
    q0 = rows["c"] * scale / beta0
    q2 = np.zeros(n_max + 1)
    q4 = np.zeros(n_max + 1)
    if n_max >= 2:
        beta2 = np.array([orthonormal_scale(k, alpha + 2.0) for k in range(n_max - 1)])
        q2[2:] = rows["t2"][2:] * scale[2:] / beta2
    if n_max >= 4:
        beta4 = np.array([orthonormal_scale(k, alpha + 4.0) for k in range(n_max - 3)])
        q4[4:] = rows["t4"][4:] * scale[4:] / beta4

    for arr in (rows["a"], rows["b"], rows["c"], rows["t4"], rows["t2"], scale, q4, q2, q0):
        arr.setflags(write=False)
    table = BasisTable(
        params=params,
        n_max=n_max,
        a=rows["a"],
        b=rows["b"],
        c=rows["c"],
        t4=rows["t4"],
        t2=rows["t2"],
        scale=scale,
        q4=q4,
        q2=q2,
        q0=q0,
        value_plus=scale * b_val_plus,
        value_minus=scale * b_val_minus,
        deriv_plus=scale * b_der_plus,
        deriv_minus=scale * b_der_minus,
    )
    return table


def basis_table(params: SobolevParams, n_max: int) -> BasisTable:
    """Connection data for degrees 0..n_max (cached, bucketed upward)."""
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    bucket = max(16, ((n_max + 63) // 64) * 64)
    return _basis_table_cached(params.alpha, params.mass_value, params.mass_deriv, bucket)


def sobolev_scale(params: SobolevParams, n: int) -> float:
    """Normalizing scale: ``scale * B_n`` has unit Sobolev norm.

    The squared reciprocal is the numerically integrated norm of ``B_n``
    (degree-exact rule) plus the endpoint mass terms.
    """
    return float(basis_table(params, int(n)).scale[int(n)])


def connection_coeffs(params: SobolevParams, n: int) -> ConnectionCoeffs:
    """Bundle of scalar data for the degree-n orthonormal element."""
    n = int(n)
    t = basis_table(params, n)
    return ConnectionCoeffs(
        n=n,
        a=float(t.a[n]),
        b=float(t.b[n]),
        c=float(t.c[n]),
        scale=float(t.scale[n]),
        classical_scale=orthonormal_scale(n, params.alpha),
        q4=float(t.q4[n]),
        q2=float(t.q2[n]),
        q0=float(t.q0[n]),
    )


def sobolev_orthonormal(params: SobolevParams, n: int, x):
    """Value(s) of the orthonormal polynomial ``Q_n`` at ``x``."""
    n = int(n)
    cc = connection_coeffs(params, n)
    x = np.asarray(x, dtype=float)
    al = params.alpha
    out = cc.q0 * orthonormal_scale(n, al) * np.asarray(gegenbauer(n, al, x), dtype=float)
    if n >= 2 and cc.q2 != 0.0:
        out = out + cc.q2 * (1.0 - x**2) * orthonormal_scale(n - 2, al + 2.0) * gegenbauer(
            n - 2, al + 2.0, x
        )
    if n >= 4 and cc.q4 != 0.0:
        out = out + cc.q4 * (1.0 - x**2) ** 2 * orthonormal_scale(n - 4, al + 4.0) * gegenbauer(
            n - 4, al + 4.0, x
        )
    return out if x.ndim else float(out)


def sobolev_orthonormal_derivative(params: SobolevParams, n: int, x):
    """Derivative of ``Q_n`` by the product rule on its three blocks."""
    n = int(n)
    cc = connection_coeffs(params, n)
    x = np.asarray(x, dtype=float)
    al = params.alpha
    w = 1.0 - x**2

    def block(k, gamma):
        val = orthonormal_scale(k, gamma) * np.asarray(gegenbauer(k, gamma, x), dtype=float)
        der = orthonormal_scale(k, gamma) * derivative_factor(k, gamma) * np.asarray(
            gegenbauer(k - 1, gamma + 1.0, x), dtype=float
        ) if k >= 1 else np.zeros_like(x)
        return val, der

    _, d0 = block(n, al)
    out = cc.q0 * d0
    if n >= 2 and cc.q2 != 0.0:
        v2, d2 = block(n - 2, al + 2.0)
        out = out + cc.q2 * (-2.0 * x * v2 + w * d2)
    if n >= 4 and cc.q4 != 0.0:
        v4, d4 = block(n - 4, al + 4.0)
        out = out + cc.q4 * (-4.0 * x * w * v4 + w**2 * d4)
    return out if x.ndim else float(out)


def endpoint_data(params: SobolevParams, n: int) -> BoundaryData:
    """Endpoint values and derivatives of ``Q_n`` (high-precision path).

    Endpoint derivatives cancel catastrophically at large degree, so
    they come from the mpmath coefficient path rather than from the
    product-rule evaluator.
    """
    return basis_table(params, int(n)).boundary(int(n))


def as_sobolev_function(params: SobolevParams, n: int) -> SobolevFunction:
    """``Q_n`` packaged with its boundary data for inner products."""
    n = int(n)
    return SobolevFunction(
        evaluator=lambda x, p=params, k=n: sobolev_orthonormal(p, k, x),
        boundary=endpoint_data(params, n),
    )


def printed_norm_identity(params: SobolevParams, n: int) -> float:
    """The published closed form for ``<B_n, B_n>`` evaluated literally.

    The source display chains the a^2 and b^2 blocks with a product
    where a sum would be dimensionally consistent; this function
    reproduces the printed expression verbatim so reports can show how
    far it sits from the numerically integrated norm.  It is never used
    to build the basis.
    """
    n = int(n)
    al = params.alpha
    M = params.mass_value
    N = params.mass_deriv
    with mp.workdps(_MP_DPS):
        a, b, c = (mp.mpf(v) for v in connection_abc(params, n))
        alm = mp.mpf(al)
        mass = 2 * M * c**2
        inner = mp.mpf(n) * (n + 2 * alm + 1) / (2 * (alm + 1))
        if n >= 1:
            inner += M * mp.rf(2 * alm + 3, n) / ((alm + 1) * (alm + 2) * mp.factorial(n - 1))
        mass += 2 * N * inner**2
        fall2 = mp.mpf(n) * (n - 1)
        fall4 = fall2 * (n - 2) * (n - 3)
        p2 = mp.rf(n + 2 * alm + 1, 2)
        p4 = mp.rf(n + 2 * alm + 1, 4)
        taa = fall4 * p4 * a**2 / (16 * (alm + 2) ** 2 * (alm + 3) ** 2)
        tbb = fall2 * p2 * b**2
        tab = fall4 * p2 * a * b / (2 * (alm + 2) * (alm + 3))
        tbc = 2 * fall2 * b * c
        tac = fall4 * a * c / (2 * (alm + 2) * (alm + 3))
        beta_recip_sq = mp.gamma(2 * alm + 2) * mp.factorial(n) / (
            (2 * n + 2 * alm + 1) * mp.gamma(n + 2 * alm + 1)
        )
        total = mass + beta_recip_sq * (taa * tbb - tab + c**2 - tbc + tac)
        return float(total)
