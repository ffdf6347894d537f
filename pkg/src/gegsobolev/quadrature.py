"""Gauss quadrature for the normalized Gegenbauer measure on [-1, 1].

Nodes and weights come from the eigen-decomposition of the symmetric
tridiagonal recurrence (Jacobi) matrix: nodes are its eigenvalues and each
weight is the squared first eigenvector component times the total mass
(which is 1 here).  A K-node rule integrates polynomials up to degree
2K - 1 exactly.

Ref: Golub & Welsch, "Calculation of Gauss quadrature rules" (1969).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

__all__ = ["QuadRule", "build_rule", "integrate", "lp_norm", "lp_norm_refined"]


@dataclass(frozen=True)
class QuadRule:
    """Immutable Gauss rule for ``dmu_gamma``; weights sum to one."""

    gamma: float
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def exact_degree(self) -> int:
        """Highest polynomial degree integrated exactly."""
        return 2 * self.node_count - 1


def _recurrence_offdiag(node_count: int, gamma: float) -> np.ndarray:
    """Square roots of the monic recurrence coefficients b_k, k=1..K-1.

    For the symmetric Jacobi weight the monic recurrence is
    x pi_k = pi_{k+1} + b_k pi_{k-1} with
    b_1 = 1/(2g+3), b_k = k(k+2g) / ((2k+2g-1)(2k+2g+1)); the k=1 case is
    written separately so gamma = -1/2 does not produce 0/0.
    """
    ks = np.arange(1, node_count, dtype=float)
    b = ks * (ks + 2.0 * gamma) / ((2.0 * ks + 2.0 * gamma - 1.0) * (2.0 * ks + 2.0 * gamma + 1.0))
    if node_count > 1:
        b[0] = 1.0 / (2.0 * gamma + 3.0)
    return np.sqrt(b)


def build_rule(gamma: float, node_count: int) -> QuadRule:
    """Build the K-node Gauss rule for ``dmu_gamma``.

    Requires ``gamma > -1`` and ``node_count >= 1``.  Nodes are strictly
    increasing and symmetric about 0; weights are positive and sum to 1.
    """
    gamma = float(gamma)
    if not gamma > -1.0:
        raise ValueError(f"measure exponent must exceed -1, got {gamma}")
    node_count = int(node_count)
    if node_count < 1:
        raise ValueError("node_count must be positive")
    if node_count == 1:
        nodes = np.zeros(1)
        weights = np.ones(1)
    else:
        diag = np.zeros(node_count)
        off = _recurrence_offdiag(node_count, gamma)
        vals, vecs = eigh_tridiagonal(diag, off)
        order = np.argsort(vals)
        nodes = vals[order]
        weights = vecs[0, order] ** 2
        # Enforce the exact +/- symmetry of the measure (kills eigensolver
        # roundoff asymmetry) and renormalize to unit mass.
        nodes = 0.5 * (nodes - nodes[::-1])
        weights = 0.5 * (weights + weights[::-1])
        weights /= weights.sum()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadRule(gamma=gamma, nodes=nodes, weights=weights)


def integrate(rule: QuadRule, f) -> float:
    """Integral of ``f`` against ``dmu_gamma`` using the rule.

    ``f`` must accept an ndarray of nodes and return finite values.
    """
    vals = np.asarray(f(rule.nodes), dtype=float)
    if vals.shape != rule.nodes.shape:
        raise ValueError("integrand must return one value per node")
    if not np.all(np.isfinite(vals)):
        raise ValueError("integrand returned non-finite values at quadrature nodes")
    return float(np.dot(rule.weights, vals))


def lp_norm(rule: QuadRule, f, p: float) -> float:
    """Discrete ``L^p(dmu_gamma)`` norm ``(sum w_i |f(x_i)|^p)^(1/p)``."""
    p = float(p)
    if not p > 0.0:
        raise ValueError("p must be positive")
    vals = np.asarray(f(rule.nodes), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ValueError("integrand returned non-finite values at quadrature nodes")
    return float(np.dot(rule.weights, np.abs(vals) ** p) ** (1.0 / p))


def lp_norm_refined(rule: QuadRule, f, p: float) -> tuple[float, float]:
    """Norm from a doubled-node rule plus the relative change vs ``rule``.

    The second return value is a convergence estimate: small means the
    node count already resolves ``|f|^p``.
    """
    coarse = lp_norm(rule, f, p)
    fine_rule = build_rule(rule.gamma, 2 * rule.node_count)
    fine = lp_norm(fine_rule, f, p)
    denom = max(abs(fine), np.finfo(float).tiny)
    return fine, abs(fine - coarse) / denom
