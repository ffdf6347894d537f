"""Tests for expansions, partial sums, kernels, norms, and the probe."""

import math

import numpy as np
import pytest

from gegsobolev.gegenbauer import orthonormal_table
from gegsobolev.numerics import fit_power_law
from gegsobolev.operators import (
    ClassicalExpansion,
    classical_coeffs,
    classical_partial_sum,
    dx_weighted_lp_norm,
    kernel,
    kernel_section,
    multiplier_R,
    multiplier_weight_condition,
    operator_norm_probe,
    p_window,
    partial_sum,
    partial_sum_boundary,
    partial_sum_function,
    partial_sum_weight_window,
    probe_sweep,
    sobolev_coeffs,
    transplant,
    transplant_weight_condition,
    wp_norm,
)
from gegsobolev.quadrature import build_rule
from gegsobolev.sobolev import (
    BoundaryData,
    SobolevFunction,
    SobolevParams,
    as_sobolev_function,
    sobolev_inner,
)

PARAMS = SobolevParams(1.0, 1.0, 1.0)
RULE = build_rule(1.0, 160)


def poly_function(coeffs) -> SobolevFunction:
    """Wrap a numpy polynomial (coefficient list, low order first)."""
    poly = np.polynomial.Polynomial(coeffs)
    dpoly = poly.deriv()
    return SobolevFunction.from_smooth(lambda x: poly(x), lambda x: dpoly(x))


def error_function(f: SobolevFunction, g: SobolevFunction) -> SobolevFunction:
    fb, gb = f.boundary, g.boundary
    return SobolevFunction(
        evaluator=lambda x: np.asarray(f(x)) - np.asarray(g(x)),
        boundary=BoundaryData(
            fb.value_plus - gb.value_plus,
            fb.value_minus - gb.value_minus,
            fb.deriv_plus - gb.deriv_plus,
            fb.deriv_minus - gb.deriv_minus,
        ),
    )


# ---------------------------------------------------------------------------
# coefficients and partial sums
# ---------------------------------------------------------------------------


def test_basis_element_gives_unit_vector():
    for j in (0, 2, 7):
        exp = sobolev_coeffs(PARAMS, RULE, as_sobolev_function(PARAMS, j), 10)
        want = np.zeros(11)
        want[j] = 1.0
        np.testing.assert_allclose(exp.coeffs, want, atol=1e-11)


def test_constant_function_coefficients():
    one = poly_function([1.0])
    exp = sobolev_coeffs(PARAMS, RULE, one, 8)
    assert abs(exp.coeffs[0] - math.sqrt(1.0 + 2.0 * PARAMS.mass_value)) < 1e-12
    assert np.max(np.abs(exp.coeffs[1:])) < 1e-12


def test_polynomial_reproduction():
    rng = np.random.default_rng(7)
    f = poly_function(rng.standard_normal(7))
    exp = sobolev_coeffs(PARAMS, RULE, f, 10)
    xs = rng.uniform(-1.0, 1.0, 64)
    np.testing.assert_allclose(partial_sum(exp, xs), f(xs), atol=1e-9)
    # endpoint data of the reconstruction matches the input's
    bd = partial_sum_boundary(exp)
    assert abs(bd.value_plus - f.boundary.value_plus) < 1e-10
    assert abs(bd.deriv_minus - f.boundary.deriv_minus) < 1e-10


def test_projection_idempotence():
    f = SobolevFunction.from_smooth(np.exp, np.exp)
    exp = sobolev_coeffs(PARAMS, RULE, f, 24)
    again = sobolev_coeffs(PARAMS, RULE, partial_sum_function(exp), 24)
    np.testing.assert_allclose(again.coeffs, exp.coeffs, atol=1e-9)


def test_bessel_and_monotone_norm():
    f = SobolevFunction.from_smooth(
        lambda x: np.cos(3.0 * x), lambda x: -3.0 * np.sin(3.0 * x)
    )
    exp = sobolev_coeffs(PARAMS, RULE, f, 40)
    fnorm = wp_norm(PARAMS, RULE, f, 2.0)
    prev = 0.0
    for n in range(0, 41, 5):
        gn = math.sqrt(float(np.sum(exp.coeffs[: n + 1] ** 2)))
        assert gn <= fnorm * (1.0 + 1e-12)
        assert gn >= prev - 1e-14
        prev = gn
    # the coefficient norm is the W_2 norm of the partial sum
    g = partial_sum_function(exp, 30)
    direct = wp_norm(PARAMS, RULE, g, 2.0)
    assert abs(direct - math.sqrt(float(np.sum(exp.coeffs[:31] ** 2)))) < 1e-10


def test_exp_partial_sum_convergence():
    f = SobolevFunction.from_smooth(np.exp, np.exp)
    exp = sobolev_coeffs(PARAMS, RULE, f, 40)
    err32 = wp_norm(PARAMS, RULE, error_function(f, partial_sum_function(exp, 32)), 2.0)
    assert err32 < 1e-8
    # Parseval form of the same error from a longer expansion tail
    tail = math.sqrt(float(np.sum(exp.coeffs[33:] ** 2)))
    assert abs(err32 - tail) < 1e-9 or err32 < 1e-12


def test_truncation_validation():
    f = poly_function([1.0, 1.0])
    exp = sobolev_coeffs(PARAMS, RULE, f, 6)
    with pytest.raises(ValueError):
        partial_sum(exp, 0.0, 7)
    with pytest.raises(ValueError):
        sobolev_coeffs(PARAMS, build_rule(1.0, 10), f, 40)


# ---------------------------------------------------------------------------
# kernel
# ---------------------------------------------------------------------------


def test_kernel_symmetry_and_base_case():
    for x, y in [(0.2, -0.7), (0.9, 0.9), (-1.0, 0.3)]:
        assert kernel(PARAMS, 7, x, y) == pytest.approx(kernel(PARAMS, 7, y, x), rel=1e-12)
    assert kernel(PARAMS, 0, 0.2, -0.7) == pytest.approx(1.0 / 3.0, rel=1e-12)


def test_kernel_reproduces_partial_sum():
    f = SobolevFunction.from_smooth(np.exp, np.exp)
    exp = sobolev_coeffs(PARAMS, RULE, f, 40)
    for n in (3, 17, 40):
        for x0 in (-0.7, 0.1, 0.95):
            lhs = partial_sum(exp, x0, n)
            rhs = sobolev_inner(PARAMS, RULE, kernel_section(PARAMS, n, x0), f)
            assert abs(lhs - rhs) < 1e-8


# ---------------------------------------------------------------------------
# norms and the boundedness window
# ---------------------------------------------------------------------------


def test_wp_norm_examples():
    one = poly_function([1.0])
    xfun = poly_function([0.0, 1.0])
    assert wp_norm(PARAMS, RULE, one, 2.0) == pytest.approx(math.sqrt(3.0), rel=1e-12)
    p0 = SobolevParams(0.0, 1.0, 1.0)
    r0 = build_rule(0.0, 64)
    want = math.sqrt(1.0 / 3.0 + 2.0 + 2.0)
    assert wp_norm(p0, r0, xfun, 2.0) == pytest.approx(want, rel=1e-12)
    # no masses: plain integral norm
    pfree = SobolevParams(0.0, 0.0, 0.0)
    assert wp_norm(pfree, r0, xfun, 2.0) == pytest.approx(math.sqrt(1.0 / 3.0), rel=1e-12)
    with pytest.raises(ValueError):
        wp_norm(PARAMS, RULE, one, 1.0)


def test_p_window_values():
    lo, hi = p_window(0.0)
    assert lo == pytest.approx(4.0 / 3.0, rel=1e-15)
    assert hi == pytest.approx(4.0, rel=1e-15)
    lo, hi = p_window(1.0)
    assert lo == pytest.approx(8.0 / 5.0, rel=1e-15)
    assert hi == pytest.approx(8.0 / 3.0, rel=1e-15)
    for alpha in (-0.49, 0.0, 0.5, 1.0, 2.5, 10.0):
        lo, hi = p_window(alpha)
        assert lo < 2.0 < hi


# ---------------------------------------------------------------------------
# classical comparison operators
# ---------------------------------------------------------------------------


def test_classical_partial_sum_basics():
    rule = build_rule(0.5, 96)
    xs = np.linspace(-0.9, 0.9, 7)
    for n in (0, 3, 10):
        np.testing.assert_allclose(
            classical_partial_sum(0.5, rule, lambda x: np.ones_like(x), n, xs),
            np.ones_like(xs),
            atol=1e-13,
        )
    poly = np.polynomial.Polynomial([0.3, -1.0, 0.0, 2.0])
    np.testing.assert_allclose(
        classical_partial_sum(0.5, rule, poly, 5, xs), poly(xs), atol=1e-12
    )


def test_classical_agrees_with_massless_expansion():
    pfree = SobolevParams(1.0, 0.0, 0.0)
    f = SobolevFunction.from_smooth(np.sin, np.cos)
    exp = sobolev_coeffs(pfree, RULE, f, 20)
    xs = np.linspace(-1.0, 1.0, 11)
    want = classical_partial_sum(1.0, RULE, np.sin, 20, xs)
    np.testing.assert_allclose(partial_sum(exp, xs), want, atol=1e-9)


def test_transplant_identity_and_shift():
    rule = build_rule(0.0, 64)
    exp = classical_coeffs(0.0, rule, np.polynomial.Polynomial([1.0, 2.0, -0.5]), 6)
    xs = np.linspace(-0.8, 0.8, 9)
    direct = exp.coeffs @ orthonormal_table(6, 0.0, xs)
    np.testing.assert_allclose(transplant(0, 0.0, 0.0, exp, xs), direct, rtol=1e-12)
    # single-term expansion lands on the shifted element
    e3 = ClassicalExpansion(gamma=0.5, coeffs=np.array([0.0, 0.0, 0.0, 1.0]))
    np.testing.assert_allclose(
        transplant(2, 1.5, 0.5, e3, xs), orthonormal_table(5, 1.5, xs)[5], rtol=1e-12
    )
    # negative shift drops out-of-range terms
    e0 = ClassicalExpansion(gamma=0.5, coeffs=np.array([1.0]))
    np.testing.assert_allclose(transplant(-1, 0.5, 0.5, e0, xs), 0.0, atol=1e-15)


def test_multiplier_scaling():
    xs = np.linspace(-0.9, 0.9, 5)
    e4 = ClassicalExpansion(gamma=1.0, coeffs=np.array([0.0, 0.0, 0.0, 0.0, 1.0]))
    np.testing.assert_allclose(
        multiplier_R(1.0, e4, xs), orthonormal_table(4, 1.0, xs)[4] / 5.0, rtol=1e-12
    )
    rule = build_rule(1.0, 64)
    exp = classical_coeffs(1.0, rule, np.exp, 8)
    ks = np.arange(9, dtype=float)
    twice_coeffs = exp.coeffs / (ks + 1.0)
    once = ClassicalExpansion(gamma=1.0, coeffs=twice_coeffs)
    np.testing.assert_allclose(
        multiplier_R(1.0, once, xs),
        (exp.coeffs / (ks + 1.0) ** 2) @ orthonormal_table(8, 1.0, xs),
        rtol=1e-12,
    )


def test_weight_condition_predicates():
    # centered case: a=0, p=2 always inside
    assert partial_sum_weight_window(0.0, 2.0, 0.0)
    assert not partial_sum_weight_window(0.0, 2.0, 0.25)  # boundary excluded
    assert not partial_sum_weight_window(0.0, 6.0, 0.0)  # |1/6-1/2|=1/3 > 1/4
    assert transplant_weight_condition(0.0, 2.0, 0.0)
    assert not transplant_weight_condition(-2.0, 2.0, 0.5)
    assert multiplier_weight_condition(-0.25, 2.0, 0.0)
    assert not multiplier_weight_condition(0.0, 2.0, 0.0)  # |2(b+1)/p-1/2|=1/2 on the edge
    assert not multiplier_weight_condition(1.0, 2.0, 0.0)  # |2b+1|=3 > 2


def test_partial_sum_jump_growth_tracks_window():
    """The rank-one jump S_n - S_{n-1} has norm |P_n|_p |P_n|_q; it stays
    bounded for p inside the window and grows outside."""
    gamma = 0.0
    rule = build_rule(gamma, 1024)
    ns = [16, 24, 32, 48, 64, 96, 128, 160]
    P = orthonormal_table(max(ns), gamma, rule.nodes)
    for p, expect_growth in ((2.5, False), (6.0, True)):
        q = p / (p - 1.0)
        samples = []
        for n in ns:
            np_p = float(np.sum(rule.weights * np.abs(P[n]) ** p) ** (1.0 / p))
            np_q = float(np.sum(rule.weights * np.abs(P[n]) ** q) ** (1.0 / q))
            samples.append((n, np_p * np_q))
        fit = fit_power_law(samples)
        if expect_growth:
            assert fit.slope > 0.05
        else:
            assert abs(fit.slope) < 0.02


def test_dx_weighted_norm_constant():
    # integral of (1-x^2)^e dx over [-1,1] equals 1/kappa_e
    from gegsobolev.gegenbauer import measure_constant

    rule = build_rule(0.7, 48)
    got = dx_weighted_lp_norm(rule, lambda x: np.ones_like(x), 2.0)
    assert got == pytest.approx((1.0 / measure_constant(0.7)) ** 0.5, rel=1e-12)


# ---------------------------------------------------------------------------
# operator-norm probe
# ---------------------------------------------------------------------------


def test_probe_p2_is_exactly_one():
    for params in (PARAMS, SobolevParams(0.0, 1.0, 0.0), SobolevParams(0.5, 0.0, 1.0)):
        for n in (0, 1, 5, 16):
            res = operator_norm_probe(params, n, 2.0)
            assert res.converged
            assert abs(res.value - 1.0) < 1e-8


def test_probe_validation():
    with pytest.raises(ValueError):
        operator_norm_probe(PARAMS, 4, 1.0)
    with pytest.raises(ValueError):
        operator_norm_probe(PARAMS, 8, 2.0, basis_dim=8)


def test_probe_detects_exterior_growth():
    # p=6 lies outside the window for alpha=1; the probe lower bound must
    # exceed 1 clearly and increase with n
    r8 = operator_norm_probe(PARAMS, 8, 6.0)
    r32 = operator_norm_probe(PARAMS, 32, 6.0)
    assert r8.value > 1.05
    assert r32.value > 1.5 * r8.value


def test_probe_interior_stays_flat():
    vals = [r.value for r in probe_sweep(PARAMS, [8, 16, 32], 2.2)]
    assert max(vals) < 1.1


def test_probe_reproducible():
    a = operator_norm_probe(PARAMS, 12, 3.0, seed=5)
    b = operator_norm_probe(PARAMS, 12, 3.0, seed=5)
    assert a == b
