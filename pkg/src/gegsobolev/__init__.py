"""Gegenbauer-Sobolev orthogonal polynomials and partial-sum experiments.

The inner product adds endpoint value and derivative mass terms to the
normalized Gegenbauer measure:

    <f, g> = integral(f g dmu_alpha)
             + M (f(1) g(1) + f(-1) g(-1))
             + N (f'(1) g'(1) + f'(-1) g'(-1)).

Subpackages: ``numerics`` (log-gamma arithmetic, power-law fits),
``gegenbauer`` (classical family), ``quadrature`` (Gauss rules),
``sobolev`` (the orthonormal family for the mass-modified inner product),
``operators`` (expansions, kernels, norm probes), ``experiments`` (the
reporting layer behind the command line interface).
"""

from .gegenbauer import (
    gegenbauer,
    gegenbauer_derivative,
    gegenbauer_orthonormal,
    measure_constant,
    orthonormal_scale,
)
from .numerics import (
    AsymptoticFit,
    fit_power_law,
    hyp2f1_terminating,
    log_gamma_signed,
    pochhammer,
)
from .operators import (
    ClassicalExpansion,
    ProbeResult,
    SobolevExpansion,
    classical_coeffs,
    classical_partial_sum,
    kernel,
    kernel_section,
    multiplier_R,
    operator_norm_probe,
    p_window,
    partial_sum,
    partial_sum_boundary,
    partial_sum_function,
    probe_sweep,
    sobolev_coeffs,
    transplant,
    wp_norm,
)
from .quadrature import QuadRule, build_rule, integrate, lp_norm
from .sobolev import (
    BasisTable,
    BoundaryData,
    ConnectionCoeffs,
    SobolevFunction,
    SobolevParams,
    basis_table,
    connection_coeffs,
    endpoint_data,
    sobolev_inner,
    sobolev_orthogonal,
    sobolev_orthonormal,
    sobolev_orthonormal_derivative,
    sobolev_scale,
)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticFit",
    "BasisTable",
    "BoundaryData",
    "ClassicalExpansion",
    "ConnectionCoeffs",
    "ProbeResult",
    "QuadRule",
    "SobolevExpansion",
    "SobolevFunction",
    "SobolevParams",
    "basis_table",
    "build_rule",
    "classical_coeffs",
    "classical_partial_sum",
    "connection_coeffs",
    "endpoint_data",
    "fit_power_law",
    "gegenbauer",
    "gegenbauer_derivative",
    "gegenbauer_orthonormal",
    "hyp2f1_terminating",
    "integrate",
    "kernel",
    "kernel_section",
    "log_gamma_signed",
    "lp_norm",
    "measure_constant",
    "multiplier_R",
    "operator_norm_probe",
    "orthonormal_scale",
    "p_window",
    "partial_sum",
    "partial_sum_boundary",
    "partial_sum_function",
    "pochhammer",
    "probe_sweep",
    "sobolev_coeffs",
    "sobolev_inner",
    "sobolev_orthogonal",
    "sobolev_orthonormal",
    "sobolev_orthonormal_derivative",
    "sobolev_scale",
    "transplant",
    "wp_norm",
]
