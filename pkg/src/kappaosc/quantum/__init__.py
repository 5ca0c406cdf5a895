"""Closed-form spectrum, wavefunctions and a numerical Sturm-Liouville oracle."""

from .oracle import (BranchResolution, OracleResult, RadialGrid, assemble,
                     boundary_grid, branch_deltas, default_grid,
                     operator_matrix, resolve_branch, sl_eigensolve)
from .series import (BRANCHES, frobenius_series, hyp2f1, hyp2f1_coefficients,
                     kummer_coefficients, kummer_m, ode_residual_coefficients,
                     radial_ode_coefficients, ratio_sequence)
from .spectrum import (HypParams, QuantumNumbers, SpectralLine,
                       bound_state_cutoff, boundary_exponent,
                       closed_form_energy, energy_gap, hyp_params,
                       kummer_parameter, physical_energy, spectrum_lines)
from .wavefunction import (NonNormalizableError, RadialSolution,
                           apply_radial_operator, count_bound_states,
                           eigen_radial, eval_wavefunction, gram_matrix,
                           is_normalizable, normalization_constant,
                           quadrature_norm, r_to_rho, radial_solution,
                           rho_to_r, sample_points, schrodinger_residual)

__all__ = [
    "BRANCHES", "QuantumNumbers", "HypParams", "SpectralLine", "RadialGrid",
    "OracleResult", "BranchResolution", "RadialSolution", "NonNormalizableError",
    "closed_form_energy", "physical_energy", "spectrum_lines", "hyp_params",
    "kummer_parameter", "boundary_exponent", "energy_gap", "bound_state_cutoff",
    "hyp2f1", "hyp2f1_coefficients", "kummer_m", "kummer_coefficients",
    "frobenius_series", "radial_ode_coefficients", "ode_residual_coefficients",
    "ratio_sequence", "radial_solution", "eigen_radial", "eval_wavefunction",
    "apply_radial_operator", "schrodinger_residual", "quadrature_norm",
    "normalization_constant", "gram_matrix", "is_normalizable", "count_bound_states",
    "assemble", "operator_matrix", "boundary_grid", "default_grid", "sl_eigensolve",
    "resolve_branch", "branch_deltas", "rho_to_r", "r_to_rho", "sample_points",
]
