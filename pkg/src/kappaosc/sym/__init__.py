"""Exact symbolic verification with the curvature as an indeterminate."""

from .geometry import (DEFAULT_METRIC, HAMILTONIAN, J, KINETIC_H,
                       MEASURE_DENSITY, P1, P2, POTENTIAL_V, X1, X2, XJ,
                       SymMetric, VectorField2, differentiate,
                       killing_residuals, lie_derivative_metric,
                       measure_lie_derivative, poisson_bracket, vf_commutator)
from .ring import (COS, ONE, PF, PR, R, S, SIN, W, ZERO, K, RingElement,
                   canonicalize)
from .suites import IDENTITIES, run_suite, suite_report

__all__ = [
    "RingElement", "canonicalize", "VectorField2", "SymMetric", "DEFAULT_METRIC",
    "differentiate", "lie_derivative_metric", "killing_residuals", "poisson_bracket",
    "vf_commutator", "measure_lie_derivative",
    "X1", "X2", "XJ", "P1", "P2", "J", "KINETIC_H", "POTENTIAL_V", "HAMILTONIAN",
    "MEASURE_DENSITY", "K", "R", "S", "COS", "SIN", "PR", "PF", "W", "ONE", "ZERO",
    "IDENTITIES", "run_suite", "suite_report",
]
