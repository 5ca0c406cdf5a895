"""Harmonic oscillator on the sphere and hyperbolic plane with curvature kappa.

Subpackages:

    sym        exact rational-function checks with kappa as an indeterminate
    model      charts, Lagrangian/Hamiltonian, Noether momenta, units
    classical  trajectories and conservation diagnostics
    quantum    closed-form spectrum, wavefunctions, numerical oracle
    cli        command-line reports
"""

__version__ = "0.1.0"
