"""Closed-form energy levels and hypergeometric parameters.

Three candidate energy formulas are carried side by side, all in units of
hbar * beta with beta = alpha / sqrt(m):

    inverted    E = (n + 1) ((n + 2) k / 2 - 1)
    mirror      E = -(n + 1) ((n + 2) k / 2 - 1)
    conjugate   E = (n + 1) (1 + n k / 2)

with n = 2 N_r + |mu|.  "inverted" follows the exponent s = 1/2 - 1/(2k) of the
radial factor (1 - k r^2)^s, "conjugate" the other root s = 1/(2k).  At k = 0
mirror and conjugate both reduce to n + 1.  Which one is the spectrum of the
operator is decided numerically by :mod:`kappaosc.quantum.oracle`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import List, Optional

from ..model import PhysConstants
from .series import BRANCHES


@dataclass(frozen=True)
class QuantumNumbers:
    N_r: int
    mu: int
    sign: int = 1

    def __post_init__(self):
        if self.N_r < 0 or self.mu < 0:
            raise ValueError("N_r and mu must be non-negative (mu is |mu|)")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @property
    def n(self) -> int:
        return 2 * self.N_r + self.mu


@dataclass(frozen=True)
class HypParams:
    a: complex | float
    b: complex | float
    c: float
    Delta: complex | float
    branch: str

    def terminating_index(self, tol: float = 1e-9) -> Optional[str]:
        """'a' or 'b' if that parameter is a non-positive integer."""
        for name in ("a", "b"):
            v = getattr(self, name)
            if abs(complex(v).imag) < tol and complex(v).real < tol:
                re = complex(v).real
                if abs(re - round(re)) < tol:
                    return name
        return None


@dataclass(frozen=True)
class SpectralLine:
    N_r: int
    n: int
    mu: int
    E_scaled: float
    E_physical: float
    source: str

    def as_dict(self) -> dict:
        return {"N_r": self.N_r, "n": self.n, "mu": self.mu,
                "E_scaled": self.E_scaled, "E_physical": self.E_physical, "source": self.source}


def _check_branch(branch: str):
    if branch not in BRANCHES:
        raise ValueError(f"unknown branch {branch!r}; expected one of {BRANCHES}")


def closed_form_energy(qn: QuantumNumbers, kappa, branch: str = "conjugate"):
    """Scaled energy of level ``qn`` on the chosen branch; exact for Fraction kappa."""
    _check_branch(branch)
    n = qn.n
    if branch == "conjugate":
        return (n + 1) * (1 + n * kappa / 2)
    e = (n + 1) * ((n + 2) * kappa / 2 - 1)
    return e if branch == "inverted" else -e


def physical_energy(scaled: float, constants: PhysConstants = PhysConstants()) -> float:
    return constants.hbar * constants.beta * float(scaled)


def spectrum_lines(kappa: float, mu: int, n_max: int, branch: str,
                   constants: PhysConstants = PhysConstants()) -> List[SpectralLine]:
    """All levels with n = 2 N_r + mu <= n_max."""
    out = []
    for N_r in range(0, (n_max - mu) // 2 + 1 if n_max >= mu else 0):
        qn = QuantumNumbers(N_r, mu)
        e = float(closed_form_energy(qn, kappa, branch))
        out.append(SpectralLine(N_r, qn.n, mu, e, physical_energy(e, constants), f"closed_form:{branch}"))
    return out


def _sqrt(x):
    return math.sqrt(x) if x >= 0 else cmath.sqrt(x)


def hyp_params(scaled_energy: float, mu: int, kappa: float, branch: str = "inverted") -> HypParams:
    """Parameters of the 2F1 in z = k r^2 for a given energy.

    Both branches share c = mu + 1 and Delta = sqrt((k - 2)^2 + 8 E k).
    inverted:   a, b = (2 k mu + 3k - 2 -/+ Delta) / (4k)
    conjugate:  a, b = (2 k mu + k + 2 -/+ Delta) / (4k)
    """
    _check_branch(branch)
    if kappa == 0:
        raise ValueError("hypergeometric parameters are singular at kappa = 0; use the Kummer form")
    delta = _sqrt((kappa - 2) ** 2 + 8 * scaled_energy * kappa)
    if branch == "conjugate":
        base = 2 * kappa * mu + kappa + 2
    else:
        base = 2 * kappa * mu + 3 * kappa - 2
    return HypParams((base - delta) / (4 * kappa), (base + delta) / (4 * kappa), mu + 1.0, delta,
                     "conjugate" if branch == "conjugate" else "inverted")


def kummer_parameter(scaled_energy: float, mu: int) -> float:
    """a in r^mu exp(-r^2/2) M(a, mu + 1, r^2), the flat-space radial solution."""
    return 0.5 * (1 + mu - scaled_energy)


def boundary_exponent(kappa: float, branch: str) -> float:
    """s in the (1 - k r^2)^s prefactor."""
    _check_branch(branch)
    if kappa == 0:
        raise ValueError("no power prefactor at kappa = 0")
    if branch == "conjugate":
        return 1.0 / (2 * kappa)
    return 0.5 - 1.0 / (2 * kappa)


def energy_gap(n: int, kappa: float, branch: str = "conjugate") -> float:
    """E_{n+1} - E_n as a function of n."""
    return float(closed_form_energy(QuantumNumbers(0, n + 1), kappa, branch)
                 - closed_form_energy(QuantumNumbers(0, n), kappa, branch))


def bound_state_cutoff(kappa: float) -> Optional[float]:
    """Upper bound on n for square-integrable conjugate-branch states at k < 0.

    Normalizable iff n < 1/|k| - 1/2; None when k >= 0 (no cutoff).
    """
    if kappa >= 0:
        return None
    return 1.0 / abs(kappa) - 0.5
