"""Independent finite-volume Sturm-Liouville solver for the scaled radial problem.

The radial equation is discretised in the geodesic distance rho, in which the
invariant measure r / sqrt(1 - k r^2) dr becomes r drho and the operator reads

    -1/2 (1/r) d/drho (r dR/drho) + [mu^2 / (2 r^2) + V(r)] R = E R,
    V(r) = (1 - k) r^2 / (2 (1 - k r^2)).

Cell-centred nodes rho_i = (i - 1/2) h carry the unknowns, fluxes live on the
faces rho = i h, the flux vanishes at the origin (r = 0) and a zero ghost
value at rho_max = (M + 1/2) h closes the outer end.  The resulting generalized problem
A u = E W u has A symmetric tridiagonal and W diagonal and positive, so
scaling by W^(-1/2) gives a symmetric tridiagonal eigenproblem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .series import BRANCHES
from .spectrum import QuantumNumbers, closed_form_energy
from .wavefunction import r_to_rho, rho_to_r

ENVELOPE = 1e-12
DEFAULT_DELTA = 1e-6
DEFAULT_M = 20_000


@dataclass(frozen=True)
class RadialGrid:
    kappa: float
    M: int
    rho_max: float
    delta: Optional[float] = None   # set for kappa > 0

    def __post_init__(self):
        if self.M < 2:
            raise ValueError("grid needs at least two cells")
        if not self.rho_max > 0:
            raise ValueError("rho_max must be positive")

    @property
    def h(self) -> float:
        return self.rho_max / (self.M + 0.5)

    @property
    def rho(self) -> np.ndarray:
        return (np.arange(1, self.M + 1) - 0.5) * self.h

    @property
    def nodes(self) -> np.ndarray:
        """Chart radii r_1 < ... < r_M, all strictly inside (0, r_max)."""
        return rho_to_r(self.rho, self.kappa)

    @property
    def faces(self) -> np.ndarray:
        """r at rho = h, 2h, ..., M h."""
        return rho_to_r(np.arange(1, self.M + 1) * self.h, self.kappa)

    @property
    def weights(self) -> np.ndarray:
        """Cell masses of the invariant measure, r_i h."""
        return self.nodes * self.h

    @property
    def r_max(self) -> float:
        return float(rho_to_r(self.rho_max, self.kappa))

    def refined(self, factor: int = 2) -> "RadialGrid":
        return replace(self, M=self.M * factor)

    def describe(self) -> dict:
        return {"kappa": self.kappa, "M": self.M, "rho_max": self.rho_max,
                "r_max": self.r_max, "delta": self.delta, "h": self.h}


def potential_scaled(r, kappa: float):
    r = np.asarray(r, dtype=float)
    return 0.5 * (1 - kappa) * r * r / (1 - kappa * r * r)


def boundary_grid(kappa: float, M: int, delta: float = DEFAULT_DELTA) -> RadialGrid:
    """kappa > 0: truncate at r_max = (1 - delta) / sqrt(kappa)."""
    if kappa <= 0:
        raise ValueError("boundary_grid is for kappa > 0")
    rho_max = float(r_to_rho((1 - delta) / math.sqrt(kappa), kappa))
    return RadialGrid(kappa, M, rho_max, delta)


def envelope_rho_max(mu: int, kappa: float, energy: float, envelope: float = ENVELOPE,
                     step: float = 0.01, limit: float = 5000.0) -> float:
    """Distance where the WKB envelope of a level at ``energy`` drops below ``envelope``.

    Only for kappa <= 0.  Raises ArithmeticError when the energy is at or above
    the asymptotic potential, i.e. the level is not bound.
    """
    if kappa > 0:
        raise ValueError("envelope truncation is for kappa <= 0")
    if kappa < 0:
        v_inf = 0.5 * (1 - kappa) / abs(kappa)
        if energy >= v_inf:
            raise ArithmeticError(f"energy {energy} is not below the continuum edge {v_inf}")
    rho = np.arange(1, int(limit / step) + 1) * step
    with np.errstate(over="ignore", invalid="ignore"):
        r = rho_to_r(rho, kappa)
        U = mu * mu / (2 * r * r) + potential_scaled(r, kappa)
    U = np.where(np.isfinite(U), U, 0.5 * (1 - kappa) / max(abs(kappa), 1e-300))
    above = U > energy
    # outer turning point: first index after which U stays above the energy
    below_idx = np.nonzero(~above)[0]
    start = below_idx[-1] + 1 if below_idx.size else 0
    kappa_agmon = np.sqrt(np.maximum(2 * (U[start:] - energy), 0.0))
    acc = np.cumsum(kappa_agmon) * step
    target = math.log(1 / envelope) + 2.0
    hit = np.nonzero(acc >= target)[0]
    if not hit.size:
        raise ArithmeticError("envelope does not decay within the search limit")
    return float(rho[start + hit[0]])


def assemble(mu: int, kappa: float, grid: RadialGrid):
    """(diag, off, weights) of A u = E W u."""
    if mu < 0:
        raise ValueError("mu must be non-negative")
    h = grid.h
    r = grid.nodes
    p = grid.faces               # p[i] sits between node i and node i+1; p[M-1] couples to the zero ghost value at rho_max
    wt = grid.weights
    left = np.r_[0.0, p[:-1]]
    diag = 0.5 * (left + p) / h + wt * (mu * mu / (2 * r * r) + potential_scaled(r, kappa))
    off = -0.5 * p[:-1] / h
    return diag, off, wt


def operator_matrix(mu: int, kappa: float, grid: RadialGrid):
    """Dense (L, W) with L = W^-1 A; W L is symmetric by construction."""
    diag, off, wt = assemble(mu, kappa, grid)
    A = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
    return A / wt[:, None], np.diag(wt)


def _solve(mu: int, kappa: float, grid: RadialGrid, k_levels: int) -> np.ndarray:
    diag, off, wt = assemble(mu, kappa, grid)
    s = 1.0 / np.sqrt(wt)
    return eigh_tridiagonal(diag * s * s, off * s[:-1] * s[1:], eigvals_only=True,
                            select="i", select_range=(0, k_levels - 1))


@dataclass
class OracleResult:
    mu: int
    kappa: float
    eigenvalues: List[float]          # Richardson-extrapolated
    coarse: List[float]
    fine: List[float]
    grid: dict
    grid_error: List[float]            # |extrapolated - fine|
    boundary_shift: List[float]        # change under delta/10 or doubled truncation
    converged: bool
    message: str = ""

    def as_dict(self) -> dict:
        return {"mu": self.mu, "kappa": self.kappa, "eigenvalues": self.eigenvalues,
                "coarse": self.coarse, "fine": self.fine, "grid": self.grid,
                "grid_error": self.grid_error, "boundary_shift": self.boundary_shift,
                "converged": self.converged, "message": self.message}


def default_grid(mu: int, kappa: float, k_levels: int, M: Optional[int] = None,
                 delta: float = DEFAULT_DELTA) -> RadialGrid:
    M = M or max(DEFAULT_M, 50 * k_levels)
    if kappa > 0:
        return boundary_grid(kappa, M, delta)
    # estimate the top requested level on a provisional box, then size the box
    # from the decay envelope of that level
    provisional = 8.0 + 3.0 * math.sqrt(2 * k_levels + mu + 1)
    if kappa < 0:
        provisional += 6.0 / math.sqrt(-kappa)
    e_top = float(_solve(mu, kappa, RadialGrid(kappa, 4000, provisional), k_levels)[-1])
    return RadialGrid(kappa, M, envelope_rho_max(mu, kappa, e_top))


def _extrapolated(mu, kappa, grid, k_levels):
    coarse = _solve(mu, kappa, grid, k_levels)
    fine = _solve(mu, kappa, grid.refined(2), k_levels)
    return (4 * fine - coarse) / 3, coarse, fine


def sl_eigensolve(mu: int, kappa: float, k_levels: int, grid: Optional[RadialGrid] = None,
                  tol: float = 1e-6, boundary_tol: float = 1e-6) -> OracleResult:
    """Lowest ``k_levels`` eigenvalues for angular number ``mu``, ascending.

    Solves on ``grid`` and on its 2x refinement, Richardson-extrapolates
    (second-order scheme), then repeats with the truncation moved outward
    (delta -> delta/10 for k > 0, doubled box for k <= 0).  The result is
    flagged as not converged when either change exceeds its tolerance.
    """
    if k_levels < 1:
        raise ValueError("k_levels must be positive")
    grid = grid or default_grid(mu, kappa, k_levels)
    if grid.kappa != kappa:
        raise ValueError("grid was built for a different kappa")
    if grid.M < 50 * k_levels:
        raise ValueError(f"grid too coarse: M = {grid.M} < 50 * k_levels")
    ext, coarse, fine = _extrapolated(mu, kappa, grid, k_levels)
    if kappa > 0:
        check = boundary_grid(kappa, grid.M, (grid.delta or DEFAULT_DELTA) / 10)
    else:
        check = RadialGrid(kappa, 2 * grid.M, 2 * grid.rho_max)
    ext2 = _extrapolated(mu, kappa, check, k_levels)[0]
    grid_err = np.abs(ext - fine)
    shift = np.abs(ext2 - ext)
    scale = np.maximum(1.0, np.abs(ext))
    problems = []
    if np.any(grid_err > tol * scale):
        problems.append(f"grid refinement change {grid_err.max():.3g} exceeds {tol:g}")
    if np.any(shift > boundary_tol * scale):
        problems.append(f"truncation change {shift.max():.3g} exceeds {boundary_tol:g}")
    if np.any(np.diff(ext) <= 0):
        problems.append("eigenvalues not strictly increasing")
    return OracleResult(mu, kappa, ext.tolist(), coarse.tolist(), fine.tolist(), grid.describe(),
                        grid_err.tolist(), shift.tolist(), not problems, "; ".join(problems))


@dataclass
class BranchResolution:
    branch: Optional[str]
    max_delta: Dict[str, float]
    deltas: Dict[str, List[List[float]]] = field(default_factory=dict)
    tol: float = 1e-4

    @property
    def agrees(self) -> bool:
        return self.branch is not None

    def as_dict(self) -> dict:
        return {"resolved": self.branch, "max_delta": self.max_delta,
                "deltas": self.deltas, "tol": self.tol}


def branch_deltas(result: OracleResult, branch: str) -> List[float]:
    """|oracle - closed form| for levels N_r = 0, 1, ... of the result's mu."""
    out = []
    for N, e in enumerate(result.eigenvalues):
        cf = float(closed_form_energy(QuantumNumbers(N, result.mu), result.kappa, branch))
        out.append(abs(e - cf))
    return out


def resolve_branch(results: Sequence[OracleResult], tol: float = 1e-4) -> BranchResolution:
    """Pick the single branch that matches every oracle result within ``tol``.

    When several branches match (mirror and conjugate coincide at k = 0) the
    conjugate one is reported.
    """
    deltas = {b: [branch_deltas(res, b) for res in results] for b in BRANCHES}
    max_delta = {b: max(max(d) for d in ds) for b, ds in deltas.items()}
    ok = [b for b in BRANCHES if max_delta[b] <= tol]
    if "conjugate" in ok:
        chosen = "conjugate"
    else:
        chosen = ok[0] if ok else None
    return BranchResolution(chosen, max_delta, deltas, tol)
