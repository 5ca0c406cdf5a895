"""Closed-form wavefunctions, the scaled radial operator and the inner product.

The radial part is written as

    R(r) = r^mu * g(r) * F(z)

with z = k r^2 and g = (1 - k r^2)^s for k != 0, or z = r^2 and
g = exp(-r^2/2) at k = 0.  F is a 2F1 (or Kummer M) power series in z,
usually terminating.  Derivatives are exact, via the logarithmic derivative
of the prefactor and the series derivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Sequence

import numpy as np

from ..model import DomainError
from .series import hyp2f1_coefficients, kummer_coefficients
from .spectrum import (QuantumNumbers, boundary_exponent, closed_form_energy,
                       hyp_params, kummer_parameter)


class NonNormalizableError(ArithmeticError):
    """The radial integral of |R|^2 under the invariant measure diverges."""


def _series_coeffs(kind, params, z_max, terminating_degree):
    if terminating_degree is not None:
        n_terms = terminating_degree + 1
    else:
        n_terms = 40
    while True:
        if kind == "2f1":
            cs = hyp2f1_coefficients(*params, n_terms)
        else:
            cs = kummer_coefficients(*params, n_terms)
        if terminating_degree is not None:
            return cs
        tail = abs(cs[-1]) * abs(z_max) ** (n_terms - 1)
        head = sum(abs(c) * abs(z_max) ** j for j, c in enumerate(cs))
        if tail <= 1e-18 * head:
            return cs
        if n_terms > 20_000:
            raise ArithmeticError("series did not converge at the requested radius")
        n_terms *= 2


def _horner3(coeffs: Sequence[float], z):
    z = np.asarray(z, dtype=float)
    p = np.zeros_like(z)
    dp = np.zeros_like(z)
    d2p = np.zeros_like(z)
    for c in reversed(coeffs):
        d2p = d2p * z + 2 * dp
        dp = dp * z + p
        p = p * z + float(c)
    return p, dp, d2p


@dataclass
class RadialSolution:
    """Regular radial solution r^mu g(r) F(z); not normalized."""

    mu: int
    kappa: float
    energy: float
    exponent: float | None      # None means the Gaussian prefactor at k = 0
    coeffs: List[float]
    representation: str

    def prefactor_logderivs(self, r):
        mu, k = self.mu, self.kappa
        if self.exponent is None:
            g = np.exp(-0.5 * r * r)
            l1 = mu / r - r
            l2 = -mu / (r * r) - 1.0
        else:
            s = self.exponent
            w = 1.0 - k * r * r
            g = w ** s
            l1 = mu / r - 2 * s * k * r / w
            l2 = -mu / (r * r) - 2 * s * k / w - 4 * s * k * k * r * r / (w * w)
        return (r ** mu) * g, l1, l2

    def values(self, r):
        """(R, R', R'') at r > 0."""
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0):
            raise ValueError("exact derivatives need r > 0")
        _check_domain(r, self.kappa)
        zc = 1.0 if self.exponent is None else self.kappa
        F, Fz, Fzz = _horner3(self.coeffs, zc * r * r)
        Fr = Fz * 2 * zc * r
        Frr = Fzz * (2 * zc * r) ** 2 + Fz * 2 * zc
        pre, l1, l2 = self.prefactor_logderivs(r)
        R = pre * F
        dR = pre * (l1 * F + Fr)
        d2R = pre * ((l2 + l1 * l1) * F + 2 * l1 * Fr + Frr)
        return R, dR, d2R

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        _check_domain(r, self.kappa)
        zc = 1.0 if self.exponent is None else self.kappa
        F = _horner3(self.coeffs, zc * r * r)[0]
        if self.exponent is None:
            g = np.exp(-0.5 * r * r)
        else:
            g = (1.0 - self.kappa * r * r) ** self.exponent
        return (r ** self.mu) * g * F


def _check_domain(r, kappa):
    if np.any(np.asarray(r) < 0):
        raise DomainError("r must be non-negative")
    if kappa > 0 and np.any(1.0 - kappa * np.asarray(r) ** 2 <= 0):
        raise DomainError(f"r must stay below 1/sqrt(kappa) = {1 / math.sqrt(kappa)}")


def radial_solution(mu: int, kappa: float, energy: float, branch: str = "conjugate",
                    r_max: float | None = None, degree: int | None = None) -> RadialSolution:
    """Regular solution at an arbitrary energy in the representation of ``branch``.

    ``degree`` declares a terminating polynomial of that degree in z (known
    quantized energies); otherwise the series is summed to convergence up to
    ``r_max``.
    """
    if kappa == 0:
        a = kummer_parameter(energy, mu)
        z_max = (r_max or 6.0) ** 2
        cs = _series_coeffs("m", (a, mu + 1.0), z_max, degree)
        return RadialSolution(mu, 0.0, energy, None, [float(c) for c in cs], "kummer")
    hp = hyp_params(energy, mu, kappa, "conjugate" if branch == "conjugate" else "inverted")
    a, b = hp.a, hp.b
    if isinstance(a, complex) or isinstance(b, complex):
        raise ArithmeticError("complex hypergeometric parameters at this energy")
    if degree is not None:
        # put the terminating parameter first
        if abs(b + degree) < abs(a + degree):
            a, b = b, a
        a = float(-degree)
    z_max = abs(kappa) * (r_max if r_max is not None else 1 / math.sqrt(abs(kappa))) ** 2
    if degree is None and z_max >= 1:
        raise ArithmeticError("non-terminating 2F1 series needs |k| r^2 < 1")
    cs = _series_coeffs("2f1", (a, b, hp.c), z_max, degree)
    return RadialSolution(mu, kappa, energy, boundary_exponent(kappa, branch),
                          [float(c) for c in cs], f"2f1:{branch}")


@lru_cache(maxsize=256)
def eigen_radial(N_r: int, mu: int, kappa: float, branch: str = "conjugate") -> RadialSolution:
    """Closed-form radial eigenfunction of level (N_r, mu) on ``branch``."""
    qn = QuantumNumbers(N_r, mu)
    e = float(closed_form_energy(qn, kappa, branch))
    if kappa == 0:
        degree = N_r if branch != "inverted" else None
        return radial_solution(mu, 0.0, e, branch, degree=degree)
    if branch == "mirror":
        return radial_solution(mu, kappa, e, "inverted")
    return radial_solution(mu, kappa, e, branch, degree=N_r)


def eval_wavefunction(qn: QuantumNumbers, kappa: float, r, phi, sign: int | None = None,
                      branch: str = "conjugate", normalized: bool = True):
    """Psi(r, phi) = C R(r) exp(i sign mu phi)."""
    sign = qn.sign if sign is None else sign
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    R = eigen_radial(qn.N_r, qn.mu, kappa, branch)(r)
    C = normalization_constant(qn, kappa, branch) if normalized else 1.0
    return C * R * np.exp(1j * sign * qn.mu * np.asarray(phi, dtype=float))


# -- operator -------------------------------------------------------------------

def apply_radial_operator(sol: RadialSolution, r):
    """-1/2 [w R'' + (1 - 2k r^2) R'/r - mu^2 R/r^2] + (1 - k) r^2 R / (2 w)."""
    r = np.asarray(r, dtype=float)
    k, mu = sol.kappa, sol.mu
    R, dR, d2R = sol.values(r)
    w = 1.0 - k * r * r
    kin = -0.5 * (w * d2R + (1 - 2 * k * r * r) * dR / r - mu * mu * R / (r * r))
    return kin + 0.5 * (1 - k) * r * r / w * R, R


def sample_points(qn: QuantumNumbers, kappa: float, count: int = 100) -> np.ndarray:
    """Interior radii where the state carries its weight."""
    if kappa > 0:
        hi = (1 - 1e-3) / math.sqrt(kappa)
    else:
        hi = 3.0 * math.sqrt(qn.n + 1) + 3.0
        if kappa < 0:
            hi = min(hi, 10.0 / math.sqrt(abs(kappa)))
    lo = hi / (10 * count)
    return np.linspace(lo, hi, count)


def schrodinger_residual(qn: QuantumNumbers, kappa: float, scaled_energy: float | None = None,
                         points=None, branch: str = "conjugate") -> float:
    """max |H Psi - E Psi| / max |E Psi| over the sample points.

    The wavefunction is the closed form for ``qn`` on ``branch``; ``scaled_energy``
    defaults to that branch's closed-form energy and may be perturbed to test
    the non-eigenvalue case.  The angular factor contributes -mu^2/r^2 exactly.
    When E = 0 the denominator falls back to max |Psi|.
    """
    sol = eigen_radial(qn.N_r, qn.mu, kappa, branch)
    e = sol.energy if scaled_energy is None else scaled_energy
    r = sample_points(qn, kappa) if points is None else np.asarray(points, dtype=float)
    HR, R = apply_radial_operator(sol, r)
    scale = np.max(np.abs(e * R))
    if scale == 0.0:
        # E = 0 occurs on the inverted branch; fall back to the wavefunction scale
        scale = np.max(np.abs(R))
    return float(np.max(np.abs(HR - e * R)) / scale)


# -- quadrature -------------------------------------------------------------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)


def _panel_nodes(a: float, b: float, panels: int):
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    x = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
    wt = (half[:, None] * _GL_W[None, :]).ravel()
    return x, wt


def rho_to_r(rho, kappa: float):
    """Geodesic distance from the origin to the chart radius r."""
    rho = np.asarray(rho, dtype=float)
    if kappa > 0:
        q = math.sqrt(kappa)
        return np.sin(q * rho) / q
    if kappa < 0:
        q = math.sqrt(-kappa)
        return np.sinh(q * rho) / q
    return rho


def r_to_rho(r, kappa: float):
    r = np.asarray(r, dtype=float)
    if kappa > 0:
        q = math.sqrt(kappa)
        return np.arcsin(np.clip(q * r, -1, 1)) / q
    if kappa < 0:
        q = math.sqrt(-kappa)
        return np.arcsinh(q * r) / q
    return r


def _radial_integral(fa: RadialSolution, fb: RadialSolution, kappa: float) -> float:
    """int R_a R_b r / sqrt(1 - k r^2) dr, computed as int R_a R_b r drho."""

    def chunk(a, b, panels):
        rho, wt = _panel_nodes(a, b, panels)
        r = rho_to_r(rho, kappa)
        with np.errstate(over="ignore", invalid="ignore"):
            vals = fa(r) * fb(r) * r
        if not np.all(np.isfinite(vals)):
            raise NonNormalizableError("integrand overflowed before the tail decayed")
        return float(np.dot(wt, vals))

    if kappa > 0:
        # near the rim the integrand behaves like (1 - k r^2)^(s_a + s_b) drho
        # with 1 - k r^2 ~ (distance in rho)^2
        if 2 * (fa.exponent + fb.exponent) <= -1:
            raise NonNormalizableError("prefactor exponent too negative at the boundary")
        return chunk(0.0, math.pi / (2 * math.sqrt(kappa)), 200)
    n_eff = max(fa.mu, fb.mu) + 2 * max(len(fa.coeffs), len(fb.coeffs))
    width = 6.0 + 2.0 * math.sqrt(n_eff + 1)
    total = chunk(0.0, width, 64)
    lo, hi = width, 2 * width
    prev = None
    for _ in range(40):
        part = chunk(lo, hi, 64)
        total += part
        if abs(part) <= 1e-17 * abs(total):
            return total
        if prev is not None and abs(part) > abs(prev) and lo > 4 * width:
            raise NonNormalizableError("radial integral grows with the cutoff")
        prev = part
        lo, hi = hi, hi + width
    raise NonNormalizableError("radial integral did not converge")


def radial_inner(N_a: int, N_b: int, mu: int, kappa: float, branch: str = "conjugate") -> float:
    return _radial_integral(eigen_radial(N_a, mu, kappa, branch),
                            eigen_radial(N_b, mu, kappa, branch), kappa)


@lru_cache(maxsize=256)
def _norm_const(N_r: int, mu: int, kappa: float, branch: str) -> float:
    return 1.0 / math.sqrt(2 * math.pi * radial_inner(N_r, N_r, mu, kappa, branch))


def normalization_constant(qn: QuantumNumbers, kappa: float, branch: str = "conjugate") -> float:
    """C with 2 pi C^2 int R^2 r / sqrt(1 - k r^2) dr = 1."""
    return _norm_const(qn.N_r, qn.mu, float(kappa), branch)


def quadrature_norm(qn_a: QuantumNumbers, qn_b: QuantumNumbers, kappa: float,
                    branch: str = "conjugate", normalized: bool = True) -> complex:
    """<Psi_a, Psi_b> under the invariant measure; the phi integral is done exactly."""
    if qn_a.sign * qn_a.mu != qn_b.sign * qn_b.mu:
        return 0j
    radial = _radial_integral(eigen_radial(qn_a.N_r, qn_a.mu, kappa, branch),
                              eigen_radial(qn_b.N_r, qn_b.mu, kappa, branch), kappa)
    c = 1.0
    if normalized:
        c = normalization_constant(qn_a, kappa, branch) * normalization_constant(qn_b, kappa, branch)
    return complex(2 * math.pi * c * radial)


def gram_matrix(mu: int, kappa: float, count: int, branch: str = "conjugate") -> np.ndarray:
    qns = [QuantumNumbers(N, mu) for N in range(count)]
    G = np.zeros((count, count), dtype=complex)
    for i, a in enumerate(qns):
        for j, b in enumerate(qns):
            if j >= i:
                G[i, j] = quadrature_norm(a, b, kappa, branch)
                G[j, i] = np.conj(G[i, j])
    return G


def is_normalizable(qn: QuantumNumbers, kappa: float, branch: str = "conjugate") -> bool:
    try:
        radial_inner(qn.N_r, qn.N_r, qn.mu, kappa, branch)
    except NonNormalizableError:
        return False
    return True


def count_bound_states(kappa: float, mu: int = 0, n_cap: int = 200, branch: str = "conjugate") -> int:
    """Number of normalizable closed-form levels with this mu, found by quadrature."""
    count = 0
    for N in range(n_cap):
        if not is_normalizable(QuantumNumbers(N, mu), kappa, branch):
            break
        count += 1
    return count
