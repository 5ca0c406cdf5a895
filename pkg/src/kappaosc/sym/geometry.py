"""Calculus on the (r, phi) chart: derivatives, Lie derivatives, brackets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Tuple

from .ring import (COS, ONE, PF, PR, R, S, SIN, W, ZERO, K, Key, RingElement,
                   _add_into, _bump, _times_w)

VARIABLES = ("r", "phi", "pr", "pphi")
_SLOT = {"pr": 5, "pphi": 6}


def differentiate(x: RingElement, var: str) -> RingElement:
    """Exact partial derivative with respect to one of r, phi, pr, pphi."""
    if var not in VARIABLES:
        raise ValueError(f"unknown variable {var!r}; expected one of {VARIABLES}")
    num = x._laurent()
    b = x.denominator[1]
    out: Dict[Key, object] = {}

    if var in _SLOT:
        slot = _SLOT[var]
        for key, c in num.items():
            if key[slot]:
                k = list(key)
                k[slot] -= 1
                _add_into(out, tuple(k), c * key[slot])
        return RingElement._from_laurent(out, b)

    if var == "phi":
        for key, c in num.items():
            n_cos, n_sin = key[3], key[4]
            if n_cos:
                # d cos^k = -k cos^(k-1) sin
                _add_into(out, _bump(key, cos=-1, sin=1), -n_cos * c)
            if n_sin:
                _add_into(out, _bump(key, sin=-1, cos=1), c)
        return RingElement._from_laurent(out, b)

    # var == "r": everything is brought over w^(b+1).
    power_part: Dict[Key, object] = {}
    for key, c in num.items():
        if key[1]:
            _add_into(power_part, _bump(key, r=-1), c * key[1])
    out = _times_w(power_part)
    for key, c in num.items():
        if key[2]:
            # ds/dr = -k r s / w
            _add_into(out, _bump(key, k=1, r=1), -c)
        if b:
            # d(w^-b)/dr = 2 b k r w^-(b+1)
            _add_into(out, _bump(key, k=1, r=1), 2 * b * c)
    return RingElement._from_laurent(out, b + 1)


def _d(x: RingElement, coord: int) -> RingElement:
    return differentiate(x, ("r", "phi")[coord])


@dataclass(frozen=True)
class VectorField2:
    """X = f d/dr + h d/dphi."""

    f: RingElement
    h: RingElement

    def __getitem__(self, i: int) -> RingElement:
        return (self.f, self.h)[i]

    def __add__(self, other: "VectorField2") -> "VectorField2":
        return VectorField2(self.f + other.f, self.h + other.h)

    def __sub__(self, other: "VectorField2") -> "VectorField2":
        return VectorField2(self.f - other.f, self.h - other.h)

    def scale(self, c) -> "VectorField2":
        return VectorField2(self.f * c, self.h * c)

    def is_zero(self) -> bool:
        return self.f.is_zero() and self.h.is_zero()

    def at_kappa_zero(self) -> "VectorField2":
        return VectorField2(self.f.at_kappa_zero(), self.h.at_kappa_zero())


@dataclass(frozen=True)
class SymMetric:
    """Symmetric 2x2 tensor on (r, phi); the off-diagonal slot is stored once.

    The default is the metric with g_rr = 1/(1 - k r^2), g_phiphi = r^2, i.e.
    without the overall 1/2 so that T = g_ij v^i v^j / 2 matches the
    kinetic Lagrangian.
    """

    g_rr: RingElement = ONE / W
    g_rphi: RingElement = ZERO
    g_phiphi: RingElement = R * R

    def __getitem__(self, ij: Tuple[int, int]) -> RingElement:
        i, j = ij
        if i == j:
            return self.g_rr if i == 0 else self.g_phiphi
        return self.g_rphi

    def components(self) -> Tuple[RingElement, RingElement, RingElement]:
        return self.g_rr, self.g_rphi, self.g_phiphi

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components())


DEFAULT_METRIC = SymMetric()


def lie_derivative_metric(X: VectorField2, g: SymMetric = DEFAULT_METRIC) -> SymMetric:
    """(L_X g)_ij = X^k d_k g_ij + g_kj d_i X^k + g_ik d_j X^k."""
    dX = [[_d(X[k], i) for k in range(2)] for i in range(2)]  # dX[i][k] = d_i X^k

    def comp(i: int, j: int) -> RingElement:
        acc = ZERO
        for k in range(2):
            acc = acc + X[k] * _d(g[i, j], k)
            acc = acc + g[k, j] * dX[i][k] + g[i, k] * dX[j][k]
        return acc

    return SymMetric(comp(0, 0), comp(0, 1), comp(1, 1))


def killing_residuals(X: VectorField2) -> Tuple[RingElement, RingElement, RingElement]:
    """The three first-order Killing conditions for the default metric.

    f_r + k r f / (1 - k r^2),  r^2 h_r + f_phi / (1 - k r^2),  r h_phi + f
    """
    f, h = X.f, X.h
    return (
        differentiate(f, "r") + K * R * f / W,
        R * R * differentiate(h, "r") + differentiate(f, "phi") / W,
        R * differentiate(h, "phi") + f,
    )


def poisson_bracket(F: RingElement, G: RingElement) -> RingElement:
    """{F, G} in the canonical pairs (r, pr), (phi, pphi)."""
    return (differentiate(F, "r") * differentiate(G, "pr")
            + differentiate(F, "phi") * differentiate(G, "pphi")
            - differentiate(F, "pr") * differentiate(G, "r")
            - differentiate(F, "pphi") * differentiate(G, "phi"))


def vf_commutator(X: VectorField2, Y: VectorField2) -> VectorField2:
    """[X, Y]^i = X^k d_k Y^i - Y^k d_k X^i."""
    comps = []
    for i in range(2):
        acc = ZERO
        for k in range(2):
            acc = acc + X[k] * _d(Y[i], k) - Y[k] * _d(X[i], k)
        comps.append(acc)
    return VectorField2(*comps)


def measure_lie_derivative(X: VectorField2, density: RingElement | None = None) -> RingElement:
    """Coefficient of L_X (rho dr ^ dphi): d_r(rho f) + d_phi(rho h)."""
    rho = MEASURE_DENSITY if density is None else density
    return differentiate(rho * X.f, "r") + differentiate(rho * X.h, "phi")


# Killing fields, Noether momenta and Hamiltonian pieces of the model.
X1 = VectorField2(S * COS, -S * SIN / R)
X2 = VectorField2(S * SIN, S * COS / R)
XJ = VectorField2(ZERO, ONE)

P1 = S * (COS * PR - SIN * PF / R)
P2 = S * (SIN * PR + COS * PF / R)
J = PF

KINETIC_H = (W * PR * PR + PF * PF / (R * R)) / 2
# V(r) = -(alpha^2/2) r^2/(1 - k r^2) at alpha = 1; bracket zero-tests are
# homogeneous in alpha^2, so the unit value loses nothing.
POTENTIAL_V = -(R * R / W) / 2
HAMILTONIAN = KINETIC_H - POTENTIAL_V

# r / sqrt(1 - k r^2) == r s / w
MEASURE_DENSITY = R * S / W
