"""Floating-point charts, Lagrangian/Hamiltonian, Noether momenta and unit scaling.

Conventions follow the model as written: the potential is

    V(r) = -(alpha^2 / 2) r^2 / (1 - kappa r^2),

the Lagrangian is L = T + V and the Hamiltonian H = T - V, so the energy is
the positive-definite T + alpha^2 r^2 / (2 (1 - kappa r^2)).  The mass only
enters through ``m`` (default 1, which reproduces the unit-mass formulas).

Functions accept scalars or numpy arrays for the coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Tuple

import numpy as np


class DomainError(ValueError):
    """State outside 1 - kappa r^2 > 0."""


class DegenerateOriginError(ValueError):
    """Polar angle undefined at r = 0."""


@dataclass(frozen=True)
class PhysConstants:
    m: float = 1.0
    alpha: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("m", "hbar"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be positive and finite, got {v}")
        # alpha = 0 is the free (geodesic) problem
        if not (self.alpha >= 0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be non-negative and finite, got {self.alpha}")

    @property
    def beta(self) -> float:
        """alpha = sqrt(m) * beta."""
        return self.alpha / math.sqrt(self.m)


@dataclass(frozen=True)
class CylState:
    """(r, phi, vr, vphi); with ``momentum=True`` the last two are (pr, pphi)."""

    r: float
    phi: float
    vr: float
    vphi: float
    momentum: bool = False

    @property
    def pr(self):
        self._need_momentum()
        return self.vr

    @property
    def pphi(self):
        self._need_momentum()
        return self.vphi

    def _need_momentum(self):
        if not self.momentum:
            raise AttributeError("state holds velocities, not momenta")

    def coords(self) -> Tuple[float, float, float, float]:
        return self.r, self.phi, self.vr, self.vphi


@dataclass(frozen=True)
class CartState:
    """(x, y, vx, vy); with ``momentum=True`` the last two are (px, py)."""

    x: float
    y: float
    vx: float
    vy: float
    momentum: bool = False

    @property
    def px(self):
        if not self.momentum:
            raise AttributeError("state holds velocities, not momenta")
        return self.vx

    @property
    def py(self):
        if not self.momentum:
            raise AttributeError("state holds velocities, not momenta")
        return self.vy

    @property
    def r2(self):
        return self.x * self.x + self.y * self.y

    def coords(self) -> Tuple[float, float, float, float]:
        return self.x, self.y, self.vx, self.vy


def _w(r2, kappa):
    w = 1.0 - kappa * r2
    if np.any(np.asarray(w) <= 0.0):
        raise DomainError(f"1 - kappa r^2 must be positive (kappa={kappa})")
    return w


def _r2(state) -> float:
    return state.r2 if isinstance(state, CartState) else state.r * state.r


def in_domain(state, kappa: float, margin: float = 0.0) -> bool:
    return bool(np.all(1.0 - kappa * _r2(state) > margin))


def potential(r, kappa: float, alpha: float = 1.0):
    return -0.5 * alpha * alpha * r * r / _w(r * r, kappa)


# -- charts ---------------------------------------------------------------

def cyl_to_cart(state: CylState) -> CartState:
    r, phi, a, b = state.coords()
    c, s = np.cos(phi), np.sin(phi)
    if state.momentum:
        if np.any(np.asarray(r) == 0):
            raise DegenerateOriginError("pphi/r undefined at r = 0")
        return CartState(r * c, r * s, c * a - s * b / r, s * a + c * b / r, True)
    return CartState(r * c, r * s, a * c - r * s * b, a * s + r * c * b, False)


def cart_to_cyl(state: CartState) -> CylState:
    x, y, a, b = state.coords()
    r = np.hypot(x, y)
    if np.any(np.asarray(r) == 0):
        raise DegenerateOriginError("polar angle undefined at the origin")
    phi = np.arctan2(y, x)
    if state.momentum:
        return CylState(r, phi, (x * a + y * b) / r, x * b - y * a, True)
    return CylState(r, phi, (x * a + y * b) / r, (x * b - y * a) / (r * r), False)


def transform_state(state):
    """Map a state to the other chart, keeping its velocity/momentum form."""
    if isinstance(state, CylState):
        return cyl_to_cart(state)
    if isinstance(state, CartState):
        return cart_to_cyl(state)
    raise TypeError(f"not a state: {state!r}")


# -- Lagrangian side --------------------------------------------------------

def kinetic_energy(state, kappa: float, m: float = 1.0):
    if state.momentum:
        raise ValueError("velocity-form state required")
    if isinstance(state, CylState):
        w = _w(state.r * state.r, kappa)
        return 0.5 * m * (state.vr ** 2 / w + state.r ** 2 * state.vphi ** 2)
    x, y, vx, vy = state.coords()
    w = _w(state.r2, kappa)
    ang = x * vy - y * vx
    return 0.5 * m * (vx * vx + vy * vy - kappa * ang * ang) / w


def lagrangian(state, kappa: float, constants: PhysConstants = PhysConstants()):
    r = np.sqrt(_r2(state))
    return kinetic_energy(state, kappa, constants.m) + potential(r, kappa, constants.alpha)


def legendre_momenta(state, kappa: float, m: float = 1.0):
    """Velocity-form state -> momentum-form state in the same chart."""
    if state.momentum:
        raise ValueError("velocity-form state required")
    if isinstance(state, CylState):
        w = _w(state.r * state.r, kappa)
        return replace(state, vr=m * state.vr / w, vphi=m * state.r ** 2 * state.vphi, momentum=True)
    x, y, vx, vy = state.coords()
    w = _w(state.r2, kappa)
    ang = x * vy - y * vx
    return CartState(x, y, m * (vx + kappa * ang * y) / w, m * (vy - kappa * ang * x) / w, True)


def momenta_to_velocities(state, kappa: float, m: float = 1.0):
    """Inverse of :func:`legendre_momenta`."""
    if not state.momentum:
        raise ValueError("momentum-form state required")
    if isinstance(state, CylState):
        w = _w(state.r * state.r, kappa)
        return replace(state, vr=w * state.vr / m, vphi=state.vphi / (m * state.r ** 2), momentum=False)
    x, y, px, py = state.coords()
    _w(state.r2, kappa)
    vx = (1 - kappa * x * x) * px - kappa * x * y * py
    vy = (1 - kappa * y * y) * py - kappa * x * y * px
    return CartState(x, y, vx / m, vy / m, False)


def hamiltonian(state, kappa: float, constants: PhysConstants = PhysConstants()):
    """H = p.v - L; the chart is taken from the state's type."""
    if not state.momentum:
        raise ValueError("momentum-form state required")
    m = constants.m
    if isinstance(state, CylState):
        r = state.r
        w = _w(r * r, kappa)
        if np.any(np.asarray(r) == 0) and np.any(np.asarray(state.pphi) != 0):
            raise DegenerateOriginError("pphi^2/r^2 undefined at r = 0")
        kin = (w * state.pr ** 2 + state.pphi ** 2 / (r * r)) / (2 * m)
    else:
        x, y, px, py = state.coords()
        r = np.sqrt(state.r2)
        _w(state.r2, kappa)
        radial = x * px + y * py
        kin = (px * px + py * py - kappa * radial * radial) / (2 * m)
    return kin - potential(r, kappa, constants.alpha)


def noether_momenta(state, kappa: float):
    """(P1, P2, J) for a momentum-form state in either chart.

    In Cartesian form P1 = sqrt(1 - kappa r^2) px and P2 = sqrt(1 - kappa r^2) py,
    which stays regular at the origin.
    """
    if not state.momentum:
        raise ValueError("momentum-form state required")
    if isinstance(state, CylState):
        r, phi, pr, pphi = state.coords()
        if np.any(np.asarray(r) == 0):
            raise DegenerateOriginError("noether momenta carry 1/r in the polar chart")
        sw = np.sqrt(_w(r * r, kappa))
        c, s = np.cos(phi), np.sin(phi)
        return sw * (c * pr - s * pphi / r), sw * (s * pr + c * pphi / r), pphi
    x, y, px, py = state.coords()
    sw = np.sqrt(_w(state.r2, kappa))
    return sw * px, sw * py, x * py - y * px


def noether_hamiltonian(P1, P2, J, r, kappa: float, constants: PhysConstants = PhysConstants()):
    """(P1^2 + P2^2 + kappa J^2) / 2m - V(r)."""
    return (P1 * P1 + P2 * P2 + kappa * J * J) / (2 * constants.m) - potential(r, kappa, constants.alpha)


def measure_density(r, kappa: float):
    """Invariant area density r / sqrt(1 - kappa r^2)."""
    if np.any(np.asarray(r) < 0):
        raise DomainError("r must be non-negative")
    return r / np.sqrt(_w(r * r, kappa))


# -- units ------------------------------------------------------------------

def length_unit(constants: PhysConstants) -> float:
    """sqrt(hbar / (m beta))."""
    if constants.beta == 0:
        raise ValueError("no oscillator length scale at alpha = 0")
    return math.sqrt(constants.hbar / (constants.m * constants.beta))


_SCALES = {
    "r": lambda c: length_unit(c),
    "kappa": lambda c: 1.0 / length_unit(c) ** 2,
    "E": lambda c: c.hbar * c.beta,
}


def scale_units(quantity: str, value, constants: PhysConstants, direction: str = "to_scaled"):
    """Convert r, kappa or E between physical and dimensionless units.

    r = sqrt(hbar/(m beta)) r_bar, kappa = (m beta/hbar) kappa_bar, E = hbar beta E_bar.
    """
    if quantity not in _SCALES:
        raise ValueError(f"unknown quantity {quantity!r}; expected one of {sorted(_SCALES)}")
    unit = _SCALES[quantity](constants)
    if direction == "to_scaled":
        return value / unit
    if direction == "to_physical":
        return value * unit
    raise ValueError("direction must be 'to_scaled' or 'to_physical'")


def effective_alpha_sq(kappa: float, constants: PhysConstants) -> float:
    """Potential strength after beta^2 -> beta^2 - kappa hbar beta / m, times m.

    This is the physical alpha^2 whose scaled problem has the (1 - kappa_bar)
    potential factor.
    """
    b = constants.beta
    return constants.m * (b * b - kappa * constants.hbar * b / constants.m)


def scaled_potential_coefficient(kappa_scaled: float) -> float:
    return 1.0 - kappa_scaled


# -- serialization ------------------------------------------------------------

def state_to_json(state, kappa: float) -> dict:
    chart = "cylindrical" if isinstance(state, CylState) else "cartesian"
    return {"chart": chart, "kappa": float(kappa),
            "form": "momentum" if state.momentum else "velocity",
            "coords": [float(c) for c in state.coords()]}


def state_from_json(obj: dict):
    coords = obj["coords"]
    if len(coords) != 4:
        raise ValueError("coords must have four entries")
    momentum = obj.get("form", "velocity") == "momentum"
    cls = {"cylindrical": CylState, "cartesian": CartState}[obj["chart"]]
    return cls(*map(float, coords), momentum=momentum), float(obj["kappa"])
