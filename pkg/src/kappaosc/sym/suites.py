"""Named exact identity checks run by ``kappaosc verify``."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List

from .geometry import (HAMILTONIAN, J, KINETIC_H, MEASURE_DENSITY, P1, P2,
                       POTENTIAL_V, X1, X2, XJ, VectorField2,
                       killing_residuals, lie_derivative_metric,
                       measure_lie_derivative, poisson_bracket, vf_commutator)
from .ring import COS, ONE, PF, PR, R, SIN, W, K, RingElement


@dataclass
class IdentityResult:
    name: str
    description: str
    residuals: Dict[str, RingElement]
    seconds: float = 0.0

    @property
    def zero(self) -> bool:
        return all(r.is_zero() for r in self.residuals.values())

    def as_dict(self, timings: bool = True) -> dict:
        out = {
            "name": self.name,
            "description": self.description,
            "status": "ZERO" if self.zero else "NONZERO",
            "residuals": {k: v.dump() for k, v in self.residuals.items()},
        }
        if timings:
            out["seconds"] = self.seconds
        return out


@dataclass
class Identity:
    name: str
    description: str
    build: Callable[[], Dict[str, RingElement]] = field(repr=False)

    def run(self) -> IdentityResult:
        t0 = time.perf_counter()
        res = self.build()
        return IdentityResult(self.name, self.description, res, time.perf_counter() - t0)


def _killing(X: VectorField2) -> Dict[str, RingElement]:
    e1, e2, e3 = killing_residuals(X)
    lg = lie_derivative_metric(X)
    return {"radial": e1, "mixed": e2, "angular": e3,
            "lie_g_rr": lg.g_rr, "lie_g_rphi": lg.g_rphi, "lie_g_phiphi": lg.g_phiphi}


def _vf(prefix: str, X: VectorField2) -> Dict[str, RingElement]:
    return {f"{prefix}.f": X.f, f"{prefix}.h": X.h}


def _velocity_identity() -> Dict[str, RingElement]:
    # The pr/pf slots stand in for v_r, v_phi here.
    vr, vphi = PR, PF
    x, y = R * COS, R * SIN
    vx = vr * COS - R * SIN * vphi
    vy = vr * SIN + R * COS * vphi
    ang = x * vy - y * vx
    lhs = vx * vx + vy * vy - K * ang * ang
    rhs = vr * vr + R * R * W * vphi * vphi
    return {"cartesian_minus_polar": lhs - rhs}


def _commutators() -> Dict[str, RingElement]:
    out = {}
    out.update(_vf("[X1,X2]+k*XJ", vf_commutator(X1, X2) + XJ.scale(K)))
    out.update(_vf("[X1,XJ]-X2", vf_commutator(X1, XJ) - X2))
    out.update(_vf("[X2,XJ]+X1", vf_commutator(X2, XJ) + X1))
    return out


IDENTITIES: List[Identity] = [
    Identity("killing_X1", "X1 satisfies the Killing system and L_X1 g = 0", lambda: _killing(X1)),
    Identity("killing_X2", "X2 satisfies the Killing system and L_X2 g = 0", lambda: _killing(X2)),
    Identity("killing_XJ", "XJ satisfies the Killing system and L_XJ g = 0", lambda: _killing(XJ)),
    Identity("noether_brackets", "{P1,P2} = k J, {P1,J} = -P2, {P2,J} = P1", lambda: {
        "{P1,P2}-kJ": poisson_bracket(P1, P2) - K * J,
        "{P1,J}+P2": poisson_bracket(P1, J) + P2,
        "{P2,J}-P1": poisson_bracket(P2, J) - P1,
    }),
    Identity("hamiltonian_brackets",
             "P1, P2, J commute with the kinetic Hamiltonian; J also with V(r)", lambda: {
                 "{P1,T}": poisson_bracket(P1, KINETIC_H),
                 "{P2,T}": poisson_bracket(P2, KINETIC_H),
                 "{J,T}": poisson_bracket(J, KINETIC_H),
                 "{J,H}": poisson_bracket(J, HAMILTONIAN),
             }),
    Identity("killing_commutators", "[X1,X2] = -k XJ, [X1,XJ] = X2, [X2,XJ] = -X1", _commutators),
    Identity("flat_limit_commute", "[X1,X2] vanishes at k = 0",
             lambda: _vf("[X1,X2]|k=0", vf_commutator(X1, X2).at_kappa_zero())),
    Identity("velocity_identity",
             "vx^2 + vy^2 - k (x vy - y vx)^2 = vr^2 + r^2 (1 - k r^2) vphi^2", _velocity_identity),
    Identity("hamiltonian_noether_form",
             "P1^2 + P2^2 + k J^2 = (1 - k r^2) pr^2 + pphi^2 / r^2", lambda: {
                 "difference": P1 * P1 + P2 * P2 + K * J * J - (W * PR * PR + PF * PF / (R * R)),
             }),
    Identity("measure_X1", "L_X1 of r / sqrt(1 - k r^2) dr^dphi vanishes",
             lambda: {"divergence": measure_lie_derivative(X1)}),
    Identity("measure_X2", "L_X2 of r / sqrt(1 - k r^2) dr^dphi vanishes",
             lambda: {"divergence": measure_lie_derivative(X2)}),
    Identity("measure_XJ", "L_XJ of r / sqrt(1 - k r^2) dr^dphi vanishes",
             lambda: {"divergence": measure_lie_derivative(XJ)}),
]


def _findings() -> Dict[str, RingElement]:
    """Brackets that are expected NOT to vanish; reported, never gated on."""
    return {
        "{P1,H}": poisson_bracket(P1, HAMILTONIAN),
        "{P2,H}": poisson_bracket(P2, HAMILTONIAN),
        "{P1,V}": poisson_bracket(P1, POTENTIAL_V),
        "L_(r,0) g_rr": lie_derivative_metric(VectorField2(R, 0 * ONE)).g_rr,
    }


def run_suite() -> List[IdentityResult]:
    return [ident.run() for ident in IDENTITIES]


def suite_report(timings: bool = True) -> dict:
    """Full suite as plain data; ``timings=False`` keeps the output reproducible."""
    t0 = time.perf_counter()
    results = run_suite()
    findings = _findings()
    out = {
        "identities": [r.as_dict(timings) for r in results],
        "all_zero": all(r.zero for r in results),
        "count": len(results),
        "nonvanishing_findings": {k: v.dump() for k, v in findings.items()},
        "conventions": {
            "metric": "g_rr = 1/(1-k r^2), g_phiphi = r^2 (no overall 1/2)",
            "potential": "V(r) = -(alpha^2/2) r^2/(1-k r^2); L = T + V, H = T - V",
            "momentum_slots_as_velocities": "velocity_identity reuses pr, pf for v_r, v_phi",
        },
    }
    if timings:
        out["seconds"] = time.perf_counter() - t0
    return out
