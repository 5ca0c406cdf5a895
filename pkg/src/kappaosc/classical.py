"""Classical trajectories of the curved-space oscillator in Cartesian variables.

Equations of motion, solved for the accelerations:

    (1 - k r^2) x'' + k [vx^2 + vy^2 - k (x vy - y vx)^2] x + alpha^2 x = 0

and the same with x -> y.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence

import numpy as np
from scipy.optimize import least_squares

from .model import (CartState, DomainError, PhysConstants, hamiltonian,
                    legendre_momenta, noether_momenta)

DOMAIN_MARGIN = 1e-10
MAX_DOMAIN_HITS = 60


def eom_rhs(state: CartState, kappa: float, alpha: float, margin: float = 0.0):
    """Accelerations (x'', y'') at a velocity-form Cartesian state."""
    x, y, vx, vy = state.coords()
    return _accel(x, y, vx, vy, kappa, alpha, margin)


def _accel(x, y, vx, vy, kappa, alpha, margin=0.0):
    w = 1.0 - kappa * (x * x + y * y)
    if w <= margin:
        raise DomainError(f"1 - kappa r^2 = {w:.3e} at (x, y) = ({x}, {y})")
    ang = x * vy - y * vx
    q = kappa * (vx * vx + vy * vy - kappa * ang * ang) + alpha * alpha
    return -q * x / w, -q * y / w


def _flow(kappa: float, alpha: float, margin: float):
    def f(u: np.ndarray) -> np.ndarray:
        ax, ay = _accel(u[0], u[1], u[2], u[3], kappa, alpha, margin)
        return np.array([u[2], u[3], ax, ay])
    return f


# Dormand-Prince 5(4) tableau.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


def _dp_step(f, u, h, k1):
    ks = [k1]
    for i in range(1, 7):
        ui = u + h * sum(a * k for a, k in zip(_A[i], ks))
        ks.append(f(ui))
    u_new = u + h * sum(b * k for b, k in zip(_B5, ks) if b)
    err = h * sum(e * k for e, k in zip(_E, ks) if e)
    return u_new, err, ks[6]


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # rows of (x, y, vx, vy)
    kappa: float
    alpha: float
    tol: float
    steps: int = 0
    rejected: int = 0
    method: str = "dopri5"
    status: str = "ok"
    last_valid_time: Optional[float] = None
    message: str = ""

    def __len__(self) -> int:
        return len(self.times)

    def state(self, i: int) -> CartState:
        return CartState(*map(float, self.states[i]))

    @property
    def x(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.states[:, 1]


def integrate(initial: CartState, kappa: float, alpha: float, t_end: float, tol: float = 1e-10,
              sample_dt: float = 0.05, h0: Optional[float] = None, max_steps: int = 10_000_000,
              margin: float = DOMAIN_MARGIN) -> Trajectory:
    """Adaptive Dormand-Prince 5(4) integration with PI step-size control.

    Steps are clipped to land on the sampling grid, so every reported sample
    is a genuine integrator state.  A step whose stages enter
    ``1 - k r^2 < margin`` is rejected and retried smaller; if the step size
    collapses, or the boundary keeps being hit, the run halts with
    ``status == "domain_exit"``.  ``t_end`` may be
    negative for backward integration.
    """
    if initial.momentum:
        raise ValueError("velocity-form initial state required")
    if not 1e-13 <= tol <= 1e-6:
        raise ValueError(f"tol must lie in [1e-13, 1e-6], got {tol}")
    if 1.0 - kappa * initial.r2 <= margin:
        raise DomainError("initial state outside the domain")

    f = _flow(kappa, alpha, margin)
    direction = 1.0 if t_end >= 0 else -1.0
    span = abs(t_end)
    n_samples = max(1, int(round(span / sample_dt)))
    sample_times = np.linspace(0.0, span, n_samples + 1)

    u = np.array(initial.coords(), dtype=float)
    out = [u.copy()]
    t = 0.0
    k1 = f(u)
    h = h0 if h0 is not None else min(sample_dt, 0.01 * max(1.0, 1.0 / (alpha + 1e-300)))
    h_min = 1e-14 * max(1.0, span)
    err_old = 1e-4
    steps = rejected = domain_hits = 0
    beta, safe = 0.04, 0.9
    expo = 0.2 - 0.75 * beta
    traj = Trajectory(np.empty(0), np.empty((0, 4)), kappa, alpha, tol)

    for target in sample_times[1:]:
        while t < target * (1 - 1e-15):
            if steps + rejected >= max_steps:
                raise RuntimeError("maximum number of steps exceeded")
            hh = min(h, target - t)
            try:
                u_new, err_vec, k_last = _dp_step(f, u, direction * hh, k1)
            except DomainError:
                rejected += 1
                domain_hits += 1
                h = hh * 0.25
                # repeated hits mean the solution is pinned against the margin
                # (it creeps toward it in ever smaller accepted steps)
                if h < h_min or domain_hits > MAX_DOMAIN_HITS:
                    traj.status = "domain_exit"
                    traj.last_valid_time = direction * t
                    traj.message = "trajectory reached the 1 - kappa r^2 margin"
                    break
                continue
            scale = tol + tol * np.maximum(np.abs(u), np.abs(u_new))
            err = math.sqrt(float(np.mean((err_vec / scale) ** 2)))
            if err <= 1.0:
                t += hh
                u, k1 = u_new, k_last
                steps += 1
                fac = max(err, 1e-10) ** expo / err_old ** beta
                fac = min(5.0, max(0.2, fac / safe))
                err_old = max(err, 1e-4)
                # a step clipped to a sample time must not shrink the next one
                h = max(h, hh / fac) if hh < h else hh / fac
            else:
                rejected += 1
                h = hh / min(5.0, max(1.0, err ** expo / safe))
        if traj.status != "ok":
            break
        out.append(u.copy())

    traj.times = direction * sample_times[: len(out)]
    traj.states = np.array(out)
    traj.steps, traj.rejected = steps, rejected
    if traj.status == "ok":
        traj.last_valid_time = float(traj.times[-1])
    return traj


def integrate_rk4(initial: CartState, kappa: float, alpha: float, t_end: float, dt: float,
                  sample_every: int = 1) -> Trajectory:
    """Fixed-step classical Runge-Kutta, kept as an independent cross-check."""
    f = _flow(kappa, alpha, 0.0)
    n = int(round(abs(t_end) / dt))
    h = math.copysign(abs(t_end) / n, t_end) if n else 0.0
    u = np.array(initial.coords(), dtype=float)
    times, out = [0.0], [u.copy()]
    for i in range(1, n + 1):
        a = f(u)
        b = f(u + 0.5 * h * a)
        c = f(u + 0.5 * h * b)
        d = f(u + h * c)
        u = u + h / 6 * (a + 2 * b + 2 * c + d)
        if i % sample_every == 0 or i == n:
            times.append(i * h)
            out.append(u.copy())
    return Trajectory(np.array(times), np.array(out), kappa, alpha, tol=float("nan"),
                      steps=n, method="rk4", last_valid_time=n * h)


# -- conserved quantities -----------------------------------------------------

def invariants(traj: Trajectory, m: float = 1.0) -> Dict[str, np.ndarray]:
    """H, P1, P2, J along a trajectory (momenta from the Legendre map)."""
    x, y, vx, vy = traj.states.T
    vel = CartState(x, y, vx, vy)
    mom = legendre_momenta(vel, traj.kappa, m)
    H = hamiltonian(mom, traj.kappa, PhysConstants(m=m, alpha=traj.alpha))
    P1, P2, J = noether_momenta(mom, traj.kappa)
    return {"H": H, "P1": P1, "P2": P2, "J": J}


@dataclass
class Drift:
    initial: float
    max_abs: float
    max_rel: float


@dataclass
class ConservationReport:
    quantities: Dict[str, Drift] = field(default_factory=dict)

    def __getitem__(self, name: str) -> Drift:
        return self.quantities[name]

    def as_dict(self) -> dict:
        return {k: vars(v) for k, v in self.quantities.items()}


def conservation_report(traj: Trajectory, m: float = 1.0) -> ConservationReport:
    """Maximum absolute and relative deviation from the initial value.

    The relative drift divides by |initial|; it is ``inf`` when the initial value
    is exactly zero and the quantity moved, ``0`` if it did not.
    """
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    rep = ConservationReport()
    for name, series in invariants(traj, m).items():
        q0 = float(series[0])
        dev = float(np.max(np.abs(series - q0)))
        if q0 != 0.0:
            rel = dev / abs(q0)
        else:
            rel = 0.0 if dev == 0.0 else math.inf
        rep.quantities[name] = Drift(q0, dev, rel)
    return rep


# -- closed-form structure ------------------------------------------------------

@dataclass
class SineFit:
    amplitude: float
    omega: float
    phase: float
    rms: float


def fit_sinusoid(t: np.ndarray, x: np.ndarray) -> SineFit:
    """Least-squares fit of A sin(omega t + phase)."""
    t = np.asarray(t, float)
    x = np.asarray(x, float)
    dt = t[1] - t[0]
    n = len(t)
    spec = np.abs(np.fft.rfft(x - x.mean(), n=8 * n))
    freqs = np.fft.rfftfreq(8 * n, d=dt)
    omega0 = 2 * np.pi * freqs[1 + np.argmax(spec[1:])]
    # linear fit of (a sin + b cos) at omega0 for the starting amplitude/phase
    M = np.column_stack([np.sin(omega0 * t), np.cos(omega0 * t)])
    (a, b), *_ = np.linalg.lstsq(M, x, rcond=None)
    p0 = [math.hypot(a, b), omega0, math.atan2(b, a)]

    def resid(p):
        return p[0] * np.sin(p[1] * t + p[2]) - x

    sol = least_squares(resid, p0, xtol=1e-15, ftol=1e-15, gtol=1e-15, method="lm")
    A, om, ph = sol.x
    if A < 0:
        A, ph = -A, ph + np.pi
    ph = (ph + np.pi) % (2 * np.pi) - np.pi
    return SineFit(float(A), float(om), float(ph), float(np.sqrt(np.mean(resid(sol.x) ** 2))))


@dataclass
class GrowthFit:
    rate: float
    intercept: float
    r_squared: float


def fit_log_growth(t: np.ndarray, x: np.ndarray) -> GrowthFit:
    """Linear fit of log|x| against t."""
    t = np.asarray(t, float)
    y = np.log(np.abs(np.asarray(x, float)))
    slope, intercept = np.polyfit(t, y, 1)
    pred = slope * t + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    return GrowthFit(float(slope), float(intercept), 1.0 - ss_res / ss_tot if ss_tot else 0.0)


def classify_motion(traj: Trajectory, r2_threshold: float = 0.999) -> dict:
    """Decide between bounded (sin) and unbounded (sinh) behaviour empirically.

    The radius is examined over the second half of the run: unbounded motion
    shows log r growing linearly with R^2 above ``r2_threshold``.
    """
    r = np.hypot(traj.x, traj.y)
    half = len(traj) // 2
    t_late, r_late = traj.times[half:], r[half:]
    if np.all(r_late > 0) and r_late[-1] > 10 * max(r[0], 1e-300):
        g = fit_log_growth(t_late, r_late)
        if g.rate > 0 and g.r_squared > r2_threshold:
            return {"branch": "sinh", "rate": g.rate, "r_squared": g.r_squared}
    return {"branch": "sin", "r_max": float(r.max())}


# -- export ------------------------------------------------------------------------

CSV_HEADER = ("t", "x", "y", "vx", "vy", "H", "P1", "P2", "J")


def write_trajectory_csv(traj: Trajectory, path, m: float = 1.0) -> None:
    inv = invariants(traj, m)
    cols = [traj.times, *traj.states.T, inv["H"], inv["P1"], inv["P2"], inv["J"]]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for row in zip(*cols):
            w.writerow([f"{float(v):.17g}" for v in row])


def read_trajectory_csv(path) -> Dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if tuple(rows[0]) != CSV_HEADER:
        raise ValueError(f"unexpected header {rows[0]}")
    data = np.array([[float(v) for v in row] for row in rows[1:]])
    return {name: data[:, i] for i, name in enumerate(CSV_HEADER)}
