import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from kappaosc.classical import (CSV_HEADER, classify_motion,
                                conservation_report, eom_rhs, fit_log_growth,
                                fit_sinusoid, integrate, integrate_rk4,
                                invariants, read_trajectory_csv,
                                write_trajectory_csv)
from kappaosc.model import CartState, DomainError

START = CartState(0.5, 0.2, 0.1, 0.6)


def _rhs(kappa, alpha):
    def f(t, u):
        return [u[2], u[3], *eom_rhs(CartState(*u), kappa, alpha)]
    return f


class TestIntegrator:
    @pytest.mark.parametrize("kappa", [-0.5, 0.0, 0.5])
    def test_energy_and_angular_momentum(self, kappa):
        traj = integrate(START, kappa, 1.0, 20.0)
        rep = conservation_report(traj)
        assert traj.status == "ok"
        assert rep["H"].max_rel < 1e-9
        assert rep["J"].max_rel < 1e-9

    @pytest.mark.parametrize("kappa", [-0.5, 0.5])
    def test_translations_conserved_without_potential(self, kappa):
        traj = integrate(CartState(0.3, 0.1, 0.2, -0.15), kappa, 0.0, 5.0, sample_dt=0.1)
        rep = conservation_report(traj)
        for name in ("H", "P1", "P2", "J"):
            assert rep[name].max_rel < 1e-9, name

    def test_translations_not_conserved_with_potential(self):
        # the harmonic force breaks the translation-like symmetries
        rep = conservation_report(integrate(START, 0.1, 1.0, 10.0))
        assert rep["P1"].max_rel > 0.1 and rep["P2"].max_rel > 0.1

    def test_flat_case_exact_solution(self):
        # kappa = 0: x(t) = x0 cos t + vx0 sin t
        traj = integrate(START, 0.0, 1.0, 10.0, sample_dt=0.5)
        t = traj.times
        assert np.allclose(traj.x, 0.5 * np.cos(t) + 0.1 * np.sin(t), atol=1e-9)
        assert np.allclose(traj.y, 0.2 * np.cos(t) + 0.6 * np.sin(t), atol=1e-9)

    @pytest.mark.parametrize("kappa", [-0.3, 0.4])
    def test_matches_scipy(self, kappa):
        traj = integrate(START, kappa, 1.0, 10.0, sample_dt=1.0)
        ref = solve_ivp(_rhs(kappa, 1.0), (0, 10), list(START.coords()), method="DOP853",
                        rtol=1e-13, atol=1e-13, t_eval=traj.times)
        assert np.max(np.abs(ref.y.T - traj.states)) < 1e-8

    def test_time_reversal(self):
        fwd = integrate(START, 0.3, 1.0, 8.0, sample_dt=0.5)
        x, y, vx, vy = fwd.states[-1]
        back = integrate(CartState(x, y, -vx, -vy), 0.3, 1.0, 8.0, sample_dt=0.5)
        end = back.states[-1]
        assert np.allclose(end, [START.x, START.y, -START.vx, -START.vy], atol=1e-8)

    def test_backward_integration(self):
        fwd = integrate(START, 0.3, 1.0, 4.0, sample_dt=0.5)
        back = integrate(fwd.state(-1), 0.3, 1.0, -4.0, sample_dt=0.5)
        assert back.times[-1] == -4.0
        assert np.allclose(back.states[-1], START.coords(), atol=1e-8)

    def test_rk4_fourth_order(self):
        errs = []
        ref = integrate(START, 0.4, 1.0, 2.0, tol=1e-13, sample_dt=2.0).states[-1]
        for dt in (0.04, 0.02):
            errs.append(np.max(np.abs(integrate_rk4(START, 0.4, 1.0, 2.0, dt).states[-1] - ref)))
        assert 2 ** 3.7 < errs[0] / errs[1] < 2 ** 4.3

    def test_rk4_agrees_with_adaptive(self):
        a = integrate(START, -0.2, 1.0, 5.0, sample_dt=1.0)
        b = integrate_rk4(START, -0.2, 1.0, 5.0, 0.001, sample_every=1000)
        assert np.allclose(a.states, b.states, atol=1e-10)

    def test_tolerance_range(self):
        with pytest.raises(ValueError):
            integrate(START, 0.0, 1.0, 1.0, tol=1e-3)

    def test_initial_state_outside(self):
        with pytest.raises(DomainError):
            integrate(CartState(2.0, 0.0, 0.0, 0.0), 0.5, 1.0, 1.0)

    def test_momentum_state_rejected(self):
        with pytest.raises(ValueError):
            integrate(CartState(0.1, 0.0, 0.0, 0.0, True), 0.5, 1.0, 1.0)

    def test_free_motion_leaves_the_chart(self):
        # without the potential a geodesic reaches 1 - k r^2 = 0 in finite time
        traj = integrate(CartState(0.5, 0.0, 1.0, 0.0), 1.0, 0.0, 5.0)
        assert traj.status == "domain_exit"
        # geodesic distance from pi/6 to pi/2 at speed sqrt(2T) = sqrt(4/3)
        assert traj.last_valid_time == pytest.approx((math.pi / 3) / math.sqrt(4 / 3), abs=1e-3)
        assert np.all(1 - np.sum(traj.states[:, :2] ** 2, axis=1) > 0)

    def test_samples_on_grid(self):
        traj = integrate(START, 0.2, 1.0, 1.0, sample_dt=0.25)
        assert np.allclose(traj.times, [0, 0.25, 0.5, 0.75, 1.0])
        assert traj.steps >= 4


class TestMotion:
    def test_bounded_orbit_is_sinusoidal(self):
        traj = integrate(CartState(0.5, 0.3, 0.2, 0.4), 0.5, 1.0, 100.0)
        fx = fit_sinusoid(traj.times, traj.x)
        fy = fit_sinusoid(traj.times, traj.y)
        assert fx.rms < 1e-6 and fy.rms < 1e-6
        assert fx.omega == pytest.approx(fy.omega, rel=1e-8)
        assert classify_motion(traj)["branch"] == "sin"

    def test_fit_recovers_known_signal(self):
        t = np.linspace(0, 30, 601)
        f = fit_sinusoid(t, 1.7 * np.sin(0.9 * t + 0.3))
        assert (f.amplitude, f.omega, f.phase) == pytest.approx((1.7, 0.9, 0.3), rel=1e-9)

    def test_high_energy_hyperbolic_orbit_grows(self):
        traj = integrate(CartState(0.5, 0.0, 2.0, 0.0), -0.5, 1.0, 20.0)
        m = classify_motion(traj)
        assert m["branch"] == "sinh" and m["r_squared"] > 0.999

    def test_log_growth_fit(self):
        t = np.linspace(0, 10, 200)
        g = fit_log_growth(t, 3 * np.exp(0.7 * t))
        assert g.rate == pytest.approx(0.7) and g.r_squared == pytest.approx(1.0)


class TestExport:
    def test_csv_roundtrip(self, tmp_path):
        traj = integrate(START, 0.1, 1.0, 1.0, sample_dt=0.1)
        path = tmp_path / "traj.csv"
        write_trajectory_csv(traj, path)
        assert path.read_text().splitlines()[0] == ",".join(CSV_HEADER)
        data = read_trajectory_csv(path)
        assert np.array_equal(data["x"], traj.x)
        assert np.array_equal(data["H"], invariants(traj)["H"])

    def test_bad_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ValueError):
            read_trajectory_csv(path)
