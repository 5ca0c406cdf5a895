import math
import time

import numpy as np
import pytest
from scipy.linalg import eigh

from kappaosc.quantum import (OracleResult, QuantumNumbers, RadialGrid,
                              assemble, boundary_grid, branch_deltas,
                              closed_form_energy, default_grid,
                              operator_matrix, resolve_branch, sl_eigensolve)
from kappaosc.quantum.oracle import envelope_rho_max, potential_scaled


@pytest.fixture(scope="module")
def solved():
    """Full oracle runs shared across tests."""
    return {(k, mu): sl_eigensolve(mu, k, 4) for k in (-0.1, 0.0, 0.1) for mu in range(3)}


class TestDiscretisation:
    @pytest.mark.parametrize("kappa", [0.3, -0.3, 0.0])
    def test_weighted_operator_symmetric(self, kappa):
        grid = boundary_grid(kappa, 200) if kappa > 0 else RadialGrid(kappa, 200, 12.0)
        L, W = operator_matrix(1, kappa, grid)
        WL = W @ L
        assert np.max(np.abs(WL - WL.T)) < 1e-12 * np.max(np.abs(WL))
        assert np.all(np.diag(W) > 0)

    def test_tridiagonal_solver_matches_dense(self):
        grid = boundary_grid(0.2, 300)
        diag, off, wt = assemble(2, 0.2, grid)
        A = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
        dense = eigh(A, np.diag(wt), eigvals_only=True)[:4]
        res = sl_eigensolve(2, 0.2, 4, grid=grid, tol=1.0, boundary_tol=1.0)
        assert np.allclose(res.coarse, dense, rtol=1e-10)

    def test_second_order_convergence(self):
        errs = []
        for M in (400, 800, 1600):
            res = sl_eigensolve(0, 0.0, 1, grid=RadialGrid(0.0, M, 12.0), tol=1.0, boundary_tol=1.0)
            errs.append(abs(res.coarse[0] - 1.0))
        assert 3.6 < errs[0] / errs[1] < 4.4 and 3.6 < errs[1] / errs[2] < 4.4

    def test_grid_geometry(self):
        g = boundary_grid(0.25, 100)
        assert g.r_max == pytest.approx((1 - 1e-6) / 0.5)
        assert np.all(np.diff(g.nodes) > 0) and g.nodes[-1] < g.r_max
        # the zero value sits on a ghost node at rho_max, half a cell beyond the last face
        assert g.M * g.h + g.h / 2 == pytest.approx(g.rho_max, rel=1e-14)
        assert g.faces[-1] < g.r_max
        assert g.refined().M == 200
        assert g.describe()["M"] == 100

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            RadialGrid(0.0, 1, 1.0)
        with pytest.raises(ValueError):
            RadialGrid(0.0, 10, 0.0)
        with pytest.raises(ValueError):
            boundary_grid(-0.1, 100)
        with pytest.raises(ValueError):
            assemble(-1, 0.0, RadialGrid(0.0, 10, 1.0))

    def test_potential(self):
        assert potential_scaled(0.0, 0.3) == 0.0
        assert potential_scaled(1.0, 0.0) == 0.5


class TestSolver:
    def test_flat_anchor(self, solved):
        for mu in range(3):
            res = solved[(0.0, mu)]
            expect = [2 * N + mu + 1 for N in range(4)]
            assert np.max(np.abs(np.array(res.eigenvalues) - expect)) < 1e-6
            assert res.converged, res.message

    @pytest.mark.parametrize("kappa", [-0.1, 0.1])
    def test_matches_conjugate_closed_form(self, solved, kappa):
        for mu in range(3):
            res = solved[(kappa, mu)]
            assert res.converged, res.message
            assert max(branch_deltas(res, "conjugate")) < 1e-4
            assert max(branch_deltas(res, "inverted")) > 1.0
            assert max(branch_deltas(res, "mirror")) > 0.01

    def test_increasing(self, solved):
        for res in solved.values():
            assert np.all(np.diff(res.eigenvalues) > 0)

    def test_degeneracy_across_mu(self, solved):
        # (N_r = 1, mu = 0) and (N_r = 0, mu = 2) share n = 2
        for k in (-0.1, 0.1):
            assert solved[(k, 0)].eigenvalues[1] == pytest.approx(solved[(k, 2)].eigenvalues[0], abs=1e-6)

    def test_stronger_curvature(self):
        res = sl_eigensolve(1, 0.5, 3)
        assert res.converged
        assert max(branch_deltas(res, "conjugate")) < 1e-4

    def test_too_coarse(self):
        with pytest.raises(ValueError):
            sl_eigensolve(0, 0.1, 4, grid=boundary_grid(0.1, 100))

    def test_coarse_grid_flagged(self):
        res = sl_eigensolve(0, 0.1, 2, grid=boundary_grid(0.1, 100), tol=1e-9)
        assert not res.converged
        assert "grid refinement" in res.message

    def test_small_box_flagged(self):
        res = sl_eigensolve(0, 0.0, 2, grid=RadialGrid(0.0, 2000, 3.0))
        assert not res.converged
        assert "truncation" in res.message

    def test_wrong_kappa_grid(self):
        with pytest.raises(ValueError):
            sl_eigensolve(0, 0.1, 2, grid=boundary_grid(0.2, 1000))

    def test_runtime(self):
        t0 = time.perf_counter()
        sl_eigensolve(2, -0.1, 4)
        assert time.perf_counter() - t0 < 30

    def test_result_dict(self, solved):
        d = solved[(0.1, 0)].as_dict()
        assert set(d) >= {"eigenvalues", "grid", "converged", "boundary_shift"}


class TestTruncation:
    def test_default_grid_kinds(self):
        assert default_grid(0, 0.1, 4).delta == 1e-6
        g = default_grid(0, -0.1, 4)
        assert g.delta is None and g.M == 20_000
        # the box reaches past the classical turning point of the top level
        k = -0.1
        top = closed_form_energy(QuantumNumbers(3, 0), k)
        # (1 - k) r^2 / (2 (1 - k r^2)) = E  =>  r^2 = 2E / (1 - k + 2 E k)
        r_turn = math.sqrt(2 * top / (1 - k + 2 * top * k))
        assert g.r_max > r_turn

    def test_envelope_above_continuum(self):
        # at k = -0.1 the potential saturates at (1 - k) / (2 |k|) = 5.5
        with pytest.raises(ArithmeticError):
            envelope_rho_max(0, -0.1, 6.0)
        assert envelope_rho_max(0, -0.1, 1.0) > 0
        with pytest.raises(ValueError):
            envelope_rho_max(0, 0.1, 1.0)

    def test_envelope_grows_with_energy(self):
        assert envelope_rho_max(0, 0.0, 5.0) > envelope_rho_max(0, 0.0, 1.0)


class TestResolution:
    def _fake(self, mu, kappa, branch):
        vals = [float(closed_form_energy(QuantumNumbers(N, mu), kappa, branch)) for N in range(3)]
        return OracleResult(mu, kappa, vals, vals, vals, {}, [0.0] * 3, [0.0] * 3, True)

    def test_resolves_conjugate(self, solved):
        res = resolve_branch([solved[(k, mu)] for k in (-0.1, 0.1) for mu in range(3)])
        assert res.branch == "conjugate" and res.agrees
        assert res.max_delta["conjugate"] < 1e-4

    def test_flat_tie_prefers_conjugate(self):
        assert resolve_branch([self._fake(0, 0.0, "mirror")]).branch == "conjugate"

    def test_detects_other_branch(self):
        assert resolve_branch([self._fake(1, 0.3, "inverted")]).branch == "inverted"

    def test_no_match(self):
        fake = self._fake(0, 0.1, "conjugate")
        fake.eigenvalues[0] += 0.01
        res = resolve_branch([fake])
        assert res.branch is None and not res.agrees
        assert res.as_dict()["resolved"] is None
