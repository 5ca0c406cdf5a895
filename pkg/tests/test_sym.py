import math
import time
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kappaosc.sym import (COS, DEFAULT_METRIC, HAMILTONIAN, IDENTITIES, J,
                          KINETIC_H, MEASURE_DENSITY, ONE, P1, P2, PF, PR, R,
                          S, SIN, W, X1, X2, XJ, ZERO, K, RingElement,
                          VectorField2, canonicalize, differentiate,
                          killing_residuals, lie_derivative_metric,
                          measure_lie_derivative, poisson_bracket, run_suite,
                          suite_report, vf_commutator)

GENS = [K, R, S, COS, SIN, PR, PF, W]


def _elements():
    """Small random ring elements, some with denominators."""
    coeff = st.fractions(min_value=-3, max_value=3, max_denominator=5)
    mono = st.tuples(st.sampled_from(GENS), st.integers(0, 2), coeff)
    poly = st.lists(mono, min_size=1, max_size=4).map(
        lambda ms: sum((m[0] ** m[1] * RingElement.const(m[2]) for m in ms), ZERO))
    den = st.sampled_from([ONE, R, W, R * W, S, W * W])
    return st.tuples(poly, den).map(lambda t: t[0] / t[1])


POINT = dict(kappa=0.3, r=0.7, phi=0.4, pr=-0.2, pf=1.3)


class TestRingBasics:
    def test_sqrt_relation(self):
        assert S * S == W

    def test_trig_relation(self):
        assert SIN * SIN + COS * COS == ONE

    def test_reciprocal_of_s(self):
        assert ONE / S == S / W
        assert (ONE / S) * S == ONE

    def test_zero_dump(self):
        assert ZERO.dump() == "(0) / r^0*(1-k*r^2)^0"
        assert ZERO.is_zero() and not ZERO

    def test_w_is_absorbed(self):
        # (r^2 - 1)/w must stay; w/w must cancel
        assert (W / W) == ONE
        assert (W * R / W) == R
        assert ((R * R - ONE) / W).denominator == (0, 1)

    def test_denominator_r(self):
        x = ONE / R
        assert x.denominator == (1, 0)
        assert x * R == ONE

    def test_golden_dumps(self):
        assert W.dump() == ("(1*k^0*r^0*s^0*cos^0*sin^0*pr^0*pf^0 + -1*k^1*r^2*s^0*cos^0*sin^0*pr^0*pf^0)"
                            " / r^0*(1-k*r^2)^0")
        assert (ONE / W).dump() == "(1*k^0*r^0*s^0*cos^0*sin^0*pr^0*pf^0) / r^0*(1-k*r^2)^1"
        assert (SIN * SIN).dump() == ("(1*k^0*r^0*s^0*cos^0*sin^0*pr^0*pf^0 + -1*k^0*r^0*s^0*cos^2*sin^0*pr^0*pf^0)"
                                      " / r^0*(1-k*r^2)^0")
        assert differentiate(S, "r").dump() == "(-1*k^1*r^1*s^1*cos^0*sin^0*pr^0*pf^0) / r^0*(1-k*r^2)^1"

    def test_canonicalize_raw_terms(self):
        # s^3 r^-1 over w  ->  s w r^-1 / w  ->  s / r
        raw = {(0, -1, 3, 0, 0, 0, 0): 1}
        assert canonicalize(raw, 0, 1) == S / R

    def test_fraction_coefficients_exact(self):
        x = RingElement.const(Fraction(1, 3)) * K + RingElement.const(Fraction(2, 3)) * K
        assert x == K

    def test_non_unit_inverse_raises(self):
        with pytest.raises(ValueError):
            (ONE + R).inverse()

    def test_unknown_generator(self):
        with pytest.raises(ValueError):
            RingElement.gen("t")

    def test_at_kappa_zero(self):
        assert W.at_kappa_zero() == ONE
        assert (S * COS).at_kappa_zero() == COS

    def test_evaluate_matches_float(self):
        k, r = 0.3, 0.7
        x = S * COS / (R * W)
        expect = math.sqrt(1 - k * r * r) * math.cos(0.4) / (r * (1 - k * r * r))
        assert x.evaluate(k, r, phi=0.4) == pytest.approx(expect, rel=1e-14)

    def test_evaluate_outside_domain(self):
        with pytest.raises(ValueError):
            W.evaluate(2.0, 1.0)

    def test_dump_roundtrip(self):
        for x in (ZERO, ONE, W, P1, P2, KINETIC_H, HAMILTONIAN, MEASURE_DENSITY, S / (R * W * W)):
            assert RingElement.from_dump(x.dump()) == x

    def test_malformed_dump(self):
        with pytest.raises(ValueError):
            RingElement.from_dump("1 + r")


class TestRingProperties:
    @settings(max_examples=60, deadline=None)
    @given(_elements(), _elements())
    def test_commutative(self, a, b):
        assert a + b == b + a
        assert a * b == b * a

    @settings(max_examples=40, deadline=None)
    @given(_elements(), _elements(), _elements())
    def test_distributive_and_associative(self, a, b, c):
        assert a * (b + c) == a * b + a * c
        assert (a * b) * c == a * (b * c)

    @settings(max_examples=60, deadline=None)
    @given(_elements())
    def test_canonical_idempotent(self, a):
        again = canonicalize(a.terms, *a.denominator)
        assert again == a
        assert again.dump() == a.dump()

    @settings(max_examples=60, deadline=None)
    @given(_elements(), _elements())
    def test_evaluation_homomorphism(self, a, b):
        va, vb = a.evaluate(**POINT), b.evaluate(**POINT)
        assert (a * b).evaluate(**POINT) == pytest.approx(va * vb, rel=1e-9, abs=1e-9)
        assert (a - b).evaluate(**POINT) == pytest.approx(va - vb, rel=1e-9, abs=1e-9)

    @settings(max_examples=60, deadline=None)
    @given(_elements())
    def test_self_difference_is_zero(self, a):
        assert (a - a).is_zero()


def _numeric_partial(x, var, h=1e-6):
    base = dict(POINT)
    key = {"r": "r", "phi": "phi", "pr": "pr", "pphi": "pf"}[var]
    up, dn = dict(base), dict(base)
    up[key] += h
    dn[key] -= h
    return (x.evaluate(**up) - x.evaluate(**dn)) / (2 * h)


class TestCalculus:
    @pytest.mark.parametrize("var", ["r", "phi", "pr", "pphi"])
    @pytest.mark.parametrize("expr", [P1, P2, HAMILTONIAN, MEASURE_DENSITY, S * PR * PR / (R * W)])
    def test_derivative_matches_finite_difference(self, expr, var):
        exact = differentiate(expr, var).evaluate(**POINT)
        assert exact == pytest.approx(_numeric_partial(expr, var), rel=1e-7, abs=1e-7)

    def test_unknown_variable(self):
        with pytest.raises(ValueError):
            differentiate(R, "theta")

    def test_product_rule(self):
        a, b = S * COS / R, PR * W + SIN
        lhs = differentiate(a * b, "r")
        rhs = differentiate(a, "r") * b + a * differentiate(b, "r")
        assert lhs == rhs

    def test_killing_fields(self):
        for X in (X1, X2, XJ):
            assert all(e.is_zero() for e in killing_residuals(X))
            assert lie_derivative_metric(X).is_zero()

    def test_non_killing_field_detected(self):
        lg = lie_derivative_metric(VectorField2(R, ZERO))
        assert lg.g_rr == RingElement.const(2) / (W * W)
        assert not all(e.is_zero() for e in killing_residuals(VectorField2(R, ZERO)))

    def test_metric_components(self):
        assert DEFAULT_METRIC.g_rr == ONE / W
        assert DEFAULT_METRIC.g_phiphi == R * R

    def test_noether_algebra(self):
        assert poisson_bracket(P1, P2) == K * J
        assert poisson_bracket(P1, J) == -P2
        assert poisson_bracket(P2, J) == P1

    def test_bracket_antisymmetric(self):
        assert poisson_bracket(P1, HAMILTONIAN) == -poisson_bracket(HAMILTONIAN, P1)

    def test_kinetic_commutes(self):
        for F in (P1, P2, J):
            assert poisson_bracket(F, KINETIC_H).is_zero()

    def test_potential_breaks_translations(self):
        # only the rotation generator survives the central potential
        assert poisson_bracket(J, HAMILTONIAN).is_zero()
        assert poisson_bracket(P1, HAMILTONIAN) == -(R * S * COS) / (W * W)
        assert poisson_bracket(P2, HAMILTONIAN) == -(R * S * SIN) / (W * W)

    def test_commutators(self):
        assert (vf_commutator(X1, X2) + XJ.scale(K)).is_zero()
        assert (vf_commutator(X1, XJ) - X2).is_zero()
        assert (vf_commutator(X2, XJ) + X1).is_zero()
        assert vf_commutator(X1, X2).at_kappa_zero().is_zero()

    def test_measure_invariance(self):
        for X in (X1, X2, XJ):
            assert measure_lie_derivative(X).is_zero()
        # the flat area element r dr dphi is not invariant under X1 when k != 0
        assert not measure_lie_derivative(X1, R).is_zero()


class TestSuite:
    def test_twelve_identities_all_zero(self):
        results = run_suite()
        assert len(results) == 12 == len(IDENTITIES)
        assert [r.name for r in results] == [i.name for i in IDENTITIES]
        assert all(r.zero for r in results), [r.name for r in results if not r.zero]

    def test_runtime_budget(self):
        t0 = time.perf_counter()
        run_suite()
        assert time.perf_counter() - t0 < 5.0

    def test_report_is_reproducible_without_timings(self):
        a, b = suite_report(timings=False), suite_report(timings=False)
        assert a == b
        assert a["all_zero"] and a["count"] == 12
        assert all(i["status"] == "ZERO" for i in a["identities"])
        assert "{P1,H}" in a["nonvanishing_findings"]
        assert "seconds" not in a

    def test_report_timings(self):
        assert "seconds" in suite_report(timings=True)
