import cmath
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from harmonorm import expr as ex
from harmonorm.errors import DomainError, DomainViolation, GeometryError, NotAZero, OrderExceeded, SingularPoint
from harmonorm.harmonic import (
    HarmonicMap,
    PathPolyline,
    constant_dilatation,
    eval_f,
    jacobian,
    lambda_star,
    load_map,
    map_from_dict,
    precompose,
    sense_preserving_sample,
    spherical_arc_length,
    spherical_derivative,
    zero_order,
)
from harmonorm.search import GridConfig

in_disk = st.complex_numbers(max_magnitude=0.95, allow_nan=False, allow_infinity=False)
small = st.complex_numbers(max_magnitude=0.9, allow_nan=False, allow_infinity=False)

ID = HarmonicMap(ex.Z)


def cmul(c, e):
    return ex.mul(ex.Const(c), e)


class TestConstruction:
    def test_normalization_enforced(self):
        with pytest.raises(DomainError):
            HarmonicMap(ex.Z, ex.poly([0.1, 1]))
        HarmonicMap(ex.Z, ex.poly([1e-11, 1]))
        HarmonicMap(ex.Z, ex.poly([-0.5, 1]), z0=0.5)

    def test_unnormalized_allowed_explicitly(self):
        f = HarmonicMap(ex.Z, ex.Const(3), z0=None)
        assert eval_f(f, 0) == 3

    def test_map_from_json(self, tmp_path):
        doc = {"h": {"op": "exp", "arg": {"op": "mobius", "a": 1, "b": 1, "c": -1, "d": 1}}, "g": {"op": "const", "value": 0}}
        f = map_from_dict(doc)
        assert eval_f(f, 0) == pytest.approx(math.e)
        p = tmp_path / "m.json"
        import json

        p.write_text(json.dumps(f.to_dict()))
        assert eval_f(load_map(p), 0.2j) == pytest.approx(eval_f(f, 0.2j))
        with pytest.raises(DomainError):
            map_from_dict({"g": 0})


class TestEval:
    def test_examples(self):
        assert eval_f(ID, 0.3j) == 0.3j
        f = HarmonicMap(ex.Z, ex.poly([0, 0, 0.5]))
        assert eval_f(f, 0.2) == pytest.approx(0.22)
        f = HarmonicMap(ex.Z, cmul(0.5j, ex.Z))
        assert eval_f(f, 0.4j) == pytest.approx(0.4j - 0.2, abs=1e-15)

    def test_outside_disk_rejected(self):
        with pytest.raises(DomainError):
            eval_f(ID, 1.0)

    def test_singular_propagates(self):
        f = HarmonicMap(ex.Div(ex.ONE, ex.poly([-0.5, 1])), z0=None)
        with pytest.raises(SingularPoint):
            eval_f(f, 0.5)


class TestSphericalDerivative:
    def test_examples(self):
        assert spherical_derivative(ID, 0) == 1
        for r in (0.1, 0.5, 0.9):
            assert spherical_derivative(ID, r) == pytest.approx(1 / (1 + r * r), abs=1e-15)
        assert spherical_derivative(HarmonicMap(ex.Z, cmul(0.5, ex.Z)), 0) == 1.5

    def test_analytic_case_matches_classical(self):
        rng = np.random.default_rng(3)
        h = ex.exp(ex.Mobius(1, 1, -1, 1))
        f = HarmonicMap(h)
        z = 0.95 * np.sqrt(rng.random(1000)) * np.exp(2j * np.pi * rng.random(1000))
        hz = ex.evaluate(h, z)
        want = np.abs(ex.evaluate(ex.derivative(h), z)) / (1 + np.abs(hz) ** 2)
        np.testing.assert_allclose(spherical_derivative(f, z), want, rtol=1e-12, atol=1e-300)

    def test_overflow_safe(self):
        f = HarmonicMap(ex.exp(ex.mul(ex.Const(50.0), ex.Mobius(1, 1, -1, 1))))
        v = spherical_derivative(f, 0.99)
        assert v == 0.0 or (math.isfinite(v) and v >= 0)

    @given(in_disk)
    def test_nonnegative(self, z):
        f = HarmonicMap(ex.poly([0, 1, 0.3]), ex.poly([0, 0, 0.5]))
        assert spherical_derivative(f, z) >= 0

    def test_zero_only_where_both_derivatives_vanish(self):
        f = HarmonicMap(ex.poly([0, 0, 1]), ex.poly([0, 0, 0, 0.5]))
        assert spherical_derivative(f, 0) == 0
        assert spherical_derivative(f, 0.1) > 0


class TestJacobian:
    def test_examples(self):
        assert jacobian(ID, 0.3 + 0.2j) == 1
        assert jacobian(HarmonicMap(ex.Z, cmul(0.5, ex.Z)), 0.7j) == pytest.approx(0.75)
        assert jacobian(HarmonicMap(ex.poly([0, 0, 1])), 0.3) == pytest.approx(0.36)

    @given(in_disk)
    def test_positive_means_h_dominates(self, z):
        f = HarmonicMap(ex.Z, ex.poly([0, 0, 1]))
        if jacobian(f, z) > 0:
            assert abs(ex.evaluate(f.dh, z)) > abs(ex.evaluate(f.dg, z))


class TestSensePreserving:
    def test_examples(self):
        assert sense_preserving_sample(HarmonicMap(ex.Z, cmul(0.5, ex.Z)), GridConfig()).ok
        r = sense_preserving_sample(HarmonicMap(ex.poly([0, 0, 1])), GridConfig())
        assert not r.ok and abs(r.witness) < 1e-9
        r = sense_preserving_sample(HarmonicMap(ex.Z, ex.poly([0, 0, 1])), GridConfig())
        assert not r.ok and abs(r.witness) > 0.5


class TestPrecompose:
    def test_identity_phi(self):
        f = HarmonicMap(ex.Z, cmul(0.5, ex.Z))
        F = precompose(f, ex.Z)
        assert F.h == f.h and F.g == f.g and F.z0 == f.z0

    def test_mobius(self):
        phi = ex.mobius_to_z0(0.5)
        F = precompose(ID, phi)
        assert F.h == phi and F.g == ex.ZERO

    def test_normalization_pulled_back(self):
        f = HarmonicMap(ex.Z, cmul(0.5, ex.Z))
        phi = ex.mobius_to_z0(0.3 + 0.1j)
        F = precompose(f, phi)
        assert F.z0 == pytest.approx(0.3 + 0.1j)
        assert abs(ex.evaluate(F.g, F.z0)) < 1e-12

    def test_non_invertible_phi_without_renormalization(self):
        f = HarmonicMap(ex.Z, ex.poly([0, 0.5]))
        F = precompose(f, ex.poly([0.2, 0, 0.5]))
        assert F.z0 is None

    def test_renormalize(self):
        f = HarmonicMap(ex.Z, ex.poly([0, 0.5]))
        phi = ex.poly([0.2, 0, 0.5])
        F = precompose(f, phi, renormalize=True)
        assert F.z0 == 0 and abs(ex.evaluate(F.g, 0)) < 1e-15
        # f∘phi changes by the constant conj(g(phi(0)))
        shift = np.conj(ex.evaluate(f.g, 0.2))
        for z in (0.1, 0.3j):
            assert eval_f(F, z) == pytest.approx(eval_f(f, ex.evaluate(phi, z)) - shift)

    def test_pointwise_composition(self):
        rng = np.random.default_rng(5)
        f = HarmonicMap(ex.exp(ex.Z), ex.poly([0, 0.3, 0.1]))
        for _ in range(4):
            a = 0.9 * rng.random() * np.exp(2j * np.pi * rng.random())
            phi = ex.disk_automorphism(a, rng.random() * 6)
            F = precompose(f, phi)
            z = 0.9 * np.sqrt(rng.random(20)) * np.exp(2j * np.pi * rng.random(20))
            np.testing.assert_allclose(eval_f(F, z), eval_f(f, ex.evaluate(phi, z)), rtol=1e-12, atol=1e-12)

    def test_debug_domain_check(self):
        with pytest.raises(DomainViolation):
            precompose(ID, cmul(2.0, ex.Z), check_domain=True)
        precompose(ID, cmul(0.5, ex.Z), check_domain=True)


class TestArcLength:
    def test_segment_closed_form(self):
        for r in (0.3, 0.7, 0.95):
            got = spherical_arc_length(ID, PathPolyline((0, r)), 400)
            assert got == pytest.approx(math.atan(r), abs=1e-6)

    def test_zero_length(self):
        # a closed polyline with zero net length does not exist; use a tiny path in the limit
        assert spherical_arc_length(ID, PathPolyline((0.1, 0.1 + 1e-14))) == pytest.approx(0, abs=1e-13)

    def test_self_convergence(self):
        f = HarmonicMap(ex.exp(ex.Z), ex.poly([0, 0, 0.3]))
        path = PathPolyline((0, 0.5 + 0.3j, -0.2 + 0.6j))
        a = spherical_arc_length(f, path, 500)
        b = spherical_arc_length(f, path, 1000)
        assert abs(a - b) < 1e-6

    def test_rejects_boundary_path(self):
        with pytest.raises(GeometryError):
            spherical_arc_length(ID, PathPolyline((0, 1)))

    def test_path_validation(self):
        with pytest.raises(GeometryError):
            PathPolyline((0,))
        with pytest.raises(GeometryError):
            PathPolyline((0, 0, 0.5))
        with pytest.raises(GeometryError):
            PathPolyline((1, 0))
        assert PathPolyline((0, 1j)).ends_on_circle


class TestZeroOrder:
    def test_examples(self):
        assert zero_order(ID, 0).order == 1
        r = zero_order(HarmonicMap(ex.poly([0, 0, 1]), ex.poly([0, 0, 0, 0.5])), 0)
        assert (r.order, r.h_order, r.g_order) == (2, 2, 3)
        r = zero_order(HarmonicMap(ex.Z, cmul(cmath.exp(0.7j), ex.Z)), 0)
        assert r.degenerate and r.order is None

    def test_equal_orders_distinct_moduli(self):
        r = zero_order(HarmonicMap(ex.Z, cmul(0.5, ex.Z)), 0)
        assert r.order == 1 and not r.degenerate

    def test_shifted_point(self):
        f = HarmonicMap(ex.poly([0.25, -1, 1]), ex.ZERO)  # (z - 1/2)^2
        assert zero_order(f, 0.5).order == 2

    def test_errors(self):
        with pytest.raises(NotAZero):
            zero_order(HarmonicMap(ex.poly([1, 1])), 0)
        with pytest.raises(OrderExceeded):
            zero_order(HarmonicMap(ex.poly([0] * 6 + [1])), 0, max_order=4)


class TestLambdaStar:
    def test_examples(self):
        assert lambda_star(0.3 + 0.2j, 0, 0.1) == 0.3 + 0.2j
        assert lambda_star(0.6, 0.2, 0) == pytest.approx(0.6 / 1.2)

    def test_round_trip(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            alpha = 0.95 * rng.random() * np.exp(2j * np.pi * rng.random())
            h0 = complex(rng.normal(), rng.normal())
            h = ex.poly([h0, 1])  # h(z) = h0 + z, so h(0) = h0
            f = constant_dilatation(h, alpha)
            z = 0.9 * rng.random() * np.exp(2j * np.pi * rng.random())
            lam = eval_f(f, z)
            assert lambda_star(lam, alpha, h0) == pytest.approx(ex.evaluate(h, z), abs=1e-12)
            other = lam + 0.1
            assert abs(lambda_star(other, alpha, h0) - ex.evaluate(h, z)) > 1e-6

    def test_rejects_large_alpha(self):
        with pytest.raises(DomainError):
            lambda_star(1, 1.0, 0)
