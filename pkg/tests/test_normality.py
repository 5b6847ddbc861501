import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from harmonorm import catalog, expr as ex
from harmonorm.errors import DomainError
from harmonorm.harmonic import HarmonicMap, NotSensePreservingWarning, eval_f, precompose
from harmonorm.normality import (
    SolveConfig,
    bk,
    bk_bound,
    derivative_growth,
    five_point_test,
    lappan_pair_test,
    normality_constant,
    normality_objective,
    p_criterion,
    two_point_functional,
    write_samples_csv,
)
from harmonorm.search import GridConfig
from harmonorm.sphere import ExtendedComplex

ID = HarmonicMap(ex.Z)
CD = HarmonicMap(ex.Z, ex.mul(ex.Const(0.5), ex.Z))
CONST = HarmonicMap(ex.Const(0.3 + 0.1j), z0=None)
BLOWUP = catalog.get("exp-blowup").map
BOUNDED = ["identity", "const-dilatation-0.5", "bounded-normal", "exp-decay", "poly-harmonic"]


def chi(a, b):
    # independent chordal formula for finite points
    return abs(a - b) / math.sqrt((1 + abs(a) ** 2) * (1 + abs(b) ** 2))


def dense_disk(n_r=400, n_t=400, rmax=0.999):
    r = np.linspace(0, rmax, n_r)
    t = np.linspace(0, 2 * np.pi, n_t, endpoint=False)
    return (r[:, None] * np.exp(1j * t[None, :])).ravel()


class TestNormalityConstant:
    def test_identity(self):
        e = normality_constant(ID)
        assert e.lower_bound == pytest.approx(1, abs=1e-6) and abs(e.witness) < 1e-6
        assert not e.diverging

    def test_const_dilatation_against_dense_oracle(self):
        z = dense_disk()
        oracle = np.max((1 - np.abs(z) ** 2) * 1.5 / (1 + np.abs(z + np.conj(0.5 * z)) ** 2))
        e = normality_constant(CD)
        assert e.lower_bound == pytest.approx(1.5, abs=1e-6) and abs(e.witness) < 1e-6
        assert e.lower_bound >= oracle - 1e-12

    def test_blowup_diverges_and_grows(self):
        bounds = [normality_constant(BLOWUP, GridConfig(refine_depth=d)).lower_bound for d in range(2, 8)]
        assert all(b > a for a, b in zip(bounds, bounds[1:]))
        assert normality_constant(BLOWUP).diverging

    def test_halfplane_exp_is_normal(self):
        # sup over the real axis of u / cosh(u) with u = Re((1+z)/(1-z)) ... attained off-axis too
        u = np.linspace(0.01, 5, 200001)
        oracle = np.max(u / np.cosh(u))
        e = normality_constant(catalog.get("exp-halfplane").map)
        assert e.lower_bound == pytest.approx(oracle, abs=1e-6) and not e.diverging

    def test_lower_bound_equals_objective_at_witness(self):
        for name in catalog.names():
            f = catalog.get(name).map
            e = normality_constant(f)
            assert e.lower_bound == pytest.approx(normality_objective(f)(np.array([e.witness]))[0], abs=1e-12)

    @settings(max_examples=20)
    @given(st.integers(0, 10_000))
    def test_monotone_in_depth(self, seed):
        f = catalog.get(BOUNDED[seed % len(BOUNDED)]).map
        prev = -np.inf
        for d in range(0, 6):
            v = normality_constant(f, GridConfig(refine_depth=d, rng_seed=seed)).lower_bound
            assert v >= prev
            prev = v

    def test_record_and_csv(self, tmp_path):
        e = normality_constant(ID, GridConfig(refine_depth=1), record=True)
        pts, vals = e.samples
        assert pts.size == e.evals
        write_samples_csv(tmp_path / "s.csv", pts, vals)
        assert (tmp_path / "s.csv").read_text().count("\n") == pts.size + 1


class TestCompositionBound:
    @pytest.mark.parametrize("name", BOUNDED)
    def test_automorphism_invariance(self, name):
        f = catalog.get(name).map
        base = normality_constant(f).lower_bound
        rng = np.random.default_rng(hash(name) % 2**32)
        for _ in range(5):
            a = 0.8 * math.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
            phi = ex.disk_automorphism(a, 2 * np.pi * rng.random())
            assert abs(normality_constant(precompose(f, phi)).lower_bound - base) <= 1e-2

    @pytest.mark.parametrize("name", BOUNDED)
    def test_self_map_contracts(self, name):
        f = catalog.get(name).map
        base = normality_constant(f).lower_bound
        for phi in (ex.poly([0, 0, 1]), ex.mul(ex.Const(0.6), ex.Z), ex.poly([0.2, 0.3, 0.4])):
            assert normality_constant(precompose(f, phi)).lower_bound <= base + 1e-2


class TestPCriterion:
    def test_identity_pair_oracle(self):
        # brute-force pair grid close to the diagonal, with an independent formula
        best = 0.0
        for z in (0, 0.01, 0.05j, -0.1):
            for d in (1e-4, 1e-3):
                w = z + d
                v = chi(z, w) / abs(z - w) * math.sqrt((1 - abs(z) ** 2) * (1 - abs(w) ** 2))
                best = max(best, v)
        e = p_criterion(ID, 2.0)
        assert e.lower_bound == pytest.approx(1, abs=1e-6)
        assert best == pytest.approx(1, abs=1e-6)
        assert abs(e.lower_bound - best) < 1e-6

    def test_functional_matches_formula(self):
        z, w, p = 0.3 + 0.1j, -0.2 + 0.4j, 3.0
        fz, fw = eval_f(CD, z), eval_f(CD, w)
        want = chi(fz, fw) / abs(z - w) * abs(1 - np.conj(w) * z) ** (1 - 2 / p) \
            * ((1 - abs(z) ** 2) * (1 - abs(w) ** 2)) ** (1 / p)
        assert two_point_functional(CD, z, w, p) == pytest.approx(want, rel=1e-14)

    def test_constant_map(self):
        assert p_criterion(CONST, 2.0).lower_bound == 0

    def test_blowup(self):
        e = p_criterion(BLOWUP, 2.0)
        assert e.diverging
        assert len(e.extra["pair"]) == 2

    @pytest.mark.parametrize("name", catalog.names())
    def test_agrees_with_normality_flag(self, name):
        f = catalog.get(name).map
        assert p_criterion(f, 2.0).diverging == normality_constant(f).diverging

    def test_other_p(self):
        for p in (1.0, 4.0):
            assert p_criterion(ID, p).lower_bound == pytest.approx(1, abs=1e-3)
        with pytest.raises(DomainError):
            p_criterion(ID, 0)


class TestFivePoint:
    def test_identity_closed_form(self):
        E = [0, 0.25, 0.25j, -0.25, 3]
        res = five_point_test(ID, E)
        for r, w in zip(res[:4], E[:4]):
            assert r.status == "ok" and len(r.preimages) == 1
            assert r.preimages[0] == pytest.approx(w, abs=1e-12)
            assert r.sup_estimate == pytest.approx((1 - abs(w) ** 2) / (1 + abs(w) ** 2), abs=1e-8)
        assert res[4].status == "empty" and res[4].sup_estimate == 0 and not res[4].preimages

    def test_infinity_is_empty(self):
        res = five_point_test(ID, [0, 0.1, 0.2, 0.3, ExtendedComplex.INF])
        assert res[4].status == "empty"

    def test_const_dilatation_linear_oracle(self):
        E = [0.1, -0.2j, 0.05 + 0.05j, 0.3, -0.15]
        obj = normality_objective(CD)
        for r, w in zip(five_point_test(CD, E), E):
            # z + conj(0.5 z) = w  =>  z = (w - 0.5 conj(w)) / 0.75
            z = (w - 0.5 * np.conj(w)) / 0.75
            assert r.status == "ok" and len(r.preimages) == 1
            assert r.preimages[0] == pytest.approx(z, abs=1e-12)
            assert r.sup_estimate == pytest.approx(obj(np.array([z]))[0], abs=1e-12)

    def test_multiple_preimages(self):
        f = HarmonicMap(ex.poly([0, 0, 1]))  # z^2 has two preimages per nonzero value
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NotSensePreservingWarning)
            res = five_point_test(f, [0.09, -0.04, 0.01j, 0.25, 2])
        assert len(res[0].preimages) == 2
        assert sorted(abs(p) for p in res[0].preimages) == pytest.approx([0.3, 0.3])

    def test_constant_map_warns(self):
        with pytest.warns(NotSensePreservingWarning):
            res = five_point_test(CONST, [0, 1, 2, 3, 4], GridConfig(initial_mesh=8),
                                  SolveConfig(max_iter=5))
        assert all(r.status in ("empty", "stall", "degenerate") for r in res)

    def test_needs_five_distinct(self):
        with pytest.raises(DomainError):
            five_point_test(ID, [0, 1, 2, 3])
        with pytest.raises(DomainError):
            five_point_test(ID, [0, 1, 2, 3, 3])


class TestDerivativeGrowth:
    def test_identity(self):
        assert derivative_growth(ID, 2, 5.0).lower_bound == 0
        e = derivative_growth(ID, 1, 1.0)
        assert e.lower_bound == pytest.approx(1) and abs(e.witness) < 1e-9

    def test_mobius_stable_and_dense_oracle(self):
        f = HarmonicMap(ex.Mobius(0, 1, -1, 1), z0=None)  # 1/(1-z)
        a = derivative_growth(f, 1, 2.0, GridConfig(refine_depth=5)).lower_bound
        b = derivative_growth(f, 1, 2.0, GridConfig(refine_depth=6)).lower_bound
        assert math.isfinite(a) and abs(b - a) <= 0.01 * a
        z = dense_disk(800, 800)
        z = z[np.abs(1 / (1 - z)) <= 2]
        oracle = np.max((1 - np.abs(z) ** 2) / np.abs(1 - z) ** 2)
        assert b >= oracle * 0.999 and b == pytest.approx(oracle, rel=1e-2)

    def test_empty_feasible_set(self):
        with pytest.raises(DomainError):
            derivative_growth(HarmonicMap(ex.Const(5), z0=None), 1, 1.0)


class TestBk:
    def test_examples(self):
        assert all(bk(1, n) == 1 for n in range(1, 30))
        assert bk(2, 5) == 4 and bk(3, 5) == 6

    def test_closed_forms_and_summation_oracle(self):
        # bottom-up table of the defining sums, built without the library
        T = {(1, n): 1 for n in range(1, 26)}
        for k in range(2, 26):
            for n in range(k, 26):
                T[k, n] = sum(T[k - 1, j] for j in range(k - 1, n))

        for n in range(2, 26):
            assert bk(2, n) == n - 1
            if n >= 3:
                assert bk(3, n) == (n - 1) * (n - 2) // 2
            for k in range(1, n + 1):
                assert bk(k, n) == math.comb(n - 1, k - 1) == T[k, n]

    def test_strict_bound(self):
        for n in range(3, 26):
            for k in range(3, n + 1):
                assert abs(bk(k, n)) < bk_bound(k, n)

    def test_domain(self):
        with pytest.raises(DomainError):
            bk(3, 2)
        with pytest.raises(DomainError):
            bk(0, 2)


def blowup_axis_pairs(n_max):
    # preimages on (0, 1) of the real-axis points 2 pi n and 2 pi n + pi of the Cayley image
    out = []
    for n in range(1, n_max + 1):
        a, b = 2 * np.pi * n, 2 * np.pi * n + np.pi
        out.append(((a - 1) / (a + 1), (b - 1) / (b + 1)))
    return out


class TestLappan:
    def test_identity_consistent(self):
        pairs = [(1 - 1 / n, 1 - 1 / n + 1 / n**2) for n in range(2, 601)]
        v = lappan_pair_test(ID, pairs)
        assert v.verdict == "consistent"
        for (z, w), c in zip(pairs[-3:], v.chi[-3:]):
            assert c == pytest.approx(chi(z, w), rel=1e-12)

    def test_identity_short_sequence_with_looser_precondition(self):
        pairs = [(1 - 1 / n, 1 - 1 / n + 1 / n**2) for n in range(2, 201)]
        with pytest.raises(DomainError):
            lappan_pair_test(ID, pairs)
        assert lappan_pair_test(ID, pairs, final_rho=1e-2).verdict == "consistent"

    def test_constant(self):
        pairs = [(1 - 1 / n, 1 - 1 / n + 1 / n**2) for n in range(2, 601)]
        v = lappan_pair_test(CONST, pairs)
        assert v.verdict == "consistent" and np.all(v.chi == 0)

    def test_blowup_violation(self):
        pairs = blowup_axis_pairs(400)
        v = lappan_pair_test(BLOWUP, pairs)
        assert v.verdict == "violation" and v.index >= 300
        assert np.all(v.chi > 0.99)

    def test_preconditions(self):
        with pytest.raises(DomainError):
            lappan_pair_test(ID, [(0, 0.1)])
        with pytest.raises(DomainError):
            lappan_pair_test(ID, [(0, 1e-5), (0, 0.1)])
