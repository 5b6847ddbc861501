import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from harmonorm import catalog
from harmonorm.estimators import DerivativeGrowthEstimator, NormalityEstimator, PCriterionEstimator
from harmonorm.normality import normality_constant
from harmonorm.search import GridConfig

ID = catalog.get("identity").map


def test_params_and_clone():
    est = NormalityEstimator(refine_depth=3, rng_seed=5)
    assert est.get_params()["refine_depth"] == 3
    c = clone(est)
    assert c.get_params() == est.get_params() and not hasattr(c, "estimate_")
    est.set_params(initial_mesh=12)
    assert est.grid_config().initial_mesh == 12


def test_fit_matches_function():
    est = NormalityEstimator(refine_depth=4).fit(ID)
    ref = normality_constant(ID, GridConfig(refine_depth=4))
    assert est.lower_bound_ == ref.lower_bound and est.witness_ == ref.witness and not est.diverging_


def test_transform():
    est = NormalityEstimator()
    with pytest.raises(NotFittedError):
        est.transform([0])
    z = np.array([0, 0.5, 0.3j])
    out = est.fit(ID).transform(z)
    np.testing.assert_allclose(out, (1 - np.abs(z) ** 2) / (1 + np.abs(z) ** 2))
    with pytest.raises(Exception):
        est.transform([1.5])


def test_pcriterion_estimator():
    est = PCriterionEstimator(p=2.0, refine_depth=2).fit(ID)
    assert est.lower_bound_ == pytest.approx(1, abs=1e-6)
    v = est.transform(np.array([[0, 0.1], [0.2, -0.2]]))
    assert v.shape == (2,) and np.all(v > 0)
    with pytest.raises(ValueError):
        est.transform(np.array([0, 0.1]))


def test_derivative_growth_estimator():
    est = DerivativeGrowthEstimator(n=1, K=1.0).fit(ID)
    assert est.lower_bound_ == pytest.approx(1)
    np.testing.assert_allclose(est.transform([0, 0.5]), [1, 0.75])


def test_fit_type_check():
    with pytest.raises(TypeError):
        NormalityEstimator().fit("identity")
