"""scikit-learn style wrappers around the supremum estimators.

``fit`` takes a :class:`HarmonicMap`; ``transform`` evaluates the fitted
objective at disk points. Hyperparameters mirror :class:`GridConfig`, so
``get_params`` / ``set_params`` and ``clone`` work as usual.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from . import expr as ex
from .harmonic import HarmonicMap
from .normality import derivative_growth, normality_constant, normality_objective, p_criterion, two_point_functional
from .search import GridConfig
from .validation import check_disk_points, check_positive, check_positive_int


class _SupremumEstimator(TransformerMixin, BaseEstimator):
    def __init__(self, max_radius=0.999, initial_mesh=24, refine_depth=6, refine_factor=2,
                 tol=1e-3, max_evals=2_000_000, rng_seed=0):
        self.max_radius = max_radius
        self.initial_mesh = initial_mesh
        self.refine_depth = refine_depth
        self.refine_factor = refine_factor
        self.tol = tol
        self.max_evals = max_evals
        self.rng_seed = rng_seed

    def grid_config(self) -> GridConfig:
        return GridConfig(
            max_radius=self.max_radius,
            initial_mesh=self.initial_mesh,
            refine_depth=self.refine_depth,
            refine_factor=self.refine_factor,
            tol=self.tol,
            max_evals=self.max_evals,
            rng_seed=self.rng_seed,
        )

    def _estimate(self, f):
        raise NotImplementedError

    def fit(self, f, y=None):
        if not isinstance(f, HarmonicMap):
            raise TypeError("fit expects a HarmonicMap")
        self.map_ = f
        self.estimate_ = self._estimate(f)
        self.lower_bound_ = self.estimate_.lower_bound
        self.witness_ = self.estimate_.witness
        self.diverging_ = self.estimate_.diverging
        return self

    def _check_fitted(self):
        if not hasattr(self, "estimate_"):
            raise NotFittedError(f"{type(self).__name__} is not fitted yet")


class NormalityEstimator(_SupremumEstimator):
    """Estimate of ``sup (1 - |z|^2) f^#(z)``; transform gives the objective at points."""

    def _estimate(self, f):
        return normality_constant(f, self.grid_config())

    def transform(self, Z):
        self._check_fitted()
        z = check_disk_points(Z, "Z")
        return normality_objective(self.map_)(z)


class PCriterionEstimator(_SupremumEstimator):
    """Two-point functional with exponent ``p``; transform takes pairs as an (n, 2) array."""

    def __init__(self, p=2.0, max_radius=0.999, initial_mesh=24, refine_depth=6, refine_factor=2,
                 tol=1e-3, max_evals=2_000_000, rng_seed=0):
        super().__init__(max_radius, initial_mesh, refine_depth, refine_factor, tol, max_evals, rng_seed)
        self.p = p

    def _estimate(self, f):
        return p_criterion(f, check_positive(self.p, "p"), self.grid_config())

    def transform(self, pairs):
        self._check_fitted()
        arr = check_disk_points(pairs, "pairs")
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("pairs must have shape (n, 2)")
        return two_point_functional(self.map_, arr[:, 0], arr[:, 1], self.p)


class DerivativeGrowthEstimator(_SupremumEstimator):
    """``sup (1-|z|^2)^n (|h^(n)| + |g^(n)|)`` over ``|f| <= K``."""

    def __init__(self, n=1, K=1.0, max_radius=0.999, initial_mesh=24, refine_depth=6, refine_factor=2,
                 tol=1e-3, max_evals=2_000_000, rng_seed=0):
        super().__init__(max_radius, initial_mesh, refine_depth, refine_factor, tol, max_evals, rng_seed)
        self.n = n
        self.K = K

    def _estimate(self, f):
        return derivative_growth(f, check_positive_int(self.n, "n"), check_positive(self.K, "K"), self.grid_config())

    def transform(self, Z):
        self._check_fitted()
        z = check_disk_points(Z, "Z")
        hn = ex.nth_derivative(self.map_.h, self.n)
        gn = ex.nth_derivative(self.map_.g, self.n)
        return (1.0 - np.abs(z) ** 2) ** self.n * (np.abs(ex.evaluate(hn, z)) + np.abs(ex.evaluate(gn, z)))
