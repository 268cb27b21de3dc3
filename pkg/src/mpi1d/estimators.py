"""scikit-learn wrappers around the forward model and the spectral solvers.

``MPIForwardOperator`` is a transformer: ``fit`` assembles the discretized
operator, ``transform`` maps phantom rows (one density per row, sampled on
the FOV grid) to signal rows.

``TSVDRegressor`` and ``TikhonovRegressor`` treat the reconstruction as a
linear regression whose design matrix is the operator itself: ``fit(A, s)``
solves for the density and stores it in ``coef_``; ``predict(A)`` returns the
re-simulated signal ``A @ coef_``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from . import assembly
from .grids import SpaceGrid, TimeGrid
from .imaging import SVDFactors, tikhonov_solve, tsvd_solve
from .operator import OperatorMatrix
from .physics import PhysicalParams

OUTPUTS = ("conv", "time", "freq")


class MPIForwardOperator(TransformerMixin, BaseEstimator):
    """Assemble the forward operator from physical parameters.

    Parameters
    ----------
    A, G, T, a, beta : float
        Drive amplitude, gradient strength, period, magnetization scale and
        Langevin steepness.
    trajectory : {"cosine", "sawtooth"}
    n_space : int
        Number of FOV grid points.
    oversample : int
        Time samples per space sample.
    n_max : int or None
        Number of sine coefficients for ``output="freq"`` (default ``n_space``).
    output : {"conv", "time", "freq"}
        Which operator to build: the core convolution on the FOV, the voltage
        signal in time, or its sine coefficients.
    path : {"a", "b"}
        Assembly route for the frequency operator.
    """

    def __init__(self, A=1.0, G=1.0, T=1.0, a=1.0, beta=1.0, trajectory="cosine",
                 n_space=501, oversample=4, n_max=None, output="time", path="a"):
        self.A = A
        self.G = G
        self.T = T
        self.a = a
        self.beta = beta
        self.trajectory = trajectory
        self.n_space = n_space
        self.oversample = oversample
        self.n_max = n_max
        self.output = output
        self.path = path

    def _build(self) -> OperatorMatrix:
        if self.output not in OUTPUTS:
            raise ValueError(f"output must be one of {OUTPUTS}, got {self.output!r}")
        p = PhysicalParams(self.A, self.G, self.T, self.a, self.beta)
        sg = SpaceGrid.fov(p, int(self.n_space))
        self.params_ = p
        self.grid_ = sg
        if self.output == "conv":
            return assembly.build_s_conv(sg, p)
        tg = TimeGrid.for_space(sg, p, int(self.oversample))
        if self.output == "time":
            return assembly.build_s_time(self.trajectory, tg, sg, p)
        n_max = int(self.n_max) if self.n_max is not None else sg.n_points
        return assembly.build_s_freq(self.trajectory, tg, sg, n_max, p, path=self.path)

    def fit(self, X=None, y=None):
        """Build the operator. ``X`` is only checked for width when given."""
        self.operator_ = self._build()
        self.n_features_in_ = self.operator_.cols
        if X is not None:
            self._validate(X)
        return self

    def _validate(self, X):
        X = check_array(X, ensure_2d=True)
        if X.shape[1] != self.operator_.cols:
            raise ValueError(
                f"X has {X.shape[1]} features; the operator acts on {self.operator_.cols} grid points"
            )
        return X

    def transform(self, X):
        """Signals for each phantom row of ``X``."""
        check_is_fitted(self, "operator_")
        X = self._validate(X)
        return X @ self.operator_.data.T

    @property
    def matrix_(self) -> np.ndarray:
        check_is_fitted(self, "operator_")
        return self.operator_.data


class _SpectralRegressor(RegressorMixin, BaseEstimator):
    def _solve(self, factors, y):
        raise NotImplementedError

    def fit(self, X, y):
        if isinstance(X, OperatorMatrix):
            X = X.data
        X, y = check_X_y(X, y, multi_output=True, y_numeric=True)
        self.n_features_in_ = X.shape[1]
        factors = SVDFactors(X)
        self.singular_values_ = factors.s
        self.coef_ = self._solve(factors, y)
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        if isinstance(X, OperatorMatrix):
            X = X.data
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} columns, expected {self.n_features_in_}")
        return X @ self.coef_


class TSVDRegressor(_SpectralRegressor):
    """Truncated-SVD solution keeping the ``k`` largest singular triplets."""

    def __init__(self, k=10):
        self.k = k

    def _solve(self, factors, y):
        k = int(self.k)
        if not 1 <= k <= factors.s.size:
            raise ValueError(f"k must lie in [1, {factors.s.size}], got {self.k}")
        return tsvd_solve(factors, y, k)


class TikhonovRegressor(_SpectralRegressor):
    """Minimizer of ``|X c - y|^2 + alpha |c|^2``."""

    def __init__(self, alpha=1e-6):
        self.alpha = alpha

    def _solve(self, factors, y):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        return tikhonov_solve(factors, y, float(self.alpha))
