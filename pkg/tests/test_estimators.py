import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from mpi1d.assembly import build_s_conv, build_s_freq, build_s_time
from mpi1d.estimators import MPIForwardOperator, TikhonovRegressor, TSVDRegressor
from mpi1d.grids import SpaceGrid, TimeGrid
from mpi1d.imaging import Signal, make_phantom, reconstruct_tikhonov, reconstruct_tsvd
from mpi1d.physics import PhysicalParams

KW = dict(A=1.0, G=1.0, T=1.0, a=1.0, beta=2.0, n_space=101)
P = PhysicalParams(1.0, 1.0, 1.0, 1.0, 2.0)


def test_params_and_clone():
    est = MPIForwardOperator(**KW, output="freq", n_max=30)
    params = est.get_params()
    assert params["n_max"] == 30 and params["output"] == "freq"
    twin = clone(est)
    assert twin.get_params() == params and not hasattr(twin, "operator_")
    est.set_params(beta=0.5)
    assert est.beta == 0.5


@pytest.mark.parametrize("output", ["conv", "time", "freq"])
def test_forward_matches_library(output):
    est = MPIForwardOperator(**KW, output=output, n_max=40).fit()
    sg = SpaceGrid.fov(P, 101)
    tg = TimeGrid.for_space(sg, P)
    ref = {"conv": lambda: build_s_conv(sg, P),
           "time": lambda: build_s_time("cosine", tg, sg, P),
           "freq": lambda: build_s_freq("cosine", tg, sg, 40, P)}[output]()
    assert np.array_equal(est.matrix_, ref.data)
    X = np.random.default_rng(0).standard_normal((3, 101))
    assert np.allclose(est.transform(X), X @ ref.data.T, rtol=1e-14, atol=0)
    assert est.n_features_in_ == 101


def test_forward_errors():
    with pytest.raises(NotFittedError):
        MPIForwardOperator(**KW).transform(np.zeros((1, 101)))
    est = MPIForwardOperator(**KW).fit()
    with pytest.raises(ValueError):
        est.transform(np.zeros((1, 50)))
    with pytest.raises(ValueError):
        MPIForwardOperator(**KW, output="space").fit()
    with pytest.raises(ValueError):
        MPIForwardOperator(**dict(KW, A=-1.0)).fit()


def test_fit_transform():
    X = np.random.default_rng(1).standard_normal((2, 101))
    est = MPIForwardOperator(**KW)
    assert np.array_equal(est.fit_transform(X), est.transform(X))


def _problem():
    fwd = MPIForwardOperator(**KW).fit()
    op = fwd.operator_
    c = make_phantom("gaussian", 0.1, 0.1, 1.0, fwd.grid_)
    return op, c, op.data @ c.values


def test_tsvd_regressor_matches_reconstruct():
    op, c, s = _problem()
    reg = TSVDRegressor(k=8).fit(op, s)
    ref = reconstruct_tsvd(op, Signal("time", s), 8)
    assert np.allclose(reg.coef_, ref.values, rtol=1e-12, atol=1e-14)
    assert np.allclose(reg.predict(op), op.data @ reg.coef_)
    assert reg.singular_values_[0] >= reg.singular_values_[-1]


def test_tikhonov_regressor_matches_reconstruct_and_multioutput():
    op, c, s = _problem()
    reg = TikhonovRegressor(alpha=1e-4).fit(op.data, s)
    ref = reconstruct_tikhonov(op, Signal("time", s), 1e-4)
    assert np.allclose(reg.coef_, ref.values, rtol=1e-12, atol=1e-14)
    Y = np.column_stack([s, 2 * s])
    multi = TikhonovRegressor(alpha=1e-4).fit(op.data, Y)
    assert multi.coef_.shape == (101, 2)
    assert np.allclose(multi.coef_[:, 1], 2 * reg.coef_, rtol=1e-12, atol=1e-14)


def test_regressor_validation():
    op, _, s = _problem()
    with pytest.raises(NotFittedError):
        TSVDRegressor().predict(op.data)
    with pytest.raises(ValueError):
        TSVDRegressor(k=0).fit(op.data, s)
    with pytest.raises(ValueError):
        TikhonovRegressor(alpha=0.0).fit(op.data, s)
    reg = TSVDRegressor(k=3).fit(op.data, s)
    with pytest.raises(ValueError):
        reg.predict(op.data[:, :10])
    assert clone(reg).get_params() == {"k": 3}


def test_score_is_r2():
    op, _, s = _problem()
    reg = TSVDRegressor(k=15).fit(op.data, s)
    assert reg.score(op.data, s) > 0.999
