import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mpi1d.physics import PhysicalParams
from mpi1d.trajectory import (TrajectoryKind, gamma, gamma_deriv, gamma_g, gamma_g_deriv,
                              gamma_g_inv)

P = PhysicalParams(A=2.0, G=4.0, T_period=0.8)
KINDS = ("cosine", "sawtooth")


def test_parse():
    assert TrajectoryKind.parse("Cosine") is TrajectoryKind.COSINE
    assert TrajectoryKind.parse(TrajectoryKind.SAWTOOTH) is TrajectoryKind.SAWTOOTH
    with pytest.raises(ValueError, match="lissajous"):
        TrajectoryKind.parse("lissajous")


def test_gamma_examples():
    T = P.T_period
    assert gamma("cosine", 0.0, P) == P.A
    assert gamma("sawtooth", T / 2, P) == -P.A
    assert abs(gamma("cosine", T / 4, P)) < 1e-15 * P.A


def test_gamma_periodic_and_even():
    T = P.T_period
    t = np.linspace(0, T / 2, 33)
    for k in KINDS:
        assert np.allclose(gamma(k, T - t, P), gamma(k, t, P), rtol=0, atol=1e-14)
        assert gamma(k, T, P) == pytest.approx(gamma(k, 0.0, P), abs=1e-14)


def test_gamma_deriv_examples():
    T = P.T_period
    assert gamma_deriv("cosine", 0.0, P) == 0.0
    assert gamma_deriv("cosine", T / 2, P) == pytest.approx(0.0, abs=1e-14)
    assert gamma_deriv("cosine", T / 4, P) == pytest.approx(-P.A * P.omega0, rel=1e-15)
    t = np.linspace(0, T / 2, 17)
    assert np.all(gamma_deriv("sawtooth", t, P) == -4 * P.A / T)


def test_sawtooth_derivative_never_vanishes_cosine_does_at_ends():
    T = P.T_period
    t = np.linspace(0, T / 2, 1001)
    assert np.all(gamma_deriv("sawtooth", t, P) != 0)
    d = gamma_deriv("cosine", t, P)
    assert d[0] == 0 and abs(d[-1]) < 1e-12
    assert np.all(d[1:-1] < 0)


def test_window_rejection():
    T = P.T_period
    for k in KINDS:
        with pytest.raises(ValueError):
            gamma(k, 1.01 * T, P)
        with pytest.raises(ValueError):
            gamma(k, -0.01, P)
        with pytest.raises(ValueError):
            gamma_deriv(k, 0.6 * T, P)
        with pytest.raises(ValueError):
            gamma_g(k, 0.6 * T, P)
        with pytest.raises(ValueError):
            gamma_g_inv(k, 1.01 * P.fov_halfwidth, P)


def test_full_period_option():
    T = P.T_period
    assert gamma_deriv("sawtooth", 0.75 * T, P, full_period=True) == 4 * P.A / T
    assert gamma_g("cosine", 0.75 * T, P, full_period=True) == pytest.approx(0.0, abs=1e-14)
    assert gamma_g_deriv("cosine", 0.75 * T, P, full_period=True) == pytest.approx(
        P.A * P.omega0 / P.G)


def test_finite_difference_derivative():
    T = P.T_period
    h = 1e-6 * T
    t = np.linspace(0.01 * T, 0.49 * T, 97)
    for k in KINDS:
        fd = (gamma(k, t + h, P) - gamma(k, t - h, P)) / (2 * h)
        d = gamma_deriv(k, t, P)
        assert np.max(np.abs(fd - d)) <= 1e-6 * np.max(np.abs(d))


def test_gamma_g_monotone_onto_fov():
    t = np.linspace(0, P.T_period / 2, 501)
    L = P.fov_halfwidth
    for k in KINDS:
        y = gamma_g(k, t, P)
        assert np.all(np.diff(y) < 0)
        assert y[0] == pytest.approx(L) and y[-1] == pytest.approx(-L)


def test_inverse_examples():
    L = P.fov_halfwidth
    assert gamma_g_inv("cosine", L, P) == 0.0
    assert gamma_g_inv("cosine", 0.0, P) == pytest.approx(P.T_period / 4, rel=1e-15)
    assert gamma_g_inv("sawtooth", -L, P) == pytest.approx(P.T_period / 2)


def test_sawtooth_affine_round_trip():
    T = P.T_period
    t = np.random.default_rng(3).uniform(0, T / 2, 100)
    y = gamma_g("sawtooth", t, P)
    assert np.allclose(y, P.fov_halfwidth * (1 - 4 * t / T), rtol=0, atol=1e-15)
    assert np.max(np.abs(gamma_g_inv("sawtooth", y, P) - t)) <= 1e-12 * T


@given(st.sampled_from(KINDS), st.floats(0.0, 1.0))
def test_round_trip_property(kind, frac):
    T = P.T_period
    t = frac * T / 2
    back = gamma_g_inv(kind, gamma_g(kind, t, P), P)
    # arccos is ill-conditioned at the turning points: |dt| ~ sqrt(eps) there
    tol = 1e-12 * T if kind == "sawtooth" else max(1e-12 * T, 1e-7 * T * math.sqrt(1e-9))
    if kind == "cosine" and (frac < 1e-3 or frac > 1 - 1e-3):
        tol = 1e-7 * T
    assert abs(back - t) <= tol
