"""Discretization of the MPI building blocks and their compositions.

Integrals over the field of view and the time window use trapezoid
weights. Trajectory regridding evaluates space-sampled functions at
``y_i = gamma_G(t_i)`` by linear interpolation. The Chebyshev transform
defaults to product integration, see :func:`build_q_chebt`.

Operators and their tags::

    Q^conv   space -> space      convolution with M_G'
    Q^fov    space -> fov        restriction to [-A/G, A/G]
    Q^time   fov   -> time       f |-> gamma_G'(t) f(gamma_G(t))
    Q^fft    time  -> freq       sine coefficients, n = 1..n_max
    Q^emb    fov   -> cheb       identity into the Chebyshev-weighted space
    Q^chebT  cheb  -> freq       Chebyshev-U transform
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import toeplitz

from .grids import SpaceGrid, TimeGrid
from .operator import OperatorMatrix, compose
from .physics import PhysicalParams, kernel_mg_deriv
from .trajectory import TrajectoryKind, gamma_g, gamma_g_deriv

PATHS = ("a", "b")


def _require_fov(sg: SpaceGrid, p: PhysicalParams):
    if not sg.spans_fov(p):
        raise ValueError(
            f"space grid [{sg.left}, {sg.right}] must span the FOV "
            f"[-{p.fov_halfwidth}, {p.fov_halfwidth}]"
        )


def _freq_weights(n_max: int, period: float) -> np.ndarray:
    # sum_n T * u_hat(n)^2 equals the L2 norm squared on [0, T/2]
    return np.full(n_max, float(period))


def build_q_conv(g: SpaceGrid, p: PhysicalParams) -> OperatorMatrix:
    """Convolution matrix ``C[i, j] = w_j * M_G'(x_i - x_j)`` on a uniform grid."""
    # uniform grid: the kernel depends on |i - j| only
    kcol = kernel_mg_deriv(np.arange(g.n_points) * g.h, p)
    data = toeplitz(kcol) * g.weights[None, :]
    return OperatorMatrix(
        data, "space", "space", g.weights, g.weights, g.points, g.points, {"name": "conv"}
    )


def build_restriction(outer: SpaceGrid, inner: SpaceGrid) -> OperatorMatrix:
    """0/1 selection matrix picking the nodes of ``inner`` out of ``outer``."""
    k0 = inner.offset_in(outer)
    data = np.zeros((inner.n_points, outer.n_points))
    data[np.arange(inner.n_points), k0 + np.arange(inner.n_points)] = 1.0
    return OperatorMatrix(
        data, "space", "fov", outer.weights, inner.weights, outer.points, inner.points,
        {"name": "fov"},
    )


def _interpolation_stencil(sg: SpaceGrid, y):
    y = np.asarray(y, dtype=float)
    slack = 1e-10 * (sg.right - sg.left)
    if np.any(y < sg.left - slack) or np.any(y > sg.right + slack):
        raise ValueError("interpolation point outside the space grid")
    s = (np.clip(y, sg.left, sg.right) - sg.left) / sg.h
    j = np.clip(np.floor(s).astype(int), 0, sg.n_points - 2)
    theta = s - j
    # snap to a node so a hit carries a single weight
    theta[np.abs(theta) < 1e-12] = 0.0
    theta[np.abs(theta - 1.0) < 1e-12] = 1.0
    return j, theta


def interpolation_matrix(sg: SpaceGrid, y) -> np.ndarray:
    """Rows of linear-interpolation weights locating each ``y`` in ``sg``."""
    y = np.asarray(y, dtype=float)
    j, theta = _interpolation_stencil(sg, y)
    rows = np.arange(y.size)
    out = np.zeros((y.size, sg.n_points))
    out[rows, j] += 1.0 - theta
    out[rows, j + 1] += theta
    return out


def build_q_time(kind, tg: TimeGrid, sg: SpaceGrid, p: PhysicalParams) -> OperatorMatrix:
    """Trajectory operator: row i is ``gamma_G'(t_i)`` times interpolation at ``gamma_G(t_i)``."""
    kind = TrajectoryKind.parse(kind)
    _require_fov(sg, p)
    full = tg.window == "full"
    t = tg.points
    y = gamma_g(kind, t, p, full_period=full)
    v = gamma_g_deriv(kind, t, p, full_period=full)
    data = v[:, None] * interpolation_matrix(sg, y)
    return OperatorMatrix(
        data, "fov", "time", sg.weights, tg.weights, sg.points, t,
        {"name": "time", "trajectory": kind.value, "window": tg.window},
    )


def build_q_fft(tg: TimeGrid, n_max: int) -> OperatorMatrix:
    """Sine coefficients ``(2/T) * int_0^{T/2} f(t) sin(n w0 t) dt`` by trapezoid rule."""
    if tg.window != "half":
        raise ValueError("the sine transform is defined on the half-period window")
    if int(n_max) != n_max or n_max < 1:
        raise ValueError(f"n_max must be an integer >= 1, got {n_max!r}")
    T = tg.period
    n = np.arange(1, int(n_max) + 1)
    data = (2.0 / T) * np.sin(np.outer(n, (2.0 * np.pi / T) * tg.points)) * tg.weights[None, :]
    return OperatorMatrix(
        data, "time", "freq", tg.weights, _freq_weights(int(n_max), T), tg.points, n.astype(float),
        {"name": "fft"},
    )


def chebyshev_u(n_max: int, x) -> np.ndarray:
    """Rows ``U_0(x) .. U_{n_max-1}(x)`` by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    U = np.empty((n_max, x.size))
    U[0] = 1.0
    if n_max > 1:
        U[1] = 2.0 * x
    for k in range(2, n_max):
        U[k] = 2.0 * x * U[k - 1] - U[k - 2]
    return U


def _cos_integral(m, a, b):
    """``int_a^b cos(m t) dt`` for integer ``m`` (column) and interval arrays."""
    m = np.asarray(m, dtype=float)[:, None]
    safe = np.where(m == 0, 1.0, m)
    return np.where(m == 0, b - a, (np.sin(m * b) - np.sin(m * a)) / safe)


def _chebyshev_product_weights(n_max: int, sg: SpaceGrid, L: float) -> np.ndarray:
    """``W[n-1, j] = int phi_j(y) sin(n arccos(y/L)) dy`` for hat functions ``phi_j``.

    With ``y = L cos(th)`` each element integral reduces to integrals of
    ``sin(th) sin(n th)`` and ``cos(th) sin(th) sin(n th)``, which are sums of
    cosines with closed-form antiderivatives.
    """
    x = np.clip(sg.points / L, -1.0, 1.0)
    th = np.arccos(x)
    lo, hi = th[1:], th[:-1]
    n = np.arange(1, n_max + 1)
    i0 = 0.5 * (_cos_integral(n - 1, lo, hi) - _cos_integral(n + 1, lo, hi))
    i1 = 0.25 * (_cos_integral(n - 2, lo, hi) - _cos_integral(n + 2, lo, hi))
    dx = x[1:] - x[:-1]
    W = np.zeros((n_max, sg.n_points))
    W[:, :-1] += (x[1:] * i0 - i1) / dx
    W[:, 1:] += (i1 - x[:-1] * i0) / dx
    return L * W


def build_q_emb(sg: SpaceGrid, p: PhysicalParams) -> OperatorMatrix:
    """Identity from the FOV space into the Chebyshev-weighted space."""
    x = np.clip(sg.points / p.fov_halfwidth, -1.0, 1.0)
    cheb_w = sg.weights * np.sqrt(1.0 - x**2)
    return OperatorMatrix(
        np.eye(sg.n_points), "fov", "cheb", sg.weights, cheb_w, sg.points, sg.points,
        {"name": "emb"},
    )


def build_q_chebt(sg: SpaceGrid, n_max: int, p: PhysicalParams,
                  quadrature: str = "product") -> OperatorMatrix:
    """Chebyshev transform ``-(2/T) int f(y) U_{n-1}(Gy/A) sqrt(1 - (Gy/A)^2) dy``.

    ``quadrature="trapezoid"`` uses plain trapezoid weights. The default
    ``"product"`` integrates the piecewise-linear interpolant of ``f``
    exactly against ``sin(n arccos(Gy/A))``; the trapezoid rule converges
    only like ``h**1.5`` with a large constant because the weight has a
    square-root edge and oscillates on an ``O(1/n**2)`` scale there.

    The minus sign comes from the orientation flip of ``y = gamma_G(t)``
    (``t: 0 -> T/2`` maps ``y: A/G -> -A/G``); with it the Chebyshev route
    agrees with the sine-transform route for the cosine trajectory.
    """
    _require_fov(sg, p)
    if int(n_max) != n_max or n_max < 1:
        raise ValueError(f"n_max must be an integer >= 1, got {n_max!r}")
    n_max = int(n_max)
    L = p.fov_halfwidth
    scale = -2.0 / p.T_period
    if quadrature == "product":
        data = scale * _chebyshev_product_weights(n_max, sg, L)
    elif quadrature == "trapezoid":
        x = np.clip(sg.points / L, -1.0, 1.0)
        data = scale * chebyshev_u(n_max, x) * np.sqrt(1.0 - x**2) * sg.weights[None, :]
    else:
        raise ValueError(f"quadrature must be 'product' or 'trapezoid', got {quadrature!r}")
    x = np.clip(sg.points / L, -1.0, 1.0)
    return OperatorMatrix(
        data, "cheb", "freq", sg.weights * np.sqrt(1.0 - x**2),
        _freq_weights(n_max, p.T_period), sg.points, np.arange(1.0, n_max + 1),
        {"name": "chebT", "quadrature": quadrature},
    )


def build_s_conv(g: SpaceGrid, p: PhysicalParams, symmetric: bool = False) -> OperatorMatrix:
    """Core operator: convolution restricted to the FOV on both sides.

    ``symmetric=True`` returns ``D^(1/2) C D^(-1/2)`` with ``D`` the
    quadrature weights, which is exactly symmetric and similar to ``C``.
    """
    _require_fov(g, p)
    conv = build_q_conv(g, p)
    op = OperatorMatrix(
        conv.data, "fov", "fov", g.weights, g.weights, g.points, g.points,
        {"name": "s_conv"},
    )
    if symmetric:
        op = op.orthonormal().with_meta(name="s_conv", symmetrized=True)
    return op


def build_s_time(kind, tg: TimeGrid, sg: SpaceGrid, p: PhysicalParams) -> OperatorMatrix:
    """Imaging operator in the time domain, ``Q^time @ S^conv``.

    Equal to ``compose([build_q_time(...), build_s_conv(...)])`` but regrids
    the rows of ``S^conv`` directly instead of multiplying by the (two
    nonzeros per row) interpolation matrix.
    """
    kind = TrajectoryKind.parse(kind)
    _require_fov(sg, p)
    full = tg.window == "full"
    t = tg.points
    y = gamma_g(kind, t, p, full_period=full)
    v = gamma_g_deriv(kind, t, p, full_period=full)
    j, theta = _interpolation_stencil(sg, y)
    C = build_s_conv(sg, p).data
    data = C[j] * ((1.0 - theta) * v)[:, None]
    data += C[j + 1] * (theta * v)[:, None]
    return OperatorMatrix(
        data, "fov", "time", sg.weights, tg.weights, sg.points, t,
        {"name": "s_time", "trajectory": kind.value, "window": tg.window},
    )


def build_s_freq(kind, tg: TimeGrid, sg: SpaceGrid, n_max: int, p: PhysicalParams,
                 path: str = "a") -> OperatorMatrix:
    """Imaging operator in the frequency domain.

    Path ``"a"`` is ``Q^fft @ Q^time @ S^conv`` (any trajectory); path
    ``"b"`` is ``Q^chebT @ Q^emb @ S^conv`` and exists for the cosine
    trajectory only.
    """
    kind = TrajectoryKind.parse(kind)
    if path not in PATHS:
        raise ValueError(f"path must be one of {PATHS}, got {path!r}")
    s_conv = build_s_conv(sg, p)
    if path == "a":
        op = compose([build_q_fft(tg, n_max), build_q_time(kind, tg, sg, p), s_conv])
    else:
        if kind is not TrajectoryKind.COSINE:
            raise ValueError("the Chebyshev path exists only for the cosine trajectory")
        op = compose([build_q_chebt(sg, n_max, p), build_q_emb(sg, p), s_conv])
    return op.with_meta(name="s_freq", trajectory=kind.value, path=path)
