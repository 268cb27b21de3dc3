"""Drive-field trajectories and the field-free-point map.

Two trajectories ship: ``"cosine"`` (``A cos(w0 t)``) and ``"sawtooth"``
(the triangle wave ``A(1 - 4t/T)`` on the first half period, mirrored on
the second). On the analysis window ``[0, T/2]`` both map time bijectively
onto ``[-A, A]``.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .physics import PhysicalParams

# relative slack on interval checks so grid endpoints survive rounding
_EDGE_TOL = 1e-12


class TrajectoryKind(str, Enum):
    COSINE = "cosine"
    SAWTOOTH = "sawtooth"

    @classmethod
    def parse(cls, value) -> "TrajectoryKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(
                f"unknown trajectory {value!r}; expected one of {[k.value for k in cls]}"
            ) from None


def _check_time(t, upper, what):
    ta = np.asarray(t, dtype=float)
    slack = _EDGE_TOL * upper
    if np.any(~np.isfinite(ta)) or np.any(ta < -slack) or np.any(ta > upper + slack):
        raise ValueError(f"time outside the {what} window [0, {upper}]")
    return np.clip(ta, 0.0, upper)


def _out(t, values):
    return float(values) if np.ndim(t) == 0 else values


def gamma(kind, t, p: PhysicalParams):
    """Drive field ``gamma(t)`` for ``0 <= t <= T``."""
    kind = TrajectoryKind.parse(kind)
    T = p.T_period
    ta = _check_time(t, T, "period")
    if kind is TrajectoryKind.COSINE:
        val = p.A * np.cos(p.omega0 * ta)
    else:
        val = np.where(ta <= T / 2, p.A * (1.0 - 4.0 * ta / T), p.A * (-3.0 + 4.0 * ta / T))
    return _out(t, val)


def gamma_deriv(kind, t, p: PhysicalParams, full_period: bool = False):
    """Time derivative of the drive field.

    The analysis window is ``[0, T/2]``; ``full_period=True`` widens it to
    ``[0, T]`` for whole-period signal plots. The sawtooth kinks at 0 and
    ``T/2`` take the value of the adjacent branch on the half-period window.
    """
    kind = TrajectoryKind.parse(kind)
    T = p.T_period
    upper = T if full_period else T / 2
    ta = _check_time(t, upper, "full-period" if full_period else "analysis")
    if kind is TrajectoryKind.COSINE:
        val = -p.A * p.omega0 * np.sin(p.omega0 * ta)
    else:
        val = np.where(ta <= T / 2, -4.0 * p.A / T, 4.0 * p.A / T)
    return _out(t, val)


def gamma_g(kind, t, p: PhysicalParams, full_period: bool = False):
    """Field-free-point position ``gamma(t) / G``."""
    if not full_period:
        _check_time(t, p.T_period / 2, "analysis")
    return _out(t, np.asarray(gamma(kind, t, p)) / p.G)


def gamma_g_deriv(kind, t, p: PhysicalParams, full_period: bool = False):
    """Velocity ``gamma'(t) / G`` of the field-free point."""
    return _out(t, np.asarray(gamma_deriv(kind, t, p, full_period=full_period)) / p.G)


def gamma_g_inv(kind, y, p: PhysicalParams):
    """Inverse of :func:`gamma_g` on the analysis window; ``y`` must lie in the FOV."""
    kind = TrajectoryKind.parse(kind)
    L = p.fov_halfwidth
    ya = np.asarray(y, dtype=float)
    if np.any(~np.isfinite(ya)) or np.any(np.abs(ya) > L * (1 + _EDGE_TOL)):
        raise ValueError(f"position outside the field of view [-{L}, {L}]")
    u = np.clip(ya / L, -1.0, 1.0)
    if kind is TrajectoryKind.COSINE:
        val = np.arccos(u) / p.omega0
    else:
        val = (1.0 - u) * p.T_period / 4.0
    return _out(y, val)
