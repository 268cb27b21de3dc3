"""Uniform sampling grids for the field of view and the time window."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .physics import PhysicalParams

WINDOWS = ("half", "full")


def trapezoid_weights(n_points: int, h: float) -> np.ndarray:
    w = np.full(n_points, float(h))
    w[0] = w[-1] = 0.5 * h
    w.setflags(write=False)
    return w


@dataclass(frozen=True)
class SpaceGrid:
    """``n_points`` equidistant positions on ``[left, right]``, endpoints included."""

    n_points: int
    left: float
    right: float

    def __post_init__(self):
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ValueError(f"n_points must be an integer >= 2, got {self.n_points!r}")
        if not (np.isfinite(self.left) and np.isfinite(self.right) and self.right > self.left):
            raise ValueError(f"need left < right, got [{self.left}, {self.right}]")

    @classmethod
    def fov(cls, p: PhysicalParams, n_points: int) -> "SpaceGrid":
        """Grid spanning the drive-field FOV ``[-A/G, A/G]``."""
        L = p.fov_halfwidth
        return cls(int(n_points), -L, L)

    @cached_property
    def points(self) -> np.ndarray:
        x = np.linspace(self.left, self.right, self.n_points)
        if self.left == -self.right:
            # exact mirror symmetry; linspace alone is off by an ulp here and there
            x = 0.5 * (x - x[::-1])
        x.setflags(write=False)
        return x

    @property
    def h(self) -> float:
        return (self.right - self.left) / (self.n_points - 1)

    @cached_property
    def weights(self) -> np.ndarray:
        return trapezoid_weights(self.n_points, self.h)

    def spans_fov(self, p: PhysicalParams, rtol: float = 1e-12) -> bool:
        L = p.fov_halfwidth
        return abs(self.left + L) <= rtol * L and abs(self.right - L) <= rtol * L

    def offset_in(self, outer: "SpaceGrid", rtol: float = 1e-9) -> int:
        """Index of this grid's first node inside ``outer``; raises if not aligned."""
        if abs(self.h - outer.h) > rtol * outer.h:
            raise ValueError(f"grid spacings differ: {self.h} vs {outer.h}")
        k = (self.left - outer.left) / outer.h
        ki = int(round(k))
        if abs(k - ki) > 1e-6 or ki < 0 or ki + self.n_points > outer.n_points:
            raise ValueError("inner grid is not an index-aligned contiguous subset of the outer grid")
        return ki


@dataclass(frozen=True)
class TimeGrid:
    """Equidistant time samples on ``[0, T/2]`` (``window="half"``) or ``[0, T]``."""

    n_points: int
    period: float
    window: str = "half"

    def __post_init__(self):
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ValueError(f"n_points must be an integer >= 2, got {self.n_points!r}")
        if self.window not in WINDOWS:
            raise ValueError(f"window must be one of {WINDOWS}, got {self.window!r}")
        if not (np.isfinite(self.period) and self.period > 0):
            raise ValueError("period must be positive")

    @classmethod
    def for_space(cls, sg: SpaceGrid, p: PhysicalParams, oversample: int = 4,
                  window: str = "half") -> "TimeGrid":
        if int(oversample) != oversample or oversample < 1:
            raise ValueError(f"oversample must be an integer >= 1, got {oversample!r}")
        return cls(int(oversample) * sg.n_points, p.T_period, window)

    @property
    def end(self) -> float:
        return self.period / 2 if self.window == "half" else self.period

    @property
    def dt(self) -> float:
        return self.end / (self.n_points - 1)

    @cached_property
    def points(self) -> np.ndarray:
        t = np.linspace(0.0, self.end, self.n_points)
        t.setflags(write=False)
        return t

    @cached_property
    def weights(self) -> np.ndarray:
        return trapezoid_weights(self.n_points, self.dt)
