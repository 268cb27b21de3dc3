"""Phantoms, forward simulation, noise, and spectral regularized reconstruction."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .grids import SpaceGrid
from .operator import OperatorMatrix
from .spectral import NOISE_FLOOR_FACTOR

PHANTOM_KINDS = ("gaussian", "rect", "two_bumps")
# a gaussian counts as supported on center +- this many widths
GAUSSIAN_SUPPORT = 3.0
# endpoint values below this fraction of the peak count as "supported inside the FOV"
SUPPORT_RTOL = 1e-6


@dataclass(frozen=True, eq=False)
class Phantom:
    """Particle density sampled on a space grid."""

    grid: SpaceGrid
    values: np.ndarray
    notes: tuple = ()
    check_support: bool = True

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.n_points,):
            raise ValueError(f"phantom needs {self.grid.n_points} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("phantom values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        notes = tuple(self.notes)
        edge = max(abs(v[0]), abs(v[-1]))
        if self.check_support and edge > SUPPORT_RTOL * np.max(np.abs(v)):
            msg = "phantom is nonzero at a FOV endpoint; the analysis assumes support inside the FOV"
            warnings.warn(msg, stacklevel=3)
            notes = notes + (msg,)
        object.__setattr__(self, "notes", notes)


@dataclass(frozen=True, eq=False)
class Signal:
    """Voltage samples (``kind="time"``) or sine coefficients (``kind="freq"``)."""

    kind: str
    samples: np.ndarray
    coords: Optional[np.ndarray] = None
    noise_level: float = 0.0
    seed: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("time", "freq"):
            raise ValueError(f"signal kind must be 'time' or 'freq', got {self.kind!r}")
        s = np.array(self.samples, dtype=float)
        if s.ndim != 1 or not np.all(np.isfinite(s)):
            raise ValueError("signal samples must be a finite vector")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)
        if self.coords is None:
            coords = np.arange(1.0, s.size + 1) if self.kind == "freq" else None
        else:
            coords = np.array(self.coords, dtype=float)
            if coords.shape != s.shape:
                raise ValueError("signal coords and samples differ in length")
        if coords is not None:
            coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)


def _as_list(x, n=None):
    xs = list(np.atleast_1d(np.asarray(x, dtype=float)))
    if n is not None and len(xs) == 1:
        xs = xs * n
    return xs


def make_phantom(kind: str, centers, widths, amplitudes, grid: SpaceGrid) -> Phantom:
    """Analytic density profile sampled on ``grid``.

    ``gaussian``: ``amp * exp(-(x - c)^2 / (2 w^2))``. ``rect``: ``amp`` on
    ``|x - c| <= w / 2`` (``w`` is the full width). ``two_bumps``: sum of two
    gaussians, so ``centers``/``widths``/``amplitudes`` take two entries
    (a single width or amplitude is shared).
    """
    if kind not in PHANTOM_KINDS:
        raise ValueError(f"unknown phantom kind {kind!r}; expected one of {PHANTOM_KINDS}")
    n_bumps = 2 if kind == "two_bumps" else 1
    cs = _as_list(centers)
    ws = _as_list(widths, len(cs))
    amps = _as_list(amplitudes, len(cs))
    if not (len(cs) == len(ws) == len(amps) == n_bumps):
        raise ValueError(f"{kind} phantom takes {n_bumps} center/width/amplitude entries")
    x = grid.points
    values = np.zeros_like(x)
    for c, w, amp in zip(cs, ws, amps):
        if not w > 0:
            raise ValueError(f"phantom widths must be positive, got {w}")
        reach = w / 2 if kind == "rect" else GAUSSIAN_SUPPORT * w
        if c - reach < grid.left or c + reach > grid.right:
            raise ValueError(
                f"phantom support [{c - reach}, {c + reach}] leaves the grid "
                f"[{grid.left}, {grid.right}]"
            )
        if kind == "rect":
            values += np.where(np.abs(x - c) <= w / 2, amp, 0.0)
        else:
            values += amp * np.exp(-((x - c) ** 2) / (2 * w * w))
    return Phantom(grid, values)


def forward(c: Phantom, op: OperatorMatrix) -> Signal:
    """Signal ``op @ c``; the operator must act on the phantom's FOV grid."""
    if op.domain_tag != "fov" or op.cols != c.grid.n_points:
        raise ValueError(
            f"operator maps {op.domain_tag!r} with {op.cols} columns; "
            f"phantom lives on a {c.grid.n_points}-point FOV grid"
        )
    if op.codomain_tag not in ("time", "freq"):
        raise ValueError(f"forward needs a time or freq operator, got codomain {op.codomain_tag!r}")
    return Signal(op.codomain_tag, op.data @ c.values, op.codomain_coords)


def add_noise(s: Signal, sigma: float, seed: int) -> Signal:
    """Add iid gaussian noise of standard deviation ``sigma * max|s|``.

    Uses numpy's PCG64 bit generator seeded with ``seed``, so the result is
    bit-identical across runs and platforms.
    """
    if not sigma >= 0:
        raise ValueError(f"noise level must be non-negative, got {sigma}")
    scale = float(sigma) * float(np.max(np.abs(s.samples), initial=0.0))
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    noise = rng.standard_normal(s.samples.size)
    samples = s.samples + scale * noise if sigma > 0 else s.samples.copy()
    return Signal(s.kind, samples, s.coords, float(sigma), int(seed))


class SVDFactors:
    """Thin SVD of an operator, shared read-only between reconstructions."""

    def __init__(self, op):
        data = op.data if isinstance(op, OperatorMatrix) else np.asarray(op, dtype=float)
        try:
            U, s, Vt = np.linalg.svd(data, full_matrices=False)
        except np.linalg.LinAlgError:
            import scipy.linalg

            U, s, Vt = scipy.linalg.svd(data, full_matrices=False, lapack_driver="gesvd")
        for a in (U, s, Vt):
            a.setflags(write=False)
        self.U, self.s, self.Vt = U, s, Vt

    @property
    def numerical_rank(self) -> int:
        if not self.s.size:
            return 0
        return int(np.count_nonzero(self.s > NOISE_FLOOR_FACTOR * self.s[0]))


def _domain_grid(op: OperatorMatrix, grid: Optional[SpaceGrid]) -> SpaceGrid:
    if grid is not None:
        if grid.n_points != op.cols:
            raise ValueError("grid size does not match operator columns")
        return grid
    if op.domain_coords is None:
        raise ValueError("operator carries no domain coordinates; pass grid=")
    x = op.domain_coords
    return SpaceGrid(x.size, float(x[0]), float(x[-1]))


def _check_signal(op: OperatorMatrix, s: Signal):
    if s.kind != op.codomain_tag or s.samples.size != op.rows:
        raise ValueError(
            f"signal ({s.kind}, {s.samples.size} samples) does not match operator "
            f"codomain ({op.codomain_tag}, {op.rows} rows)"
        )


def _filtered_solve(f: SVDFactors, b: np.ndarray, filt: np.ndarray) -> np.ndarray:
    # b may hold several right-hand sides as columns
    k = filt.size
    proj = f.U[:, :k].T @ b
    return f.Vt[:k].T @ (filt.reshape((k,) + (1,) * (b.ndim - 1)) * proj)


def tsvd_solve(f: SVDFactors, b: np.ndarray, k: int) -> np.ndarray:
    return _filtered_solve(f, b, 1.0 / f.s[:k])


def tikhonov_solve(f: SVDFactors, b: np.ndarray, lam: float) -> np.ndarray:
    return _filtered_solve(f, b, f.s / (f.s**2 + lam))


def reconstruct_tsvd(op: OperatorMatrix, s: Signal, k: int, *, svd: Optional[SVDFactors] = None,
                     grid: Optional[SpaceGrid] = None) -> Phantom:
    """Truncated-SVD solution ``sum_{i<=k} (u_i . s / sigma_i) v_i``."""
    _check_signal(op, s)
    f = svd or SVDFactors(op)
    k = int(k)
    if not 1 <= k <= f.s.size:
        raise ValueError(f"rank k must lie in [1, {f.s.size}], got {k}")
    notes = ()
    if k > f.numerical_rank:
        msg = f"k={k} exceeds the numerical rank {f.numerical_rank}; result is noise-dominated"
        warnings.warn(msg, stacklevel=2)
        notes = (msg,)
    return Phantom(_domain_grid(op, grid), tsvd_solve(f, s.samples, k), notes, check_support=False)


def reconstruct_tikhonov(op: OperatorMatrix, s: Signal, lam: float, *,
                         svd: Optional[SVDFactors] = None,
                         grid: Optional[SpaceGrid] = None) -> Phantom:
    """Minimizer of ``|op c - s|^2 + lam |c|^2`` via SVD filter factors."""
    _check_signal(op, s)
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    f = svd or SVDFactors(op)
    return Phantom(_domain_grid(op, grid), tikhonov_solve(f, s.samples, float(lam)),
                   check_support=False)


def rel_error(c: Phantom, c_hat: Phantom) -> float:
    """``|c - c_hat| / |c|`` in the trapezoid-weighted L2 norm (``|c_hat|`` if ``c = 0``)."""
    if c.grid != c_hat.grid:
        raise ValueError("phantoms live on different grids")
    w = c.grid.weights
    denom = float(np.sqrt(np.sum(w * c.values**2)))
    num = float(np.sqrt(np.sum(w * (c.values - c_hat.values) ** 2)))
    return num if denom == 0.0 else num / denom


def weighted_norm(values: np.ndarray, weights: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.asarray(weights) * np.asarray(values) ** 2)))
