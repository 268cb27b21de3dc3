"""Singular-value analysis of the assembled operators.

Exponential decay of the core operator's spectrum follows the law
``ln sigma_n ~ -n * r`` with ``r = pi * K(sech(beta*A)) / K(tanh(beta*A))``
(:func:`widom_rate`), where ``K`` is the complete elliptic integral of the
first kind (:func:`elliptic_k`).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np
import scipy.linalg

from .operator import OperatorMatrix
from .physics import PhysicalParams

EPS = float(np.finfo(float).eps)
NOISE_FLOOR_FACTOR = 1e3 * EPS
# widom_rate switches to the logarithmic asymptote of K past this beta*A
LARGE_BETA_A = 18.0


class NoiseFloorError(ValueError):
    """A decay fit window reaches into singular values dominated by rounding."""


class DecayFit(NamedTuple):
    n0: int
    n1: int
    slope: float
    intercept: float
    residual: float


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    """Singular values in decreasing order plus where they came from."""

    sigmas: np.ndarray
    n_points: Optional[int] = None
    params: Optional[PhysicalParams] = None
    operator_tag: str = ""
    fit: Optional[DecayFit] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        s = np.array(self.sigmas, dtype=float)
        if s.ndim != 1 or np.any(~np.isfinite(s)) or np.any(s < 0):
            raise ValueError("sigmas must be a finite non-negative vector")
        if np.any(np.diff(s) > 0):
            raise ValueError("sigmas must be sorted in decreasing order")
        s.setflags(write=False)
        object.__setattr__(self, "sigmas", s)

    def __len__(self):
        return self.sigmas.size

    @property
    def noise_floor(self) -> float:
        return NOISE_FLOOR_FACTOR * (self.sigmas[0] if self.sigmas.size else 0.0)

    @property
    def trusted(self) -> np.ndarray:
        """Mask of values above the numerical noise floor."""
        return self.sigmas > self.noise_floor

    @property
    def floor_index(self) -> int:
        """1-based index of the first untrusted value (``len + 1`` if none)."""
        bad = np.flatnonzero(~self.trusted)
        return int(bad[0]) + 1 if bad.size else self.sigmas.size + 1

    def top(self, m: int) -> "SpectrumReport":
        return SpectrumReport(self.sigmas[:m], self.n_points, self.params, self.operator_tag,
                              self.fit, dict(self.meta))


def _svdvals(data: np.ndarray, overwrite: bool = False) -> np.ndarray:
    try:
        return scipy.linalg.svdvals(data, overwrite_a=overwrite, check_finite=False)
    except np.linalg.LinAlgError:
        # gesdd occasionally fails to converge; gesvd is slower but more robust
        return scipy.linalg.svd(data, compute_uv=False, lapack_driver="gesvd", check_finite=False)


def singular_values(A, *, orthonormal: bool = False, top: Optional[int] = None,
                    params: Optional[PhysicalParams] = None) -> SpectrumReport:
    """All singular values of ``A`` (an :class:`OperatorMatrix` or 2D array).

    With ``orthonormal=True`` the spectrum is that of the operator between
    the quadrature-weighted discrete L2 spaces, i.e. of
    ``diag(sqrt(wc)) A diag(1/sqrt(wd))``.
    """
    tag = ""
    n_points = None
    if isinstance(A, OperatorMatrix):
        tag = str(A.meta.get("name", f"{A.domain_tag}->{A.codomain_tag}"))
        n_points = A.cols
        if orthonormal:
            if A.domain_weights is None or A.codomain_weights is None:
                raise ValueError("orthonormal spectrum needs quadrature weights on the operator")
            data = A.data * np.sqrt(A.codomain_weights)[:, None]
            data /= np.sqrt(A.domain_weights)[None, :]
            s = _svdvals(data, overwrite=True)
        else:
            s = _svdvals(A.data)
    else:
        data = np.asarray(A, dtype=float)
        if data.ndim != 2:
            raise ValueError("expected a two-dimensional matrix")
        if not np.all(np.isfinite(data)):
            raise ValueError("matrix has non-finite entries")
        n_points = data.shape[1]
        s = _svdvals(data)
    s = np.sort(np.abs(s))[::-1]
    if top is not None:
        s = s[: int(top)]
    return SpectrumReport(s, n_points, params, tag, meta={"orthonormal": orthonormal})


def _agm(a: float, b: float) -> float:
    for _ in range(64):
        if abs(a - b) <= 2 * EPS * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def _elliptic_k_from_complement(kp: float) -> float:
    """``K(k)`` given the complementary modulus ``k' = sqrt(1 - k**2) > 0``."""
    return math.pi / (2.0 * _agm(1.0, kp))


def elliptic_k(t: float) -> float:
    """Complete elliptic integral of the first kind, modulus convention.

    ``K(t) = int_0^{pi/2} (1 - t^2 sin^2 th)^(-1/2) dth`` computed as
    ``pi / (2 * AGM(1, sqrt(1 - t^2)))``.
    """
    t = float(t)
    if not math.isfinite(t) or t < 0.0 or t >= 1.0:
        raise ValueError(f"elliptic_k needs 0 <= t < 1 (K diverges at 1), got {t}")
    return _elliptic_k_from_complement(math.sqrt((1.0 - t) * (1.0 + t)))


def widom_rate(beta_times_A: float) -> float:
    """Predicted per-index decay rate ``pi * K(sech(bA)) / K(tanh(bA))``."""
    x = float(beta_times_A)
    if not math.isfinite(x) or x <= 0:
        raise ValueError(f"beta*A must be positive, got {beta_times_A}")
    sech = 1.0 / math.cosh(x) if x < 700 else 0.0
    # K(sech) needs complement tanh; K(tanh) needs complement sech
    k_num = _elliptic_k_from_complement(math.tanh(x))
    if x >= LARGE_BETA_A:
        # K(k) ~ ln(4/k') as k' -> 0; relative error O(k'^2), below 1e-15 here
        k_den = math.log(4.0) + x + math.log1p(math.exp(-2.0 * x)) - math.log(2.0)
    else:
        k_den = _elliptic_k_from_complement(sech)
    return math.pi * k_num / k_den


def fit_decay_rate(rep: SpectrumReport, n0: int, n1: int) -> DecayFit:
    """Least-squares line through ``(n, ln sigma_n)`` for ``n0 <= n <= n1`` (1-based).

    ``residual`` is the root-mean-square deviation of ``ln sigma_n`` from the
    fitted line.
    """
    n0, n1 = int(n0), int(n1)
    if not 1 <= n0 < n1 <= len(rep):
        raise ValueError(f"need 1 <= n0 < n1 <= {len(rep)}, got {n0}:{n1}")
    floor = rep.floor_index
    if n1 >= floor:
        raise NoiseFloorError(
            f"fit window {n0}:{n1} reaches the numerical noise floor at index {floor} "
            f"(sigma <= {rep.noise_floor:.3e})"
        )
    n = np.arange(n0, n1 + 1, dtype=float)
    y = np.log(rep.sigmas[n0 - 1:n1])
    slope, intercept = np.polyfit(n, y, 1)
    resid = y - (slope * n + intercept)
    return DecayFit(n0, n1, float(slope), float(intercept), float(np.sqrt(np.mean(resid**2))))


@dataclass(frozen=True)
class ConvergenceTable:
    """Top singular values for each grid size and their successive deviations.

    ``deviations[i]`` is the max relative deviation between the spectra for
    ``n_list[i]`` and ``n_list[i + 1]`` over the top ``m_top`` indices that are
    above the noise floor in both (all indices if ``trusted_only`` was False).
    """

    n_list: tuple
    reports: tuple
    deviations: tuple
    m_top: int
    trusted_only: bool = True


def max_relative_deviation(coarse: SpectrumReport, fine: SpectrumReport, m_top: int,
                           trusted_only: bool = True) -> float:
    m = min(m_top, len(coarse), len(fine))
    if m == 0:
        return 0.0
    a, b = coarse.sigmas[:m], fine.sigmas[:m]
    mask = np.ones(m, dtype=bool)
    if trusted_only:
        mask = coarse.trusted[:m] & fine.trusted[:m]
    if not mask.any():
        return float("nan")
    return float(np.max(np.abs(a[mask] - b[mask]) / b[mask]))


def operator_spectrum(which: str, p: PhysicalParams, n_points: int, *, trajectory="cosine",
                      oversample: int = 4, window: str = "half", n_max: Optional[int] = None,
                      top: Optional[int] = None) -> SpectrumReport:
    """Orthonormal-coordinate spectrum of ``"conv"``, ``"time"`` or ``"freq"``."""
    from . import assembly
    from .grids import SpaceGrid, TimeGrid

    sg = SpaceGrid.fov(p, n_points)
    if which == "conv":
        op = assembly.build_s_conv(sg, p, symmetric=True)
        rep = singular_values(op, top=top, params=p)
    elif which in ("time", "freq"):
        tg = TimeGrid.for_space(sg, p, oversample, window)
        if which == "time":
            op = assembly.build_s_time(trajectory, tg, sg, p)
        else:
            op = assembly.build_s_freq(trajectory, tg, sg, n_max or 4 * n_points, p)
        rep = singular_values(op, orthonormal=True, top=top, params=p)
        del op
    else:
        raise ValueError(f"unknown operator {which!r}; expected conv, time or freq")
    return SpectrumReport(rep.sigmas, n_points, p, which, meta=rep.meta)


def convergence_study(kind, p: PhysicalParams, n_list: Sequence[int], m_top: int, *,
                      operator: str = "conv", oversample: int = 4, trusted_only: bool = True,
                      n_jobs: int = 1) -> ConvergenceTable:
    """Spectra of one operator on a sequence of refining grids.

    ``kind`` is the trajectory (ignored for ``operator="conv"``). Entries of
    ``n_list`` run independently and may be spread over ``n_jobs`` threads.
    """
    n_list = tuple(int(n) for n in n_list)
    if any(b <= a for a, b in zip(n_list[:-1], n_list[1:])):
        raise ValueError("n_list must be strictly increasing")
    m_top = int(m_top)
    if m_top < 0:
        raise ValueError("m_top must be non-negative")
    if m_top == 0 or not n_list:
        return ConvergenceTable(n_list, tuple(SpectrumReport(np.empty(0)) for _ in n_list), (),
                                m_top, trusted_only)

    def one(n):
        return operator_spectrum(operator, p, n, trajectory=kind, oversample=oversample,
                                 top=m_top)

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            reports = tuple(pool.map(one, n_list))
    else:
        reports = tuple(one(n) for n in n_list)
    devs = tuple(max_relative_deviation(a, b, m_top, trusted_only)
                 for a, b in zip(reports[:-1], reports[1:]))
    return ConvergenceTable(n_list, reports, devs, m_top, trusted_only)
