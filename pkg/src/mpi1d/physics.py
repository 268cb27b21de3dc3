"""Langevin magnetization model and the convolution kernel it induces."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

# Below this the closed forms of L and L' lose precision to cancellation
# (relative error ~ eps / x**2); the power series is used instead.
SERIES_CUTOFF = 1.0
_SERIES_TERMS = 20
# L(x) = sum_k c_k x**(2k-1) with c_k = 4**k B_2k / (2k)!, convergent for |x| < pi


def _bernoulli_exact(n: int) -> list:
    """Bernoulli numbers ``B_0 .. B_n`` as exact fractions (Akiyama-Tanigawa)."""
    a = [Fraction(0)] * (n + 1)
    out = []
    for m in range(n + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        out.append(a[0])
    # this recurrence yields B_1 = +1/2; only even indices are used below
    return out


_B = _bernoulli_exact(2 * _SERIES_TERMS)
_L_COEF = np.array([float(4**k * _B[2 * k] / math.factorial(2 * k))
                    for k in range(1, _SERIES_TERMS + 1)])
_DL_COEF = np.arange(1, 2 * _SERIES_TERMS, 2) * _L_COEF


@dataclass(frozen=True)
class PhysicalParams:
    """Scanner and particle constants of the 1D model.

    Parameters
    ----------
    A : float
        Drive-field amplitude.
    G : float
        Selection-field gradient.
    T_period : float
        Drive period.
    a : float
        Magnetization scale (mu0 * sigma0 * m).
    beta : float
        Langevin argument scale (mu0 * m / (kB * temperature)).
    """

    A: float
    G: float
    T_period: float
    a: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        for name in ("A", "G", "T_period", "a", "beta"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a finite positive number, got {value!r}")

    @property
    def omega0(self) -> float:
        return 2.0 * math.pi / self.T_period

    @property
    def fov_halfwidth(self) -> float:
        return self.A / self.G

    @property
    def beta_a(self) -> float:
        """Dimensionless product beta*A, the only quantity the decay law depends on."""
        return self.beta * self.A


def _scalar_or_array(x, out):
    return float(out) if np.ndim(x) == 0 else out


def langevin(x):
    """Langevin function ``coth(x) - 1/x``, with ``L(0) = 0``."""
    xa = np.asarray(x, dtype=float)
    out = np.empty_like(xa)
    small = np.abs(xa) < SERIES_CUTOFF
    xs = xa[small]
    out[small] = xs * np.polynomial.polynomial.polyval(xs * xs, _L_COEF)
    xl = xa[~small]
    out[~small] = 1.0 / np.tanh(xl) - 1.0 / xl
    return _scalar_or_array(x, out)


def langevin_deriv(x):
    """Derivative ``1/x**2 - 1/sinh(x)**2`` of the Langevin function; 1/3 at 0."""
    xa = np.asarray(x, dtype=float)
    out = np.empty_like(xa)
    small = np.abs(xa) < SERIES_CUTOFF
    out[small] = np.polynomial.polynomial.polyval(xa[small] ** 2, _DL_COEF)
    xl = xa[~small]
    with np.errstate(over="ignore"):
        # sinh overflows to inf for |x| > ~710, which correctly sends the second term to 0
        out[~small] = 1.0 / xl**2 - 1.0 / np.sinh(xl) ** 2
    return _scalar_or_array(x, out)


def kernel_mg_deriv(x, p: PhysicalParams):
    """Convolution kernel ``a*beta*G*L'(beta*G*x)``."""
    bg = p.beta * p.G
    return p.a * bg * langevin_deriv(bg * np.asarray(x, dtype=float))


def langevin_deriv_fourier(omega):
    """Unitary Fourier transform of ``L'``.

    Closed form ``sqrt(pi/2) * (w*coth(pi*w/2) - |w|)``, evaluated as
    ``sqrt(pi/2) * 2|w| / expm1(pi|w|)`` which has no cancellation for large
    ``|w|`` and whose value at 0 is the limit ``sqrt(2/pi)``.
    """
    wa = np.abs(np.asarray(omega, dtype=float))
    out = np.empty_like(wa)
    zero = wa == 0.0
    out[zero] = math.sqrt(2.0 / math.pi)
    wz = wa[~zero]
    with np.errstate(over="ignore"):
        out[~zero] = math.sqrt(math.pi / 2.0) * 2.0 * wz / np.expm1(math.pi * wz)
    return _scalar_or_array(omega, out)


def kernel_fourier(omega, p: PhysicalParams):
    """Fourier transform of the kernel: ``a * F[L'](omega / (beta*G))``."""
    bg = p.beta * p.G
    return p.a * langevin_deriv_fourier(np.asarray(omega, dtype=float) / bg)
