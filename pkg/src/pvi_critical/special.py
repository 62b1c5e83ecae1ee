"""Complex special functions used throughout the package.

Gamma and digamma wrap scipy.special with explicit pole checks.  The
hypergeometric pair F, F1, the half periods and the Weierstrass function
are evaluated from their power / Fourier series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sps

from .errors import ConvergenceError, DomainError, PoleError

SERIES_RADIUS = 0.6
LN2 = math.log(2.0)


@dataclass(frozen=True)
class CoveringPoint:
    """A point of the universal covering of C minus 0.

    The argument is kept unreduced; every logarithm and complex power in the
    package is read from it.
    """

    modulus: float
    argument: float = 0.0

    def __post_init__(self):
        if not (self.modulus > 0.0) or not math.isfinite(self.modulus):
            raise DomainError(f"covering point needs positive modulus, got {self.modulus}")

    @classmethod
    def from_complex(cls, z: complex, near_arg: float | None = None) -> "CoveringPoint":
        """Lift z to the covering; pick the sheet closest to near_arg if given."""
        z = complex(z)
        arg = math.atan2(z.imag, z.real)
        if near_arg is not None:
            arg += 2.0 * math.pi * round((near_arg - arg) / (2.0 * math.pi))
        return cls(abs(z), arg)

    def to_complex(self) -> complex:
        return self.modulus * complex(math.cos(self.argument), math.sin(self.argument))

    def log(self) -> complex:
        return complex(math.log(self.modulus), self.argument)

    def power(self, c: complex) -> complex:
        return complex(np.exp(complex(c) * self.log()))

    def scaled(self, factor: float, turn: float = 0.0) -> "CoveringPoint":
        return CoveringPoint(self.modulus * factor, self.argument + turn)


@dataclass(frozen=True)
class HalfPeriods:
    omega1: complex
    omega2: complex
    tau: complex


def _check_pole(z):
    zr = np.asarray(z)
    bad = (np.abs(zr.imag) == 0) & (zr.real <= 0) & (np.round(zr.real) == zr.real)
    if np.any(bad):
        raise PoleError(f"Gamma/digamma pole at nonpositive integer {z}")


def gamma(z):
    """Complex Gamma function."""
    _check_pole(z)
    z = np.asarray(z, dtype=complex)
    real = z.imag == 0
    with np.errstate(all="ignore"):
        out = np.where(real, sps.gamma(z.real) + 0j, np.exp(sps.loggamma(z)))
    return out[()] if out.ndim == 0 else out


def digamma(z):
    """Complex digamma, psi = Gamma'/Gamma."""
    _check_pole(z)
    z = np.asarray(z, dtype=complex)
    with np.errstate(all="ignore"):
        out = np.where(z.imag == 0, sps.psi(z.real) + 0j, sps.psi(z))
    return out[()] if out.ndim == 0 else out


def rgamma(z):
    """1/Gamma(z), zero at the poles instead of raising."""
    out = sps.rgamma(np.asarray(z, dtype=complex))
    return out[()] if np.ndim(out) == 0 else out


def _series_terms(xmax: float) -> int:
    # coefficients decay like 1/(pi n); tail below 1e-17 relative
    if xmax < 1e-300:
        return 1
    return int(min(400, max(4, math.ceil(-39.0 / math.log(xmax)) + 2)))


def _hyp_coeffs(n: int):
    c = np.empty(n)
    d = np.empty(n)
    c[0] = 1.0
    d[0] = -2.0 * LN2  # psi(1/2) - psi(1)
    for k in range(n - 1):
        c[k + 1] = c[k] * ((k + 0.5) / (k + 1.0)) ** 2
        d[k + 1] = d[k] + 1.0 / (k + 0.5) - 1.0 / (k + 1.0)
    return c, 2.0 * c * d


def _guard_radius(x):
    xmax = float(np.max(np.abs(x))) if np.size(x) else 0.0
    if xmax > SERIES_RADIUS:
        raise DomainError(f"|x|={xmax:.3g} outside series disk |x|<={SERIES_RADIUS}")
    return xmax


def _horner(coeffs, x):
    acc = np.zeros_like(x, dtype=complex)
    for c in coeffs[::-1]:
        acc = acc * x + c
    return acc


def hyp_F(x):
    """F(1/2,1/2,1;x) by its power series."""
    x = np.asarray(x, dtype=complex)
    c, _ = _hyp_coeffs(_series_terms(_guard_radius(x)))
    out = _horner(c, x)
    return out[()] if out.ndim == 0 else out


def hyp_F1(x):
    """Companion series sum of F's coefficients times 2[psi(n+1/2)-psi(n+1)]."""
    x = np.asarray(x, dtype=complex)
    _, c1 = _hyp_coeffs(_series_terms(_guard_radius(x)))
    out = _horner(c1, x)
    return out[()] if out.ndim == 0 else out


def g_function(x):
    """g(x) = F1/F + 4 ln 2, which is O(x)."""
    return hyp_F1(x) / hyp_F(x) + 4.0 * LN2


def half_periods_array(modulus, argument):
    """Vectorized half periods from covering coordinates."""
    modulus = np.asarray(modulus, dtype=float)
    argument = np.asarray(argument, dtype=float)
    x = modulus * np.exp(1j * argument)
    F = hyp_F(x)
    F1 = hyp_F1(x)
    lnx = np.log(modulus) + 1j * argument
    w1 = 0.5 * np.pi * F
    w2 = -0.5j * (F * lnx + F1)
    return w1, w2, w2 / w1


def half_periods(x: CoveringPoint) -> HalfPeriods:
    w1, w2, tau = half_periods_array(x.modulus, x.argument)
    return HalfPeriods(complex(w1), complex(w2), complex(tau))


def _wp_core(u, omega1, tau, deriv: bool, check: bool = True):
    u = np.asarray(u, dtype=complex)
    omega1 = np.asarray(omega1, dtype=complex)
    tau = np.asarray(tau, dtype=complex)
    if np.any(tau.imag <= 0):
        raise DomainError("Im tau must be positive")
    s = u / (4.0 * omega1)
    if check and np.any(np.abs(s.imag) >= tau.imag):
        raise DomainError("|Im(u/(4 omega1))| < Im tau violated")
    # shift by multiples of the second period to centre the strip
    m = np.round(s.imag / tau.imag)
    s = s - m * tau
    s = s - np.round(s.real)
    Z = np.exp(2j * np.pi * s)
    flip = np.abs(Z) > 1.0
    W = np.where(flip, 1.0 / Z, Z)
    sgn = np.where(flip, -1.0, 1.0)
    if np.any(np.abs(1.0 - W) < 1e-300):
        raise PoleError("u is a lattice point of the Weierstrass function")
    q2 = np.exp(2j * np.pi * tau)
    k = np.pi / omega1
    # |W| <= 1, so q2/W carries the slowest geometric rate
    r = float(np.max(np.abs(q2 / W)))
    if r >= 1.0:
        raise ConvergenceError("Fourier series does not converge")
    nmax = 1
    while nmax <= 500 and nmax * nmax * r ** nmax / (1.0 - r) > 1e-17:
        nmax += 1
    if nmax > 500:
        raise ConvergenceError("Fourier series needs more than 500 terms")
    acc = np.zeros(np.broadcast(u, omega1, tau).shape, dtype=complex)
    qn = np.ones_like(q2)
    a = np.ones_like(W)  # (q2 W)^n
    b = np.ones_like(W)  # (q2 / W)^n
    qW, qoW = q2 * W, q2 / W
    for n in range(1, nmax + 1):
        qn = qn * q2
        a = a * qW
        b = b * qoW
        if deriv:
            acc = acc + n * n * (a - b) / (1.0 - qn)
        else:
            acc = acc + n * (qn - 0.5 * (a + b)) / (1.0 - qn)
    if deriv:
        # d/du of the series term and of -4W/(1-W)^2, with dW/du = sgn*i*k/2*W
        series = 2.0 * k**2 * (-0.25j * k) * acc
        lead = 0.25 * k**2 * (-4.0) * (0.5j * k) * W * (1.0 + W) / (1.0 - W) ** 3
        out = sgn * (series + lead)
    else:
        out = -k**2 / 12.0 + 2.0 * k**2 * acc + 0.25 * k**2 * (-4.0 * W / (1.0 - W) ** 2)
    return out[()] if out.ndim == 0 else out


def wp(u, hp: HalfPeriods):
    """Weierstrass function in the u-normalization: returns P(u/2; omega1, omega2)."""
    return _wp_core(u, hp.omega1, hp.tau, deriv=False)


def wp_du(u, hp: HalfPeriods):
    """d/du of wp(u, hp)."""
    return _wp_core(u, hp.omega1, hp.tau, deriv=True)
