"""Critical behavior near x = 0, 1, infinity: domains, spiral paths and leading terms."""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .connection import CriticalData
from .errors import DomainError
from .special import CoveringPoint


@dataclass(frozen=True)
class DomainSpecD:
    """Spiral domain.  For point='infinity' epsilon plays the role of 1/M."""

    epsilon: float
    theta1: float
    theta2: float
    sigma_tilde: float
    sigma: complex
    point: str = "zero"

    def __post_init__(self):
        if not 0 < self.sigma_tilde < 1:
            raise DomainError("sigma_tilde must lie in (0, 1)")
        if self.epsilon <= 0:
            raise DomainError("epsilon must be positive")
        object.__setattr__(self, "sigma", complex(self.sigma))


@dataclass(frozen=True)
class StripB:
    sigma: complex
    a: complex
    theta2: float
    sigma_tilde: float
    c_constant: float = 1.0


@dataclass(frozen=True)
class SpiralPath:
    start: CoveringPoint
    Sigma: float
    sigma: complex
    samples: tuple


def map_to_one(x: CoveringPoint, near_arg: float | None = None) -> CoveringPoint:
    """t = 1 - x.  The argument is the principal one unless near_arg picks a sheet."""
    return CoveringPoint.from_complex(1 - x.to_complex(), near_arg)


def map_to_infinity(x: CoveringPoint) -> CoveringPoint:
    """t = 1/x, argument transported exactly."""
    return CoveringPoint(1.0 / x.modulus, -x.argument)


def y_from_one(yhat: complex, dyhat: complex = 0j) -> tuple[complex, complex]:
    """y(x) = 1 - yhat(1 - x) and dy/dx."""
    return 1 - yhat, dyhat


def y_from_infinity(t: CoveringPoint, yhat: complex, dyhat: complex = 0j) -> tuple[complex, complex]:
    """y(x) = yhat(t)/t with t = 1/x, and dy/dx = yhat - t yhat'."""
    tc = t.to_complex()
    return yhat / tc, yhat - tc * dyhat


def _local_point(x: CoveringPoint, point: str) -> CoveringPoint:
    if point == "zero":
        return x
    if point == "one":
        return map_to_one(x)
    if point == "infinity":
        return map_to_infinity(x)
    raise DomainError(f"unknown point {point!r}")


def domain_contains(x: CoveringPoint, d: DomainSpecD) -> bool:
    t = _local_point(x, d.point)
    if t.modulus >= d.epsilon:
        return False
    s = d.sigma
    if abs(s.imag) == 0:
        return 0 <= s.real < 1
    # |t^s| = |t|^{Re s} e^{-Im s arg t}
    log_abs = s.real * math.log(t.modulus) - s.imag * t.argument
    lower = -d.theta1 * s.imag + d.sigma_tilde * math.log(t.modulus)
    upper = -d.theta2 * s.imag
    return lower <= log_abs <= upper


def strip_contains(x: CoveringPoint, b: StripB) -> bool:
    if x.modulus >= 1:
        return False
    s = b.sigma
    lhs = s.real * math.log(x.modulus) + b.theta2 * s.imag
    mid = s.imag * x.argument
    rhs = (s.real - 1) * math.log(x.modulus) + math.log(b.c_constant)
    return lhs <= mid < rhs


def spiral_slope(sigma: complex, Sigma: float) -> float:
    sigma = complex(sigma)
    if sigma.imag == 0:
        return 0.0
    return (sigma.real - Sigma) / sigma.imag


def make_spiral(start: CoveringPoint, Sigma: float, sigma, n: int,
                floor: float | None = None, sigma_tilde: float = 1.0) -> SpiralPath:
    """n samples with geometrically decreasing modulus along the spiral family."""
    if not 0 <= Sigma <= sigma_tilde or Sigma >= 1:
        raise DomainError(f"Sigma={Sigma} must satisfy 0 <= Sigma <= sigma_tilde < 1")
    if n < 2:
        raise DomainError("need at least two samples")
    floor = floor if floor is not None else start.modulus * 1e-6
    k = spiral_slope(sigma, Sigma)
    rs = np.geomspace(start.modulus, floor, n)
    samples = tuple(CoveringPoint(float(r), start.argument + k * math.log(r / start.modulus)) for r in rs)
    return SpiralPath(start, Sigma, complex(sigma), samples)


def _leading_local(t: CoveringPoint, sigma: complex, a: complex) -> tuple[complex, complex]:
    tc = t.to_complex()
    if sigma == 0:
        # the three powers merge; the amplitude of the degenerate case is the full slope
        return a * tc, a
    ts = t.power(sigma)
    y = a * tc / ts + 0.5 * tc + tc * ts / (16 * a)
    dy = a * (1 - sigma) / ts + 0.5 + (1 + sigma) * ts / (16 * a)
    return y, dy


def eval_leading(x: CoveringPoint, cd: CriticalData, warn_tol: float = 0.5) -> tuple[complex, complex]:
    """Three-term leading form a t^(1-s) + t/2 + t^(1+s)/(16a) and its derivative, transported to x."""
    if cd.a == 0:
        raise DomainError("a must be nonzero")
    t = _local_point(x, cd.point)
    s = cd.sigma
    if s != 0 and max(abs(t.power(s)), abs(t.power(-s))) * t.modulus > warn_tol:
        warnings.warn("three-term form evaluated outside its small-|x| regime", stacklevel=2)
    yh, dyh = _leading_local(t, s, cd.a)
    if cd.point == "zero":
        return yh, dyh
    if cd.point == "one":
        return y_from_one(yh, dyh)
    return y_from_infinity(t, yh, dyh)


def oscillatory_amplitude(x: CoveringPoint, cd: CriticalData) -> complex:
    """Amplitude a(x) on a Sigma = 0 path, where |x^sigma| stays constant."""
    s = cd.sigma
    if s.imag == 0:
        raise DomainError("oscillatory amplitude needs Im sigma != 0")
    xs = x.power(s)
    return cd.a * (1 + xs / (2 * cd.a) + xs * xs / (16 * cd.a**2))


def eval_oscillatory(x: CoveringPoint, cd: CriticalData, path: SpiralPath | None = None) -> complex:
    if path is not None:
        if path.Sigma != 0:
            raise DomainError("oscillatory form needs a Sigma = 0 path")
        if abs(complex(path.sigma) - cd.sigma) > 1e-12:
            raise DomainError("path built for a different sigma")
    return oscillatory_amplitude(x, cd) * x.power(1 - cd.sigma)


def eval_oscillatory_sin(x: CoveringPoint, cd: CriticalData) -> complex:
    """Same leading behavior written as sin^2(i s/2 ln x - i/2 ln(4a) - pi/2) x."""
    arg = 0.5j * cd.sigma * x.log() - 0.5j * cmath.log(4 * cd.a) - math.pi / 2
    return cmath.sin(arg) ** 2 * x.to_complex()
