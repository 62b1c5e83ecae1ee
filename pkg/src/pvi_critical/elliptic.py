"""Elliptic representation y = P(nu1 w1 + nu2 w2 + v) + (1 + x)/3.

The correction v(x) solves x(1-x)v'' + (1-2x)v' - v/4 = alpha/(2x(1-x)) dP/du,
rewritten as the integral system  x w' = Phi + Psi,  x v' = w  with v, w -> 0
as x -> 0 along the path L(x).  It is found by successive approximation.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev as C

from .errors import ConvergenceError, DegenerateError, DomainError, PoleError
from .monodromy import MonodromyTriple, mu_value
from .special import CoveringPoint, half_periods, half_periods_array, hyp_F, hyp_F1, wp, LN2

LOG16 = 4 * LN2
COROLLARY_KINDS = ("term_nu2", "term_x", "term_2_minus_nu2", "oscillatory_V0", "oscillatory_V2", "balanced_V1")


class SingularLocusWarning(UserWarning):
    pass


@dataclass(frozen=True)
class EllipticData:
    nu1: complex
    nu2: complex

    def __post_init__(self):
        object.__setattr__(self, "nu1", complex(self.nu1))
        object.__setattr__(self, "nu2", complex(self.nu2))
        n2 = self.nu2
        if abs(n2.imag) == 0 and (n2.real <= 0 or n2.real >= 2):
            raise DomainError("nu2 must avoid (-inf, 0] and [2, +inf)")

    @property
    def A(self) -> complex:
        return cmath.exp(-1j * math.pi * self.nu1) / 16 ** (2 - self.nu2)

    @property
    def B(self) -> complex:
        return cmath.exp(1j * math.pi * self.nu1) / 16**self.nu2

    def critical_data(self):
        """sigma = 1 - nu2, a = -(1/4) e^{i pi nu1} 16^{1 - nu2}."""
        from .connection import CriticalData

        return CriticalData(1 - self.nu2, -0.25 * cmath.exp(1j * math.pi * self.nu1) * 16 ** (1 - self.nu2))

    @classmethod
    def from_critical_data(cls, sigma, a) -> "EllipticData":
        nu2 = 1 - complex(sigma)
        nu1 = cmath.log(-4 * complex(a) / 16 ** (1 - nu2)) / (1j * math.pi)
        # e^{i pi nu1} only fixes nu1 modulo 2
        nu1 -= 2 * math.floor(nu1.real / 2)
        return cls(nu1, nu2)


@dataclass(frozen=True)
class DomainSpecScriptD:
    r: float
    ed: EllipticData

    def __post_init__(self):
        if not 0 < self.r < 1:
            raise DomainError("r must lie in (0, 1)")


@dataclass
class VSolution:
    v: complex
    w: complex
    iterations: int
    bound_ratio: float
    increments: tuple = ()
    path_t: np.ndarray | None = None
    path_v: np.ndarray | None = None
    path_w: np.ndarray | None = None


def scales(x: CoveringPoint, ed: EllipticData) -> tuple[complex, complex]:
    """(A x^{2-nu2}, B x^{nu2}) with covering powers."""
    return ed.A * x.power(2 - ed.nu2), ed.B * x.power(ed.nu2)


def script_domain_contains(x: CoveringPoint, d: DomainSpecScriptD) -> bool:
    if x.modulus >= d.r:
        return False
    ya, zb = scales(x, d.ed)
    return abs(ya) < d.r and abs(zb) < d.r


def _alpha(mu) -> complex:
    return (2 * mu_value(mu) - 1) ** 2 / 2


def _F_series(xc, y, z, nu2, w1=None, g=None):
    """The q-series equal to dP/du after the substitutions defining y and z."""
    xc = np.asarray(xc, dtype=complex)
    y = np.asarray(y, dtype=complex)
    z = np.asarray(z, dtype=complex)
    if w1 is None:
        F = hyp_F(xc)
        w1 = 0.5 * np.pi * F
        g = hyp_F1(xc) / F + LOG16
    k = np.pi / w1
    eg = np.exp(g)
    Z = np.exp(nu2 * g) * z
    Y = np.exp((2 - nu2) * g) * y  # equals q^2 / Z
    Q = (eg * xc / 16) ** 2  # q^2 = e^{2 pi i tau}
    if np.any(np.abs(Z) >= 1) or np.any(np.abs(Y) >= 1) or np.any(np.abs(Q) >= 1):
        raise DomainError("arguments outside the convergence region of the q-series")
    r = float(np.max(np.maximum(np.abs(Y), np.abs(Q * Z))))
    nmax = 1
    while nmax < 500 and nmax * nmax * r**nmax / max(1e-300, 1 - r) > 1e-18:
        nmax += 1
    acc = np.zeros(np.broadcast(xc, y, z).shape, dtype=complex)
    Yn = np.ones_like(acc)
    Zn = np.ones_like(acc)
    Qn = np.ones_like(acc)
    for n in range(1, nmax + 1):
        Yn = Yn * Y
        Zn = Zn * Z * Z
        Qn = Qn * Q
        acc = acc + n * n * Yn * (Zn - 1) / (1 - Qn)
    lead = 4j * (k / 2) ** 3 * (Z * Z + Z) / (Z - 1) ** 3
    return (k**3 / 2j) * acc + lead


def script_F(x: complex, y: complex, z: complex, nu2: complex) -> complex:
    return complex(_F_series(x, y, z, complex(nu2)))


def phi_value(x, y, z, mu, nu2) -> complex:
    """Phi(x, y, z) = alpha/(2(1-x)^2) F(x, y, z)."""
    x = complex(x)
    if abs(x) >= 1 or abs(y) >= 1:
        raise DomainError("|x| < 1 and |y| < 1 required")
    al = _alpha(mu)
    if al == 0:
        return 0j
    return al / (2 * (1 - x) ** 2) * script_F(x, y, z, nu2)


def psi_value(x, y, z, v, w, mu, nu2) -> complex:
    """Psi = x(w + v/4)/(1-x) + alpha/(2(1-x)^2) [F(x, y e^{-i pi v/w1}, z e^{i pi v/w1}) - F(x, y, z)]."""
    x = complex(x)
    if abs(x) >= 1 or abs(y) >= 1:
        raise DomainError("|x| < 1 and |y| < 1 required")
    lin = x * (w + v / 4) / (1 - x)
    al = _alpha(mu)
    if al == 0 or v == 0:
        return lin
    w1 = 0.5 * math.pi * complex(hyp_F(x))
    e = cmath.exp(1j * math.pi * v / w1)
    return lin + al / (2 * (1 - x) ** 2) * (script_F(x, y / e, z * e, nu2) - script_F(x, y, z, nu2))


@lru_cache(maxsize=16)
def _cheb_cumsum(n: int):
    """Nodes on [-1, 1] and the matrix mapping samples to the integral from -1."""
    xi = np.cos(np.pi * np.arange(n) / (n - 1))[::-1]
    V = C.chebvander(xi, n - 1)
    Vinv = np.linalg.inv(V)
    S = np.empty((n, n))
    for j in range(n):
        S[:, j] = C.chebval(xi, C.chebint(Vinv[:, j], lbnd=-1))
    return xi, S


def path_kappa(nu2: complex, nu_star: float = 1.0) -> float:
    nu2 = complex(nu2)
    if nu2.imag == 0:
        return 0.0
    return (nu2.real - nu_star) / nu2.imag


def path_decay(nu2: complex, nu_star: float = 1.0) -> float:
    """Slowest exponential rate, in t = ln(|s|/|x|), of the powers met along L(x)."""
    nu2 = complex(nu2)
    ns = nu_star if nu2.imag != 0 else nu2.real
    return min(1.0, ns, 2 - ns)


@dataclass(frozen=True)
class PathGrid:
    t: np.ndarray
    s_mod: np.ndarray
    s_arg: np.ndarray
    weight: complex  # ds/s = weight * dt
    S: np.ndarray  # cumulative integration in t


def path_grid(x: CoveringPoint, nu2, nu_star: float = 1.0, n: int = 160, depth: float | None = None,
              rate: float | None = None) -> PathGrid:
    """Chebyshev grid on L(x): s(t) with |s| = |x| e^t, arg s = arg x + kappa t, t in [-T, 0]."""
    kappa = path_kappa(nu2, nu_star)
    rate = rate if rate is not None else path_decay(nu2, nu_star)
    T = depth if depth is not None else 41.0 / rate
    xi, S = _cheb_cumsum(n)
    t = 0.5 * T * (xi - 1)
    return PathGrid(t, x.modulus * np.exp(t), x.argument + kappa * t, complex(1, kappa), 0.5 * T * S)


def path_integral_power(x: CoveringPoint, c: complex, nu2, nu_star: float = 1.0, n: int = 160) -> complex:
    """Integral of s^{c-1} ds along L(x) from 0, by the same quadrature solve_v uses."""
    c = complex(c)
    pg = path_grid(x, nu2, nu_star, n, rate=min(c.real, path_decay(nu2, nu_star)))
    f = np.exp(c * (np.log(pg.s_mod) + 1j * pg.s_arg))
    return complex(pg.weight * (pg.S @ f)[-1])


def solve_v(x: CoveringPoint, ed: EllipticData, mu, tol: float = 1e-12, r: float | None = None,
            nu_star: float = 1.0, n: int = 160, max_iter: int = 60, keep_path: bool = False) -> VSolution:
    """Fixed point of v = int w ds/s, w = int (Phi + Psi) ds/s along L(x)."""
    if r is not None and not script_domain_contains(x, DomainSpecScriptD(r, ed)):
        raise DomainError("x outside the domain of the elliptic representation")
    ya0, zb0 = scales(x, ed)
    if abs(ya0) >= 1 or abs(zb0) >= 1 or x.modulus >= 0.5:
        raise DomainError("x too large for the elliptic representation")
    nu2 = ed.nu2
    pg = path_grid(x, nu2, nu_star, n)
    ls = np.log(pg.s_mod) + 1j * pg.s_arg
    s = np.exp(ls)
    y = ed.A * np.exp((2 - nu2) * ls)
    z = ed.B * np.exp(nu2 * ls)
    bound = x.modulus + abs(ya0) + abs(zb0)
    al = _alpha(mu)
    v = np.zeros(n, dtype=complex)
    w = np.zeros(n, dtype=complex)
    if al == 0:
        # Phi and Psi vanish identically on v = w = 0: the fixed point is reached at once
        return VSolution(0j, 0j, 1, 0.0, (0.0,), pg.t if keep_path else None,
                         v if keep_path else None, w if keep_path else None)
    F = hyp_F(s)
    w1 = 0.5 * np.pi * F
    g = hyp_F1(s) / F + LOG16
    pref = al / (2 * (1 - s) ** 2)
    F0 = _F_series(s, y, z, nu2, w1, g)
    phi = pref * F0
    incs = []
    for it in range(1, max_iter + 1):
        e = np.exp(1j * np.pi * v / w1)
        Fv = _F_series(s, y / e, z * e, nu2, w1, g) if np.any(v != 0) else F0
        psi = s * (w + v / 4) / (1 - s) + pref * (Fv - F0)
        w_new = pg.weight * (pg.S @ (phi + psi))
        v_new = pg.weight * (pg.S @ w_new)
        inc = float(np.max(np.abs(v_new - v)) + np.max(np.abs(w_new - w)))
        incs.append(inc)
        v, w = v_new, w_new
        if inc < tol:
            break
        if it >= 10 and incs[-1] >= incs[-2] and incs[-2] >= incs[-3]:
            raise ConvergenceError("successive approximations do not contract; shrink r or |x|")
    else:
        raise ConvergenceError(f"no convergence in {max_iter} iterations (last increment {incs[-1]:.3g})")
    ratios = tuple(incs[i + 1] / incs[i] for i in range(len(incs) - 1) if incs[i] > 0)
    return VSolution(complex(v[-1]), complex(w[-1]), len(incs), abs(v[-1]) / bound, ratios,
                     pg.t if keep_path else None, v if keep_path else None, w if keep_path else None)


def _wp_at(x: CoveringPoint, nu1, nu2, v=0j) -> complex:
    hp = half_periods(x)
    return complex(wp(2 * (nu1 * hp.omega1 + nu2 * hp.omega2 + v), hp)) + (1 + x.to_complex()) / 3


def eval_theorem3(x: CoveringPoint, ed: EllipticData, mu, tol: float = 1e-13, **kw) -> complex:
    sol = solve_v(x, ed, mu, tol=tol, **kw)
    return _wp_at(x, ed.nu1, ed.nu2, sol.v)


def theorem3_function(ed: EllipticData, mu, **kw):
    return lambda x: eval_theorem3(x, ed, mu, **kw)


def picard_closed_form(x: CoveringPoint, nu1, nu2) -> complex:
    """Exact mu = 1/2 solution P(nu1 w1 + nu2 w2) + (1 + x)/3."""
    nu1, nu2 = complex(nu1), complex(nu2)
    if nu1 == 0 and nu2 == 0:
        raise DomainError("(nu1, nu2) = (0, 0) is excluded")
    if not (0 <= nu1.real < 2 and 0 <= nu2.real < 2):
        raise DomainError("need 0 <= Re nu_i < 2")
    if abs(nu1 - 1) < 1e-14 and abs(nu2 - 1) < 1e-14:
        warnings.warn("(nu1, nu2) = (1, 1) gives y = x, the singular locus of the equation",
                      SingularLocusWarning, stacklevel=2)
    return _wp_at(x, nu1, nu2)


def picard_triple(nu1, nu2) -> MonodromyTriple:
    """Monodromy of the Picard solution: x_i = -2 cos(pi r_i)."""
    nu1, nu2 = complex(nu1), complex(nu2)
    if nu1.real > nu2.real:
        r = (nu2 / 2, 1 - nu1 / 2, (nu1 - nu2) / 2)
    elif nu1.real < nu2.real:
        r = (1 - nu2 / 2, nu1 / 2, (nu2 - nu1) / 2)
    else:
        raise DomainError("the Picard monodromy formulas need Re nu1 != Re nu2")
    return MonodromyTriple(*[-2 * cmath.cos(math.pi * ri) for ri in r])


def corollary_classify(path_V: float, ed: EllipticData) -> str:
    """Which leading formula governs x -> 0 along the path with parameter V.

    'term_x' is part of the vocabulary but never returned: the x/2 term cannot
    dominate both x^{nu2} and x^{2-nu2} on an admissible path.
    """
    if not 0 <= path_V <= 2:
        raise DomainError("path parameter V must lie in [0, 2]")
    n2 = ed.nu2
    V = n2.real if n2.imag == 0 else path_V
    if n2.imag != 0 and V == 0:
        return "oscillatory_V0"
    if n2.imag != 0 and V == 2:
        return "oscillatory_V2"
    if V == 1:
        return "balanced_V1"
    return "term_nu2" if V < 1 else "term_2_minus_nu2"


def corollary_leading(x: CoveringPoint, ed: EllipticData) -> complex:
    """x/2 - (1/4) c x^{nu2} - (1/(4c)) x^{2-nu2} with c = e^{i pi nu1}/16^{nu2-1}."""
    c = cmath.exp(1j * math.pi * ed.nu1) / 16 ** (ed.nu2 - 1)
    return 0.5 * x.to_complex() - 0.25 * c * x.power(ed.nu2) - 0.25 / c * x.power(2 - ed.nu2)


def takaragaike_path(start: CoveringPoint, ed: EllipticData, path_V: float, n: int, floor: float) -> list:
    k = 0.0 if ed.nu2.imag == 0 else (ed.nu2.real - path_V) / ed.nu2.imag
    rs = np.geomspace(start.modulus, floor, n)
    return [CoveringPoint(float(r), start.argument + k * math.log(r / start.modulus)) for r in rs]


def shimomura_eval(x: CoveringPoint, sigma, k, v=0j, pole_tol: float = 1e-8) -> complex:
    """1/cosh^2(((sigma - 1)/2) ln x + k/2 + v/2)."""
    zeta = 0.5 * (complex(sigma) - 1) * x.log() + 0.5 * complex(k) + 0.5 * complex(v)
    m = zeta.imag / math.pi - 0.5
    if abs(zeta - 1j * math.pi * (round(m) + 0.5)) < pole_tol:
        raise PoleError("cosh vanishes at this point")
    return 1 / cmath.cosh(zeta) ** 2
