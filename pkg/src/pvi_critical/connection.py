"""Connection formulas between monodromy triples and critical data (sigma, a).

Forward: (sigma, a) at x = 0 -> triple.  Inverse: triple -> (sigma, a) at
0, 1 or infinity, the latter two by substituting the triple.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateError, DomainError, PoleError
from .monodromy import MonodromyTriple, canonicalize, braid_beta1_sq, mu_value
from .special import gamma

MATCH_TOL = 1e-8
WARN_TOL = 1e-5
POINTS = ("zero", "one", "infinity")


class IllConditionedWarning(UserWarning):
    pass


@dataclass(frozen=True)
class CaseTag:
    tag: str  # GenericI, ZeroII, III1..III4
    m: int | None = None


@dataclass(frozen=True)
class CriticalData:
    sigma: complex
    a: complex
    point: str = "zero"
    case: CaseTag | None = None

    def __post_init__(self):
        object.__setattr__(self, "sigma", complex(self.sigma))
        object.__setattr__(self, "a", complex(self.a))
        if self.point not in POINTS:
            raise DomainError(f"unknown critical point {self.point!r}")

    def to_json(self):
        out = {
            "sigma": [self.sigma.real, self.sigma.imag],
            "a": [self.a.real, self.a.imag],
            "point": self.point,
        }
        if self.case is not None:
            out["case"] = self.case.tag if self.case.m is None else f"{self.case.tag}(m={self.case.m})"
        return out


def _on_forbidden_ray(s: complex, tol: float = 1e-12) -> bool:
    return abs(s.imag) <= tol and (s.real < -tol or s.real >= 1 - tol)


def sigma_from_x0(x0: complex, tol: float = 1e-12) -> complex:
    """Solution of cos(pi sigma) = 1 - x0^2/2 with 0 <= Re sigma <= 1."""
    x0 = complex(x0)
    if abs(x0 - 2) < tol or abs(x0 + 2) < tol:
        raise DegenerateError("x = +-2 gives sigma = 1, which is excluded")
    s = complex(np.arccos(1 - x0 * x0 / 2)) / math.pi
    if s.imag < 0 and (abs(s.real) < 1e-10 or abs(s.real - 1) < 1e-10):
        # on the cut; keep Im sigma >= 0 and put Re sigma back on the boundary
        s = complex(0.0, -s.imag) if abs(s.real) < 1e-10 else complex(1.0, -s.imag)
    if abs(s.imag) < tol * max(1.0, abs(s)):
        s = complex(s.real, 0.0)
    return s


def f_factor(sigma, mu) -> complex:
    s, m = complex(sigma), mu_value(mu)
    den = cmath.cos(math.pi * s) - cmath.cos(2 * math.pi * m)
    if abs(den) < 1e-14:
        raise PoleError("f(sigma, mu) has a pole at sigma = +-2mu + 2m; use the case III formulas")
    return 2 * cmath.cos(math.pi * s / 2) ** 2 / den


def G_factor(sigma, mu) -> complex:
    s, m = complex(sigma), mu_value(mu)
    if _resonance(s, m)[0] < MATCH_TOL:
        raise PoleError("sigma = +-2mu + 2m belongs to case III; G is not used there")
    for z in (1 - m + s / 2, m + s / 2):
        if abs(z.imag) < 1e-14 and z.real <= 0 and abs(z.real - round(z.real)) < 1e-12:
            raise PoleError("G(sigma, mu) is singular at sigma = +-2mu + 2m; use the case III formulas")
    return 0.5 * 4**s * gamma((s + 1) / 2) ** 2 / (gamma(1 - m + s / 2) * gamma(m + s / 2))


def F_factor(sigma, mu) -> complex:
    return f_factor(sigma, mu) * (2 * G_factor(sigma, mu)) ** 2


def _resonance(sigma: complex, mu: complex):
    """Return (distance, sign, m) for the nearest sigma = sign*2mu + 2m."""
    best = None
    for sign in (1, -1):
        m = int(round(((sigma - sign * 2 * mu) / 2).real))
        d = abs(sigma - sign * 2 * mu - 2 * m)
        if best is None or d < best[0]:
            best = (d, sign, m)
    return best


def _check_band(dist: float, what: str):
    if MATCH_TOL <= dist < WARN_TOL:
        warnings.warn(f"sigma is {dist:.2e} from the {what} branch; generic formulas are ill conditioned",
                      IllConditionedWarning, stacklevel=3)


def classify_sigma(sigma, mu) -> CaseTag:
    s, m = complex(sigma), mu_value(mu)
    if abs(s) < MATCH_TOL:
        return CaseTag("ZeroII")
    _check_band(abs(s), "sigma = 0")
    d, sign, k = _resonance(s, m)
    if d < MATCH_TOL:
        if sign > 0:
            return CaseTag("III1" if k >= 0 else "III2", k)
        return CaseTag("III3" if k >= 1 else "III4", k)
    _check_band(d, "sigma = +-2mu + 2m")
    return CaseTag("GenericI")


def _mu_integer(m: complex) -> bool:
    return abs(m.imag) < 1e-12 and abs(m.real - round(m.real)) < 1e-12


def forward(sigma, a, mu) -> MonodromyTriple:
    """Triple of the transcendent with critical data (sigma, a) at x = 0."""
    s, a, m = complex(sigma), complex(a), mu_value(mu)
    if a == 0:
        raise DomainError("a must be nonzero")
    if _on_forbidden_ray(s):
        raise DomainError(f"sigma = {s} lies on a forbidden real ray")
    tag = classify_sigma(s, m)
    sa = cmath.sqrt(a)
    pi = math.pi
    if tag.tag == "GenericI":
        f, G = f_factor(s, m), G_factor(s, m)
        e = cmath.exp(-1j * pi * s / 2)
        x0 = 2 * cmath.sin(pi * s / 2)
        x1 = 1j * (sa / (f * G) - G / sa)
        xi = sa / (f * G * e) + G * e / sa
    elif tag.tag == "ZeroII":
        if _mu_integer(m):
            raise DegenerateError("sigma = 0 with integer mu gives the inadmissible triple (0,0,0)")
        sm = cmath.sin(pi * m)
        x0, x1, xi = 0, 2 * sm * cmath.sqrt(1 - a), 2 * sm * sa
    else:
        k = tag.m
        if tag.tag == "III1":
            x0 = 2 * cmath.sin(pi * m)
            x1 = -0.5j * 16 ** (m + k) * gamma(m + k + 0.5) ** 2 / (gamma(k + 1) * gamma(2 * m + k)) / sa
            xi = 1j * x1 * cmath.exp(-1j * pi * m)
        elif tag.tag == "III2":
            x0 = 2 * cmath.sin(pi * m)
            x1 = (2j * pi**2 / cmath.cos(pi * m) ** 2 * sa
                  / (16 ** (m + k) * gamma(m + k + 0.5) ** 2 * gamma(-2 * m - k + 1) * gamma(-k)))
            xi = -1j * x1 * cmath.exp(1j * pi * m)
        elif tag.tag == "III3":
            x0 = -2 * cmath.sin(pi * m)
            x1 = -0.5j * 16 ** (-m + k) * gamma(-m + k + 0.5) ** 2 / (gamma(k - 2 * m + 1) * gamma(k)) / sa
            xi = 1j * x1 * cmath.exp(1j * pi * m)
        else:
            x0 = -2 * cmath.sin(pi * m)
            x1 = (2j * pi**2 / cmath.cos(pi * m) ** 2 * sa
                  / (16 ** (-m + k) * gamma(-m + k + 0.5) ** 2 * gamma(2 * m - k) * gamma(1 - k)))
            xi = -1j * x1 * cmath.exp(-1j * pi * m)
    return canonicalize(MonodromyTriple(x0, x1, xi))


def f_from_triple(t: MonodromyTriple) -> complex:
    x0, x1, xi = t.as_tuple()
    return (4 - x0 * x0) / (x1 * x1 + xi * xi - x0 * x1 * xi)


def a_generic(sigma, t: MonodromyTriple, mu) -> complex:
    """Case I amplitude, evaluated verbatim for any sigma off the singular set."""
    s = complex(sigma)
    x0, x1, xi = t.as_tuple()
    G = G_factor(s, mu)
    f = f_from_triple(t)
    e = cmath.exp(-1j * math.pi * s)
    return 1j * G * G / (2 * cmath.sin(math.pi * s)) * (2 * (1 + e) - f * (xi * xi + e * x1 * x1)) * f


def compatibility_XY(sigma, t: MonodromyTriple, mu) -> tuple[complex, complex]:
    """Solutions X = s, Y = 1/s of the two linear trace equations; consistency means XY = 1."""
    s = complex(sigma)
    x0, x1, xi = t.as_tuple()
    f = f_factor(s, mu)
    F = F_factor(s, mu)
    e = cmath.exp(-1j * math.pi * s)
    X = (2 * (1 + e) - f * (x1 * x1 + e * xi * xi)) / (F * (e * e - 1))
    Y = F * e * (f * (xi * xi + e * x1 * x1) - 2 * (1 + e)) / (e * e - 1)
    return X, Y


def _case_III(t: MonodromyTriple, m: complex) -> CriticalData:
    x0, x1, xi = t.as_tuple()
    if abs(x1) < 1e-14:
        raise DegenerateError("case III needs x1 != 0")
    ratio = xi * xi / (x1 * x1)
    minus = abs(ratio + cmath.exp(-2j * math.pi * m)) <= abs(ratio + cmath.exp(2j * math.pi * m))
    # admissible (tag, sign, m) families for each relation; pick sigma closest to the band
    cands = []
    for sign in (1, -1):
        k0 = int(math.floor(((-sign * 2 * m) / 2).real))
        for k in range(k0 - 2, k0 + 4):
            if sign > 0:
                tag = "III1" if k >= 0 else "III2"
            else:
                tag = "III3" if k >= 1 else "III4"
            if (tag in ("III1", "III4")) != minus:
                continue
            s = sign * 2 * m + 2 * k
            dist = max(0.0, -s.real, s.real - 1)
            cands.append((dist, s.real < 0, tag, k, s))
    if not cands:
        raise DegenerateError("no case III representation")
    _, _, tag, k, s = min(cands, key=lambda c: (c[0], c[1]))
    pi = math.pi
    if tag == "III1":
        a = -1 / (4 * x1 * x1) * 16 ** (2 * m + 2 * k) * gamma(m + k + 0.5) ** 4 / (
            gamma(k + 1) ** 2 * gamma(2 * m + k) ** 2)
    elif tag == "III2":
        a = (-cmath.cos(pi * m) ** 4 / (4 * pi**4) * 16 ** (2 * m + 2 * k) * gamma(m + k + 0.5) ** 4
             * gamma(-2 * m - k + 1) ** 2 * gamma(-k) ** 2 * x1 * x1)
    elif tag == "III3":
        a = -1 / (4 * x1 * x1) * 16 ** (-2 * m + 2 * k) * gamma(-m + k + 0.5) ** 4 / (
            gamma(k - 2 * m + 1) ** 2 * gamma(k) ** 2)
    else:
        a = (-cmath.cos(pi * m) ** 4 / (4 * pi**4) * 16 ** (-2 * m + 2 * k) * gamma(-m + k + 0.5) ** 4
             * gamma(2 * m - k) ** 2 * gamma(1 - k) ** 2 * x1 * x1)
    return CriticalData(s, a, "zero", CaseTag(tag, k))


def inverse(t: MonodromyTriple, mu, relation_tol: float = 1e-8) -> CriticalData:
    """Critical data at x = 0 of the transcendent with triple t."""
    from .monodromy import is_admissible, relation_residual

    m = mu_value(mu)
    if not is_admissible(t):
        raise DegenerateError(f"inadmissible triple {t.as_tuple()}")
    if min(abs(t.x0 - 2), abs(t.x0 + 2)) < 1e-12:
        raise DegenerateError("x0 = +-2 is excluded (it would give sigma = 1)")
    res = relation_residual(t, m)
    if res > relation_tol * max(1.0, max(abs(z) for z in t.as_tuple()) ** 3):
        raise DomainError(f"triple violates the cubic relation (residual {res:.3g})")
    x0, x1, xi = t.as_tuple()
    s = sigma_from_x0(x0)
    if abs(x0) < MATCH_TOL:
        if _mu_integer(m):
            raise DegenerateError("x0 = 0 with integer mu is degenerate")
        return CriticalData(0.0, xi * xi / (x1 * x1 + xi * xi), "zero", CaseTag("ZeroII"))
    if abs(x0 * x0 - 4 * cmath.sin(math.pi * m) ** 2) < MATCH_TOL:
        return _case_III(t, m)
    tag = classify_sigma(s, m)
    if tag.tag != "GenericI":
        return _case_III(t, m)
    return CriticalData(s, a_generic(s, t, m), "zero", tag)


def substitute_one(t: MonodromyTriple) -> MonodromyTriple:
    x0, x1, xi = t.as_tuple()
    return MonodromyTriple(x1, x0, x0 * x1 - xi)


def substitute_infinity(t: MonodromyTriple) -> MonodromyTriple:
    x0, x1, xi = t.as_tuple()
    return MonodromyTriple(xi, -x1, x0 - x1 * xi)


def connect_at_one(t: MonodromyTriple, mu) -> CriticalData:
    return replace(inverse(substitute_one(t), mu), point="one")


def connect_at_infinity(t: MonodromyTriple, mu) -> CriticalData:
    return replace(inverse(substitute_infinity(t), mu), point="infinity")


def connect(t: MonodromyTriple, mu, point: str = "zero") -> CriticalData:
    return {"zero": inverse, "one": connect_at_one, "infinity": connect_at_infinity}[point](t, mu)


def braid_on_sigma_a(cd: CriticalData, braid: str = "beta1_sq") -> CriticalData:
    if braid != "beta1_sq":
        raise DomainError(f"braid {braid!r} acts on (sigma, a) only through the triple")
    if cd.point != "zero":
        raise DomainError("the (sigma, a) braid rule is stated at x = 0")
    return replace(cd, a=cd.a * cmath.exp(-2j * math.pi * cd.sigma))


def braid_check(sigma, a, mu) -> CriticalData:
    """inverse(beta1^2(forward(sigma, a))), for comparison with braid_on_sigma_a."""
    return inverse(braid_beta1_sq(forward(sigma, a, mu)), mu)


def alias(cd: CriticalData, n: int, sign: int, t: MonodromyTriple, mu) -> CriticalData:
    """Critical data for the alias exponent sign*sigma + 2n of the same transcendent."""
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    s = sign * cd.sigma + 2 * n
    # real alias exponents are fine (Remark 2 pairs sigma with -sigma); only
    # integers, where sin(pi s) = 0, make the amplitude formula meaningless
    if abs(s.imag) <= 1e-12 and abs(s.real - round(s.real)) <= 1e-12:
        raise DomainError(f"alias exponent {s} is an integer; the amplitude is undefined there")
    if n == 0 and sign == 1:
        return cd
    return CriticalData(s, a_generic(s, t, mu), cd.point, CaseTag("GenericI"))
