"""The 2x2 Fuchsian system attached to a transcendent and its numeric monodromy."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import ConvergenceError, DomainError, PoleError
from .monodromy import MonodromyMatrixSet, MonodromyTriple, Mu, canonicalize, is_admissible, mu_value
from .special import CoveringPoint

CENTERS = ("zero", "x", "one")


@dataclass
class FuchsianSystem:
    x: CoveringPoint
    A0: np.ndarray
    Ax: np.ndarray
    A1: np.ndarray
    k: complex
    mu: Mu
    y: complex = 0j
    dy: complex = 0j

    def poles(self) -> dict:
        return {"zero": 0j, "x": self.x.to_complex(), "one": 1 + 0j}

    def matrix(self, z: complex) -> np.ndarray:
        xc = self.x.to_complex()
        return self.A0 / z + self.Ax / (z - xc) + self.A1 / (z - 1)

    def invariants(self) -> dict:
        """Residuals of tr A_i = det A_i = 0, sum A_i = -diag(mu, -mu) and [A(y)]_12 = 0."""
        m = self.mu.value
        res = {}
        for name, a in (("A0", self.A0), ("Ax", self.Ax), ("A1", self.A1)):
            res["tr_" + name] = abs(np.trace(a))
            res["det_" + name] = abs(np.linalg.det(a))
        res["sum"] = float(np.max(np.abs(self.A0 + self.Ax + self.A1 + np.diag([m, -m]))))
        res["a12_at_y"] = abs(self.matrix(self.y)[0, 1])
        return res


@dataclass(frozen=True)
class LoopSpec:
    center: str
    radius: float
    basepoint: complex = -1 + 0j
    orientation: int = 1

    def __post_init__(self):
        if self.center not in CENTERS:
            raise DomainError(f"center must be one of {CENTERS}")
        if self.orientation != 1:
            raise DomainError("only counter-clockwise loops are supported")
        if self.radius <= 0:
            raise DomainError("radius must be positive")


def _residue(mu: complex, p1: complex, p3: complex) -> np.ndarray:
    # the (2,2) entry carries a minus sign so that the residue is trace free
    return -mu * np.array([[p1 * p3, -p3 * p3], [p1 * p1, -p1 * p3]], dtype=complex)


def k_factor(x: CoveringPoint, mu, k0: complex = 1.0, quadrature_base: CoveringPoint | None = None,
             y_fn=None, n: int = 40) -> complex:
    """k = k0 exp((2mu - 1) int_base^x (y - s)/(s(s - 1)) ds) along the straight segment."""
    m = mu_value(mu)
    if quadrature_base is None or y_fn is None or 2 * m - 1 == 0:
        return complex(k0)
    a, b = quadrature_base.to_complex(), x.to_complex()
    nodes, weights = np.polynomial.legendre.leggauss(n)
    total = 0j
    for t, wgt in zip(nodes, weights):
        s = 0.5 * (a + b) + 0.5 * (b - a) * t
        pt = CoveringPoint.from_complex(s, quadrature_base.argument)
        total += wgt * (complex(y_fn(pt)) - s) / (s * (s - 1))
    total *= 0.5 * (b - a)
    return complex(k0) * cmath.exp((2 * m - 1) * total)


def build_system(x: CoveringPoint, y: complex, dy: complex, mu, k0: complex = 1.0,
                 quadrature_base: CoveringPoint | None = None, y_fn=None) -> FuchsianSystem:
    """Residues A0, Ax, A1 at u = (0, x, 1) from (y, y') by the phi-formulas."""
    mu = mu if isinstance(mu, Mu) else Mu(mu)
    m = mu.value
    xc = x.to_complex()
    y, dy = complex(y), complex(dy)
    scale = max(1.0, abs(y))
    if min(abs(y), abs(y - 1), abs(y - xc)) < 1e-12 * scale:
        raise PoleError("y lies on {0, 1, x}; the system is undefined there")
    k = k_factor(x, mu, k0, quadrature_base, y_fn)
    sk = cmath.sqrt(k)
    sx, s1x = cmath.sqrt(xc), cmath.sqrt(1 - xc)
    sy, syx, sy1 = cmath.sqrt(y), cmath.sqrt(y - xc), cmath.sqrt(y - 1)
    A = 0.5 * (dy * xc * (xc - 1) - y * (y - 1))
    B = A / (y * (y - 1) * (y - xc))
    c = 1 / (2 * m * m)
    p13 = 1j * sk * sy / sx
    p23 = -sk * syx / (sx * s1x)
    p33 = 1j * sk * sy1 / s1x
    p11 = 1j * c * sy / (sk * sx) * (A * (B + 2 * m / y) + m * m * (y - 1 - xc))
    p21 = -c * syx / (sk * sx * s1x) * (A * (B + 2 * m / (y - xc)) + m * m * (y - 1 + xc))
    p31 = 1j * c * sy1 / (sk * s1x) * (A * (B + 2 * m / (y - 1)) + m * m * (y + 1 - xc))
    return FuchsianSystem(x, _residue(m, p11, p13), _residue(m, p21, p23), _residue(m, p31, p33), k, mu, y, dy)


def default_loops(x: CoveringPoint, basepoint: complex = -1 + 0j) -> list[LoopSpec]:
    xc = x.to_complex()
    r = min(abs(xc), abs(1 - xc), 1.0) / 3
    return [LoopSpec(c, r, basepoint) for c in CENTERS]


def _transport(fs: FuchsianSystem, zfun, dzfun, Y0: np.ndarray, rtol: float, atol: float) -> np.ndarray:
    def rhs(t, yv):
        z = zfun(t)
        Y = yv.reshape(2, 2)
        return (fs.matrix(z) @ Y * dzfun(t)).ravel()

    sol = solve_ivp(rhs, (0.0, 1.0), Y0.ravel().astype(complex), method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:
        raise ConvergenceError(f"loop integration failed: {sol.message}")
    return sol.y[:, -1].reshape(2, 2)


def _seg_dist(p: complex, a: complex, b: complex) -> float:
    d = b - a
    t = max(0.0, min(1.0, ((p - a) * d.conjugate()).real / abs(d) ** 2)) if d != 0 else 0.0
    return abs(a + t * d - p)


def approach_path(fs: FuchsianSystem, lp: LoopSpec) -> list[complex]:
    """Polyline basepoint -> up to a common height -> over the center -> down to c + i r.

    Every loop reaches its circle from above, which fixes one standard basis.
    """
    poles = fs.poles()
    c = poles[lp.center]
    h = max(0.0, max(p.imag for p in poles.values())) + 2 * lp.radius
    b = lp.basepoint
    pts = [b, complex(b.real, h), complex(c.real, h), c + 1j * lp.radius]
    for name, p in poles.items():
        if name != lp.center and abs(p - c) < 1.5 * lp.radius:
            raise DomainError(f"loop around {lp.center} comes within radius/2 of {name}")
        for a, e in zip(pts[:-1], pts[1:]):
            if _seg_dist(p, a, e) < 0.5 * lp.radius:
                raise DomainError(f"approach path to {lp.center} passes too close to {name}")
    return pts


def loop_matrix(fs: FuchsianSystem, lp: LoopSpec, rtol: float = 1e-12, atol: float = 1e-14) -> np.ndarray:
    """Monodromy along: approach path to c + i r, circle counter-clockwise, back."""
    pts = approach_path(fs, lp)
    c = fs.poles()[lp.center]
    L = np.eye(2, dtype=complex)
    for a, e in zip(pts[:-1], pts[1:]):
        if a != e:
            L = _transport(fs, lambda t, a=a, e=e: a + t * (e - a), lambda t, a=a, e=e: e - a, L, rtol, atol)
    circ = lambda t: c + 1j * lp.radius * cmath.exp(2j * math.pi * t)
    dcirc = lambda t: -2 * math.pi * lp.radius * cmath.exp(2j * math.pi * t)
    CL = _transport(fs, circ, dcirc, L, rtol, atol)
    return np.linalg.solve(L, CL)


def numeric_monodromy(fs: FuchsianSystem, loops: list[LoopSpec] | None = None,
                      rtol: float = 1e-12, atol: float = 1e-14) -> MonodromyMatrixSet:
    loops = loops if loops is not None else default_loops(fs.x)
    if len({lp.basepoint for lp in loops}) != 1:
        raise DomainError("loops must share a basepoint")
    mats = {lp.center: loop_matrix(fs, lp, rtol, atol) for lp in loops}
    if set(mats) != set(CENTERS):
        raise DomainError("need one loop around each of 0, x, 1")
    M0, Mx, M1 = mats["zero"], mats["x"], mats["one"]
    return MonodromyMatrixSet(M0, Mx, M1, np.linalg.inv(M1 @ Mx @ M0))


def traces_to_triple(ms: MonodromyMatrixSet, zero_tol: float = 1e-6) -> MonodromyTriple:
    """x_i from 2 - x_i^2 = tr(M_i M_j); the sign of x0 x1 xinf is read from tr(Minf).

    The square root turns a trace error e into an entry of size sqrt(e), so
    entries below zero_tol are set to 0 before canonicalizing.
    """
    t = [np.trace(ms.M0 @ ms.Mx), np.trace(ms.Mx @ ms.M1), np.trace(ms.M0 @ ms.M1)]
    z = [cmath.sqrt(2 - complex(v)) for v in t]
    z = [0j if abs(v) < zero_tol else v for v in z]
    target = sum(v * v for v in z) - 2 + complex(np.trace(ms.Minf))
    prod = z[0] * z[1] * z[2]
    if abs(prod + target) < abs(prod - target):
        j = max(range(3), key=lambda i: abs(z[i]))
        z[j] = -z[j]
    tri = MonodromyTriple(*z)
    return canonicalize(tri) if is_admissible(tri, 1e-9) else tri
