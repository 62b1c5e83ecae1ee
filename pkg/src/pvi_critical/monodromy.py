"""Monodromy triples, braid actions and the 2x2 matrix realization."""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError

ZERO_TOL = 1e-12
EXCLUDED = ((2, 2, 2), (-2, -2, 2), (2, -2, -2), (-2, 2, -2))


@dataclass(frozen=True)
class MonodromyTriple:
    x0: complex
    x1: complex
    xinf: complex

    def __post_init__(self):
        for name in ("x0", "x1", "xinf"):
            object.__setattr__(self, name, complex(getattr(self, name)))

    def as_tuple(self) -> tuple[complex, complex, complex]:
        return (self.x0, self.x1, self.xinf)

    def to_json(self):
        return [[z.real, z.imag] for z in self.as_tuple()]

    @classmethod
    def from_json(cls, data) -> "MonodromyTriple":
        return cls(*[complex(*p) if isinstance(p, (list, tuple)) else complex(p) for p in data])


@dataclass(frozen=True)
class Mu:
    value: complex

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))
        if self.value == 0:
            raise DegenerateError("mu = 0 is identified with mu = 1; pass mu = 1")

    @property
    def resonant(self) -> bool:
        two = 2 * self.value
        return abs(two.imag) < 1e-12 and abs(two.real - round(two.real)) < 1e-12

    @property
    def alpha(self) -> complex:
        return (2 * self.value - 1) ** 2 / 2


@dataclass
class MonodromyMatrixSet:
    M0: np.ndarray
    Mx: np.ndarray
    M1: np.ndarray
    Minf: np.ndarray

    def to_json(self):
        def enc(m):
            return [[[complex(v).real, complex(v).imag] for v in row] for row in np.asarray(m)]

        return {"M0": enc(self.M0), "Mx": enc(self.Mx), "M1": enc(self.M1), "Minf": enc(self.Minf)}


def mu_value(mu) -> complex:
    return mu.value if isinstance(mu, Mu) else complex(mu)


def relation_residual(t: MonodromyTriple, mu) -> float:
    x0, x1, xi = t.as_tuple()
    m = mu_value(mu)
    return abs(x0 * x0 + x1 * x1 + xi * xi - x0 * x1 * xi - 4 * cmath.sin(cmath.pi * m) ** 2)


def _is_zero(z: complex, tol: float = ZERO_TOL) -> bool:
    return abs(z) <= tol


def is_admissible(t: MonodromyTriple, tol: float = ZERO_TOL) -> bool:
    if sum(_is_zero(z, tol) for z in t.as_tuple()) > 1:
        return False
    return not any(max(abs(a - b) for a, b in zip(t.as_tuple(), ex)) <= tol for ex in EXCLUDED)


def _right_half(z: complex, tol: float = ZERO_TOL) -> bool:
    # arg z in (-pi/2, pi/2], with a small dead band on the imaginary axis
    if abs(z.real) <= tol * abs(z):
        return z.imag > 0
    return z.real > 0


def canonicalize(t: MonodromyTriple, tol: float = ZERO_TOL) -> MonodromyTriple:
    """Representative of the class under simultaneous sign change of two entries."""
    if not is_admissible(t, tol):
        raise DegenerateError(f"inadmissible triple {t.as_tuple()}")
    z = list(t.as_tuple())
    nz = [i for i, v in enumerate(z) if not _is_zero(v, tol)]
    first, second = nz[0], nz[1]
    other = 3 - first - second
    if not _right_half(z[first], tol):
        # flip first together with the zero entry or, failing that, the third
        z[first] = -z[first]
        partner = other if _is_zero(z[other], tol) else second
        z[partner] = -z[partner]
    if not _right_half(z[second], tol):
        z[second] = -z[second]
        z[other] = -z[other]
    return MonodromyTriple(*z)


def equivalent(s: MonodromyTriple, t: MonodromyTriple, tol: float = 1e-9) -> bool:
    """True when s and t differ by a change of two signs, up to tol (relative)."""
    a = np.array(s.as_tuple())
    scale = max(1.0, float(np.max(np.abs(a))))
    for signs in ((1, 1, 1), (-1, -1, 1), (-1, 1, -1), (1, -1, -1)):
        b = np.array(t.as_tuple()) * np.array(signs)
        if np.max(np.abs(a - b)) <= tol * scale:
            return True
    return False


def class_distance(s: MonodromyTriple, t: MonodromyTriple) -> float:
    a = np.array(s.as_tuple())
    return min(
        float(np.max(np.abs(a - np.array(t.as_tuple()) * np.array(sg))))
        for sg in ((1, 1, 1), (-1, -1, 1), (-1, 1, -1), (1, -1, -1))
    )


def braid_beta1(t: MonodromyTriple) -> MonodromyTriple:
    x0, x1, xi = t.as_tuple()
    return MonodromyTriple(-x0, xi - x0 * x1, x1)


def braid_beta2(t: MonodromyTriple) -> MonodromyTriple:
    x0, x1, xi = t.as_tuple()
    return MonodromyTriple(xi, -x1, x0 - x1 * xi)


def braid_beta1_sq(t: MonodromyTriple) -> MonodromyTriple:
    x0, x1, xi = t.as_tuple()
    return MonodromyTriple(x0, x1 + x0 * xi - x1 * x0 * x0, xi - x0 * x1)


def braid_beta2_sq(t: MonodromyTriple) -> MonodromyTriple:
    x0, x1, xi = t.as_tuple()
    return MonodromyTriple(x0 - x1 * xi, x1, xi + x0 * x1 - xi * x1 * x1)


def braid_beta1_sq_inv(t: MonodromyTriple) -> MonodromyTriple:
    x0, X1, Xi = t.as_tuple()
    x1 = X1 - x0 * Xi
    return MonodromyTriple(x0, x1, Xi + x0 * x1)


def braid_beta2_sq_inv(t: MonodromyTriple) -> MonodromyTriple:
    X0, x1, Xi = t.as_tuple()
    xi = Xi - x1 * X0
    return MonodromyTriple(X0 + x1 * xi, x1, xi)


def _anchored(p: complex, q: complex, r: complex):
    # (Ma, Mb, Mc) with tr(Ma Mb) = 2 - p^2, tr(Mb Mc) = 2 - q^2, tr(Ma Mc) = 2 - r^2
    Ma = np.array([[1, -p], [0, 1]], dtype=complex)
    Mb = np.array([[1, 0], [p, 1]], dtype=complex)
    Mc = np.array([[1 + q * r / p, -q * q / p], [r * r / p, 1 - q * r / p]], dtype=complex)
    return Ma, Mb, Mc


def matrix_realization(t: MonodromyTriple) -> MonodromyMatrixSet:
    """Explicit matrices with 2 - x0^2 = tr(M0 Mx), 2 - x1^2 = tr(Mx M1), 2 - xinf^2 = tr(M0 M1).

    Anchored at x0 the matrices are M0 = [[1,-x0],[0,1]], Mx = [[1,0],[x0,1]],
    M1 = [[1 + x1 xinf/x0, -x1^2/x0], [xinf^2/x0, 1 - x1 xinf/x0]].
    If x0 = 0 the same shape is anchored at x1 after the cyclic relabelling
    (M0, Mx, M1) -> (Mx, M1, M0), (x0, x1, xinf) -> (x1, xinf, x0), which keeps
    the product M1 Mx M0 in the same cyclic class.
    """
    x0, x1, xi = t.as_tuple()
    if _is_zero(x0) and _is_zero(x1) and _is_zero(xi):
        raise DegenerateError("all entries are zero")
    if not _is_zero(x0):
        M0, Mx, M1 = _anchored(x0, x1, xi)
    elif not _is_zero(x1):
        Mx, M1, M0 = _anchored(x1, xi, x0)
    else:
        M1, M0, Mx = _anchored(xi, x0, x1)
    Minf = np.linalg.inv(M1 @ Mx @ M0)
    return MonodromyMatrixSet(M0, Mx, M1, Minf)


def pair_traces(ms: MonodromyMatrixSet) -> tuple[complex, complex, complex]:
    return (
        complex(np.trace(ms.M0 @ ms.Mx)),
        complex(np.trace(ms.Mx @ ms.M1)),
        complex(np.trace(ms.M0 @ ms.M1)),
    )


def trace_check(ms: MonodromyMatrixSet) -> MonodromyTriple:
    """Recover the triple from the pair traces; the sign of x0 x1 xinf from tr(Minf)."""
    t0, t1, t2 = pair_traces(ms)
    z = [cmath.sqrt(2 - t0), cmath.sqrt(2 - t1), cmath.sqrt(2 - t2)]
    target = sum(v * v for v in z) - 2 + complex(np.trace(ms.Minf))
    prod = z[0] * z[1] * z[2]
    if abs(prod + target) < abs(prod - target):
        k = max(range(3), key=lambda i: abs(z[i]))
        z[k] = -z[k]
    t = MonodromyTriple(*z)
    return canonicalize(t) if is_admissible(t) else t
