"""Adaptive integration of the Painleve VI equation along paths on the covering of C minus {0}.

Each path segment is a straight line in xi = ln|x| + i arg x, so the argument
is carried exactly.  Stepping is Dormand-Prince 5(4) on the first-order
system in (y, y').
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import least_squares

from .errors import DomainError, NumericalError, PoleHit
from .monodromy import mu_value
from .special import CoveringPoint


@dataclass(frozen=True)
class OdeState:
    x: CoveringPoint
    y: complex
    dy: complex


@dataclass
class PathPlan:
    waypoints: Sequence[CoveringPoint]
    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    pole_guard: float = 1e-4

    def __post_init__(self):
        if len(self.waypoints) < 2:
            raise DomainError("a path needs at least two waypoints")
        for p, q in zip(self.waypoints[:-1], self.waypoints[1:]):
            _check_segment_avoids_one(p, q)


@dataclass
class CriticalFit:
    sigma_hat: complex
    a_hat: complex
    delta_hat: float
    rms: float
    sigma_lin: complex = 0j
    a_lin: complex = 0j
    method: str = "power"


@dataclass
class Trace:
    states: list = field(default_factory=list)
    local_err: list = field(default_factory=list)
    events: list = field(default_factory=list)

    @property
    def final(self) -> OdeState:
        return self.states[-1]

    def arrays(self):
        x = np.array([s.x.to_complex() for s in self.states])
        return x, np.array([s.y for s in self.states]), np.array([s.dy for s in self.states])


def _check_segment_avoids_one(p: CoveringPoint, q: CoveringPoint, tol: float = 1e-6):
    # x = 1 sits at log x = 2 pi i k on the covering; test the segment in log space
    a, b = p.log(), q.log()
    d = b - a
    lo, hi = sorted((a.imag, b.imag))
    for k in range(math.floor(lo / (2 * math.pi)) - 1, math.ceil(hi / (2 * math.pi)) + 2):
        c = 2j * math.pi * k
        t = 0.0 if d == 0 else min(1.0, max(0.0, ((c - a) * d.conjugate()).real / abs(d) ** 2))
        if abs(a + t * d - c) < tol:
            raise DomainError("path segment passes through x = 1")


def _near_singular(x: complex, y: complex, guard: float) -> bool:
    # y legitimately tends to 0 (resp. 1) as x -> 0 (resp. 1); measure relative to that scale
    d0, d1 = min(1.0, abs(x)), min(1.0, abs(1 - x))
    return abs(y) < guard * d0 or abs(y - 1) < guard * d1 or abs(y - x) < guard * min(d0, d1)


def pvi_rhs_raw(x: complex, y: complex, p: complex, alpha2: complex) -> complex:
    """y'' for PVI with (2mu-1)^2 passed as alpha2."""
    ym1 = y - 1
    yx = y - x
    xm1 = x - 1
    return (0.5 * (1 / y + 1 / ym1 + 1 / yx) * p * p
            - (1 / x + 1 / xm1 + 1 / yx) * p
            + 0.5 * y * ym1 * yx / (x * x * xm1 * xm1) * (alpha2 + x * xm1 / (yx * yx)))


def pvi_rhs(state: OdeState, mu, guard: float = 0.0) -> complex:
    x = state.x.to_complex()
    y = state.y
    if min(abs(y), abs(y - 1), abs(y - x)) <= max(guard, 1e-300):
        raise DomainError("y hits a singular value 0, 1 or x")
    return pvi_rhs_raw(x, y, state.dy, (2 * mu_value(mu) - 1) ** 2)


# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_E = tuple(b5 - b4 for b5, b4 in zip(_B5, _B4))


def _segment(seed: OdeState, target: CoveringPoint, alpha2: complex, plan: PathPlan, trace: Trace,
             h0: float | None = None) -> bool:
    """Integrate one log-straight segment; return False if a pole event stopped it."""
    xi0 = seed.x.log()
    dxi = target.log() - xi0
    if dxi == 0:
        return True
    guard = plan.pole_guard

    def f(lam, y, p):
        x = cmath.exp(xi0 + lam * dxi)
        s = x * dxi
        return p * s, pvi_rhs_raw(x, y, p, alpha2) * s

    lam, y, p = 0.0, seed.y, seed.dy
    h = h0 if h0 is not None else min(1.0, 0.01 / max(abs(dxi), 1e-300) + 1e-3)
    k1 = f(lam, y, p)
    steps = 0
    while lam < 1.0:
        if steps > 2_000_000:
            raise NumericalError("too many steps")
        h = min(h, 1.0 - lam)
        if h < 1e-15:
            raise NumericalError(f"step size underflow at x={cmath.exp(xi0 + lam * dxi)}")
        ks = [k1]
        for i in range(1, 7):
            yi = y + h * sum(a * k[0] for a, k in zip(_A[i], ks))
            pi = p + h * sum(a * k[1] for a, k in zip(_A[i], ks))
            try:
                ks.append(f(lam + _C[i] * h, yi, pi))
            except ZeroDivisionError:
                ks = None
                break
        if ks is None:
            h *= 0.25
            continue
        y5 = y + h * sum(b * k[0] for b, k in zip(_B5, ks))
        p5 = p + h * sum(b * k[1] for b, k in zip(_B5, ks))
        ey = h * sum(e * k[0] for e, k in zip(_E, ks))
        ep = h * sum(e * k[1] for e, k in zip(_E, ks))
        sy = plan.abs_tol + plan.rel_tol * max(abs(y), abs(y5))
        sp = plan.abs_tol + plan.rel_tol * max(abs(p), abs(p5))
        err = max(abs(ey) / sy, abs(ep) / sp)
        if not math.isfinite(err):
            h *= 0.25
            continue
        if err <= 1.0:
            lam += h
            y, p = y5, p5
            k1 = ks[6]
            steps += 1
            x = cmath.exp(xi0 + lam * dxi)
            xi = xi0 + lam * dxi
            cp = CoveringPoint(math.exp(xi.real), xi.imag)
            trace.states.append(OdeState(cp, y, p))
            trace.local_err.append(max(abs(ey), abs(ep)))
            if _near_singular(x, y, guard) or abs(y) > 1 / guard:
                trace.events.append({"event": "pole_proximity", "x_modulus": cp.modulus,
                                     "x_arg": cp.argument, "y": [y.real, y.imag]})
                return False
        h *= min(5.0, max(0.2, 0.9 * err ** (-0.2) if err > 0 else 5.0))
    return True


def integrate(seed: OdeState, plan: PathPlan, mu, raise_on_pole: bool = False) -> Trace:
    """Integrate from seed through plan.waypoints; seed.x should equal the first waypoint."""
    alpha2 = (2 * mu_value(mu) - 1) ** 2
    x0 = seed.x.to_complex()
    if _near_singular(x0, seed.y, plan.pole_guard):
        raise DomainError("seed lies on the singular set")
    first = plan.waypoints[0]
    if abs(first.log() - seed.x.log()) > 1e-12 * max(1.0, abs(seed.x.log())):
        raise DomainError("seed point differs from the first waypoint")
    trace = Trace(states=[seed], local_err=[0.0])
    state = seed
    for target in plan.waypoints[1:]:
        ok = _segment(state, target, alpha2, plan, trace)
        state = trace.states[-1]
        if not ok:
            if raise_on_pole:
                raise PoleHit(f"pole proximity near x={state.x.to_complex()}")
            break
    return trace


def radial_plan(r0: float, r1: float, arg: float = 0.0, **kw) -> PathPlan:
    return PathPlan([CoveringPoint(r0, arg), CoveringPoint(r1, arg)], **kw)


def sample_along(trace: Trace, xs: Sequence[CoveringPoint], mu, plan: PathPlan) -> list[OdeState]:
    """States at requested points, each by a short integration from the nearest trace state."""
    out = []
    alpha2 = (2 * mu_value(mu) - 1) ** 2
    logs = np.array([s.x.log() for s in trace.states])
    for x in xs:
        i = int(np.argmin(np.abs(logs - x.log())))
        st = trace.states[i]
        sub = Trace(states=[st], local_err=[0.0])
        _segment(st, x, alpha2, plan, sub)
        out.append(sub.states[-1])
    return out


def local_coords(trace: Trace, point: str, window):
    x, y, _ = trace.arrays()
    if point == "zero":
        lt = np.array([s.x.log() for s in trace.states])
        yh = y
    elif point == "one":
        t = 1 - x
        lt = np.log(np.abs(t)) + 1j * np.unwrap(np.angle(t))
        yh = 1 - y
    elif point == "infinity":
        lt = -np.array([s.x.log() for s in trace.states])
        yh = y / x
    else:
        raise DomainError(f"unknown point {point!r}")
    r = np.exp(lt.real)
    sel = (r >= window[0]) & (r <= window[1])
    return lt[sel], yh[sel]


def _clog(z: np.ndarray) -> np.ndarray:
    return np.log(np.abs(z)) + 1j * np.unwrap(np.angle(z))


def _fit_power(lt, ly, deltas):
    X = np.column_stack([np.ones_like(lt), lt])
    coef, *_ = np.linalg.lstsq(X, ly, rcond=None)
    rms = float(np.sqrt(np.mean(np.abs(ly - X @ coef) ** 2)))
    # the leading correction is a power t^delta; keep the delta with the smallest residual
    best = (rms, float("nan"), coef)
    for d in deltas:
        Xd = np.column_stack([X, np.exp(d * lt)])
        c, *_ = np.linalg.lstsq(Xd, ly, rcond=None)
        r = float(np.sqrt(np.mean(np.abs(ly - Xd @ c) ** 2)))
        if r < best[0]:
            best = (r, float(d), c)
    return rms, coef, best


def _fit_three_term(lt, yh, s0: complex, a0: complex):
    """Nonlinear fit of a t^(1-s) + t/2 + t^(1+s)/(16a) plus free next-order terms.

    The next order t^(2-ks), k = -2..2, enters linearly and is projected out at
    each (s, a), so only four real parameters are searched.
    """
    w = 1 / np.abs(yh)

    def res(p):
        s, la = p[0] + 1j * p[1], p[2] + 1j * p[3]
        with np.errstate(over="ignore", invalid="ignore"):
            m = np.exp(la + (1 - s) * lt) + 0.5 * np.exp(lt) + np.exp((1 + s) * lt - la) / 16
            B = np.column_stack([np.exp((2 - k * s) * lt) for k in (2, 1, 0, -1, -2)]) * w[:, None]
        r = (yh - m) * w
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(B))):
            return np.full(2 * len(lt), 1e6)
        c, *_ = np.linalg.lstsq(B, r, rcond=None)
        r = r - B @ c
        return np.concatenate([r.real, r.imag])

    starts = [(complex(s0), complex(a0))]
    if a0 != 0:
        starts.append((-complex(s0), 1 / (16 * complex(a0))))
    # coarse grid; the amplitude guess is the median of yhat t^(s-1)
    for sr in (0.1, 0.3, 0.5, 0.7, 0.9):
        for si in (-0.3, 0.0, 0.3):
            sg = complex(sr, si)
            starts.append((sg, complex(np.median((yh * np.exp((sg - 1) * lt)).real)
                                       + 1j * np.median((yh * np.exp((sg - 1) * lt)).imag))))
    best = None
    for sg, ag in starts:
        if ag == 0 or not np.isfinite(ag):
            continue
        la = np.log(ag)
        sol = least_squares(res, [sg.real, sg.imag, la.real, la.imag], xtol=1e-15, ftol=1e-15, gtol=1e-15)
        if best is None or sol.cost < best.cost:
            best = sol
    p = best.x
    rms = float(np.sqrt(2 * np.mean(best.fun**2)))
    return complex(p[0], p[1]), complex(np.exp(p[2] + 1j * p[3])), rms


def fit_critical_data(trace: Trace, point: str = "zero", window=(1e-3, 1e-2),
                      deltas: Sequence[float] | None = None, osc_tol: float = 0.05,
                      method: str = "auto") -> CriticalFit:
    """Estimate (sigma, a) at a critical point from trace samples in the local coordinate t.

    'power' fits yhat = a t^(1-sigma) (1 + c t^delta): a plain regression of
    ln yhat on ln t, then a correction t^delta with delta scanned on a grid.
    'three_term' fits a t^(1-sigma) + t/2 + t^(1+sigma)/(16a) plus the next order
    by nonlinear least squares, which separates the terms when sigma is small
    or complex.
    'auto' keeps the smaller residual; near sigma = 0 the three-term amplitude is
    degenerate and the power fit is used.
    """
    if method not in ("auto", "power", "three_term"):
        raise DomainError(f"unknown fit method {method!r}")
    lt, yh = local_coords(trace, point, window)
    if len(lt) < 10:
        raise DomainError(f"only {len(lt)} trace points inside the fit window; need 10")
    ly = _clog(yh)
    deltas = deltas if deltas is not None else np.linspace(0.1, 2.0, 96)
    rms_lin, coef, (r, d, c) = _fit_power(lt, ly, deltas)
    sig_lin, a_lin = complex(1 - coef[1]), complex(np.exp(coef[0]))
    power = CriticalFit(complex(1 - c[1]), complex(np.exp(c[0])), d, r, sig_lin, a_lin, "power")
    if method == "power" or (method == "auto" and rms_lin <= osc_tol and abs(power.sigma_hat) < 0.02):
        if rms_lin > osc_tol:
            raise DomainError(f"window looks oscillatory (rms {rms_lin:.3g}); power-law fit refused")
        return power
    s3, a3, r3 = _fit_three_term(lt, yh, power.sigma_hat, power.a_hat)
    if s3.real < 0:
        # (sigma, a) and (-sigma, 1/(16a)) give the same three terms; report 0 <= Re sigma
        s3, a3 = -s3, 1 / (16 * a3)
    three = CriticalFit(s3, a3, float("nan"), r3, sig_lin, a_lin, "three_term")
    if method == "three_term":
        return three
    if abs(s3) < 0.02 and rms_lin <= osc_tol:
        return power
    cands = [f for f in (power, three) if f.method == "three_term" or rms_lin <= osc_tol]
    best = min(cands, key=lambda f: f.rms)
    if best.rms > osc_tol:
        raise DomainError(f"no model fits the window (rms {best.rms:.3g})")
    return best


def residual_scan(y_fn: Callable[[CoveringPoint], complex], xs: Sequence[CoveringPoint], mu,
                  method: str = "stencil", rel_h: float = 2e-3, n_cauchy: int = 32,
                  rel_radius: float = 0.2) -> list[float]:
    """|y'' - rhs| at each point.

    'stencil' uses 5-point differences along the radial direction with step
    rel_h*|x|.  'cauchy' uses trapezoidal Cauchy integrals on a small circle,
    which is far less sensitive to rounding.
    """
    out = []
    for x in xs:
        if method == "stencil":
            y0, d1, d2 = _stencil(y_fn, x, rel_h)
        elif method == "cauchy":
            y0, d1, d2 = cauchy_derivatives(y_fn, x, n_cauchy, rel_radius)
        else:
            raise DomainError(f"unknown method {method!r}")
        xc = x.to_complex()
        if min(abs(y0), abs(y0 - 1), abs(y0 - xc)) < 1e-300:
            raise DomainError("stencil centre on the singular set")
        out.append(abs(d2 - pvi_rhs_raw(xc, y0, d1, (2 * mu_value(mu) - 1) ** 2)))
    return out


def _stencil(y_fn, x: CoveringPoint, rel_h: float):
    h = rel_h * x.modulus
    e = cmath.exp(1j * x.argument)  # radial direction
    vals = [y_fn(CoveringPoint(x.modulus + k * h, x.argument)) for k in (-2, -1, 0, 1, 2)]
    d1 = (vals[0] - 8 * vals[1] + 8 * vals[3] - vals[4]) / (12 * h * e)
    d2 = (-vals[0] + 16 * vals[1] - 30 * vals[2] + 16 * vals[3] - vals[4]) / (12 * h * h * e * e)
    return vals[2], d1, d2


def cauchy_derivatives(y_fn, x: CoveringPoint, n: int = 32, rel_radius: float = 0.2):
    """Value, first and second derivative from the trapezoid rule on |z - x| = r."""
    xc = x.to_complex()
    r = rel_radius * min(x.modulus, abs(1 - xc)) if abs(1 - xc) > 0 else rel_radius * x.modulus
    th = 2 * math.pi * np.arange(n) / n
    w = np.exp(1j * th)
    vals = np.array([y_fn(CoveringPoint.from_complex(xc + r * wk, x.argument)) for wk in w])
    c1 = np.mean(vals * np.conj(w)) / r
    c2 = np.mean(vals * np.conj(w) ** 2) / r**2
    return complex(np.mean(vals)), complex(c1), complex(2 * c2)
