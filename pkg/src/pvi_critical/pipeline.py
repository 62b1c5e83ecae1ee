"""End-to-end check of the connection formulas: seed near 0, integrate, fit at 1 or infinity."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .asymptotics import eval_leading
from .connection import CriticalData, a_generic, connect, inverse, substitute_infinity, substitute_one
from .errors import DomainError, PoleHit, PVIError
from .integrator import CriticalFit, OdeState, PathPlan, Trace, local_coords, fit_critical_data, integrate
from .monodromy import MonodromyTriple
from .special import CoveringPoint


@dataclass
class VerifyReport:
    point: str
    predicted: CriticalData
    fitted: CriticalFit
    matched: CriticalData
    sigma_error: float
    a_error: float
    tol: float
    seed_radius: float
    n_states: int
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.sigma_error <= self.tol and self.a_error <= self.tol

    def to_json(self):
        c = lambda z: [complex(z).real, complex(z).imag]
        return {
            "point": self.point,
            "passed": self.passed,
            "predicted": self.predicted.to_json(),
            "matched_alias": self.matched.to_json(),
            "fitted": {"sigma": c(self.fitted.sigma_hat), "a": c(self.fitted.a_hat),
                       "rms": self.fitted.rms, "method": self.fitted.method},
            "sigma_error": self.sigma_error,
            "a_error": self.a_error,
            "tol": self.tol,
            "seed_radius": self.seed_radius,
            "n_states": self.n_states,
            "notes": list(self.notes),
        }


def auto_seed_radius(sigma: complex, target: float = 1e-8) -> float:
    """Radius where the truncation error of the three-term seed is about target.

    The neglected terms are relatively of size |x|^m, m = min(Re sigma, 1 - Re sigma).
    """
    s = complex(sigma)
    if abs(s) < 1e-12:
        return 1e-6
    m = max(0.25, min(s.real, 1 - s.real))
    return float(min(1e-6, max(1e-32, target ** (1 / m))))


def _alias_candidates(pred: CriticalData, local: MonodromyTriple, mu) -> list[CriticalData]:
    out = [pred]
    if pred.sigma != 0:
        out.append(CriticalData(-pred.sigma, 1 / (16 * pred.a), pred.point))
    for n in (-1, 1):
        for sign in (1, -1):
            s = sign * pred.sigma + 2 * n
            try:
                out.append(CriticalData(s, a_generic(s, local, mu), pred.point))
            except PVIError:
                pass
    return out


def _distance(fit: CriticalFit, cd: CriticalData) -> tuple[float, float]:
    return abs(fit.sigma_hat - cd.sigma), abs(fit.a_hat - cd.a) / max(1.0, abs(cd.a))


def connection_path(point: str, x0: CoveringPoint, window, n: int = 60) -> list[CoveringPoint]:
    ts = np.geomspace(0.2, window[0] * 0.5, n)
    if point == "one":
        # leave 0 along the seed ray, so a nonzero argument detours around poles on (0, 1)
        lead = [x0] if x0.argument == 0 else [x0, CoveringPoint(0.5, x0.argument)]
        return lead + [CoveringPoint(1 - t, 0.0) for t in ts]
    if point == "infinity":
        return [x0] + [CoveringPoint(1 / t, x0.argument) for t in ts]
    raise ValueError(f"point must be 'one' or 'infinity', not {point!r}")


def rational_critical_data(a, point: str) -> CriticalData:
    """Critical data of the mu = 1 solution y = a x/(1 - (1 - a) x) at 0, 1 or infinity.

    Near 1, 1 - y = (1 - x)/(1 - (1 - a) x); near infinity y/x = a t/(t - (1 - a)), t = 1/x.
    """
    a = complex(a)
    if a == 0:
        raise DomainError("a must be nonzero")
    if point == "zero":
        return CriticalData(0, a, point)
    if point == "one":
        return CriticalData(0, 1 / a, point)
    if a == 1:
        raise DomainError("a = 1 gives y = x, which has no critical behavior of this form at infinity")
    return CriticalData(0, -a / (1 - a), point)


def run_connection_trace(triple: MonodromyTriple | None, mu, point: str, seed_radius: float | None = None,
                         arg: float | None = None, window=(1e-4, 1e-2),
                         cd0: CriticalData | None = None) -> tuple[Trace, CriticalData, float]:
    """Seed from the data at 0 (from the triple unless cd0 is given) and integrate towards point."""
    if cd0 is None:
        cd0 = inverse(triple, mu)
    r0 = seed_radius if seed_radius is not None else auto_seed_radius(cd0.sigma)
    if arg is None:
        # the infinity formulas hold on rays in the lower half plane
        arg = -math.pi / 2 if point == "infinity" else 0.0
    x0 = CoveringPoint(r0, arg)
    y0, dy0 = eval_leading(x0, cd0, warn_tol=1.0)
    tr = integrate(OdeState(x0, y0, dy0), PathPlan(connection_path(point, x0, window)), mu)
    return tr, cd0, r0


def _require_arrival(tr: Trace, point: str, window, need: int = 10):
    if not tr.events:
        return
    lt, _ = local_coords(tr, point, window)
    if len(lt) < need:
        ev = tr.events[-1]
        raise PoleHit(f"integration stopped at a pole near |x|={ev['x_modulus']:.4g}, arg={ev['x_arg']:.4g} "
                      "before reaching the fit window; poles are not continued through")


def verify_connection(triple: MonodromyTriple, mu, point: str = "one", seed_radius: float | None = None,
                      arg: float | None = None, window=(1e-4, 1e-2), tol: float = 1e-2,
                      fit_method: str = "auto", expect: CriticalData | None = None) -> VerifyReport:
    """Compare connect(triple, mu, point) against a fit of the integrated transcendent.

    The fitted pair is matched against the prediction and its aliases
    (-sigma, 1/(16a)) and (+-sigma + 2n, a(+-sigma + 2n)).
    """
    tr, _, r0 = run_connection_trace(triple, mu, point, seed_radius, arg, window)
    _require_arrival(tr, point, window)
    notes = list(tr.events)
    pred = expect if expect is not None else connect(triple, mu, point)
    local = substitute_one(triple) if point == "one" else substitute_infinity(triple)
    fit = fit_critical_data(tr, point, window, method=fit_method)
    cands = _alias_candidates(pred, local, mu) if expect is None else [pred]
    best = min(cands, key=lambda c: max(_distance(fit, c)))
    es, ea = _distance(fit, best)
    return VerifyReport(point, pred, fit, best, es, ea, tol, r0, len(tr.states), notes)


def verify_rational(a, point: str = "one", seed_radius: float | None = None, arg: float | None = None,
                    window=(1e-4, 1e-2), tol: float = 1e-2, expect: CriticalData | None = None) -> VerifyReport:
    """The same check for the mu = 1, sigma = 0 family, whose triple (0, 0, 0) is not admissible."""
    cd0 = rational_critical_data(a, "zero")
    tr, _, r0 = run_connection_trace(None, 1, point, seed_radius, arg, window, cd0=cd0)
    _require_arrival(tr, point, window)
    pred = expect if expect is not None else rational_critical_data(a, point)
    fit = fit_critical_data(tr, point, window, method="power")
    es, ea = _distance(fit, pred)
    return VerifyReport(point, pred, fit, pred, es, ea, tol, r0, len(tr.states), list(tr.events))
