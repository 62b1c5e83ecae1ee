"""Fuchsian system from a transcendent; monodromy by loop integration."""

import numpy as np
import pytest

from pvi_critical.asymptotics import eval_leading
from pvi_critical.connection import CriticalData, forward
from pvi_critical.elliptic import picard_closed_form, picard_triple
from pvi_critical.errors import DomainError, PoleError, PoleHit
from pvi_critical.fuchsian import (
    LoopSpec, build_system, default_loops, numeric_monodromy, traces_to_triple,
)
from pvi_critical.integrator import OdeState, cauchy_derivatives, integrate, radial_plan
from pvi_critical.monodromy import (
    MonodromyMatrixSet, MonodromyTriple, equivalent, is_admissible, matrix_realization, pair_traces, trace_check,
)
from pvi_critical.pipeline import auto_seed_radius

from conftest import SQRT2, cp, picard, rational


def picard_system(x, k0=1.0):
    y, dy, _ = cauchy_derivatives(picard(), x, 48, 0.1)
    return build_system(x, y, dy, 0.5, k0)


def transcendent_state(sigma, a, mu, r1):
    cd = CriticalData(sigma, a)
    r0 = auto_seed_radius(sigma)
    y0, dy0 = eval_leading(cp(r0), cd, warn_tol=np.inf)
    tr = integrate(OdeState(cp(r0), y0, dy0), radial_plan(r0, r1), mu, raise_on_pole=True)
    return tr


@pytest.fixture(scope="module")
def picard_monodromy():
    return numeric_monodromy(picard_system(cp(0.3)))


class TestSystem:
    def test_invariants_picard(self):
        inv = picard_system(cp(0.3)).invariants()
        for key in ("tr_A0", "tr_Ax", "tr_A1", "det_A0", "det_Ax", "det_A1", "sum"):
            assert inv[key] <= 1e-9, key
        assert inv["a12_at_y"] <= 1e-8

    def test_invariants_generic(self):
        fs = build_system(cp(0.2, 0.4), 0.3 - 0.1j, 0.7 + 0.2j, 0.3 + 0.1j)
        inv = fs.invariants()
        assert max(inv.values()) < 1e-10

    def test_singular_y(self):
        with pytest.raises(PoleError):
            build_system(cp(0.3), 0.3, 1.0, 0.5)
        with pytest.raises(PoleError):
            build_system(cp(0.3), 1.0, 1.0, 0.5)

    def test_k_from_quadrature(self):
        y, dy, _ = rational(0.5)
        fn = lambda x: y(x.to_complex())
        fs = build_system(cp(0.3), y(0.3), dy(0.3), 1.0, quadrature_base=cp(0.1), y_fn=fn)
        # (y - s)/(s(s - 1)) = (1 - a)/(1 - (1 - a)s), so k = (1 - 0.05)/(1 - 0.15)
        assert abs(fs.k - 0.95 / 0.85) < 1e-12
        assert max(fs.invariants().values()) < 1e-10


class TestMonodromy:
    def test_det_and_traces(self, picard_monodromy):
        ms = picard_monodromy
        for m in (ms.M0, ms.Mx, ms.M1):
            assert abs(np.linalg.det(m) - 1) < 1e-8
            assert abs(np.trace(m) - 2) < 1e-6

    def test_picard_traces(self, picard_monodromy):
        t = pair_traces(picard_monodromy)
        assert max(abs(a - b) for a, b in zip(t, (0, 2, 0))) < 1e-4

    def test_picard_triple(self, picard_monodromy):
        tri = traces_to_triple(picard_monodromy)
        assert equivalent(tri, MonodromyTriple(SQRT2, 0, SQRT2), 1e-4)
        assert equivalent(tri, forward(0.5, 1, 0.5), 1e-4)
        assert equivalent(tri, picard_triple(1, 0.5), 1e-4)

    def test_gauge_invariance(self, picard_monodromy):
        fs2 = picard_system(cp(0.3), k0=2.0)
        inv = fs2.invariants()
        assert max(inv.values()) < 1e-9
        t1, t2 = pair_traces(picard_monodromy), pair_traces(numeric_monodromy(fs2))
        assert max(abs(a - b) for a, b in zip(t1, t2)) < 1e-9

    def test_basepoint_independence(self, picard_monodromy):
        fs = picard_system(cp(0.3))
        loops = default_loops(fs.x, basepoint=-0.5 + 1.0j)
        t1, t2 = pair_traces(picard_monodromy), pair_traces(numeric_monodromy(fs, loops))
        assert max(abs(a - b) for a, b in zip(t1, t2)) < 1e-8

    def test_rational_family_is_reducible(self):
        y, dy, _ = rational(0.5)
        fs = build_system(cp(0.3), y(0.3), dy(0.3), 1.0)
        ms = numeric_monodromy(fs)
        for t in pair_traces(ms):
            assert abs(t - 2) < 1e-5
        for m in (ms.M0, ms.Mx, ms.M1):
            assert abs(np.linalg.det(m) - 1) < 1e-8

    def test_isomonodromy_picard(self):
        fn = picard()
        t = []
        for r in (0.2, 0.35):
            y, dy, _ = cauchy_derivatives(fn, cp(r), 48, 0.1)
            t.append(pair_traces(numeric_monodromy(build_system(cp(r), y, dy, 0.5))))
        assert max(abs(a - b) for a, b in zip(*t)) < 1e-3

    def test_isomonodromy_generic(self):
        tr = transcendent_state(0.4, 0.8 - 0.3j, 0.3, 0.2)
        s1 = tr.final
        s2 = integrate(s1, radial_plan(0.2, 0.35), 0.3).final
        t1 = pair_traces(numeric_monodromy(build_system(s1.x, s1.y, s1.dy, 0.3)))
        t2 = pair_traces(numeric_monodromy(build_system(s2.x, s2.y, s2.dy, 0.3)))
        assert max(abs(a - b) for a, b in zip(t1, t2)) < 1e-3

    def test_loop_validation(self):
        with pytest.raises(DomainError):
            LoopSpec("two", 0.1)
        with pytest.raises(DomainError):
            LoopSpec("zero", 0.1, orientation=-1)
        fs = picard_system(cp(0.3))
        with pytest.raises(DomainError):
            numeric_monodromy(fs, [LoopSpec("zero", 0.25), LoopSpec("x", 0.1), LoopSpec("one", 0.1)])
        with pytest.raises(DomainError):
            numeric_monodromy(fs, [LoopSpec("zero", 0.1), LoopSpec("x", 0.1, 2j), LoopSpec("one", 0.1)])


class TestTracesToTriple:
    def test_identity(self):
        I = np.eye(2, dtype=complex)
        tri = traces_to_triple(MonodromyMatrixSet(I, I, I, I))
        assert tri.as_tuple() == (0, 0, 0)

    def test_consistent_with_trace_check(self):
        rng = np.random.default_rng(2)
        n = 0
        while n < 50:
            t = MonodromyTriple(*(complex(*rng.normal(size=2)) for _ in range(3)))
            if not is_admissible(t):
                continue
            n += 1
            ms = matrix_realization(t)
            assert equivalent(traces_to_triple(ms), trace_check(ms), 1e-9)


@pytest.mark.slow
def test_referee_generic_samples():
    rng = np.random.default_rng(20)
    done = 0
    while done < 5:
        sigma = float(rng.uniform(0.2, 0.8))
        a = complex(rng.uniform(0.3, 2.0) * np.exp(1j * rng.uniform(-np.pi, np.pi)))
        try:
            tr = transcendent_state(sigma, a, 0.5, 0.3)
        except PoleHit:
            continue  # a pole on the radial path; draw again
        done += 1
        s = tr.final
        tri = traces_to_triple(numeric_monodromy(build_system(s.x, s.y, s.dy, 0.5)))
        want = forward(sigma, a, 0.5)
        assert equivalent(tri, want, 1e-3), (sigma, a, tri, want)
