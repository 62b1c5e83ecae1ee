import cmath
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from pvi_critical.errors import DegenerateError
from pvi_critical.monodromy import (
    MonodromyMatrixSet, MonodromyTriple, Mu, braid_beta1, braid_beta1_sq, braid_beta1_sq_inv, braid_beta2,
    braid_beta2_sq, braid_beta2_sq_inv, canonicalize, equivalent, is_admissible, matrix_realization,
    relation_residual, trace_check,
)

from conftest import SQRT2

T = MonodromyTriple
cplx = st.complex_numbers(max_magnitude=4, allow_nan=False, allow_infinity=False)


def close(s, t, tol=1e-12):
    return max(abs(a - b) for a, b in zip(s.as_tuple(), t.as_tuple())) <= tol


class TestRelation:
    @pytest.mark.parametrize("t,mu", [((0, 1, 1), 0.25), ((SQRT2, 0, SQRT2), 0.5), ((3, 3, 3), -1)])
    def test_zero_residual(self, t, mu):
        assert relation_residual(T(*t), Mu(mu)) < 1e-12

    def test_nonzero(self):
        assert relation_residual(T(1, 1, 1), 0.5) > 0.1

    def test_mu_zero_rejected(self):
        with pytest.raises(DegenerateError):
            Mu(0)


class TestAdmissible:
    def test_examples(self):
        assert is_admissible(T(0, 1, 1))
        assert not is_admissible(T(0, 0, 1))
        assert not is_admissible(T(2, 2, 2))
        assert not is_admissible(T(-2, -2, 2))


class TestCanonicalize:
    def test_examples(self):
        assert close(canonicalize(T(-SQRT2, 0, -SQRT2)), T(SQRT2, 0, SQRT2))
        assert close(canonicalize(T(SQRT2, 0, SQRT2)), T(SQRT2, 0, SQRT2))
        assert close(canonicalize(T(1, -1, -1)), T(1, 1, 1))

    @settings(max_examples=200, deadline=None)
    @given(cplx, cplx, cplx)
    def test_invariant_under_two_sign_flips(self, a, b, c):
        t = T(a, b, c)
        assume(is_admissible(t))
        base = canonicalize(t)
        for flip in ((-1, -1, 1), (-1, 1, -1), (1, -1, -1)):
            ft = T(*(s * z for s, z in zip(flip, t.as_tuple())))
            assert close(canonicalize(ft), base, 1e-14)
        assert close(canonicalize(base), base, 0)
        assert equivalent(t, base)


class TestBraids:
    def test_examples(self):
        assert close(braid_beta1_sq(T(0, 1, 1)), T(0, 1, 1))
        assert close(braid_beta1_sq(T(1, 1, 1)), T(1, 1, 0))
        assert close(braid_beta2_sq(T(1, 1, 1)), T(0, 1, 1))

    @settings(max_examples=200, deadline=None)
    @given(cplx, cplx, cplx, st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False))
    def test_preserve_relation(self, a, b, c, mu):
        t = T(a, b, c)
        if abs(mu) < 1e-3:
            mu = 0.5
        r = relation_residual(t, mu)
        scale = 1 + max(abs(z) for z in t.as_tuple()) ** 3
        for br in (braid_beta1, braid_beta2, braid_beta1_sq, braid_beta2_sq):
            assert abs(relation_residual(br(t), mu) - r) <= 1e-12 * scale ** 3

    @settings(max_examples=200, deadline=None)
    @given(cplx, cplx, cplx)
    def test_square_inverses(self, a, b, c):
        t = T(a, b, c)
        scale = 1 + max(abs(z) for z in t.as_tuple()) ** 3
        assert close(braid_beta1_sq_inv(braid_beta1_sq(t)), t, 1e-12 * scale ** 2)
        assert close(braid_beta2_sq_inv(braid_beta2_sq(t)), t, 1e-12 * scale ** 2)
        assert close(braid_beta1(braid_beta1(t)), braid_beta1_sq(t), 1e-12 * scale ** 2)
        assert close(braid_beta2(braid_beta2(t)), braid_beta2_sq(t), 1e-12 * scale ** 2)


class TestMatrices:
    def test_realization_111(self):
        ms = matrix_realization(T(1, 1, 1))
        for m in (ms.M0, ms.Mx, ms.M1):
            assert abs(np.linalg.det(m) - 1) < 1e-12
            assert abs(np.trace(m) - 2) < 1e-12
        assert abs(np.linalg.det(ms.Minf) - 1) < 1e-12
        assert abs(np.trace(ms.Mx @ ms.M1) - 1) < 1e-12
        assert np.allclose(ms.Minf @ ms.M1 @ ms.Mx @ ms.M0, np.eye(2), atol=1e-12)

    @pytest.mark.parametrize("t", [(1, 1, 1), (SQRT2, 0, SQRT2), (0, 1, 1), (1, 0, 1), (3, 3, 3)])
    def test_round_trip_examples(self, t):
        assert close(trace_check(matrix_realization(T(*t))), canonicalize(T(*t)), 1e-10)

    def test_identity(self):
        I = np.eye(2, dtype=complex)
        assert close(trace_check(MonodromyMatrixSet(I, I, I, I)), T(0, 0, 0))

    def test_random_round_trip(self):
        rng = np.random.default_rng(7)
        n = 0
        while n < 100:
            t = T(*(complex(*rng.normal(size=2)) * 1.5 for _ in range(3)))
            if not is_admissible(t):
                continue
            n += 1
            assert close(trace_check(matrix_realization(t)), canonicalize(t), 1e-8)

    def test_inadmissible_rejected(self):
        with pytest.raises(DegenerateError):
            matrix_realization(T(0, 0, 0))
