import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cubeduality.bellman import U, make_context
from cubeduality.duality import (
    POINCARE32,
    Potential,
    abstract_dualize,
    davis_potential,
    dual_M,
    dual_inequality_gap,
    dual_obstacle_gap,
    dual_saddle,
    exp_U,
    logsob_coefficients_ok,
    logsob_exp_gap,
    logsob_M,
    monge_ampere_eigs,
    monge_ampere_matrix,
    poincare32_check,
    poincare32_M,
    poincare32_U_identity_gap,
    psi_value,
    saddle_solve,
    trivial_M,
    vector_main_gap,
)
from cubeduality.errors import CoercivityError, ConvexityError

CTX = {a: make_context(a) for a in (2, 3, 4)}
xs_ = st.floats(-2, 2)
ys_ = st.floats(0, 2)
ab_ = st.floats(-1, 1)


class TestSaddle:
    def test_alpha2_value(self):
        res = saddle_solve(davis_potential(CTX[2]), 2.0, 1.0)
        assert res.value == pytest.approx(0.75, abs=1e-9)
        assert res.p_star == pytest.approx(1.0, abs=1e-5)
        assert res.q_star == pytest.approx(-0.5, abs=1e-5)
        assert res.gap <= 1e-8

    def test_origin(self):
        res = saddle_solve(davis_potential(CTX[2]), 0.0, 0.0)
        assert abs(res.value) <= 1e-12
        assert abs(res.p_star) <= 1e-5 and abs(res.q_star) <= 1e-5

    def test_poincare32_at_one(self):
        res = saddle_solve(POINCARE32, 1.0, 0.0)
        assert res.value == pytest.approx(1.0, abs=1e-9)
        assert res.p_star == pytest.approx(1.5, abs=1e-5)
        assert abs(res.q_star) <= 1e-5

    @pytest.mark.parametrize("alpha,x,y", [(3, 0.7, 0.4), (4, -1.2, 1.5), (4, 0.3, 0.1)])
    def test_saddle_validity(self, alpha, x, y):
        pot = davis_potential(CTX[alpha])
        res = saddle_solve(pot, x, y)
        assert res.gap <= 1e-7
        rng = np.random.default_rng(7)
        centre = psi_value(pot, res.p_star, res.q_star, x, y)
        for p, q in zip(rng.uniform(-3, 3, 100), rng.uniform(-3, 0, 100)):
            assert psi_value(pot, p, res.q_star, x, y) <= centre + 1e-8
            assert psi_value(pot, res.p_star, q, x, y) >= centre - 1e-8

    def test_structured_matches_generic(self):
        for alpha in (3, 4):
            for x, y in [(0.5, 0.2), (1.0, 1.0), (-0.4, 2.0), (0.0, 0.7), (1.3, 0.0)]:
                a = dual_M(CTX[alpha], x, y)
                b = dual_M(CTX[alpha], x, y, tol=1e-12, method="saddle")
                assert a == pytest.approx(b, abs=1e-9)

    def test_dual_saddle_point_is_returned(self):
        p, q, m = dual_saddle(CTX[3], np.array([0.8]), np.array([0.9]))
        pot = davis_potential(CTX[3])
        assert psi_value(pot, p[0], q[0], 0.8, 0.9) == pytest.approx(m[0], abs=1e-12)

    def test_negative_y_rejected(self):
        with pytest.raises(ValueError):
            saddle_solve(POINCARE32, 1.0, -1.0)

    def test_non_concave_detected(self):
        wavy = Potential(fn=lambda p, q: math.cos(3 * p) - p * p + q * q, name="wavy")
        with pytest.raises(ConvexityError):
            saddle_solve(wavy, 0.0, 1.0, with_gap=False)

    def test_spot_check(self):
        rng = np.random.default_rng(0)
        assert davis_potential(CTX[4]).spot_check(rng)
        bad = Potential(fn=lambda p, q: p * p)
        with pytest.raises(ConvexityError):
            bad.spot_check(rng)


class TestDualM:
    def test_alpha2_grid(self):
        x, y = np.meshgrid(np.linspace(-2, 2, 21), np.linspace(0, 2, 11))
        assert np.max(np.abs(dual_M(CTX[2], x, y) - (x * x - y * y) / 4)) <= 1e-12

    def test_alpha3_axis(self):
        assert dual_M(CTX[3], 1.0, 0.0) == pytest.approx(2 / 3**1.5, abs=1e-12)

    @given(st.sampled_from([2, 3, 4]), st.floats(0.01, 2))
    def test_zero_x_nonpositive(self, alpha, y):
        assert dual_M(CTX[alpha], 0.0, y) <= 0

    @given(st.sampled_from([3, 4]), xs_, ys_)
    def test_even_in_x(self, alpha, x, y):
        assert dual_M(CTX[alpha], x, y) == dual_M(CTX[alpha], -x, y)

    @pytest.mark.parametrize("alpha", [2, 3, 4])
    def test_decreasing_in_y(self, alpha):
        ys = np.linspace(0, 2, 81)
        for x in (-1.5, 0.0, 0.3, 1.9):
            m = dual_M(CTX[alpha], x, ys)
            assert np.all(np.diff(m) <= 1e-12)

    def test_obstacle_examples(self):
        for ctx in CTX.values():
            assert abs(dual_obstacle_gap(ctx, 1.4, 0.0)) <= 1e-12
        assert dual_obstacle_gap(CTX[4], 0.5, 1.0) >= 0
        x, y = np.meshgrid(np.linspace(-2, 2, 9), np.linspace(0, 2, 9))
        assert np.max(np.abs(dual_obstacle_gap(CTX[2], x, y))) <= 1e-12

    @given(xs_, ys_, ab_, ab_)
    def test_alpha2_inequality_is_b2_over_2(self, x, y, a, b):
        assert dual_inequality_gap(CTX[2], x, y, a, b) == pytest.approx(b * b / 2, abs=1e-12)

    @given(st.sampled_from([3, 4]), xs_, ys_, ab_, ab_)
    def test_dual_inequality(self, alpha, x, y, a, b):
        assert dual_inequality_gap(CTX[alpha], x, y, a, b) >= -1e-6

    def test_dual_inequality_examples(self):
        assert dual_inequality_gap(CTX[4], 0.3, 0.8, 0.0, 0.0) == 0
        assert dual_inequality_gap(CTX[4], 0.3, 0.8, 0.5, 0.4) >= 0


class TestVectorForm:
    @given(st.sampled_from([2, 3, 4]), xs_, st.floats(-1, 1), ab_)
    def test_one_dim_reduction(self, alpha, x, y, a):
        g = vector_main_gap(CTX[alpha], x, a, np.array([y]), np.array([0.0]))
        assert g == pytest.approx(dual_inequality_gap(CTX[alpha], x, abs(y), a, 0.0) / 2, abs=1e-12)

    def test_zero_vectors(self):
        g = vector_main_gap(CTX[3], 0.4, 0.3, np.zeros(3), np.zeros(3))
        assert g == pytest.approx(dual_inequality_gap(CTX[3], 0.4, 0.0, 0.3, 0.0) / 2, abs=1e-12)

    @pytest.mark.parametrize("alpha", [2, 3, 4])
    def test_random_batch(self, alpha):
        rng = np.random.default_rng(alpha)
        x, a = rng.uniform(-2, 2, 200), rng.uniform(-1, 1, 200)
        y, b = rng.uniform(-1, 1, (200, 3)), rng.uniform(-1, 1, (200, 3))
        assert np.min(vector_main_gap(CTX[alpha], x, a, y, b)) >= -1e-6


class TestClosedFormPairs:
    def test_poincare_values(self):
        assert poincare32_M(1.0, 0.0) == pytest.approx(1.0)
        assert poincare32_M(0.0, 1.0) == pytest.approx(-math.sqrt(2) / 2, abs=1e-15)
        assert poincare32_M(1.0, 1.0) == pytest.approx(((1 + 1j) ** 1.5).real, abs=1e-14)

    @pytest.mark.parametrize("x,y", [(1.0, 0.0), (0.0, 1.0), (-1.5, 0.5), (0.7, 1.9), (-2.0, 0.0)])
    def test_poincare_minimax(self, x, y):
        closed, mm, diff = poincare32_check(x, y)
        assert abs(diff) <= 1e-7

    def test_poincare_identity(self):
        assert abs(poincare32_U_identity_gap(1.0, -2.0, 0.5)) <= 1e-12
        assert poincare32_U_identity_gap(0.3, 0.9, 0.0) == 0

    @given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
    def test_poincare_identity_random(self, p, q, a):
        assert abs(poincare32_U_identity_gap(p, q, a)) <= 1e-12 * (1 + abs(p) + abs(q) + abs(a)) ** 3

    def test_logsob_exp(self):
        assert logsob_exp_gap(0.0) == 0
        assert logsob_exp_gap(1.0) == pytest.approx(0.21128, abs=1e-5)
        assert logsob_coefficients_ok(20)

    @given(st.floats(-5, 5))
    def test_logsob_exp_nonnegative(self, a):
        assert logsob_exp_gap(a) >= -1e-12 * math.exp(a * a / 2)

    def test_exp_U(self):
        assert exp_U(0.0, 0.0) == 1.0


class TestMongeAmpere:
    def test_logsob_point(self):
        lam = monge_ampere_eigs(logsob_M, 1.0, 0.5)
        assert max(lam) <= 1e-6
        assert abs(np.linalg.det(monge_ampere_matrix(logsob_M, 1.0, 0.5))) <= 1e-6

    def test_trivial(self):
        m = monge_ampere_matrix(lambda x, y: trivial_M(x, y, C=1.0, D=0.3, Q=2.0), 0.8, 1.1)
        assert np.allclose(m, [[0, 0], [0, -2]], atol=1e-6)

    def test_poincare_point(self):
        m = monge_ampere_matrix(poincare32_M, 1.0, 1.0)
        assert max(np.linalg.eigvalsh(m)) <= 1e-6 and abs(np.linalg.det(m)) <= 1e-6

    def test_plain_central_differences_available(self):
        m = monge_ampere_matrix(logsob_M, 1.0, 0.5, richardson=False)
        assert max(np.linalg.eigvalsh(m)) <= 1e-4

    def test_y_must_exceed_step(self):
        with pytest.raises(ValueError):
            monge_ampere_matrix(logsob_M, 1.0, 0.0)


class TestAbstractDualize:
    def test_alpha2_self_dual(self):
        ctx = CTX[2]
        m, o = abstract_dualize(davis_potential(ctx), lambda p, q: U(ctx, p, q), 1.2, 0.7)
        expect = (1.2**2 - 0.7**2) / 4
        assert m == pytest.approx(expect, abs=1e-8) and o == pytest.approx(expect, abs=1e-8)

    def test_alpha4_matches_dual_M(self):
        ctx = make_context(4)
        m, _ = abstract_dualize(davis_potential(ctx), lambda p, q: U(ctx, p, q), 1.0, 0.5)
        assert m == pytest.approx(dual_M(ctx, 1.0, 0.5), abs=1e-8)

    def test_exponential_not_coercive(self):
        pot = Potential(fn=lambda p, q: math.exp(p - q * q / 2), name="exp")
        with pytest.raises(CoercivityError):
            abstract_dualize(pot, pot.fn, 1.0, 0.0)
