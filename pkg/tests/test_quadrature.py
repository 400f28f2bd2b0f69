import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bandext import DecayViolationError, DomainError, NonConvergenceError
from bandext.quadrature import (
    DEFAULT_CONFIG,
    GAUSS_WEIGHTS,
    KRONROD_WEIGHTS,
    NODES,
    QuadratureConfig,
    integrate_algebraic_weight,
    integrate_pv,
    integrate_smooth,
    integrate_sqrt_weight,
    integrate_tail,
)

TOL = 10 * DEFAULT_CONFIG.rel_tol


class TestRule:
    def test_weights_sum(self):
        assert KRONROD_WEIGHTS.sum() == pytest.approx(2.0, rel=1e-15)
        assert GAUSS_WEIGHTS.sum() == pytest.approx(2.0, rel=1e-15)

    @pytest.mark.parametrize("k", range(0, 31, 2))
    def test_kronrod_exact_for_monomials(self, k):
        assert KRONROD_WEIGHTS @ NODES**k == pytest.approx(2.0 / (k + 1), rel=1e-14)

    @pytest.mark.parametrize("k", range(0, 19, 2))
    def test_gauss_exact_for_monomials(self, k):
        assert GAUSS_WEIGHTS @ NODES**k == pytest.approx(2.0 / (k + 1), rel=1e-14)


class TestConfig:
    @pytest.mark.parametrize(
        "kw", [{"rel_tol": 0}, {"abs_tol": -1}, {"pv_window": 0}, {"tail_cutoff_factor": 3.9}, {"max_subdivisions": 0}]
    )
    def test_invalid(self, kw):
        with pytest.raises(DomainError):
            QuadratureConfig(**kw)

    def test_overrides_skip_none(self):
        cfg = DEFAULT_CONFIG.with_overrides(rel_tol=1e-6, abs_tol=None)
        assert cfg.rel_tol == 1e-6 and cfg.abs_tol == DEFAULT_CONFIG.abs_tol


class TestSmooth:
    def test_sine(self):
        assert integrate_smooth(np.sin, 0, math.pi).value == pytest.approx(2.0, abs=1e-10)

    def test_constant_exact(self):
        assert integrate_smooth(lambda t: np.ones_like(t), 0, 1).value == 1.0

    def test_error_reported(self):
        res = integrate_smooth(np.exp, 0, 1)
        assert abs(res.value - (math.e - 1)) <= max(res.error, 1e-15)
        assert res.error <= 1e-10 * (math.e - 1)

    def test_unweighted_endpoint_singularity(self):
        with pytest.raises(NonConvergenceError):
            integrate_smooth(lambda t: 1 / np.sqrt(t), 0, 1)

    def test_budget_exhausted(self):
        cfg = QuadratureConfig(max_subdivisions=2)
        with pytest.raises(NonConvergenceError) as info:
            integrate_smooth(lambda t: np.sin(200 * t), 0, 10, cfg)
        assert math.isfinite(info.value.value)

    def test_scalar_callable(self):
        assert integrate_smooth(lambda t: math.cos(t), 0, math.pi / 2).value == pytest.approx(1.0, abs=1e-12)

    def test_kink_breakpoint(self):
        res = integrate_smooth(lambda t: np.abs(t - 0.3), 0, 1, points=[0.3])
        assert res.value == pytest.approx(0.5 * (0.09 + 0.49), abs=1e-14)

    def test_vector_valued(self):
        k = np.array([1.0, 2.0, 3.0])
        res = integrate_smooth(lambda t: np.cos(k[:, None] * t[None, :]), 0, 1)
        np.testing.assert_allclose(res.value, np.sin(k) / k, rtol=1e-12)


class TestSqrtWeight:
    @pytest.mark.parametrize(
        "g,endpoint,side,length,expected",
        [
            (lambda t: np.ones_like(t), 0.0, "right", 1.0, 2.0),
            (lambda t: t, 0.0, "right", 1.0, 2.0 / 3.0),
            (lambda t: np.ones_like(t), 2.0, "left", 1.0, 2.0),
        ],
    )
    def test_closed_forms(self, g, endpoint, side, length, expected):
        assert integrate_sqrt_weight(g, endpoint, side, length).value == pytest.approx(expected, abs=1e-10)

    def test_bad_side(self):
        with pytest.raises(DomainError):
            integrate_sqrt_weight(np.cos, 0, "up", 1)

    def test_nonintegrable_exponent(self):
        with pytest.raises(DomainError):
            integrate_algebraic_weight(np.cos, 0, "right", 1, -1.0)

    @pytest.mark.parametrize("beta", [-0.75, -0.25, 0.5, 1.5])
    def test_algebraic_weight(self, beta):
        # ∫_0^1 t^beta (1 + t) dt
        res = integrate_algebraic_weight(lambda t: 1 + t, 0.0, "right", 1.0, beta)
        assert res.value == pytest.approx(1 / (beta + 1) + 1 / (beta + 2), rel=1e-12)

    def test_offset_is_exact(self):
        # ∫_0^1 s^{-1/2} log(s) ds = -4, placed next to a large endpoint where
        # t - e cannot resolve small offsets
        res = integrate_algebraic_weight(
            lambda t, d: np.log(d), 1e8, "left", 1.0, -0.5, pass_offset=True
        )
        assert res.value == pytest.approx(-4.0, rel=1e-10)

    def test_consistent_with_smooth_away_from_endpoint(self):
        # g vanishes near the endpoint, so both routes see a smooth integrand
        def g(t):
            return np.where(t > 0.5, (t - 0.5) ** 4, 0.0)

        weighted = integrate_sqrt_weight(g, 0.0, "right", 2.0).value
        plain = integrate_smooth(lambda t: g(t) / np.sqrt(t), 0.5, 2.0).value
        assert weighted == pytest.approx(plain, rel=TOL)


class TestPV:
    @pytest.mark.parametrize(
        "f,pole,lo,hi,expected",
        [
            (lambda t: np.ones_like(t), 0.0, -1.0, 1.0, 0.0),
            (lambda t: np.ones_like(t), 1.0, 0.0, 3.0, math.log(2.0)),
            (lambda t: t, 0.0, -1.0, 1.0, 2.0),
        ],
    )
    def test_closed_forms(self, f, pole, lo, hi, expected):
        assert integrate_pv(f, pole, lo, hi).value == pytest.approx(expected, abs=1e-10)

    def test_exp(self):
        # PV ∫_{-1}^{1} e^t / t dt = Ei(1) - Ei(-1) = 2 Shi(1)
        from scipy.special import shichi

        assert integrate_pv(np.exp, 0.0, -1.0, 1.0).value == pytest.approx(2 * shichi(1.0)[0], rel=1e-12)

    @pytest.mark.parametrize("pole", [-1.0, 1.0, 2.0])
    def test_pole_on_boundary(self, pole):
        with pytest.raises(DomainError):
            integrate_pv(np.cos, pole, -1.0, 1.0)

    # halves are binary fractions so the interval is symmetric in floating point
    @pytest.mark.parametrize("pole,half", [(0.25, 0.125), (2.0, 1.5), (-4.0, 2.0**-11)])
    def test_antisymmetry(self, pole, half):
        res = integrate_pv(lambda t: np.cos(t - pole) + (t - pole) ** 2, pole, pole - half, pole + half)
        assert abs(res.value) <= DEFAULT_CONFIG.abs_tol

    def test_window_independent(self):
        a = integrate_pv(np.exp, 0.1, -1.0, 2.0, QuadratureConfig(pv_window=1e-1)).value
        b = integrate_pv(np.exp, 0.1, -1.0, 2.0, QuadratureConfig(pv_window=1e-6)).value
        assert a == pytest.approx(b, rel=TOL)


class TestTail:
    @pytest.mark.parametrize(
        "f,lo,power,expected",
        [(lambda t: t**-2.0, 1.0, 2, 1.0), (lambda t: t**-3.0, 2.0, 3, 0.125)],
    )
    def test_closed_forms(self, f, lo, power, expected):
        assert integrate_tail(f, lo, power).value == pytest.approx(expected, rel=1e-12)

    def test_decay_power_contract(self):
        with pytest.raises(DomainError):
            integrate_tail(lambda t: t**-1.5, 1.0, 1.5)

    def test_detects_slow_decay(self):
        with pytest.raises(DecayViolationError):
            integrate_tail(lambda t: t**-1.5, 1.0, 2)

    def test_nonpositive_lower_limit(self):
        with pytest.raises(DomainError):
            integrate_tail(lambda t: t**-2.0, 0.0, 2)

    @pytest.mark.parametrize("M", [1.5, 10.0, 300.0])
    def test_split_consistency(self, M):
        def f(t):
            return 1.0 / (1.0 + t * t) ** 1.5

        whole = integrate_tail(f, 1.0, 3).value
        split = integrate_smooth(f, 1.0, M).value + integrate_tail(f, M, 3).value
        assert whole == pytest.approx(split, rel=TOL)


coeff = st.floats(-5, 5, allow_nan=False)


@settings(max_examples=25, deadline=None)
@given(c1=coeff, c2=coeff, k=st.floats(0.5, 4))
def test_linearity(c1, c2, k):
    def f1(t):
        return np.exp(-t) * np.cos(k * t)

    def f2(t):
        return 1.0 / (1.0 + t) ** 3

    def combo(t):
        return c1 * f1(t) + c2 * f2(t)

    def check(op):
        lhs = op(combo)
        rhs = c1 * op(f1) + c2 * op(f2)
        scale = abs(c1 * op(f1)) + abs(c2 * op(f2)) + 1e-300
        assert abs(lhs - rhs) <= TOL * scale + 1e-14

    check(lambda f: integrate_smooth(f, 0.0, 3.0).value)
    check(lambda f: integrate_sqrt_weight(f, 0.0, "right", 2.0).value)
    check(lambda f: integrate_pv(f, 0.7, 0.1, 2.5).value)
    check(lambda f: integrate_tail(lambda t: f(t) / (1 + t * t), 1.0, 2).value)
