import json
import math

import numpy as np
import pytest

from bandext import (
    Band,
    Density,
    DomainError,
    InfeasibleDensityError,
    SupportOverlapError,
    alpha_functional,
    constant,
    extend,
    extension_at,
    hilbert_full,
    power,
    sampled,
    verify_constancy,
)
from bandext.extremal import near_extremal_density
from bandext.kernels import abs_sigma, envelope
from bandext.parametrization import alpha_integral, band_grid, check_points
from bandext.quadrature import DEFAULT_CONFIG
from bandext.samples import random_feasible_density

UNIT = Band(1.0, 2.0)
TOL = 10 * DEFAULT_CONFIG.rel_tol

# High-precision references (mpmath, 40 digits).
ALPHA_BOX_3_4 = 0.23598678206773614126802935
HILBERT_BOX_SQRT2 = 0.22063560015265159339645643
# extension on [1, 2] of 1 on (0.5, 1) + 0.5 on (2, 3)
EXTENSION_TWO_SIDED = [
    (1.3, 0.56640433549591483429),
    (1.0001, 0.99043235250118447865),
    (1.999, 0.49570105221584525303),
]

CHI_3_4 = constant(3, 4, 1.0)
TWO_SIDED = constant(0.5, 1, 1.0) + constant(2, 3, 0.5)


class TestAlpha:
    def test_zero(self):
        assert alpha_functional(Density(), UNIT) == 0.0

    def test_box_closed_form(self):
        closed = (2 / math.pi) * (
            math.log(math.sqrt(12) + math.sqrt(15)) - math.log(math.sqrt(5) + math.sqrt(8))
        )
        assert closed == pytest.approx(ALPHA_BOX_3_4, rel=1e-14)
        res = alpha_integral(CHI_3_4, UNIT)
        assert res.value == pytest.approx(ALPHA_BOX_3_4, rel=1e-12)
        assert res.error < 1e-10

    @pytest.mark.parametrize(
        "v,sign",
        [
            (constant(0.2, 0.8), -1),
            (constant(0.5, 1.0), -1),
            (power(0.3, 1.0, 1.0, -0.3, 1.0), -1),
            (constant(2.0, 2.5), 1),
            (power(3.0, math.inf, 5.0, -2.0, 2.0), 1),
            (power(2.0, math.inf, 1.0, -1.0, 1.0), 1),
        ],
    )
    def test_sign(self, v, sign):
        assert np.sign(alpha_functional(v, UNIT)) == sign

    def test_additive(self):
        v1, v2 = constant(0.5, 1, 1.0), constant(2, 3, 0.5)
        total = alpha_functional(v1 + v2, UNIT)
        assert total == pytest.approx(alpha_functional(v1, UNIT) + alpha_functional(v2, UNIT), rel=TOL)

    def test_infeasible(self):
        with pytest.raises(InfeasibleDensityError):
            alpha_functional(power(0.5, 1, 1.0, -0.75, 1), UNIT)

    def test_overlap(self):
        with pytest.raises(SupportOverlapError):
            alpha_functional(constant(0.5, 1.5), UNIT)


class TestGrid:
    def test_offsets_exact(self):
        x, da, db = band_grid(UNIT, 64)
        assert np.all((x > 1) & (x < 2))
        assert np.all(np.diff(x) > 0)
        np.testing.assert_allclose(x - 1, da, rtol=1e-12, atol=1e-15)
        np.testing.assert_allclose(2 - x, db, rtol=1e-12, atol=1e-15)
        np.testing.assert_allclose(da + db, 1.0, rtol=1e-15)

    def test_check_points_avoid_grid(self):
        x = band_grid(UNIT, 256)[0]
        pts = check_points(UNIT, 256, 17)
        assert pts.size == 17
        assert np.min(np.abs(pts[:, None] - x[None, :])) > 0


class TestExtension:
    @pytest.mark.parametrize("x,expected", EXTENSION_TWO_SIDED)
    def test_reference_values(self, x, expected):
        res = extension_at(TWO_SIDED, UNIT, x)
        assert res.value[0] == pytest.approx(expected, rel=1e-10)

    def test_zero(self):
        res = extend(Density(), UNIT, 32)
        assert res.alpha == 0.0
        assert np.all(res.values == 0.0)

    def test_outside_band(self):
        with pytest.raises(DomainError):
            extension_at(CHI_3_4, UNIT, [1.5, 2.5])

    def test_grid_matches_pointwise(self):
        res = extend(TWO_SIDED, UNIT, 32)
        direct = extension_at(TWO_SIDED, UNIT, res.grid).value
        np.testing.assert_allclose(res.values, direct, rtol=1e-9)

    def test_linearity(self):
        v1, v2 = constant(0.5, 1, 1.0), constant(2, 3, 0.5) + power(4, math.inf, 3.0, -2.0, 2)
        e1, e2 = extend(v1, UNIT, 64), extend(v2, UNIT, 64)
        e12 = extend(v1 + v2, UNIT, 64)
        scale = np.abs(e1.values) + np.abs(e2.values)
        assert np.all(np.abs(e12.values - e1.values - e2.values) <= TOL * scale + 1e-14)
        assert e12.alpha == pytest.approx(e1.alpha + e2.alpha, rel=TOL)

    def test_positivity_and_lower_bound(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            v = random_feasible_density(rng, UNIT, sides="left")
            res = extend(v, UNIT, 128)
            assert np.all(res.values >= -res.error_estimates)
            lower = abs(res.alpha) / res.grid**2 / abs_sigma(res.grid, UNIT)
            assert np.all(res.values >= lower - res.error_estimates - 1e-12 * lower)

    @pytest.mark.parametrize("s", [0.5, 3.0])
    def test_dilation_covariance(self, s):
        base = extend(TWO_SIDED, UNIT, 64)
        scaled = extend(TWO_SIDED.dilate(s), UNIT.dilate(s), 64)
        np.testing.assert_allclose(scaled.grid, s * base.grid, rtol=1e-15)
        np.testing.assert_allclose(scaled.values, base.values, rtol=TOL)
        assert scaled.alpha == pytest.approx(base.alpha, rel=TOL)

    def test_near_extremal_tracks_envelope(self):
        res = extend(near_extremal_density(0.05, UNIT), UNIT, 256)
        env = envelope(res.grid, UNIT)
        assert res.alpha == pytest.approx(-1.0, abs=1e-9)
        np.testing.assert_allclose(res.values, env, rtol=0.05)

    def test_edge_pins(self):
        res = extend(TWO_SIDED, UNIT, 64)
        assert res.edge_values == (1.0, 0.5)
        assert res.edges_resolved
        far = extend(CHI_3_4, UNIT, 64)
        assert far.edge_values == (0.0, 0.0)

    def test_unbounded_edge_limit_is_unresolved(self):
        res = extend(power(0.5, 1, 1.0, -0.25, 1), UNIT, 64)
        assert not res.edges_resolved
        assert np.all(res.values > 0)

    def test_interpolant_passes_through_grid(self):
        res = extend(TWO_SIDED, UNIT, 64)
        full = res.completed(TWO_SIDED)
        np.testing.assert_allclose(full.evaluate(res.grid), res.values, rtol=1e-12)
        assert full.evaluate(0.7) == 1.0

    def test_lp_norms(self):
        res = extend(near_extremal_density(0.05, UNIT), UNIT, 256)
        assert res.lp_norm(math.inf) == res.sup_norm
        assert res.lp_norm(1) < res.lp_norm(2) < res.lp_norm(4) < res.sup_norm

    def test_to_dict(self):
        d = extend(CHI_3_4, UNIT, 16).to_dict()
        assert d["band"] == [1.0, 2.0] and len(d["values"]) == 16
        json.dumps(d)

    def test_infeasible(self):
        with pytest.raises(InfeasibleDensityError):
            extend(power(2, 3, 1.0, -0.6, 2), UNIT, 16)


class TestHilbert:
    @staticmethod
    def closed(c, d, x):
        return math.log(abs((d * d - x * x) / (c * c - x * x))) / math.pi

    @pytest.mark.parametrize("x", [0.1, 0.9, 1.5, 1.99, 2.5, 40.0])
    def test_box(self, x):
        assert hilbert_full(constant(1, 2), x) == pytest.approx(self.closed(1, 2, x), abs=1e-10)

    def test_box_reference(self):
        assert hilbert_full(constant(1, 2), math.sqrt(2)) == pytest.approx(HILBERT_BOX_SQRT2, rel=1e-12)

    def test_zero(self):
        assert hilbert_full(Density(), 1.3) == 0.0

    def test_ramp_inside(self):
        # (t-1) 2t/(t²-x²) = 2 + (x-1)/(t-x) - (x+1)/(t+x)
        v = sampled([1, 2], [0, 1])
        x = 1.4
        exact = (2 + (x - 1) * math.log((2 - x) / (x - 1)) - (x + 1) * math.log((2 + x) / (1 + x))) / math.pi
        assert hilbert_full(v, x) == pytest.approx(exact, abs=1e-10)

    def test_power_tail_inside(self):
        # t^-2 * 2t/(t²-x²) = (1/x²) d/dt log|(t²-x²)/t²|
        v = power(1, math.inf, 1.0, -2.0, 0.0)
        x = 3.0
        exact = -math.log(x * x - 1) / (x * x) / math.pi
        assert hilbert_full(v, x) == pytest.approx(exact, abs=1e-10)

    @pytest.mark.parametrize("x", [0.0, -1.0, 1.0, 2.0])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            hilbert_full(constant(1, 2), x)


class TestConstancy:
    def test_box_round_trip(self):
        rep = verify_constancy(CHI_3_4, UNIT, 17, grid_size=256)
        assert rep.max_deviation <= 1e-4 * abs(rep.alpha)
        assert rep.alpha_measured == pytest.approx(ALPHA_BOX_3_4, rel=1e-4)
        assert rep.passes(1e-3)

    def test_perturbed_completion_fails(self):
        base = verify_constancy(CHI_3_4, UNIT, 17, grid_size=256)
        bad = verify_constancy(CHI_3_4, UNIT, 17, grid_size=256, perturb=1.1)
        assert bad.max_deviation >= 10 * base.max_deviation
        assert not bad.passes(1e-3)

    def test_zero(self):
        rep = verify_constancy(Density(), UNIT)
        assert rep.max_deviation == 0.0 and rep.alpha_measured == 0.0

    def test_two_sided(self):
        rep = verify_constancy(TWO_SIDED, UNIT, 17, grid_size=256)
        assert rep.max_deviation <= 1e-3 * max(1, abs(rep.alpha))

    def test_reuses_extension(self):
        res = extend(CHI_3_4, UNIT, 256)
        rep = verify_constancy(CHI_3_4, UNIT, extension=res)
        assert rep.alpha == res.alpha

    def test_report_dict(self):
        json.dumps(verify_constancy(CHI_3_4, UNIT, 5, grid_size=64).to_dict())
