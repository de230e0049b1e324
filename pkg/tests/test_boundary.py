import math

import numpy as np
import pytest
from scipy import integrate

from entrancesim import (
    LevyMeasure,
    ProcessSpec,
    RateFunction,
    classify,
    logistic_csbp,
    null_spec,
    stable_power_spec,
    validate,
)
from entrancesim.boundary import (
    competition_integral_closed_form,
    competition_integral_quadrature,
    default_classifier_grid,
)


def classify_with_default_grid(spec):
    grid = default_classifier_grid()
    return classify(spec, validate(spec, grid), grid=grid)


class TestGoldenCases:
    def test_logistic_is_entrance_with_exact_integral(self):
        report = classify_with_default_grid(logistic_csbp(c=1.0))
        assert report.verdict == "entrance"
        assert report.criterion_used == "competition_integral"
        assert report.b_used == 1.0
        assert report.integral_value == pytest.approx(2.0)  # antiderivative of 2/x^2

    def test_subcritical_linear_drift_is_inconclusive(self):
        spec = ProcessSpec(
            gamma0=RateFunction.linear(-1.0),
            gamma1=RateFunction.linear(1.0),
            gamma2=RateFunction.linear(1.0),
            nu=LevyMeasure.stable(1.5, 1.0),
        )
        report = classify_with_default_grid(spec)
        assert report.verdict == "inconclusive"
        assert report.criterion_used == "competition_integral"
        assert math.isinf(report.integral_value)  # harmonic divergence

    def test_stable_power_branch(self):
        fast = classify_with_default_grid(stable_power_spec(2.0, alpha=1.5))
        assert fast.verdict == "entrance"
        assert fast.criterion_used == "stable_power"
        slow = classify_with_default_grid(stable_power_spec(1.2, alpha=1.5))
        assert slow.verdict == "inconclusive"
        assert slow.criterion_used == "stable_power"

    def test_boundary_of_stable_power_is_strict(self):
        crit = classify_with_default_grid(stable_power_spec(1.5, alpha=1.5))
        assert crit.verdict == "inconclusive"

    def test_null_spec_no_criterion(self):
        report = classify_with_default_grid(null_spec())
        assert report.verdict == "inconclusive"
        assert report.criterion_used == "none"


class TestScaleCovariance:
    @pytest.mark.parametrize("lam", [0.5, 3.0, 10.0])
    def test_scaling_drift_scales_integral_inversely(self, lam):
        base = classify_with_default_grid(logistic_csbp(c=1.0))
        scaled = classify_with_default_grid(logistic_csbp(c=lam))
        assert scaled.verdict == base.verdict == "entrance"
        assert scaled.integral_value == pytest.approx(base.integral_value / lam, rel=1e-12)

    def test_power_law_scaling(self):
        def make(lam):
            return ProcessSpec(
                gamma0=RateFunction.power_law(-lam, 3.0),
                gamma1=RateFunction.linear(1.0),
                gamma2=RateFunction.linear(1.0),
                nu=LevyMeasure.none(),
            )

        base = classify_with_default_grid(make(1.0))
        scaled = classify_with_default_grid(make(4.0))
        assert base.verdict == scaled.verdict == "entrance"
        assert scaled.integral_value == pytest.approx(base.integral_value / 4.0, rel=1e-12)


class TestQuadrature:
    @pytest.mark.parametrize("coef,p", [(-2.0, 2.5), (-0.5, 1.5), (-1.0, 4.0)])
    def test_quadrature_matches_closed_form_on_power_laws(self, coef, p):
        gamma0 = RateFunction.power_law(coef, p)
        b = 2.0
        closed = competition_integral_closed_form(gamma0, b)
        quad = competition_integral_quadrature(gamma0, b, p, abs(coef), x_switch=max(b, 10.0))
        assert quad == pytest.approx(closed, rel=1e-6)

    def test_polynomial_drift_against_quadrature_oracle(self):
        # gamma0(x) = x - x^3, strictly negative beyond 1
        spec = ProcessSpec(
            gamma0=RateFunction.polynomial([0.0, 1.0, 0.0, -1.0]),
            gamma1=RateFunction.linear(1.0),
            gamma2=RateFunction.linear(1.0),
            nu=LevyMeasure.none(),
        )
        report = classify_with_default_grid(spec)
        assert report.verdict == "entrance"
        b = report.b_used
        oracle, _ = integrate.quad(lambda x: 1.0 / (x**3 - x), b, np.inf, limit=400)
        assert report.integral_value == pytest.approx(oracle, rel=1e-4)

    def test_tabulated_drift_cannot_be_certified(self):
        xs = np.linspace(0.0, 1e6, 50)
        spec = ProcessSpec(
            gamma0=RateFunction.tabulated(xs, -(xs**2) / 2.0),
            gamma1=RateFunction.linear(1.0),
            gamma2=RateFunction.linear(1.0),
            nu=LevyMeasure.none(),
        )
        grid = default_classifier_grid()
        report = classify(spec, validate(spec, grid), grid=grid)
        assert report.verdict == "inconclusive"


class TestHypothesesGating:
    def test_gamma1_not_identity_skips_competition(self):
        spec = ProcessSpec(
            gamma0=RateFunction.logistic_drift(1.0),
            gamma1=RateFunction.linear(2.0),
            gamma2=RateFunction.linear(1.0),
            nu=LevyMeasure.none(),
        )
        report = classify_with_default_grid(spec)
        assert report.verdict == "inconclusive"
        assert any("identity" in d for d in report.details)

    def test_nonzero_drift_at_origin_skips_competition(self):
        spec = ProcessSpec(
            gamma0=RateFunction.polynomial([-1.0, 0.0, -1.0]),
            gamma1=RateFunction.linear(1.0),
            gamma2=RateFunction.linear(1.0),
            nu=LevyMeasure.none(),
        )
        report = classify_with_default_grid(spec)
        assert report.verdict == "inconclusive"
