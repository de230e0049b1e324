import math

import numpy as np
import pytest

from entrancesim import (
    DomainError,
    LevyMeasure,
    PreconditionError,
    ProcessSpec,
    RateFunction,
    SimConfig,
    flow_realizations,
    gronwall_check,
    simulate_flow,
)

from conftest import logistic_ode


class TestSimulateFlow:
    def test_duplicate_starts_give_identical_paths(self, logistic_jumps):
        cfg = SimConfig(seed=6, dt=1e-3, eps=0.1, t_max=0.5, record_stride=5)
        flow = simulate_flow(logistic_jumps, [7.0, 7.0], cfg, 0)
        np.testing.assert_array_equal(flow.paths[0].values, flow.paths[1].values)
        assert flow.order_violations == 0

    def test_shared_time_grid(self, logistic_jumps):
        cfg = SimConfig(seed=6, dt=1e-3, eps=0.1, t_max=0.5, record_stride=3)
        flow = simulate_flow(logistic_jumps, [5.0, 10.0, 20.0], cfg, 1)
        for p in flow.paths[1:]:
            np.testing.assert_array_equal(p.times, flow.paths[0].times)

    def test_deterministic_logistic_ordering_and_contraction(self, logistic_drift):
        cfg = SimConfig(seed=6, dt=1e-4, t_max=1.0, record_stride=100)
        flow = simulate_flow(logistic_drift, [10.0, 100.0], cfg, 0)
        lo, hi = flow.paths[0].values, flow.paths[1].values
        assert np.all(lo <= hi + 1e-12)
        gaps = hi - lo
        assert np.all(np.diff(gaps) <= 1e-12)  # closed-form flows contract
        assert flow.order_violations == 0
        # sanity against the closed form
        assert np.abs(hi - logistic_ode(100.0, flow.paths[1].times)).max() < 1e-2

    def test_no_order_violations_with_jumps(self, logistic_jumps):
        cfg = SimConfig(seed=42, dt=1e-3, eps=0.1, t_max=0.5, record_stride=10**6)
        study = flow_realizations(logistic_jumps, [10.0, 20.0, 40.0, 80.0], cfg, 30)
        assert study.total_violations == 0

    def test_shared_noise_reproducibility(self, logistic_jumps):
        cfg = SimConfig(seed=9, dt=1e-3, eps=0.1, t_max=0.3, record_stride=10)
        a = simulate_flow(logistic_jumps, [5.0, 15.0], cfg, 4)
        b = simulate_flow(logistic_jumps, [5.0, 15.0], cfg, 4)
        for pa, pb in zip(a.paths, b.paths):
            np.testing.assert_array_equal(pa.values, pb.values)

    def test_coupled_crossing_ordering(self, logistic_jumps):
        cfg = SimConfig(seed=10, dt=1e-3, eps=0.1, t_max=4.0, record_stride=10**6)
        study = flow_realizations(
            logistic_jumps, [20.0, 60.0], cfg, 25, thresholds=(5.0,), early_exit=True
        )
        t_lo = study.crossings[:, 0, 0]
        t_hi = study.crossings[:, 1, 0]
        both = np.isfinite(t_lo) & np.isfinite(t_hi)
        assert np.all(t_hi[both] >= t_lo[both] - 1e-12)
        # a censored low path forces a censored high path (no negative jumps)
        assert not np.any(np.isnan(t_lo) & np.isfinite(t_hi))

    def test_gamma2_must_be_certified_monotone(self):
        spec = ProcessSpec(
            gamma0=RateFunction.zero(),
            gamma1=RateFunction.zero(),
            gamma2=RateFunction.tabulated([0.0, 1.0, 1e6], [0.0, 1.0, 0.5]),
            nu=LevyMeasure.finite_atoms([(1.0, 1.0)]),
        )
        cfg = SimConfig(seed=1, t_max=0.1)
        with pytest.raises(PreconditionError):
            simulate_flow(spec, [1.0, 2.0], cfg, 0)

    def test_initial_values_must_be_nondecreasing(self, logistic_jumps):
        cfg = SimConfig(seed=1, t_max=0.1)
        with pytest.raises(DomainError):
            simulate_flow(logistic_jumps, [5.0, 3.0], cfg, 0)


class TestGronwall:
    def test_linear_drift_saturates_bound(self):
        # deterministic: gap is (y-x) * prod(1 + theta dt) <= (y-x) e^{theta t}
        spec = ProcessSpec(
            gamma0=RateFunction.linear(0.7),
            gamma1=RateFunction.zero(),
            gamma2=RateFunction.zero(),
            nu=LevyMeasure.none(),
        )
        cfg = SimConfig(seed=2, dt=1e-3, t_max=1.0, adaptive=False)
        rep = gronwall_check(spec, 2.0, 5.0, 1.0, 3, cfg, theta=0.7)
        assert rep.lhs_se == 0.0
        assert rep.lhs_mean == pytest.approx(3.0 * math.exp(0.7), rel=1e-3)
        assert rep.lhs_mean <= rep.rhs
        assert rep.passed

    def test_equal_starts_trivially_pass(self, logistic_jumps):
        cfg = SimConfig(seed=2, dt=1e-3, eps=0.1, t_max=1.0)
        rep = gronwall_check(logistic_jumps, 5.0, 5.0, 0.5, 5, cfg, theta=0.0)
        assert rep.lhs_mean == 0.0
        assert rep.rhs == 0.0
        assert rep.passed

    def test_theta_from_validation_certificate(self, logistic_jumps):
        cfg = SimConfig(seed=2, dt=1e-3, eps=0.1, t_max=1.0)
        rep = gronwall_check(logistic_jumps, 2.0, 4.0, 0.25, 40, cfg)
        assert rep.theta <= 0.0  # difference quotients of -(x^2)/2 are negative
        assert rep.n_realizations == 40

    def test_rejects_bad_arguments(self, logistic_jumps):
        cfg = SimConfig(seed=2, t_max=1.0)
        with pytest.raises(DomainError):
            gronwall_check(logistic_jumps, 5.0, 3.0, 1.0, 2, cfg, theta=0.0)
        with pytest.raises(DomainError):
            gronwall_check(logistic_jumps, 1.0, 3.0, -1.0, 2, cfg, theta=0.0)
