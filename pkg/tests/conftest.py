import numpy as np
import pytest

from entrancesim import LevyMeasure, ProcessSpec, RateFunction, SimConfig


@pytest.fixture
def logistic_drift():
    return ProcessSpec(
        gamma0=RateFunction.logistic_drift(1.0),
        gamma1=RateFunction.zero(),
        gamma2=RateFunction.zero(),
        nu=LevyMeasure.none(),
    )


@pytest.fixture
def logistic_jumps():
    return ProcessSpec(
        gamma0=RateFunction.logistic_drift(1.0),
        gamma1=RateFunction.linear(1.0),
        gamma2=RateFunction.linear(1.0),
        nu=LevyMeasure.stable(1.5, 1.0),
    )


@pytest.fixture
def atoms_spec():
    return ProcessSpec(
        gamma0=RateFunction.linear(0.3),
        gamma1=RateFunction.linear(1.0),
        gamma2=RateFunction.linear(1.0),
        nu=LevyMeasure.finite_atoms([(1.0, 2.0), (0.05, 3.0)]),
    )


@pytest.fixture
def fast_config():
    return SimConfig(seed=1234, dt=1e-3, eps=0.1, t_max=1.0, record_stride=1)


def logistic_ode(x0, t, c=1.0):
    """Closed-form solution of x' = -(c/2) x^2 (separation of variables)."""
    return x0 / (1.0 + x0 * c * np.asarray(t) / 2.0)


def logistic_passage_time(x0, b, c=1.0):
    """Closed-form T_b for the pure-drift logistic ODE: invert x(t) = b."""
    return (2.0 / c) * (1.0 / b - 1.0 / x0)
