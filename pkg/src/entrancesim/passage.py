"""First-passage time estimators for T_b = inf{t : X_t < b}.

There are no negative jumps, so downward level crossings happen continuously
and T_b is read off each path by linear interpolation inside the crossing
step.  Paths that reach the horizon without crossing are censored; means are
always conditional on crossing, with the censored fraction surfaced separately
rather than silently mixed in.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DomainError
from .rng import derive_seed
from .simulate import simulate_ensemble, with_seed


@dataclass(frozen=True)
class ExpMomentEstimate:
    """Sample mean of exp(theta * T_b); a certified lower bound under censoring."""

    theta: float
    estimate: float
    se: float
    lower_bound_only: bool
    censored_fraction: float


@dataclass(frozen=True)
class PassageEstimate:
    """Monte Carlo statistics of T_b from one starting point."""

    b: float
    x0: float
    n_paths: int
    mean: float | None
    se: float | None
    censored_fraction: float
    cdf_times: np.ndarray
    cdf_probs: np.ndarray
    t_max: float
    exp_moment: ExpMomentEstimate | None = None

    def cdf_at(self, t):
        """Empirical P(T_b <= t)."""
        return float(np.searchsorted(self.cdf_times, t, side="right")) / self.n_paths


@dataclass(frozen=True)
class MarkovDecompositionCheck:
    """E_x(T_b) against E_x(T_mid) + E_mid(T_b) from independent ensembles."""

    x: float
    x_mid: float
    b: float
    lhs: float
    lhs_se: float
    rhs: float
    rhs_se: float
    z_score: float
    inconclusive: bool
    censored_fractions: tuple


@dataclass(frozen=True)
class TailGeometricFit:
    """Geometric decay of P(T_b > n * t_unit) from the Markov chaining bound."""

    t_unit: float
    n_values: np.ndarray
    tail_probs: np.ndarray
    alpha_hat: np.ndarray
    slope: float | None
    log_alpha1_bound: float | None
    degenerate: bool
    consistent: bool | None


def _crossing_samples(spec, x0, b, config, n_paths, seed_labels=()):
    cfg = (
        with_seed(config, derive_seed(config.seed, *seed_labels)) if seed_labels else config
    )
    ens = simulate_ensemble(
        spec, x0, cfg, n_paths, thresholds=(float(b),), early_exit=True
    )
    return ens.crossing_times(float(b))


def _exp_moment_from_samples(samples, theta, t_max):
    finite = np.isfinite(samples)
    vals = np.where(finite, np.exp(theta * np.where(finite, samples, 0.0)), math.exp(theta * t_max))
    censored = 1.0 - finite.mean()
    est = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
    return ExpMomentEstimate(
        theta=float(theta),
        estimate=est,
        se=se,
        lower_bound_only=bool(censored > 0),
        censored_fraction=float(censored),
    )


def estimate_passage(spec, x0, b, config, n_paths, theta=None):
    """Estimate the law of T_b from x0 over n_paths independent paths.

    Requires 0 < b < x0 (a start at or below the level makes T_b trivially 0
    and is rejected as misuse).  The mean is over crossing paths only; the
    empirical CDF jumps by 1/n_paths at each crossing time, so
    cdf(t_max) = 1 - censored_fraction.  With theta set, the exponential
    moment E exp(theta T_b) is estimated alongside.
    """
    if not (0.0 < b < x0):
        raise DomainError("need 0 < b < x0 for a nontrivial passage time")
    if x0 > config.x_cap:
        raise DomainError("x0 must not exceed x_cap")
    samples = _crossing_samples(spec, x0, b, config, int(n_paths))
    crossed = np.sort(samples[np.isfinite(samples)])
    censored_fraction = 1.0 - crossed.size / samples.size
    mean = float(crossed.mean()) if crossed.size else None
    if crossed.size > 1:
        se = float(crossed.std(ddof=1) / math.sqrt(crossed.size))
    elif crossed.size == 1:
        se = 0.0
    else:
        se = None
    exp_moment = (
        _exp_moment_from_samples(samples, theta, config.t_max) if theta is not None else None
    )
    return PassageEstimate(
        b=float(b),
        x0=float(x0),
        n_paths=int(samples.size),
        mean=mean,
        se=se,
        censored_fraction=float(censored_fraction),
        cdf_times=crossed,
        cdf_probs=np.arange(1, crossed.size + 1) / samples.size,
        t_max=float(config.t_max),
        exp_moment=exp_moment,
    )


def estimate_exp_moment(spec, x0, b, theta, config, n_paths):
    """E exp(theta * T_b); censored paths contribute exp(theta * t_max).

    Any censoring makes the estimate a certified lower bound
    (lower_bound_only=True) rather than an unbiased estimate.
    """
    if theta <= 0:
        raise DomainError("theta must be positive")
    if not (0.0 < b < x0):
        raise DomainError("need 0 < b < x0")
    samples = _crossing_samples(spec, x0, b, config, int(n_paths))
    return _exp_moment_from_samples(samples, theta, config.t_max)


def markov_decomposition_check(spec, x, x_mid, b, config, n_paths):
    """Check E_x(T_b) = E_x(T_mid) + E_mid(T_b) (strong Markov + no negative jumps).

    The three expectations come from mutually independent ensembles; the
    z-score treats their errors as independent.  Any leg censored above 5%
    yields inconclusive=True.
    """
    if not (0.0 < b < x_mid < x):
        raise DomainError("need 0 < b < x_mid < x")
    legs = (
        (x, b, "markov-lhs"),
        (x, x_mid, "markov-leg1"),
        (x_mid, b, "markov-leg2"),
    )
    means, ses, censored = [], [], []
    for start, level, label in legs:
        samples = _crossing_samples(spec, start, level, config, int(n_paths), (label,))
        crossed = samples[np.isfinite(samples)]
        censored.append(1.0 - crossed.size / samples.size)
        if crossed.size == 0:
            means.append(math.nan)
            ses.append(math.nan)
        else:
            means.append(float(crossed.mean()))
            ses.append(float(crossed.std(ddof=1) / math.sqrt(crossed.size)) if crossed.size > 1 else 0.0)
    lhs, leg1, leg2 = means
    lhs_se, leg1_se, leg2_se = ses
    rhs = leg1 + leg2
    rhs_se = math.hypot(leg1_se, leg2_se)
    denom = math.hypot(lhs_se, rhs_se)
    if denom > 0:
        z = (lhs - rhs) / denom
    else:
        # deterministic legs: agreement is limited by discretization, not noise
        tol = 10.0 * config.dt * max(1.0, abs(rhs))
        z = 0.0 if abs(lhs - rhs) <= tol else math.inf

    return MarkovDecompositionCheck(
        x=float(x), x_mid=float(x_mid), b=float(b),
        lhs=lhs, lhs_se=lhs_se, rhs=rhs, rhs_se=rhs_se,
        z_score=float(z),
        inconclusive=bool(max(censored) > 0.05 or not math.isfinite(z)),
        censored_fractions=tuple(censored),
    )


def tail_geometric_fit(spec, x0, b, t_unit, n_max, config, n_paths):
    """Tail probabilities P(T_b > n t_unit) for n = 1..n_max and their log slope.

    The Markov chaining bound makes the tail geometric, so the least-squares
    slope of log P(T_b > n t_unit) should not exceed log alpha_1 (alpha_1 the
    one-step tail) by more than sampling error; `consistent` reports that
    comparison with a 3-sigma slack on log alpha_1.  Degenerate when no mass
    survives past t_unit.
    """
    if t_unit <= 0:
        raise DomainError("t_unit must be positive")
    if int(n_max) < 3:
        raise DomainError("n_max must be >= 3")
    if n_max * t_unit > config.t_max:
        raise DomainError("n_max * t_unit exceeds the simulation horizon t_max")
    samples = _crossing_samples(spec, x0, b, config, int(n_paths))
    samples = np.where(np.isfinite(samples), samples, math.inf)
    ns = np.arange(1, int(n_max) + 1)
    tails = np.array([(samples > n * t_unit).mean() for n in ns])
    with np.errstate(divide="ignore"):
        alpha_hat = np.where(tails > 0, tails ** (1.0 / ns), 0.0)
    if tails[0] <= 0.0:
        return TailGeometricFit(
            t_unit=float(t_unit), n_values=ns, tail_probs=tails, alpha_hat=alpha_hat,
            slope=None, log_alpha1_bound=None, degenerate=True, consistent=None,
        )
    mask = tails > 0
    slope = None
    if mask.sum() >= 2:
        slope = float(np.polyfit(ns[mask], np.log(tails[mask]), 1)[0])
    p1 = tails[0]
    se_log_p1 = math.sqrt(max(p1 * (1 - p1), 1e-12) / samples.size) / p1
    bound = math.log(p1) + 3.0 * se_log_p1
    return TailGeometricFit(
        t_unit=float(t_unit), n_values=ns, tail_probs=tails, alpha_hat=alpha_hat,
        slope=slope, log_alpha1_bound=bound, degenerate=False,
        consistent=None if slope is None else bool(slope <= bound),
    )
