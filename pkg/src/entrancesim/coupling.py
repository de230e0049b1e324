"""Monotone coupling: many starting points driven by one realization of noise.

All members of a flow share the Brownian increments, the small-jump Gaussian
surrogates, and the jump marks (time, size, u); each member accepts a mark iff
its thinning coordinate u lies below gamma2 evaluated at the member's own
state.  When gamma2 is nondecreasing this realizes the comparison property of
the SDE step by step: the dominating rate is taken from the top member, and
lower members accept subsets of the top member's jumps.

Members are stepped in lockstep on a shared time grid by a single worker;
independent realizations parallelize freely.
"""

from dataclasses import dataclass, replace
import math

import numpy as np

from . import kernels
from .errors import DomainError, PreconditionError
from .model import validate
from .rng import key_from_seed
from .simulate import Path, _pack, _prep_grids, _unscramble


def default_certification_grid(upper=100.0, n=101):
    """Evaluation grid used to certify gamma2 monotonicity and the drift theta."""
    return np.linspace(0.0, upper, n)


@dataclass(frozen=True)
class FlowEnsemble:
    """One shared-noise realization of the flow (one Path per initial value)."""

    initial_values: tuple
    paths: tuple
    n_realizations: int
    order_violations: int
    realization_index: int
    thresholds: tuple
    eval_times: np.ndarray
    eval_values: np.ndarray  # (n_members, n_eval)
    crossings: np.ndarray  # (n_members, n_thresholds), NaN = censored
    capped: bool


@dataclass(frozen=True)
class FlowStudy:
    """Aggregate of many flow realizations (violations, gaps, crossings)."""

    initial_values: tuple
    n_realizations: int
    violations: np.ndarray  # per realization
    eval_times: np.ndarray
    eval_values: np.ndarray  # (n_realizations, n_members, n_eval)
    thresholds: tuple
    crossings: np.ndarray  # (n_realizations, n_members, n_thresholds)
    capped: np.ndarray  # bool per realization

    @property
    def total_violations(self):
        return int(self.violations.sum())


@dataclass(frozen=True)
class GronwallReport:
    """Mean coupled gap at time t against the one-sided-Lipschitz bound."""

    x: float
    y: float
    t: float
    theta: float
    n_realizations: int
    n_capped: int
    lhs_mean: float
    lhs_se: float
    rhs: float
    passed: bool


def _require_monotone_gamma2(spec, config, report=None):
    if report is None:
        upper = min(config.x_cap, 1e4)
        report = validate(spec, default_certification_grid(upper=upper, n=257))
    if not report.gamma2_monotone:
        raise PreconditionError(
            "gamma2 is not certified nondecreasing: the shared-noise coupling "
            "does not dominate member rates"
        )
    return report


def _check_inits(initial_values):
    inits = np.asarray(sorted(float(v) for v in initial_values), dtype=np.float64)
    raw = np.asarray([float(v) for v in initial_values], dtype=np.float64)
    if raw.size < 1:
        raise DomainError("need at least one initial value")
    if np.any(np.diff(raw) < 0):
        raise DomainError("initial values must be nondecreasing")
    return inits


def _run_flow_core(spec, inits, config, realization_index, ev, th_desc, stride, early_exit):
    packed = _pack(spec, config)
    k0, k1 = key_from_seed(config.seed)
    m = inits.size
    cap = 0
    if stride > 0:
        cap = 4 + 2 * int(min(config.t_max / config.dt, 2e6) / stride)
    while True:
        rec_t = np.zeros(cap, dtype=np.float64)
        rec_x = np.zeros((m, cap), dtype=np.float64)
        eval_out = np.full((m, ev.size), np.nan)
        cross_out = np.full((m, th_desc.size), np.nan)
        member_stats = np.zeros((m, 4), dtype=np.float64)
        n_rec, n_steps, violations, capped_any = kernels.flow_core(
            k0, k1, int(realization_index), inits,
            *packed,
            stride, 1 if early_exit else 0, int(config.max_steps),
            ev, th_desc,
            rec_t, rec_x, eval_out, cross_out, member_stats,
        )
        if stride <= 0 or not member_stats[:, 3].any():
            break
        cap *= 4
        if cap > 40_000_000:
            raise MemoryError("flow recording exceeds buffer limits; raise record_stride")
    return rec_t[:n_rec], rec_x[:, :n_rec], eval_out, cross_out, member_stats, n_steps, violations, capped_any


def simulate_flow(
    spec,
    initial_values,
    config,
    realization_index,
    thresholds=(),
    eval_times=(),
    report=None,
):
    """One coupled realization; returns a FlowEnsemble with shared time grid."""
    _require_monotone_gamma2(spec, config, report)
    inits = _check_inits(initial_values)
    ev, th, th_desc, order = _prep_grids(float(inits[-1]), config, thresholds, eval_times)
    times, rec_x, eval_out, cross_sorted, stats, n_steps, violations, capped_any = _run_flow_core(
        spec, inits, config, realization_index, ev, th_desc, int(config.record_stride), False
    )
    paths = []
    for j, x0 in enumerate(inits):
        cross = _unscramble(cross_sorted[j], order, len(th))
        crossings = {b: float(cross[i]) for i, b in enumerate(th) if np.isfinite(cross[i])}
        paths.append(
            Path(
                times=times.copy(),
                values=rec_x[j].copy(),
                hit_zero_at=None if np.isnan(stats[j, 0]) else float(stats[j, 0]),
                capped_at=None if np.isnan(stats[j, 1]) else float(stats[j, 1]),
                crossings=crossings,
                x0=float(x0),
                path_index=int(realization_index),
                n_steps=int(n_steps),
                eval_times=ev,
                eval_values=eval_out[j],
            )
        )
    cross_mat = np.full((inits.size, len(th)), np.nan)
    for j_sorted, j_caller in enumerate(order):
        cross_mat[:, j_caller] = cross_sorted[:, j_sorted]
    return FlowEnsemble(
        initial_values=tuple(float(v) for v in inits),
        paths=tuple(paths),
        n_realizations=1,
        order_violations=int(violations),
        realization_index=int(realization_index),
        thresholds=th,
        eval_times=ev,
        eval_values=eval_out,
        crossings=cross_mat,
        capped=bool(capped_any),
    )


def flow_realizations(
    spec,
    initial_values,
    config,
    n_realizations,
    thresholds=(),
    eval_times=(),
    early_exit=False,
    report=None,
):
    """Many independent coupled realizations, aggregated (no trajectories)."""
    if int(n_realizations) < 1:
        raise DomainError("n_realizations must be >= 1")
    _require_monotone_gamma2(spec, config, report)
    inits = _check_inits(initial_values)
    ev, th, th_desc, order = _prep_grids(float(inits[-1]), config, thresholds, eval_times)
    n_real = int(n_realizations)
    m = inits.size
    violations = np.zeros(n_real, dtype=np.int64)
    eval_cube = np.full((n_real, m, ev.size), np.nan)
    cross_cube = np.full((n_real, m, len(th)), np.nan)
    capped = np.zeros(n_real, dtype=bool)
    for r in range(n_real):
        _t, _x, eval_out, cross_sorted, _stats, _n, viol, capped_any = _run_flow_core(
            spec, inits, config, r, ev, th_desc, 0, early_exit
        )
        violations[r] = viol
        eval_cube[r] = eval_out
        for j_sorted, j_caller in enumerate(order):
            cross_cube[r, :, j_caller] = cross_sorted[:, j_sorted]
        capped[r] = bool(capped_any)
    return FlowStudy(
        initial_values=tuple(float(v) for v in inits),
        n_realizations=n_real,
        violations=violations,
        eval_times=ev,
        eval_values=eval_cube,
        thresholds=th,
        crossings=cross_cube,
        capped=capped,
    )


def gronwall_check(spec, x, y, t, n_realizations, config, theta=None, grid=None):
    """Mean coupled gap E|X_t^(y) - X_t^(x)| against exp(theta * t) * (y - x).

    theta defaults to the one-sided Lipschitz certificate from validation on
    ``grid`` (PreconditionError when no finite certificate exists).  The check
    passes when the Monte Carlo mean minus three standard errors lies below
    the bound.
    """
    if not (0.0 <= x <= y):
        raise DomainError("need 0 <= x <= y")
    if t < 0:
        raise DomainError("need t >= 0")
    report = None
    if theta is None:
        upper = min(config.x_cap, max(100.0, 10.0 * y))
        report = validate(
            spec, default_certification_grid(upper=upper, n=257) if grid is None else grid
        )
        theta = report.one_sided_lipschitz_theta
        if theta is None:
            raise PreconditionError("no finite one-sided Lipschitz certificate on the grid")
    cfg = replace(config, t_max=float(t))
    study = flow_realizations(
        spec, [x, y], cfg, n_realizations, eval_times=(float(t),), early_exit=True,
        report=report,
    )
    lo = study.eval_values[:, 0, 0]
    hi = study.eval_values[:, 1, 0]
    ok = np.isfinite(lo) & np.isfinite(hi)
    gaps = np.abs(hi[ok] - lo[ok])
    n_ok = int(ok.sum())
    if n_ok == 0:
        raise DomainError("all realizations capped; nothing to estimate")
    lhs_mean = float(gaps.mean())
    lhs_se = float(gaps.std(ddof=1) / math.sqrt(n_ok)) if n_ok > 1 else 0.0
    rhs = float(math.exp(theta * t) * (y - x))
    return GronwallReport(
        x=float(x), y=float(y), t=float(t), theta=float(theta),
        n_realizations=int(n_realizations), n_capped=int(n_realizations) - n_ok,
        lhs_mean=lhs_mean, lhs_se=lhs_se, rhs=rhs,
        passed=bool(lhs_mean - 3.0 * lhs_se <= rhs),
    )
