"""Empirical probes of the entrance-at-infinity limit structure.

"Started from infinity" is never simulated directly: every quantity indexed by
an infinite start is estimated as the plateau of its finite-start version over
a geometric grid of large starting points.  A plateau is declared when the
last three usable cells agree pairwise within max(3 joint standard errors,
2% relative).  Weak convergence is probed through one-dimensional marginals
(two-sample Kolmogorov-Smirnov after mapping states through exp(-x), the
metric of the compactified half-line); full path-space distances are out of
scope.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DomainError
from .rng import derive_seed
from .simulate import simulate_ensemble, simulate_path, with_seed

KS_THRESHOLD_CONSTANT = 1.63  # two-sample tail constant used by the verdicts
PLATEAU_RELATIVE_TOLERANCE = 0.02
PLATEAU_SE_MULTIPLE = 3.0
CENSORING_FLAG_LEVEL = 0.20


@dataclass(frozen=True)
class TestFunction:
    """Bounded continuous test function with a finite limit at infinity."""

    kind: str  # "exp_neg" | "exp_neg_scaled" | "bounded_rational"
    lam: float = 1.0

    def __post_init__(self):
        if self.kind not in ("exp_neg", "exp_neg_scaled", "bounded_rational"):
            raise DomainError(f"unknown test function kind {self.kind!r}")
        if self.kind == "exp_neg_scaled" and not (self.lam > 0):
            raise DomainError("scale of exp_neg_scaled must be positive")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "exp_neg":
            out = np.exp(-x)
        elif self.kind == "exp_neg_scaled":
            out = np.exp(-self.lam * x)
        else:
            out = 1.0 / (1.0 + x)
        return float(out) if out.ndim == 0 else out


EXP_NEG = TestFunction("exp_neg")


def compactified_distance(x, y):
    """Metric |exp(-x) - exp(-y)| of the compactified state space [0, inf]."""
    return abs(math.exp(-x) - math.exp(-y)) if x != y else 0.0


def ks_two_sample(a, b):
    """Two-sample Kolmogorov-Smirnov statistic sup |ECDF_a - ECDF_b|."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise DomainError("KS statistic needs nonempty samples")
    pooled = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, pooled, side="right") / a.size
    cdf_b = np.searchsorted(b, pooled, side="right") / b.size
    return float(np.max(np.abs(cdf_a - cdf_b)))


def ks_threshold(n1, n2):
    """Asymptotic two-sample rejection threshold used by the fdd verdicts."""
    return KS_THRESHOLD_CONSTANT * math.sqrt((n1 + n2) / (n1 * n2))


@dataclass(frozen=True)
class PlateauVerdict:
    """Stabilization of a per-start estimate along the large-x tail of a grid."""

    column: float  # the b (or other column label) this verdict belongs to
    detected: bool
    limit: float | None
    cells_used: tuple  # x values of the cells entering the comparison


def _plateau(column_label, x_grid, means, ses, excluded):
    usable = [
        i
        for i in range(len(x_grid))
        if not excluded[i] and means[i] is not None and math.isfinite(means[i])
    ]
    if len(usable) < 3:
        return PlateauVerdict(column=column_label, detected=False, limit=None, cells_used=())
    last3 = usable[-3:]
    detected = True
    for a in range(3):
        for b in range(a + 1, 3):
            i, j = last3[a], last3[b]
            tol = max(
                PLATEAU_SE_MULTIPLE * math.hypot(ses[i], ses[j]),
                PLATEAU_RELATIVE_TOLERANCE * max(abs(means[i]), abs(means[j])),
            )
            if abs(means[i] - means[j]) >= tol:
                detected = False
    limit = float(np.mean([means[i] for i in last3]))
    return PlateauVerdict(
        column=column_label,
        detected=detected,
        limit=limit,
        cells_used=tuple(float(x_grid[i]) for i in last3),
    )


@dataclass(frozen=True)
class EntranceProfile:
    """P_x(T_b <= t) and E_x(T_b) over a grid of starts and levels."""

    b_grid: tuple
    x_grid: tuple
    t: float
    n_paths: int
    p_matrix: np.ndarray  # (n_x, n_b)
    mean_matrix: np.ndarray  # conditional on crossing; NaN when none crossed
    se_matrix: np.ndarray
    censored_matrix: np.ndarray  # fraction with no crossing before t_max
    flagged: np.ndarray  # bool, censoring above the flag level
    plateau: tuple  # PlateauVerdict per b


def _check_increasing(name, values):
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise DomainError(f"{name} must be nonempty")
    if np.any(np.diff(arr) <= 0):
        raise DomainError(f"{name} must be strictly increasing")
    return arr


def entrance_profile(spec, b_grid, x_grid, t, config, n_paths):
    """Empirical entrance matrices over (start x, level b) with plateau verdicts.

    Cells censored above 20% are flagged and excluded from plateau logic.
    Each start uses an independent derived noise stream.
    """
    b_arr = _check_increasing("b_grid", b_grid)
    x_arr = _check_increasing("x_grid", x_grid)
    if b_arr[0] <= 0:
        raise DomainError("levels b must be positive")
    if x_arr[0] <= b_arr[-1]:
        raise DomainError("need min(x_grid) > max(b_grid)")
    if not (0 < t <= config.t_max):
        raise DomainError("need 0 < t <= t_max")

    n_x, n_b = x_arr.size, b_arr.size
    p = np.zeros((n_x, n_b))
    mean = np.full((n_x, n_b), np.nan)
    se = np.full((n_x, n_b), np.nan)
    cens = np.zeros((n_x, n_b))
    for ix, x0 in enumerate(x_arr):
        cfg = with_seed(config, derive_seed(config.seed, "profile", ix))
        ens = simulate_ensemble(
            spec, float(x0), cfg, int(n_paths),
            thresholds=tuple(float(b) for b in b_arr), early_exit=True,
        )
        for jb, b in enumerate(b_arr):
            samples = ens.crossing_times(float(b))
            crossed = samples[np.isfinite(samples)]
            p[ix, jb] = float((samples <= t).sum()) / samples.size
            cens[ix, jb] = 1.0 - crossed.size / samples.size
            if crossed.size:
                mean[ix, jb] = crossed.mean()
                se[ix, jb] = (
                    crossed.std(ddof=1) / math.sqrt(crossed.size) if crossed.size > 1 else 0.0
                )
    flagged = cens > CENSORING_FLAG_LEVEL
    plateaus = []
    for jb, b in enumerate(b_arr):
        means = [None if math.isnan(mean[ix, jb]) else float(mean[ix, jb]) for ix in range(n_x)]
        plateaus.append(
            _plateau(float(b), x_arr, means, se[:, jb], flagged[:, jb])
        )
    return EntranceProfile(
        b_grid=tuple(float(b) for b in b_arr),
        x_grid=tuple(float(x) for x in x_arr),
        t=float(t),
        n_paths=int(n_paths),
        p_matrix=p,
        mean_matrix=mean,
        se_matrix=se,
        censored_matrix=cens,
        flagged=flagged,
        plateau=tuple(plateaus),
    )


@dataclass(frozen=True)
class SemigroupCauchyReport:
    """P_t f over a grid of starts and consecutive-pair differences."""

    x_grid: tuple
    t: float
    values: np.ndarray
    ses: np.ndarray
    n_used: np.ndarray
    diffs: np.ndarray  # |value_i - value_{i+1}|
    joint_ses: np.ndarray
    last_diff_below_3se: bool
    tail_decreasing: bool


def semigroup_cauchy(spec, f, t, x_grid, config, n_paths):
    """Estimate P_t f(x) per start and check the Cauchy property at large x.

    At t = 0 the semigroup is the identity and values are exact.  The tail is
    deemed decreasing when each later consecutive difference stays below the
    earlier one plus twice the combined joint-SE noise scale.
    """
    x_arr = _check_increasing("x_grid", x_grid)
    if t < 0:
        raise DomainError("t must be nonnegative")
    n_x = x_arr.size
    values = np.zeros(n_x)
    ses = np.zeros(n_x)
    n_used = np.zeros(n_x, dtype=np.int64)
    if t == 0.0:
        values[:] = f(x_arr)
    else:
        if t > config.t_max:
            raise DomainError("t exceeds the simulation horizon t_max")
        for ix, x0 in enumerate(x_arr):
            cfg = with_seed(config, derive_seed(config.seed, "semigroup", ix))
            ens = simulate_ensemble(
                spec, float(x0), cfg, int(n_paths), eval_times=(float(t),), early_exit=True
            )
            states = ens.eval_values[:, 0]
            states = states[np.isfinite(states)]
            if states.size == 0:
                raise DomainError(f"all paths capped before t for x0={x0:g}")
            fx = np.asarray(f(states))
            values[ix] = fx.mean()
            ses[ix] = fx.std(ddof=1) / math.sqrt(fx.size) if fx.size > 1 else 0.0
            n_used[ix] = fx.size
    diffs = np.abs(np.diff(values))
    joint = np.hypot(ses[:-1], ses[1:])
    if diffs.size and t > 0:
        last_ok = bool(diffs[-1] < 3.0 * joint[-1])
    else:
        last_ok = True
    tail_decreasing = True
    for k in range(1, diffs.size):
        slack = 2.0 * math.hypot(joint[k - 1], joint[k])
        if diffs[k] > diffs[k - 1] + slack:
            tail_decreasing = False
    return SemigroupCauchyReport(
        x_grid=tuple(float(x) for x in x_arr),
        t=float(t),
        values=values,
        ses=ses,
        n_used=n_used,
        diffs=diffs,
        joint_ses=joint,
        last_diff_below_3se=last_ok,
        tail_decreasing=tail_decreasing,
    )


@dataclass(frozen=True)
class MomentConvergenceReport:
    """E_x h(T_b) along a grid of starts with a plateau verdict."""

    b: float
    x_grid: tuple
    h_label: str
    estimates: np.ndarray
    ses: np.ndarray
    censored: np.ndarray
    inconclusive: np.ndarray  # per cell: censoring incompatible with unbounded h
    plateau: PlateauVerdict


def moment_convergence(spec, h, b, x_grid, config, n_paths):
    """Estimate E_x h(T_b) along x and detect its large-x plateau.

    h is either a TestFunction (bounded) or an integer power in {1, 2, 3}
    (nonnegative increasing).  For unbounded increasing h, cells censored
    above 5% are marked inconclusive and excluded from the plateau: the
    conditional-on-crossing mean would silently bias the limit.
    """
    x_arr = _check_increasing("x_grid", x_grid)
    if b <= 0 or x_arr[0] <= b:
        raise DomainError("need 0 < b < min(x_grid)")
    if isinstance(h, TestFunction):
        bounded = True
        h_fn = h
        h_label = h.kind
    elif isinstance(h, int) and h in (1, 2, 3):
        bounded = False
        h_fn = lambda s: np.power(s, h)  # noqa: E731
        h_label = f"power{h}"
    else:
        raise DomainError("h must be a TestFunction or an integer power in {1,2,3}")

    n_x = x_arr.size
    est = np.full(n_x, np.nan)
    ses = np.full(n_x, np.nan)
    cens = np.zeros(n_x)
    inconclusive = np.zeros(n_x, dtype=bool)
    for ix, x0 in enumerate(x_arr):
        cfg = with_seed(config, derive_seed(config.seed, "moment", ix))
        ens = simulate_ensemble(
            spec, float(x0), cfg, int(n_paths), thresholds=(float(b),), early_exit=True
        )
        samples = ens.crossing_times(float(b))
        crossed = samples[np.isfinite(samples)]
        cens[ix] = 1.0 - crossed.size / samples.size
        inconclusive[ix] = bool((not bounded) and cens[ix] > 0.05)
        if crossed.size:
            vals = np.asarray(h_fn(crossed), dtype=float)
            est[ix] = vals.mean()
            ses[ix] = vals.std(ddof=1) / math.sqrt(vals.size) if vals.size > 1 else 0.0
    excluded = inconclusive | (cens > CENSORING_FLAG_LEVEL)
    means = [None if math.isnan(v) else float(v) for v in est]
    plateau = _plateau(float(b), x_arr, means, ses, excluded)
    return MomentConvergenceReport(
        b=float(b),
        x_grid=tuple(float(x) for x in x_arr),
        h_label=h_label,
        estimates=est,
        ses=ses,
        censored=cens,
        inconclusive=inconclusive,
        plateau=plateau,
    )


@dataclass(frozen=True)
class FddReport:
    """Marginal-law distances between finite starts and a large reference start.

    For stochastic specs, statistics[i, k] is the two-sample KS distance at
    times[k] between starts x_grid[i] and x_ref, computed on states mapped
    through exp(-x).  For deterministic specs the marginals are point masses
    and the compactified metric between the two state values is reported
    instead (thresholds are then None).
    """

    x_grid: tuple
    times: tuple
    x_ref: float
    n_paths: int
    deterministic: bool
    statistics: np.ndarray  # (n_x, n_times)
    thresholds: np.ndarray | None
    strictly_decreasing_along_x: tuple  # per time
    nondecreasing_along_x: tuple  # per time


def fdd_convergence(spec, times, x_grid, x_ref, config, n_paths):
    """Distance of marginal laws of X from finite x to the x_ref reference."""
    t_arr = _check_increasing("times", times)
    x_arr = _check_increasing("x_grid", x_grid)
    if t_arr[0] <= 0 or t_arr[-1] > config.t_max:
        raise DomainError("times must lie in (0, t_max]")
    if x_ref <= x_arr[-1]:
        raise DomainError("need x_ref > max(x_grid)")

    n_x, n_t = x_arr.size, t_arr.size
    stats = np.zeros((n_x, n_t))
    if spec.is_deterministic:
        ref_path = simulate_path(
            spec, float(x_ref), with_seed(config, derive_seed(config.seed, "fdd", "ref")),
            0, eval_times=tuple(float(t) for t in t_arr),
        )
        for ix, x0 in enumerate(x_arr):
            p = simulate_path(
                spec, float(x0), with_seed(config, derive_seed(config.seed, "fdd", ix)),
                0, eval_times=tuple(float(t) for t in t_arr),
            )
            for k in range(n_t):
                stats[ix, k] = compactified_distance(p.eval_values[k], ref_path.eval_values[k])
        thresholds = None
    else:
        cfg_ref = with_seed(config, derive_seed(config.seed, "fdd", "ref"))
        ref = simulate_ensemble(
            spec, float(x_ref), cfg_ref, int(n_paths),
            eval_times=tuple(float(t) for t in t_arr),
        )
        thresholds = np.zeros((n_x, n_t))
        for ix, x0 in enumerate(x_arr):
            cfg = with_seed(config, derive_seed(config.seed, "fdd", ix))
            ens = simulate_ensemble(
                spec, float(x0), cfg, int(n_paths),
                eval_times=tuple(float(t) for t in t_arr),
            )
            for k in range(n_t):
                a = ens.eval_values[:, k]
                bb = ref.eval_values[:, k]
                a = np.exp(-a[np.isfinite(a)])
                bb = np.exp(-bb[np.isfinite(bb)])
                stats[ix, k] = ks_two_sample(a, bb)
                thresholds[ix, k] = ks_threshold(a.size, bb.size)
    strictly = tuple(bool(np.all(np.diff(stats[:, k]) < 0)) for k in range(n_t))
    nondecr = tuple(bool(np.all(np.diff(stats[:, k]) >= 0)) for k in range(n_t))
    return FddReport(
        x_grid=tuple(float(x) for x in x_arr),
        times=tuple(float(t) for t in t_arr),
        x_ref=float(x_ref),
        n_paths=int(n_paths),
        deterministic=bool(spec.is_deterministic),
        statistics=stats,
        thresholds=thresholds,
        strictly_decreasing_along_x=strictly,
        nondecreasing_along_x=nondecr,
    )
