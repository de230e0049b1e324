"""Path simulation: Euler drift/diffusion stepping with exact thinned jumps.

Jumps of size >= eps are simulated exactly from a Poisson clock at the frozen
per-interval rate gamma2(state) * nu([eps, inf)); the compensator of those
jumps becomes the drift correction -gamma2(x) * m1(eps).  Compensated jumps
below eps are either dropped or replaced by a Gaussian of matching variance
gamma2(x) * v(eps) * dt (small_jump_mode).  States are clamped to [0, x_cap];
0 is absorbing exactly when all coefficients vanish there.

Everything here is a pure function of (spec, x0, config, path_index): noise is
counter-based (see :mod:`.rng`), so ensembles are reproducible bit-for-bit
regardless of worker count or scheduling.
"""

from dataclasses import dataclass, field, replace
import math

import numba
import numpy as np

from . import kernels
from .errors import DomainError, NumericalOverflowError, SpecificationError
from .rng import SUB_JUMP, SUB_NORMAL, key_from_seed, normal_pair, stream_next_poisson, stream_next_uniform


def set_worker_count(n):
    """Set the number of simulation worker threads (never affects results)."""
    numba.set_num_threads(max(1, int(n)))


@dataclass(frozen=True)
class SimConfig:
    """Numerical-scheme parameters; immutable and shareable across workers."""

    seed: int
    dt: float = 1e-3
    eps: float = 0.1
    t_max: float = 10.0
    x_cap: float = 1e6
    small_jump_mode: str = "gaussian"
    adaptive: bool = True
    record_stride: int = 1
    max_steps: int = 20_000_000

    def __post_init__(self):
        if not (self.dt > 0):
            raise DomainError("dt must be positive")
        if not (self.eps > 0):
            raise DomainError("eps must be positive")
        if self.t_max < 0:
            raise DomainError("t_max must be nonnegative")
        if not (self.x_cap > 0):
            raise DomainError("x_cap must be positive")
        if self.small_jump_mode not in ("drop", "gaussian"):
            raise DomainError("small_jump_mode must be 'drop' or 'gaussian'")
        if int(self.record_stride) < 1:
            raise DomainError("record_stride must be a positive integer")
        if not (0 <= int(self.seed) < 2**64):
            raise DomainError("seed must fit in 64 unsigned bits")
        if int(self.max_steps) < 1:
            raise DomainError("max_steps must be positive")

    def to_dict(self):
        return {
            "seed": int(self.seed),
            "dt": self.dt,
            "eps": self.eps,
            "t_max": self.t_max,
            "x_cap": self.x_cap,
            "small_jump_mode": self.small_jump_mode,
            "adaptive": bool(self.adaptive),
            "record_stride": int(self.record_stride),
            "max_steps": int(self.max_steps),
        }


@dataclass(frozen=True)
class Path:
    """One simulated trajectory with crossing records and boundary flags."""

    times: np.ndarray
    values: np.ndarray
    hit_zero_at: float | None
    capped_at: float | None
    crossings: dict
    x0: float
    path_index: int
    n_steps: int
    eval_times: np.ndarray = field(default_factory=lambda: np.zeros(0))
    eval_values: np.ndarray = field(default_factory=lambda: np.zeros(0))


@dataclass(frozen=True)
class PathEnsemble:
    """Independent paths from one start, with deterministic index order.

    crossings[i, j] is the first time path i falls strictly below
    thresholds[j] (NaN when censored at the horizon).  eval_values[i, k] is
    path i linearly interpolated at eval_times[k] (NaN beyond a cap event).
    """

    x0: float
    n_paths: int
    config: SimConfig
    thresholds: tuple
    eval_times: np.ndarray
    eval_values: np.ndarray
    crossings: np.ndarray
    hit_zero_at: np.ndarray
    capped_at: np.ndarray
    n_steps: np.ndarray
    paths: tuple = ()

    @property
    def n_capped(self):
        return int(np.sum(np.isfinite(self.capped_at)))

    def crossing_times(self, b):
        """First-passage samples for one registered threshold (NaN = censored)."""
        try:
            j = self.thresholds.index(b)
        except ValueError:
            raise DomainError(f"threshold {b} was not registered for this ensemble")
        return self.crossings[:, j]

    def mean_curve(self):
        """(mean, standard error, n_valid) of the state at each eval time."""
        vals = self.eval_values
        valid = np.isfinite(vals)
        n = valid.sum(axis=0)
        means = np.full(vals.shape[1], np.nan)
        ses = np.full(vals.shape[1], np.nan)
        for k in range(vals.shape[1]):
            col = vals[valid[:, k], k]
            if col.size:
                means[k] = col.mean()
                ses[k] = col.std(ddof=1) / math.sqrt(col.size) if col.size > 1 else 0.0
        return means, ses, n

    def summary(self):
        means, ses, n_valid = self.mean_curve()
        crossing_table = []
        for j, b in enumerate(self.thresholds):
            samples = self.crossings[:, j]
            crossed = samples[np.isfinite(samples)]
            entry = {
                "threshold": b,
                "n_crossed": int(crossed.size),
                "censored_fraction": 1.0 - crossed.size / self.n_paths,
                "mean": float(crossed.mean()) if crossed.size else None,
                "se": float(crossed.std(ddof=1) / math.sqrt(crossed.size))
                if crossed.size > 1
                else (0.0 if crossed.size == 1 else None),
            }
            crossing_table.append(entry)
        return {
            "x0": self.x0,
            "n_paths": self.n_paths,
            "n_capped": self.n_capped,
            "eval_times": [float(t) for t in self.eval_times],
            "mean": [None if not np.isfinite(v) else float(v) for v in means],
            "se": [None if not np.isfinite(v) else float(v) for v in ses],
            "n_valid": [int(v) for v in n_valid],
            "crossings": crossing_table,
        }


@dataclass(frozen=True)
class NoiseSlice:
    """Noise consumed by one Euler step (for the step-level operation)."""

    gaussian: float = 0.0
    small_jump_gaussian: float = 0.0
    marks: tuple = ()  # ((time, size, u), ...) with u in [0, u_dom]
    u_dom: float = 0.0


@dataclass(frozen=True)
class DrivingNoise:
    """Per-step record of all noise coordinates driving one path."""

    gaussian_stream: np.ndarray
    jump_marks: tuple  # one tuple of (time, size, u) triples per step
    small_jump_gaussians: np.ndarray


def step(spec, x, dt_eff, noise, eps, small_jump_mode="gaussian", x_cap=math.inf):
    """One Euler step of the scheme; returns the new state (clamped at 0).

    Accepted jumps are the marks whose thinning coordinate u lies below
    gamma2(x); the compensator of jumps >= eps enters the drift.
    """
    if not (0.0 <= x <= x_cap):
        raise DomainError("state outside [0, x_cap]")
    # unchecked kernel arithmetic: non-finite rates surface as overflow below
    g0 = float(kernels.rate_eval(*spec.gamma0.pack(), x))
    g1 = max(0.0, float(kernels.rate_eval(*spec.gamma1.pack(), x)))
    g2 = max(0.0, float(kernels.rate_eval(*spec.gamma2.pack(), x)))
    drift = g0 * dt_eff
    small = 0.0
    if spec.jumps_active:
        m1, v = spec.nu.partial_moments(eps)
        drift -= g2 * m1 * dt_eff
        if small_jump_mode == "gaussian":
            small = math.sqrt(g2 * v * dt_eff) * noise.small_jump_gaussian
    diff_term = math.sqrt(g1 * dt_eff) * noise.gaussian if not spec.gamma1.is_zero else 0.0
    jump_sum = 0.0
    for _, z, u in noise.marks:
        if u <= g2:
            jump_sum += z
    x_new = x + drift + diff_term + jump_sum + small
    if not math.isfinite(x_new):
        raise NumericalOverflowError("non-finite state after step", last_state=x)
    return max(0.0, x_new)


def _check_tabulated_coverage(spec, x_cap):
    for name in ("gamma0", "gamma1", "gamma2"):
        rate = getattr(spec, name)
        if rate.kind == "tabulated" and rate.table_x[-1] < x_cap:
            raise SpecificationError(
                f"{name} is tabulated only up to {rate.table_x[-1]:g} "
                f"but must cover [0, x_cap={x_cap:g}]"
            )


def _pack(spec, config):
    """Kernel-argument bundle shared by all simulators."""
    _check_tabulated_coverage(spec, config.x_cap)
    r0 = spec.gamma0.pack()
    r1 = spec.gamma1.pack()
    r2 = spec.gamma2.pack()
    lev_code, alpha, _c, z_max, sizes, cum, tail, m1, v = spec.nu.pack(config.eps)
    use_jumps = 1 if spec.jumps_active else 0
    use_diffusion = 0 if spec.gamma1.is_zero else 1
    jump0 = float(spec.gamma2(0.0)) if spec.jumps_active else 0.0
    absorbing = (
        1
        if (float(spec.gamma0(0.0)) == 0.0 and float(spec.gamma1(0.0)) == 0.0 and jump0 == 0.0)
        else 0
    )
    return (
        *r0, *r1, *r2,
        lev_code, alpha, z_max, sizes, cum,
        tail, m1 if use_jumps else 0.0, v, config.eps,
        config.dt, config.t_max, config.x_cap,
        1 if config.small_jump_mode == "gaussian" else 0,
        1 if config.adaptive else 0,
        use_diffusion, use_jumps, absorbing,
    )


def _prep_grids(x0, config, thresholds, eval_times):
    if not (0.0 <= x0 < config.x_cap):
        raise DomainError("x0 must lie in [0, x_cap)")
    ev = np.asarray(sorted(eval_times), dtype=np.float64)
    if ev.size and (ev[0] < 0 or np.any(np.diff(ev) <= 0)):
        raise DomainError("eval_times must be distinct and nonnegative")
    th = tuple(float(b) for b in thresholds)
    if any(b <= 0 for b in th):
        raise DomainError("crossing thresholds must be positive")
    if len(set(th)) != len(th):
        raise DomainError("crossing thresholds must be distinct")
    th_desc = np.asarray(sorted(th, reverse=True), dtype=np.float64)
    # column j of the kernel output corresponds to caller threshold th[order[j]]
    order = [th.index(b) for b in th_desc]
    return ev, th, th_desc, order


def _unscramble(cross_sorted, order, n_th):
    out = np.full(n_th, np.nan)
    for j_sorted, j_caller in enumerate(order):
        out[j_caller] = cross_sorted[j_sorted]
    return out


def simulate_path(spec, x0, config, path_index, thresholds=(), eval_times=()):
    """Simulate one path on [0, t_max]; deterministic in (seed, path_index)."""
    ev, th, th_desc, order = _prep_grids(x0, config, thresholds, eval_times)
    packed = _pack(spec, config)
    k0, k1 = key_from_seed(config.seed)
    stride = int(config.record_stride)
    cap = 4 + 2 * int(min(config.t_max / config.dt, 2e6) / stride)
    while True:
        rec_t = np.zeros(cap, dtype=np.float64)
        rec_x = np.zeros(cap, dtype=np.float64)
        eval_out = np.full(ev.size, np.nan)
        cross_out = np.full(th_desc.size, np.nan)
        n_rec, hit_zero, capped, n_steps, truncated = kernels._path_core(
            k0, k1, int(path_index), float(x0),
            *packed,
            stride, 0, int(config.max_steps),
            ev, th_desc, rec_t, rec_x, eval_out, cross_out,
        )
        if not truncated:
            break
        cap *= 4
        if cap > 80_000_000:
            raise MemoryError("trajectory recording exceeds buffer limits; raise record_stride")
    cross = _unscramble(cross_out, order, len(th))
    crossings = {b: float(cross[j]) for j, b in enumerate(th) if np.isfinite(cross[j])}
    return Path(
        times=rec_t[:n_rec].copy(),
        values=rec_x[:n_rec].copy(),
        hit_zero_at=None if np.isnan(hit_zero) else float(hit_zero),
        capped_at=None if np.isnan(capped) else float(capped),
        crossings=crossings,
        x0=float(x0),
        path_index=int(path_index),
        n_steps=int(n_steps),
        eval_times=ev,
        eval_values=eval_out,
    )


def simulate_ensemble(
    spec,
    x0,
    config,
    n_paths,
    thresholds=(),
    eval_times=(),
    store_paths=False,
    early_exit=False,
):
    """n_paths independent paths with path_index = 0 .. n_paths-1.

    Results are bit-identical for a fixed (seed, n_paths) regardless of worker
    count.  With early_exit=True a path stops as soon as every registered
    threshold is crossed and every eval time is passed (estimator fast path;
    disables hit_zero_at beyond that point).  store_paths=True additionally
    materializes strided trajectories (memory scales with n_paths * t_max/dt).
    """
    if int(n_paths) < 1:
        raise DomainError("n_paths must be >= 1")
    n_paths = int(n_paths)
    ev, th, th_desc, order = _prep_grids(x0, config, thresholds, eval_times)

    if store_paths:
        paths = tuple(
            simulate_path(spec, x0, config, i, thresholds=th, eval_times=ev)
            for i in range(n_paths)
        )
        eval_mat = np.vstack([p.eval_values for p in paths]) if ev.size else np.zeros((n_paths, 0))
        cross_mat = np.full((n_paths, len(th)), np.nan)
        for i, p in enumerate(paths):
            for j, b in enumerate(th):
                if b in p.crossings:
                    cross_mat[i, j] = p.crossings[b]
        hit_zero = np.array([np.nan if p.hit_zero_at is None else p.hit_zero_at for p in paths])
        capped = np.array([np.nan if p.capped_at is None else p.capped_at for p in paths])
        n_steps = np.array([p.n_steps for p in paths], dtype=np.int64)
        return PathEnsemble(
            x0=float(x0), n_paths=n_paths, config=config, thresholds=th,
            eval_times=ev, eval_values=eval_mat, crossings=cross_mat,
            hit_zero_at=hit_zero, capped_at=capped, n_steps=n_steps, paths=paths,
        )

    packed = _pack(spec, config)
    k0, k1 = key_from_seed(config.seed)
    eval_mat = np.full((n_paths, ev.size), np.nan)
    cross_sorted = np.full((n_paths, th_desc.size), np.nan)
    stats = np.zeros((n_paths, 4), dtype=np.float64)
    kernels.ensemble_kernel(
        k0, k1, n_paths, float(x0),
        *packed,
        1 if early_exit else 0, int(config.max_steps),
        ev, th_desc, eval_mat, cross_sorted, stats,
    )
    cross_mat = np.full((n_paths, len(th)), np.nan)
    for j_sorted, j_caller in enumerate(order):
        cross_mat[:, j_caller] = cross_sorted[:, j_sorted]
    return PathEnsemble(
        x0=float(x0), n_paths=n_paths, config=config, thresholds=th,
        eval_times=ev, eval_values=eval_mat, crossings=cross_mat,
        hit_zero_at=stats[:, 0].copy(), capped_at=stats[:, 1].copy(),
        n_steps=stats[:, 2].astype(np.int64), paths=(),
    )


def simulate_path_reference(spec, x0, config, path_index, thresholds=(), eval_times=()):
    """Pure-Python mirror of the jitted path kernel (slow; for verification).

    Consumes exactly the same counter-based draws as the kernel and applies
    the step map through :func:`step`, so it must reproduce
    :func:`simulate_path` and additionally returns the materialized
    DrivingNoise.
    """
    ev, th, th_desc, order = _prep_grids(x0, config, thresholds, eval_times)
    _check_tabulated_coverage(spec, config.x_cap)
    k0, k1 = key_from_seed(config.seed)
    lev_code, alpha, _c, z_max, sizes, cum, nu_tail, m1, v = spec.nu.pack(config.eps)
    use_jumps = spec.jumps_active
    use_diffusion = not spec.gamma1.is_zero
    gauss_mode = config.small_jump_mode == "gaussian"
    jump0 = float(spec.gamma2(0.0)) if use_jumps else 0.0
    absorbing = float(spec.gamma0(0.0)) == 0.0 and float(spec.gamma1(0.0)) == 0.0 and jump0 == 0.0
    need_normals = use_diffusion or (use_jumps and gauss_mode)

    x = float(x0)
    t = 0.0
    times = [0.0]
    values = [x]
    ev_i = 0
    eval_out = np.full(ev.size, np.nan)
    while ev_i < ev.size and ev[ev_i] <= 0.0:
        eval_out[ev_i] = x
        ev_i += 1
    th_i = 0
    cross_out = np.full(th_desc.size, np.nan)
    while th_i < th_desc.size and x < th_desc[th_i]:
        cross_out[th_i] = 0.0
        th_i += 1
    hit_zero = math.nan if x > 0 else 0.0
    capped = math.nan
    gaussians = []
    small_gaussians = []
    all_marks = []
    stride = int(config.record_stride)

    n_steps = 0
    while t < config.t_max:
        if absorbing and x == 0.0:
            break
        g0 = float(spec.gamma0(x))
        g1 = max(0.0, float(spec.gamma1(x)))
        g2 = max(0.0, float(spec.gamma2(x)))
        dt_eff = kernels.effective_dt(
            config.dt, 1 if config.adaptive else 0, x, g0, g1, g2, m1 if use_jumps else 0.0
        )
        if t + dt_eff > config.t_max:
            dt_eff = config.t_max - t

        z1 = z2 = 0.0
        if need_normals:
            z1, z2 = normal_pair(k0, k1, path_index, n_steps, SUB_NORMAL, 0)
        marks = []
        if use_jumps:
            u_dom = g2
            lam = u_dom * nu_tail * dt_eff
            if lam > 0.0:
                block, parity, buf = 0, 0, 0.0
                n_marks, block, parity, buf = stream_next_poisson(
                    lam, k0, k1, path_index, n_steps, SUB_JUMP, block, parity, buf
                )
                for _ in range(n_marks):
                    u_s, block, parity, buf = stream_next_uniform(
                        k0, k1, path_index, n_steps, SUB_JUMP, block, parity, buf
                    )
                    u_z, block, parity, buf = stream_next_uniform(
                        k0, k1, path_index, n_steps, SUB_JUMP, block, parity, buf
                    )
                    u_u, block, parity, buf = stream_next_uniform(
                        k0, k1, path_index, n_steps, SUB_JUMP, block, parity, buf
                    )
                    z = kernels.jump_size_from_uniform(
                        lev_code, alpha, config.eps, z_max, sizes, cum, u_z
                    )
                    marks.append((t + u_s * dt_eff, float(z), u_u * u_dom))
        marks.sort()
        gaussians.append(z1)
        small_gaussians.append(z2)
        all_marks.append(tuple(marks))

        noise = NoiseSlice(
            gaussian=z1, small_jump_gaussian=z2, marks=tuple(marks),
            u_dom=g2 if use_jumps else 0.0,
        )
        try:
            x_new = step(
                spec, x, dt_eff, noise, config.eps,
                small_jump_mode=config.small_jump_mode, x_cap=config.x_cap,
            )
        except NumericalOverflowError:
            capped = t
            break
        t_new = t + dt_eff
        if x_new == 0.0 and math.isnan(hit_zero):
            hit_zero = t_new
        over_cap = x_new > config.x_cap
        if over_cap:
            x_new = config.x_cap
            capped = t_new

        if x_new < x:
            while th_i < th_desc.size and x_new < th_desc[th_i]:
                b = th_desc[th_i]
                cross_out[th_i] = t + dt_eff * (x - b) / (x - x_new)
                th_i += 1
        while ev_i < ev.size and ev[ev_i] <= t_new:
            te = ev[ev_i]
            eval_out[ev_i] = x + (x_new - x) * (te - t) / dt_eff
            ev_i += 1

        n_steps += 1
        if stride > 0 and n_steps % stride == 0:
            times.append(t_new)
            values.append(x_new)
        if t_new == t:
            capped = t
            break
        x = x_new
        t = t_new
        if over_cap:
            break
        if n_steps >= config.max_steps:
            capped = t
            break

    if math.isnan(capped):
        while ev_i < ev.size:
            eval_out[ev_i] = x
            ev_i += 1
    if times[-1] < t:
        times.append(t)
        values.append(x)

    cross = _unscramble(cross_out, order, len(th))
    crossings = {b: float(cross[j]) for j, b in enumerate(th) if np.isfinite(cross[j])}
    path = Path(
        times=np.asarray(times), values=np.asarray(values),
        hit_zero_at=None if math.isnan(hit_zero) else hit_zero,
        capped_at=None if math.isnan(capped) else capped,
        crossings=crossings, x0=float(x0), path_index=int(path_index),
        n_steps=n_steps, eval_times=ev, eval_values=eval_out,
    )
    noise = DrivingNoise(
        gaussian_stream=np.asarray(gaussians),
        jump_marks=tuple(all_marks),
        small_jump_gaussians=np.asarray(small_gaussians),
    )
    return path, noise


def with_seed(config, seed):
    """Copy of a SimConfig with a different stream seed."""
    return replace(config, seed=int(seed) % 2**64)
