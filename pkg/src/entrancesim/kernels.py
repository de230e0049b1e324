"""Jitted stepping kernels shared by the path, ensemble, and flow simulators.

One Euler step freezes the coefficients at the interval's starting state:
drift and compensator act linearly over dt_eff, the Brownian and small-jump
Gaussian terms scale with sqrt(dt_eff), and jump candidates of size >= eps are
drawn from a Poisson clock at the frozen dominating rate and accepted by
thinning (u <= gamma2(state)).  Because the acceptance state is frozen within
the interval, the dominating rate gamma2(current state) is exact for a single
path, and gamma2(top state) dominates every member of a monotone coupled flow.

All randomness comes from the counter-based generator in :mod:`.rng`, keyed by
(path index, step, substream), so results are independent of scheduling.
"""

import numpy as np
from numba import njit, prange

from .rng import (
    SUB_JUMP,
    SUB_NORMAL,
    normal_pair,
    stream_next_poisson,
    stream_next_uniform,
)

LEVY_NONE = 0
LEVY_STABLE = 1
LEVY_TRUNCATED_STABLE = 2
LEVY_FINITE_ATOMS = 3


@njit(cache=True, nogil=True)
def rate_eval(code, p, tx, ty, x):
    if code == 0:
        return 0.0
    if code == 1:
        return p[0] * x
    if code == 2:
        return p[0] * x ** p[1]
    if code == 3:
        return -0.5 * p[0] * x * x
    if code == 4:
        acc = 0.0
        for i in range(len(p) - 1, -1, -1):
            acc = acc * x + p[i]
        return acc
    # tabulated: clamp outside the table (coverage is checked before simulation)
    n = len(tx)
    if x <= tx[0]:
        return ty[0]
    if x >= tx[n - 1]:
        return ty[n - 1]
    lo = 0
    hi = n - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if tx[mid] <= x:
            lo = mid
        else:
            hi = mid
    w = (x - tx[lo]) / (tx[hi] - tx[lo])
    return ty[lo] * (1.0 - w) + ty[hi] * w


@njit(cache=True, nogil=True)
def jump_size_from_uniform(code, alpha, eps, z_max, sizes, cum, u):
    """Inverse-CDF sample of the jump law nu restricted to [eps, infinity)."""
    if code == LEVY_STABLE:
        return eps * u ** (-1.0 / alpha)
    if code == LEVY_TRUNCATED_STABLE:
        s = eps ** (-alpha) - u * (eps ** (-alpha) - z_max ** (-alpha))
        return s ** (-1.0 / alpha)
    for i in range(len(cum)):
        if u <= cum[i]:
            return sizes[i]
    return sizes[len(sizes) - 1]


@njit(cache=True, nogil=True)
def effective_dt(dt, adaptive, x, g0, g1, g2, m1):
    """Adaptive step: dt scaled by the state scale over the local motion rate.

    The numerator is bounded below by the unit state scale so that steps do
    not collapse as the path approaches 0.
    """
    if adaptive == 0:
        return dt
    denom = abs(g0) + g2 * m1 + np.sqrt(g1) + 1.0
    num = x if x > 1.0 else 1.0
    ratio = num / denom
    if ratio > 1.0:
        ratio = 1.0
    return dt * ratio


@njit(cache=True, nogil=True)
def _path_core(
    k0,
    k1,
    path_index,
    x0,
    r0c, r0p, r0tx, r0ty,
    r1c, r1p, r1tx, r1ty,
    r2c, r2p, r2tx, r2ty,
    lev_code, lev_alpha, lev_zmax, atom_sizes, atom_cum,
    nu_tail, m1, v_small, eps,
    dt, t_max, x_cap,
    gauss_mode, adaptive, use_diffusion, use_jumps, absorbing_zero,
    stride, early_exit, max_steps,
    eval_times, thresholds_desc,
    rec_t, rec_x,
    eval_out, cross_out,
):
    """Simulate one path; returns (n_rec, hit_zero_at, capped_at, n_steps, truncated).

    eval_out and cross_out must be pre-filled with NaN.  thresholds_desc must
    be strictly decreasing.  hit_zero_at / capped_at are NaN when the event
    did not occur.
    """
    x = x0
    t = 0.0
    n_ev = len(eval_times)
    n_th = len(thresholds_desc)
    rec_cap = len(rec_t)
    truncated = 0

    n_rec = 0
    if stride > 0 and rec_cap > 0:
        rec_t[0] = 0.0
        rec_x[0] = x
        n_rec = 1

    ev_i = 0
    while ev_i < n_ev and eval_times[ev_i] <= 0.0:
        eval_out[ev_i] = x
        ev_i += 1
    th_i = 0
    while th_i < n_th and x < thresholds_desc[th_i]:
        cross_out[th_i] = 0.0
        th_i += 1

    hit_zero = np.nan if x > 0.0 else 0.0
    capped = np.nan
    need_normals = use_diffusion == 1 or (use_jumps == 1 and gauss_mode == 1)

    step = 0
    while t < t_max:
        if absorbing_zero == 1 and x == 0.0:
            break
        g0 = rate_eval(r0c, r0p, r0tx, r0ty, x)
        g1 = rate_eval(r1c, r1p, r1tx, r1ty, x)
        g2 = rate_eval(r2c, r2p, r2tx, r2ty, x)
        if g1 < 0.0:
            g1 = 0.0
        if g2 < 0.0:
            g2 = 0.0
        dt_eff = effective_dt(dt, adaptive, x, g0, g1, g2, m1 if use_jumps == 1 else 0.0)
        if t + dt_eff > t_max:
            dt_eff = t_max - t

        drift = g0 * dt_eff
        if use_jumps == 1:
            drift -= g2 * m1 * dt_eff

        z1 = 0.0
        z2 = 0.0
        if need_normals:
            z1, z2 = normal_pair(k0, k1, path_index, step, SUB_NORMAL, 0)

        diff_term = 0.0
        if use_diffusion == 1:
            diff_term = np.sqrt(g1 * dt_eff) * z1

        jump_sum = 0.0
        if use_jumps == 1:
            u_dom = g2
            lam = u_dom * nu_tail * dt_eff
            if lam > 0.0:
                block = 0
                parity = 0
                buf = 0.0
                n_marks, block, parity, buf = stream_next_poisson(
                    lam, k0, k1, path_index, step, SUB_JUMP, block, parity, buf
                )
                for _ in range(n_marks):
                    u_s, block, parity, buf = stream_next_uniform(
                        k0, k1, path_index, step, SUB_JUMP, block, parity, buf
                    )
                    u_z, block, parity, buf = stream_next_uniform(
                        k0, k1, path_index, step, SUB_JUMP, block, parity, buf
                    )
                    u_u, block, parity, buf = stream_next_uniform(
                        k0, k1, path_index, step, SUB_JUMP, block, parity, buf
                    )
                    z = jump_size_from_uniform(
                        lev_code, lev_alpha, eps, lev_zmax, atom_sizes, atom_cum, u_z
                    )
                    if u_u * u_dom <= g2:
                        jump_sum += z

        small_term = 0.0
        if use_jumps == 1 and gauss_mode == 1:
            small_term = np.sqrt(g2 * v_small * dt_eff) * z2

        x_new = x + drift + diff_term + jump_sum + small_term
        if not np.isfinite(x_new):
            capped = t
            break
        if x_new < 0.0:
            x_new = 0.0
        t_new = t + dt_eff
        if x_new == 0.0 and np.isnan(hit_zero):
            hit_zero = t_new
        over_cap = x_new > x_cap
        if over_cap:
            x_new = x_cap
            capped = t_new

        if x_new < x:
            while th_i < n_th and x_new < thresholds_desc[th_i]:
                b = thresholds_desc[th_i]
                cross_out[th_i] = t + dt_eff * (x - b) / (x - x_new)
                th_i += 1
        while ev_i < n_ev and eval_times[ev_i] <= t_new:
            te = eval_times[ev_i]
            eval_out[ev_i] = x + (x_new - x) * (te - t) / dt_eff
            ev_i += 1

        step += 1
        if stride > 0 and step % stride == 0:
            if n_rec < rec_cap:
                rec_t[n_rec] = t_new
                rec_x[n_rec] = x_new
                n_rec += 1
            else:
                truncated = 1

        if t_new == t:
            # dt_eff underflowed relative to t: cannot make progress
            capped = t
            break
        x = x_new
        t = t_new
        if over_cap:
            break
        if early_exit == 1 and stride <= 0 and th_i >= n_th and ev_i >= n_ev:
            break
        if step >= max_steps:
            capped = t
            break

    if np.isnan(capped):
        while ev_i < n_ev:
            eval_out[ev_i] = x
            ev_i += 1
    else:
        while ev_i < n_ev:
            eval_out[ev_i] = np.nan
            ev_i += 1

    if stride > 0 and n_rec > 0 and rec_t[n_rec - 1] < t:
        if n_rec < rec_cap:
            rec_t[n_rec] = t
            rec_x[n_rec] = x
            n_rec += 1
        else:
            truncated = 1

    return n_rec, hit_zero, capped, step, truncated


_EMPTY = np.zeros(0, dtype=np.float64)


@njit(cache=True, nogil=True, parallel=True)
def ensemble_kernel(
    k0,
    k1,
    n_paths,
    x0,
    r0c, r0p, r0tx, r0ty,
    r1c, r1p, r1tx, r1ty,
    r2c, r2p, r2tx, r2ty,
    lev_code, lev_alpha, lev_zmax, atom_sizes, atom_cum,
    nu_tail, m1, v_small, eps,
    dt, t_max, x_cap,
    gauss_mode, adaptive, use_diffusion, use_jumps, absorbing_zero,
    early_exit, max_steps,
    eval_times, thresholds_desc,
    eval_mat, cross_mat, stats_mat,
):
    """All paths of an ensemble without trajectory recording.

    stats_mat columns: hit_zero_at, capped_at, n_steps, truncated.
    """
    for i in prange(n_paths):
        rec_t = np.zeros(0, dtype=np.float64)
        rec_x = np.zeros(0, dtype=np.float64)
        n_rec, hit_zero, capped, n_steps, truncated = _path_core(
            k0, k1, i, x0,
            r0c, r0p, r0tx, r0ty,
            r1c, r1p, r1tx, r1ty,
            r2c, r2p, r2tx, r2ty,
            lev_code, lev_alpha, lev_zmax, atom_sizes, atom_cum,
            nu_tail, m1, v_small, eps,
            dt, t_max, x_cap,
            gauss_mode, adaptive, use_diffusion, use_jumps, absorbing_zero,
            0, early_exit, max_steps,
            eval_times, thresholds_desc,
            rec_t, rec_x,
            eval_mat[i], cross_mat[i],
        )
        stats_mat[i, 0] = hit_zero
        stats_mat[i, 1] = capped
        stats_mat[i, 2] = n_steps
        stats_mat[i, 3] = truncated


@njit(cache=True, nogil=True)
def flow_core(
    k0,
    k1,
    realization_index,
    inits,
    r0c, r0p, r0tx, r0ty,
    r1c, r1p, r1tx, r1ty,
    r2c, r2p, r2tx, r2ty,
    lev_code, lev_alpha, lev_zmax, atom_sizes, atom_cum,
    nu_tail, m1, v_small, eps,
    dt, t_max, x_cap,
    gauss_mode, adaptive, use_diffusion, use_jumps, absorbing_zero,
    stride, early_exit, max_steps,
    eval_times, thresholds_desc,
    rec_t, rec_x,
    eval_out, cross_out, member_stats,
):
    """One realization of the coupled flow: members share every noise coordinate.

    inits must be nondecreasing.  All members are stepped in lockstep on one
    shared adaptive time grid (the smallest member-wise effective dt).  Jump
    marks (time, size, u) are drawn once per interval at the dominating rate
    gamma2(max member state); each member accepts a mark iff u <= gamma2(own
    state).  rec_x has one row per member, eval_out/cross_out one row per
    member, member_stats columns as in ensemble_kernel.

    Returns (n_rec, n_steps, order_violations, capped_any).
    """
    m = len(inits)
    n_ev = len(eval_times)
    n_th = len(thresholds_desc)
    rec_cap = len(rec_t)

    xs = inits.copy()
    g0s = np.empty(m, dtype=np.float64)
    g1s = np.empty(m, dtype=np.float64)
    g2s = np.empty(m, dtype=np.float64)
    jump_sums = np.empty(m, dtype=np.float64)
    ev_is = np.zeros(m, dtype=np.int64)
    th_is = np.zeros(m, dtype=np.int64)
    hit_zeros = np.full(m, np.nan)
    for j in range(m):
        if xs[j] == 0.0:
            hit_zeros[j] = 0.0

    t = 0.0
    n_rec = 0
    truncated = 0
    if stride > 0 and rec_cap > 0:
        rec_t[0] = 0.0
        for j in range(m):
            rec_x[j, 0] = xs[j]
        n_rec = 1
    for j in range(m):
        while ev_is[j] < n_ev and eval_times[ev_is[j]] <= 0.0:
            eval_out[j, ev_is[j]] = xs[j]
            ev_is[j] += 1
        while th_is[j] < n_th and xs[j] < thresholds_desc[th_is[j]]:
            cross_out[j, th_is[j]] = 0.0
            th_is[j] += 1

    violations = 0
    capped_any = 0
    capped_at = np.nan
    need_normals = use_diffusion == 1 or (use_jumps == 1 and gauss_mode == 1)

    step = 0
    while t < t_max:
        all_zero = True
        for j in range(m):
            if xs[j] != 0.0:
                all_zero = False
                break
        if absorbing_zero == 1 and all_zero:
            break

        dt_eff = dt
        for j in range(m):
            g0s[j] = rate_eval(r0c, r0p, r0tx, r0ty, xs[j])
            g1 = rate_eval(r1c, r1p, r1tx, r1ty, xs[j])
            g2 = rate_eval(r2c, r2p, r2tx, r2ty, xs[j])
            g1s[j] = g1 if g1 > 0.0 else 0.0
            g2s[j] = g2 if g2 > 0.0 else 0.0
            dtj = effective_dt(
                dt, adaptive, xs[j], g0s[j], g1s[j], g2s[j], m1 if use_jumps == 1 else 0.0
            )
            if dtj < dt_eff:
                dt_eff = dtj
        if t + dt_eff > t_max:
            dt_eff = t_max - t

        z1 = 0.0
        z2 = 0.0
        if need_normals:
            z1, z2 = normal_pair(k0, k1, realization_index, step, SUB_NORMAL, 0)

        for j in range(m):
            jump_sums[j] = 0.0
        if use_jumps == 1:
            u_dom = 0.0
            for j in range(m):
                if g2s[j] > u_dom:
                    u_dom = g2s[j]
            lam = u_dom * nu_tail * dt_eff
            if lam > 0.0:
                block = 0
                parity = 0
                buf = 0.0
                n_marks, block, parity, buf = stream_next_poisson(
                    lam, k0, k1, realization_index, step, SUB_JUMP, block, parity, buf
                )
                for _ in range(n_marks):
                    u_s, block, parity, buf = stream_next_uniform(
                        k0, k1, realization_index, step, SUB_JUMP, block, parity, buf
                    )
                    u_z, block, parity, buf = stream_next_uniform(
                        k0, k1, realization_index, step, SUB_JUMP, block, parity, buf
                    )
                    u_u, block, parity, buf = stream_next_uniform(
                        k0, k1, realization_index, step, SUB_JUMP, block, parity, buf
                    )
                    z = jump_size_from_uniform(
                        lev_code, lev_alpha, eps, lev_zmax, atom_sizes, atom_cum, u_z
                    )
                    u = u_u * u_dom
                    for j in range(m):
                        if u <= g2s[j]:
                            jump_sums[j] += z

        t_new = t + dt_eff
        bad = False
        for j in range(m):
            drift = g0s[j] * dt_eff
            if use_jumps == 1:
                drift -= g2s[j] * m1 * dt_eff
            diff_term = 0.0
            if use_diffusion == 1:
                diff_term = np.sqrt(g1s[j] * dt_eff) * z1
            small_term = 0.0
            if use_jumps == 1 and gauss_mode == 1:
                small_term = np.sqrt(g2s[j] * v_small * dt_eff) * z2
            x_new = xs[j] + drift + diff_term + jump_sums[j] + small_term
            if not np.isfinite(x_new):
                bad = True
                break
            if x_new < 0.0:
                x_new = 0.0
            if x_new == 0.0 and np.isnan(hit_zeros[j]):
                hit_zeros[j] = t_new
            if x_new > x_cap:
                x_new = x_cap
                capped_any = 1
                capped_at = t_new

            if x_new < xs[j]:
                while th_is[j] < n_th and x_new < thresholds_desc[th_is[j]]:
                    b = thresholds_desc[th_is[j]]
                    cross_out[j, th_is[j]] = t + dt_eff * (xs[j] - b) / (xs[j] - x_new)
                    th_is[j] += 1
            while ev_is[j] < n_ev and eval_times[ev_is[j]] <= t_new:
                te = eval_times[ev_is[j]]
                eval_out[j, ev_is[j]] = xs[j] + (x_new - xs[j]) * (te - t) / dt_eff
                ev_is[j] += 1
            xs[j] = x_new
        if bad:
            capped_any = 1
            capped_at = t
            break

        for j in range(1, m):
            if xs[j] < xs[j - 1]:
                violations += 1

        step += 1
        if stride > 0 and step % stride == 0:
            if n_rec < rec_cap:
                rec_t[n_rec] = t_new
                for j in range(m):
                    rec_x[j, n_rec] = xs[j]
                n_rec += 1
            else:
                truncated = 1

        if t_new == t:
            capped_any = 1
            capped_at = t
            break
        t = t_new
        if capped_any == 1:
            break
        if early_exit == 1 and stride <= 0:
            done = True
            for j in range(m):
                if th_is[j] < n_th or ev_is[j] < n_ev:
                    done = False
                    break
            if done:
                break
        if step >= max_steps:
            capped_any = 1
            capped_at = t
            break

    for j in range(m):
        if capped_any == 0:
            while ev_is[j] < n_ev:
                eval_out[j, ev_is[j]] = xs[j]
                ev_is[j] += 1
        else:
            while ev_is[j] < n_ev:
                eval_out[j, ev_is[j]] = np.nan
                ev_is[j] += 1
        member_stats[j, 0] = hit_zeros[j]
        member_stats[j, 1] = capped_at if capped_any == 1 else np.nan
        member_stats[j, 2] = step
        member_stats[j, 3] = truncated

    if stride > 0 and n_rec > 0 and rec_t[n_rec - 1] < t:
        if n_rec < rec_cap:
            rec_t[n_rec] = t
            for j in range(m):
                rec_x[j, n_rec] = xs[j]
            n_rec += 1
        else:
            truncated = 1
            for j in range(m):
                member_stats[j, 3] = truncated

    return n_rec, step, violations, capped_any
