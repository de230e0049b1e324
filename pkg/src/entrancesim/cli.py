"""Command-line front end: config ingestion, experiment orchestration, output.

Subcommands: validate, simulate, flow, passage, classify, diagnose.  Each
reads one JSON experiment config, applies dotted-path flag overrides
(--sim.dt 1e-4; precedence flags > file > defaults), runs, and writes result
files plus a manifest into the output directory.  Exit codes: 0 success,
2 config/validation failure, 3 numerical failure.

Config schema (unknown keys are rejected):

    {
      "spec": {...} | "spec_file": "path.json",
      "sim": {"seed": int, "dt": ..., "eps": ..., "t_max": ..., "x_cap": ...,
               "small_jump_mode": "drop"|"gaussian", "adaptive": bool,
               "record_stride": int, "max_steps": int},
      "output_dir": "path",
      "validate":  {"grid": [...]},
      "simulate":  {"x0": ..., "n_paths": ..., "thresholds": [...],
                    "eval_times": [...], "store_paths": bool},
      "flow":      {"op": "flow"|"gronwall", "initial_values": [...],
                    "n_realizations": ..., "thresholds": [...],
                    "eval_times": [...], "x": ..., "y": ..., "t": ...,
                    "theta": ...},
      "passage":   {"op": "estimate"|"exp_moment"|"markov"|"tail", "x0": ...,
                    "b": ..., "n_paths": ..., "theta": ..., "x": ...,
                    "x_mid": ..., "t_unit": ..., "n_max": ...},
      "classify":  {"grid": [...]},
      "diagnose":  {"op": "entrance_profile"|"semigroup_cauchy"|
                          "moment_convergence"|"fdd", ...}
    }

The seed is mandatory for simulation subcommands, either in "sim" or via
--seed.  The default output directory comes from $ENTRANCESIM_OUTPUT_DIR.
"""

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import boundary, coupling, diagnostics, io, passage
from .errors import (
    DomainError,
    EntranceSimError,
    NumericalOverflowError,
    PreconditionError,
    SchemaError,
    SpecificationError,
)
from .diagnostics import TestFunction
from .model import spec_from_dict, validate
from .simulate import SimConfig, set_worker_count, simulate_ensemble

_TOP_KEYS = {
    "spec", "spec_file", "sim", "output_dir",
    "validate", "simulate", "flow", "passage", "classify", "diagnose",
}
_SIM_KEYS = {
    "seed", "dt", "eps", "t_max", "x_cap", "small_jump_mode",
    "adaptive", "record_stride", "max_steps",
}
_SIM_COMMANDS = {"simulate", "flow", "passage", "diagnose"}


def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _extract_overrides(extras):
    """Turn leftover ['--a.b', '1e-4', ...] tokens into {path: value}."""
    overrides = {}
    i = 0
    while i < len(extras):
        tok = extras[i]
        if not tok.startswith("--") or "." not in tok:
            raise SchemaError(f"unrecognized argument {tok!r} (dotted overrides look like --sim.dt 1e-4)")
        if "=" in tok:
            key, value = tok[2:].split("=", 1)
            i += 1
        else:
            if i + 1 >= len(extras):
                raise SchemaError(f"flag {tok!r} is missing a value")
            key, value = tok[2:], extras[i + 1]
            i += 2
        overrides[key] = _parse_value(value)
    return overrides


def _apply_override(cfg, dotted, value):
    parts = dotted.split(".")
    node = cfg
    for p in parts[:-1]:
        node = node.setdefault(p, {})
        if not isinstance(node, dict):
            raise SchemaError(f"cannot override {dotted!r}: {p!r} is not an object")
    node[parts[-1]] = value


def _load_config(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"config {path} is not valid JSON (line {exc.lineno}, column {exc.colno}): {exc.msg}") from exc
    if not isinstance(cfg, dict):
        raise SchemaError("config root must be a JSON object")
    return cfg


def _check_keys(block, allowed, where):
    unknown = set(block) - allowed
    if unknown:
        raise SchemaError(f"unknown key(s) {sorted(unknown)} in {where}")


def _resolve_spec(cfg, config_dir):
    if "spec" in cfg and "spec_file" in cfg:
        raise SchemaError("give either 'spec' or 'spec_file', not both")
    if "spec" in cfg:
        return spec_from_dict(cfg["spec"])
    if "spec_file" in cfg:
        spec_path = Path(config_dir) / cfg["spec_file"]
        return spec_from_dict(_load_config(spec_path))
    raise SchemaError("config needs a 'spec' or 'spec_file' entry")


def _build_sim_config(cfg, command):
    sim = dict(cfg.get("sim", {}))
    _check_keys(sim, _SIM_KEYS, "'sim'")
    if command in _SIM_COMMANDS and "seed" not in sim:
        raise SchemaError(
            f"subcommand {command!r} needs a seed: set sim.seed in the config or pass --seed"
        )
    sim.setdefault("seed", 0)
    try:
        return SimConfig(**sim)
    except TypeError as exc:
        raise SchemaError(f"bad 'sim' block: {exc}") from exc


def _require(block, keys, where):
    for k in keys:
        if k not in block:
            raise SchemaError(f"missing required key {k!r} in {where}")


def _f_from_cfg(raw):
    if raw is None:
        return diagnostics.EXP_NEG
    if isinstance(raw, dict):
        return TestFunction(raw.get("kind", "exp_neg"), raw.get("lam", 1.0))
    raise SchemaError("test function must be an object like {\"kind\": \"exp_neg\"}")


# --- subcommand handlers ----------------------------------------------------

def _cmd_validate(spec, _cfg_sim, block, out):
    _check_keys(block, {"grid"}, "'validate'")
    grid = np.asarray(block.get("grid", np.linspace(0.0, 100.0, 101).tolist()), dtype=float)
    report = validate(spec, grid)
    io.write_json(out / "validation.json", {
        "integrability_ok": report.integrability_ok,
        "integrability_value": report.integrability_value,
        "one_sided_lipschitz_theta": report.one_sided_lipschitz_theta,
        "gamma2_monotone": report.gamma2_monotone,
        "warnings": list(report.warnings),
    })
    return ["validation.json"]


def _cmd_simulate(spec, cfg_sim, block, out):
    _check_keys(block, {"x0", "n_paths", "thresholds", "eval_times", "store_paths"}, "'simulate'")
    _require(block, ["x0"], "'simulate'")
    n_paths = int(block.get("n_paths", 1))
    store = bool(block.get("store_paths", True))
    ens = simulate_ensemble(
        spec, float(block["x0"]), cfg_sim, n_paths,
        thresholds=tuple(block.get("thresholds", ())),
        eval_times=tuple(block.get("eval_times", ())),
        store_paths=store,
    )
    results = []
    if store:
        rows = (
            (p.path_index, t, v)
            for p in ens.paths
            for t, v in zip(p.times, p.values)
        )
        io.write_csv(out / "ensemble.csv", ["path_index", "time", "value"], rows)
        results.append("ensemble.csv")
    io.write_json(out / "summary.json", ens.summary())
    results.append("summary.json")
    return results


def _cmd_flow(spec, cfg_sim, block, out):
    allowed = {"op", "initial_values", "n_realizations", "thresholds", "eval_times",
               "x", "y", "t", "theta"}
    _check_keys(block, allowed, "'flow'")
    op = block.get("op", "flow")
    if op == "gronwall":
        _require(block, ["x", "y", "t", "n_realizations"], "'flow' (gronwall)")
        rep = coupling.gronwall_check(
            spec, float(block["x"]), float(block["y"]), float(block["t"]),
            int(block["n_realizations"]), cfg_sim, theta=block.get("theta"),
        )
        io.write_json(out / "gronwall.json", rep.__dict__)
        return ["gronwall.json"]
    if op != "flow":
        raise SchemaError(f"unknown flow op {op!r}")
    _require(block, ["initial_values"], "'flow'")
    n_real = int(block.get("n_realizations", 1))
    rows = []
    violations = []
    for r in range(n_real):
        flow = coupling.simulate_flow(
            spec, block["initial_values"], cfg_sim, r,
            thresholds=tuple(block.get("thresholds", ())),
            eval_times=tuple(block.get("eval_times", ())),
        )
        violations.append(flow.order_violations)
        for x0, p in zip(flow.initial_values, flow.paths):
            rows.extend((r, x0, t, v) for t, v in zip(p.times, p.values))
    io.write_csv(out / "flow.csv", ["realization", "initial_value", "time", "value"], rows)
    io.write_json(out / "violations.json", {
        "n_realizations": n_real,
        "violations_per_realization": violations,
        "total_violations": int(sum(violations)),
    })
    return ["flow.csv", "violations.json"]


def _cmd_passage(spec, cfg_sim, block, out):
    allowed = {"op", "x0", "b", "n_paths", "theta", "x", "x_mid", "t_unit", "n_max"}
    _check_keys(block, allowed, "'passage'")
    op = block.get("op", "estimate")
    results = []
    if op == "estimate":
        _require(block, ["x0", "b", "n_paths"], "'passage'")
        est = passage.estimate_passage(
            spec, float(block["x0"]), float(block["b"]), cfg_sim, int(block["n_paths"]),
            theta=block.get("theta"),
        )
        io.write_csv(
            out / "passage.csv",
            ["x0", "b", "n", "mean", "se", "censored_fraction"],
            [(est.x0, est.b, est.n_paths, est.mean, est.se, est.censored_fraction)],
        )
        io.write_csv(out / "cdf.csv", ["t", "p"], zip(est.cdf_times, est.cdf_probs))
        payload = {
            "op": op, "x0": est.x0, "b": est.b, "n_paths": est.n_paths,
            "mean": est.mean, "se": est.se, "censored_fraction": est.censored_fraction,
            "t_max": est.t_max,
        }
        if est.exp_moment is not None:
            payload["exp_moment"] = est.exp_moment.__dict__
        io.write_json(out / "estimate.json", payload)
        results += ["passage.csv", "cdf.csv", "estimate.json"]
    elif op == "exp_moment":
        _require(block, ["x0", "b", "theta", "n_paths"], "'passage' (exp_moment)")
        est = passage.estimate_exp_moment(
            spec, float(block["x0"]), float(block["b"]), float(block["theta"]),
            cfg_sim, int(block["n_paths"]),
        )
        io.write_json(out / "estimate.json", {"op": op, **est.__dict__})
        results.append("estimate.json")
    elif op == "markov":
        _require(block, ["x", "x_mid", "b", "n_paths"], "'passage' (markov)")
        chk = passage.markov_decomposition_check(
            spec, float(block["x"]), float(block["x_mid"]), float(block["b"]),
            cfg_sim, int(block["n_paths"]),
        )
        io.write_json(out / "estimate.json", {"op": op, **chk.__dict__})
        results.append("estimate.json")
    elif op == "tail":
        _require(block, ["x0", "b", "t_unit", "n_max", "n_paths"], "'passage' (tail)")
        fit = passage.tail_geometric_fit(
            spec, float(block["x0"]), float(block["b"]), float(block["t_unit"]),
            int(block["n_max"]), cfg_sim, int(block["n_paths"]),
        )
        io.write_json(out / "estimate.json", {"op": op, **fit.__dict__})
        io.write_csv(
            out / "tail.csv", ["n", "tail_prob", "alpha_hat"],
            zip(fit.n_values, fit.tail_probs, fit.alpha_hat),
        )
        results += ["estimate.json", "tail.csv"]
    else:
        raise SchemaError(f"unknown passage op {op!r}")
    return results


def _cmd_classify(spec, _cfg_sim, block, out):
    _check_keys(block, {"grid"}, "'classify'")
    grid = np.asarray(
        block.get("grid", boundary.default_classifier_grid().tolist()), dtype=float
    )
    report = validate(spec, grid)
    breport = boundary.classify(spec, report, grid=grid)
    io.write_json(out / "boundary.json", {
        **breport.to_dict(),
        "validation": {
            "integrability_ok": report.integrability_ok,
            "one_sided_lipschitz_theta": report.one_sided_lipschitz_theta,
            "gamma2_monotone": report.gamma2_monotone,
        },
    })
    return ["boundary.json"]


def _cmd_diagnose(spec, cfg_sim, block, out):
    allowed = {"op", "b_grid", "x_grid", "t", "times", "n_paths", "b", "h", "f", "x_ref"}
    _check_keys(block, allowed, "'diagnose'")
    op = block.get("op")
    results = []
    if op == "entrance_profile":
        _require(block, ["b_grid", "x_grid", "t", "n_paths"], "'diagnose' (entrance_profile)")
        prof = diagnostics.entrance_profile(
            spec, block["b_grid"], block["x_grid"], float(block["t"]),
            cfg_sim, int(block["n_paths"]),
        )
        io.write_json(out / "diagnose.json", {
            "op": op, "b_grid": prof.b_grid, "x_grid": prof.x_grid, "t": prof.t,
            "plateau": [p.__dict__ for p in prof.plateau],
        })
        header = ["x"] + [f"b={b:g}" for b in prof.b_grid]
        for name, mat in (
            ("profile_p.csv", prof.p_matrix),
            ("profile_mean.csv", prof.mean_matrix),
            ("profile_se.csv", prof.se_matrix),
            ("profile_censored.csv", prof.censored_matrix),
        ):
            io.write_csv(out / name, header, (
                (prof.x_grid[i], *mat[i]) for i in range(len(prof.x_grid))
            ))
            results.append(name)
        for jb, b in enumerate(prof.b_grid):
            io.write_gnuplot(
                out / f"profile_mean_b{jb}.dat",
                [prof.x_grid, prof.mean_matrix[:, jb], prof.se_matrix[:, jb]],
                ["x", f"mean_T_b{b:g}", "se"],
            )
            results.append(f"profile_mean_b{jb}.dat")
        results.append("diagnose.json")
    elif op == "semigroup_cauchy":
        _require(block, ["t", "x_grid", "n_paths"], "'diagnose' (semigroup_cauchy)")
        rep = diagnostics.semigroup_cauchy(
            spec, _f_from_cfg(block.get("f")), float(block["t"]), block["x_grid"],
            cfg_sim, int(block["n_paths"]),
        )
        io.write_json(out / "diagnose.json", {
            "op": op, "x_grid": rep.x_grid, "t": rep.t,
            "values": rep.values, "ses": rep.ses, "diffs": rep.diffs,
            "joint_ses": rep.joint_ses,
            "last_diff_below_3se": rep.last_diff_below_3se,
            "tail_decreasing": rep.tail_decreasing,
        })
        io.write_gnuplot(
            out / "semigroup.dat", [rep.x_grid, rep.values, rep.ses], ["x", "Ptf", "se"]
        )
        results += ["diagnose.json", "semigroup.dat"]
    elif op == "moment_convergence":
        _require(block, ["b", "x_grid", "n_paths"], "'diagnose' (moment_convergence)")
        raw_h = block.get("h", 1)
        h = raw_h if isinstance(raw_h, int) else _f_from_cfg(raw_h)
        rep = diagnostics.moment_convergence(
            spec, h, float(block["b"]), block["x_grid"], cfg_sim, int(block["n_paths"]),
        )
        io.write_json(out / "diagnose.json", {
            "op": op, "b": rep.b, "x_grid": rep.x_grid, "h": rep.h_label,
            "estimates": rep.estimates, "ses": rep.ses, "censored": rep.censored,
            "inconclusive": rep.inconclusive, "plateau": rep.plateau.__dict__,
        })
        io.write_gnuplot(
            out / "moments.dat", [rep.x_grid, rep.estimates, rep.ses], ["x", "Eh", "se"]
        )
        results += ["diagnose.json", "moments.dat"]
    elif op == "fdd":
        _require(block, ["times", "x_grid", "x_ref", "n_paths"], "'diagnose' (fdd)")
        rep = diagnostics.fdd_convergence(
            spec, block["times"], block["x_grid"], float(block["x_ref"]),
            cfg_sim, int(block["n_paths"]),
        )
        io.write_json(out / "diagnose.json", {
            "op": op, "x_grid": rep.x_grid, "times": rep.times, "x_ref": rep.x_ref,
            "deterministic": rep.deterministic, "statistics": rep.statistics,
            "thresholds": rep.thresholds,
            "strictly_decreasing_along_x": rep.strictly_decreasing_along_x,
            "nondecreasing_along_x": rep.nondecreasing_along_x,
        })
        io.write_csv(
            out / "fdd.csv",
            ["x"] + [f"t={t:g}" for t in rep.times],
            ((rep.x_grid[i], *rep.statistics[i]) for i in range(len(rep.x_grid))),
        )
        for k, t in enumerate(rep.times):
            io.write_gnuplot(
                out / f"fdd_t{k}.dat",
                [rep.x_grid, rep.statistics[:, k],
                 rep.thresholds[:, k] if rep.thresholds is not None else np.zeros(len(rep.x_grid))],
                ["x", f"ks_t{t:g}", "threshold"],
            )
            results.append(f"fdd_t{k}.dat")
        results += ["diagnose.json", "fdd.csv"]
    else:
        raise SchemaError(
            "diagnose op must be one of entrance_profile, semigroup_cauchy, "
            "moment_convergence, fdd"
        )
    return results


_HANDLERS = {
    "validate": _cmd_validate,
    "simulate": _cmd_simulate,
    "flow": _cmd_flow,
    "passage": _cmd_passage,
    "classify": _cmd_classify,
    "diagnose": _cmd_diagnose,
}


def run(argv):
    parser = argparse.ArgumentParser(
        prog="entrancesim",
        description="Simulation and entrance-at-infinity diagnostics for positive jump-diffusions",
    )
    parser.add_argument("command", choices=sorted(_HANDLERS))
    parser.add_argument("config", help="path to a JSON experiment config")
    parser.add_argument("--output-dir", default=None)
    parser.add_argument("--workers", type=int, default=None,
                        help="worker threads (never affects results)")
    parser.add_argument("--seed", type=int, default=None, help="shorthand for --sim.seed")
    args, extras = parser.parse_known_args(argv)

    cfg = _load_config(args.config)
    _check_keys(cfg, _TOP_KEYS, "config root")
    for dotted, value in _extract_overrides(extras).items():
        _apply_override(cfg, dotted, value)
    if args.seed is not None:
        _apply_override(cfg, "sim.seed", int(args.seed))

    if args.workers is not None:
        set_worker_count(args.workers)

    out_dir = (
        args.output_dir
        or cfg.get("output_dir")
        or os.environ.get("ENTRANCESIM_OUTPUT_DIR")
        or "entrancesim_out"
    )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    spec = _resolve_spec(cfg, Path(args.config).parent)
    cfg_sim = _build_sim_config(cfg, args.command)
    block = cfg.get(args.command, {})
    if not isinstance(block, dict):
        raise SchemaError(f"'{args.command}' block must be an object")

    t0 = time.time()
    results = _HANDLERS[args.command](spec, cfg_sim, block, out)
    io.write_manifest(
        out, args.command,
        {"config_file": str(args.config), "resolved": cfg},
        cfg_sim.seed, time.time() - t0, results,
    )
    return 0


def main(argv=None):
    try:
        return run(sys.argv[1:] if argv is None else argv)
    except (SchemaError, SpecificationError, DomainError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericalOverflowError, MemoryError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except EntranceSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
