"""Result persistence: CSV (RFC 4180), JSON summaries, gnuplot data, manifests.

Result files are byte-deterministic for a fixed seed and config: keys are
sorted, row order is fixed, floats are written with shortest round-trip
representation, and non-finite values are serialized as null.  Everything
that varies between identical reruns (timestamps, wall time) is quarantined
in the manifest's "timing" block.
"""

import csv
import datetime
import json
import platform
from pathlib import Path

import numba
import numpy as np


def _sanitize(obj):
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_sanitize(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_sanitize(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return repr(v) if np.isfinite(v) else ""
    if isinstance(v, (np.integer, int)):
        return str(int(v))
    return str(v)


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)  # default dialect is RFC 4180 (CRLF, minimal quoting)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def write_gnuplot(path, columns, names):
    """Whitespace-separated data file with a commented header line."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    cols = [np.asarray(c, dtype=float) for c in columns]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# " + " ".join(names) + "\n")
        for i in range(len(cols[0])):
            fh.write(" ".join("nan" if not np.isfinite(c[i]) else repr(float(c[i])) for c in cols))
            fh.write("\n")
    return path


def write_manifest(out_dir, command, config_echo, seed, wall_time_s, results):
    """Run manifest; deterministic except for the quarantined timing block."""
    from . import __version__

    manifest = {
        "command": command,
        "config": _sanitize(config_echo),
        "seed": int(seed),
        "results": sorted(results),
        "versions": {
            "entrancesim": __version__,
            "numpy": np.__version__,
            "numba": numba.__version__,
            "python": platform.python_version(),
        },
        "timing": {
            "started_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "wall_time_s": wall_time_s,
        },
    }
    return write_json(Path(out_dir) / "manifest.json", manifest)
