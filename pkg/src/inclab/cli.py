"""Command-line front end: experiment orchestration and report emission.

Every command writes a CSV of rows and a JSON summary with per-rule pass
booleans into the output directory (atomically: temp file, then rename),
and exits 0 when all checks pass, 1 when a check fails, 2 on invalid
configuration.  All randomness flows from --seed, so identical invocations
produce byte-identical artifacts.
"""

import argparse
import concurrent.futures
import json
import os
import sys
from pathlib import Path

from . import content as ct
from . import experiments as ex
from . import measures as ms
from .geometry import PLANE
from .measures import PointSet

FORMATS = ("csv", "json", "both")


def _parse_deltas(text):
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if "^" in tok:
            base, expo = tok.split("^")
            out.append(float(base) ** float(expo))
        else:
            out.append(float(tok))
    if not out or any(d <= 0 for d in out):
        raise ValueError(f"bad delta list: {text!r}")
    return out


def _rows_to_csv(rows):
    if not rows:
        return "\n"
    keys = list(rows[0].keys())
    lines = [",".join(keys)]
    for r in rows:
        lines.append(",".join(_csv_cell(r.get(k)) for k in keys))
    return "\n".join(lines) + "\n"


def _csv_cell(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, bool):
        return str(v)
    return str(v)


def _write_atomic(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _emit(out_dir, name, rows, summary, fmt):
    out = Path(out_dir)
    if fmt in ("csv", "both"):
        _write_atomic(out / f"{name}.csv", _rows_to_csv(rows))
    if fmt in ("json", "both"):
        _write_atomic(out / f"{name}_summary.json",
                      json.dumps(summary, indent=2, sort_keys=True,
                                 default=str) + "\n")


def _content_fixture_rows():
    """Canonical hand-checkable content fixtures for the report."""
    rows = []
    k = 6
    delta = 2.0 ** -k
    ix0 = round(2.0 / delta)
    import numpy as np
    row_set = PointSet(PLANE, delta, np.arange(ix0, ix0 + 2 ** k),
                       np.full(2 ** k, ix0))
    for s, expect in ((1.0, 1.0), (2.0, delta)):
        res = ct.dyadic_content(row_set, s)
        rows.append({"fixture": "bottom_row", "s": s, "value": res.value,
                     "expected": expect, "cover_size": len(res.cover),
                     "exact": res.value == expect})
    full = ms.generate_cantor_measure(2.0, delta, seed=0,
                                      window=(0.0, 1.0, 0.0, 1.0)).support()
    res = ct.dyadic_content(full, 2.0)
    rows.append({"fixture": "unit_square", "s": 2.0, "value": res.value,
                 "expected": 1.0, "cover_size": len(res.cover),
                 "exact": res.value == 1.0})
    return rows


def cmd_content(args):
    fixture_rows = _content_fixture_rows()
    rows, summary = ex.exp_content(seed=args.seed)
    summary["fixtures_exact"] = bool(all(r["exact"] for r in fixture_rows))
    summary["pass"] = bool(summary["pass"] and summary["fixtures_exact"])
    return fixture_rows + rows, summary


def cmd_incidence_sweep(args):
    deltas = args.deltas or ex.DESK_DELTAS
    rows, summary = ex.exp_incidence_sweep(
        seed=args.seed, t_values=(args.t,), n_seeds=1, deltas=deltas)
    flat = summary["fixtures"][0]
    flat["pass"] = summary["pass"]
    return rows, flat


def cmd_energy(args):
    return ex.exp_energy(seed=args.seed)


def cmd_xray_check(args):
    return ex.exp_xray_check(seed=args.seed, n=args.n)


def cmd_smoothing(args):
    return ex.exp_smoothing(seed=args.seed, n=args.n)


def cmd_furstenberg(args):
    fixtures = ((args.s, args.t),) if args.s and args.t else \
        ((0.5, 1.6), (0.8, 1.4), (1.0, 1.2))
    deltas = tuple(args.deltas) if args.deltas else \
        (2.0 ** -5, 2.0 ** -6, 2.0 ** -7, 2.0 ** -8)
    return ex.exp_furstenberg(seed=args.seed, fixtures=fixtures, deltas=deltas)


def cmd_slicing(args):
    deltas = tuple(args.deltas) if args.deltas else \
        (2.0 ** -5, 2.0 ** -6, 2.0 ** -7, 2.0 ** -8)
    return ex.exp_slicing(seed=args.seed, s=args.s or 0.6, t=args.t or 1.6,
                          tau=args.tau, deltas=deltas)


def cmd_radial(args):
    delta = args.deltas[0] if args.deltas else 2.0 ** -8
    return ex.exp_radial(seed=args.seed, s=args.s or 0.8, t=args.t or 1.5,
                         sigma=args.sigma, delta=delta)


def cmd_verify(args):
    names = [name for name, _, _ in ex.VERIFY_PLAN]
    workers = max(1, args.threads)

    def run_one(entry):
        name, func, params = entry
        rows, summary = func(seed=args.seed, **params[args.scale])
        return name, rows, summary

    results = {}
    if workers == 1:
        for entry in ex.VERIFY_PLAN:
            name, rows, summary = run_one(entry)
            results[name] = (rows, summary)
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            for name, rows, summary in pool.map(run_one, ex.VERIFY_PLAN):
                results[name] = (rows, summary)

    # serialize outputs in plan order regardless of completion order
    table = []
    for name in names:
        rows, summary = results[name]
        _emit(args.out, f"verify_{name}", rows, summary, args.format)
        table.append({"experiment": name, "pass": summary["pass"]})
        print(f"{name:24s} {'PASS' if summary['pass'] else 'FAIL'}")
    all_pass = all(t["pass"] for t in table)
    overall = {"scale": args.scale, "seed": args.seed,
               "experiments": table, "pass": all_pass}
    _emit(args.out, "verify", table, overall, args.format)
    return None, overall


COMMANDS = {
    "energy": cmd_energy,
    "incidence-sweep": cmd_incidence_sweep,
    "xray-check": cmd_xray_check,
    "smoothing": cmd_smoothing,
    "content": cmd_content,
    "furstenberg": cmd_furstenberg,
    "slicing": cmd_slicing,
    "radial": cmd_radial,
    "verify": cmd_verify,
}


def build_parser():
    p = argparse.ArgumentParser(
        prog="inclab",
        description="discretized incidence-geometry experiments")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", type=str, default=None,
                   help="JSON file of flat key/value defaults")
    p.add_argument("--out", type=str, default="out")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--deltas", type=str, default=None,
                   help="comma list, e.g. '2^-5,2^-6' or '0.03125'")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--format", choices=FORMATS, default="both")
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--s", type=float, default=None)
    p.add_argument("--tau", type=float, default=1.3)
    p.add_argument("--sigma", type=float, default=0.6)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--scale", choices=("desk", "quick"), default="desk")
    return p


def _apply_config(args, parser):
    if args.config:
        try:
            blob = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ValueError(f"cannot read config: {e}")
        if not isinstance(blob, dict):
            raise ValueError("config must be a flat JSON object")
        defaults = {a.dest: a.default for a in parser._actions}
        for key, val in blob.items():
            if key not in defaults:
                raise ValueError(f"unknown config key: {key}")
            # command line wins over the config file
            if getattr(args, key) == defaults[key]:
                setattr(args, key, val)
    if isinstance(args.deltas, str):
        args.deltas = _parse_deltas(args.deltas)
    if args.threads is None:
        args.threads = int(os.environ.get("INCLAB_THREADS", "1"))
    if args.n is None:
        args.n = 512 if args.command == "xray-check" else 256
    if args.command == "incidence-sweep" and args.t is None:
        args.t = 1.5
    return args


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        args = _apply_config(args, parser)
    except ValueError as e:
        print(f"invalid config: {e}", file=sys.stderr)
        return 2

    try:
        rows, summary = COMMANDS[args.command](args)
    except ValueError as e:
        print(f"invalid config: {e}", file=sys.stderr)
        return 2

    if args.command != "verify":
        _emit(args.out, args.command.replace("-", "_"), rows or [],
              summary, args.format)
        print(json.dumps(summary, indent=2, sort_keys=True, default=str))
    return 0 if summary["pass"] else 1


if __name__ == "__main__":
    sys.exit(main())
