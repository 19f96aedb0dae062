"""Run experiment specs and print simulated vs predicted overlap per grid point.

    python scripts/run_sweep.py scripts/specs/overlap_constant.json --jobs 4
"""
import argparse
from collections import defaultdict

import numpy as np

from bhcd.experiments import ExperimentSpec, run_sweep, write_outputs


def table(rows):
    acc = defaultdict(list)
    pred = defaultdict(list)
    for r in rows:
        if r.get("overlap") is not None:
            acc[r["c_in"], r["method"]].append(r["overlap"])
        if r.get("predicted_overlap") is not None:
            pred[r["c_in"]].append(r["predicted_overlap"])
    methods = sorted({m for _, m in acc})
    print("c_in    predicted  " + "  ".join(f"{m:>14}" for m in methods))
    for c_in in sorted({c for c, _ in acc}):
        p = f"{np.mean(pred[c_in]):9.4f}" if pred[c_in] else " " * 9
        cells = [f"{np.mean(acc[c_in, m]):14.4f}" if acc[c_in, m] else " " * 14 for m in methods]
        print(f"{c_in:<7.4g} {p}  " + "  ".join(cells))


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("specs", nargs="+")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default=None, help="override the spec output directory")
    ap.add_argument("--seeds", type=int, default=None, help="use only the first N seeds")
    args = ap.parse_args()
    for path in args.specs:
        spec = ExperimentSpec.from_json(path)
        if args.seeds:
            spec.seeds = spec.seeds[: args.seeds]
        rows = run_sweep(spec, args.jobs)
        csv_path = write_outputs(spec, rows, args.out)
        errors = sum(bool(r.get("error")) for r in rows)
        print(f"# {spec.name}: {len(rows)} rows -> {csv_path} ({errors} failed)")
        table(rows)


if __name__ == "__main__":
    main()
