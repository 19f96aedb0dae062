"""Command-line interface: generate | cluster | sweep | spectrum."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .experiments import ExperimentSpec, fmt, run_sweep, summarize, write_outputs, zeta_true
from .generate import DcsbmParams, InfeasibleParameters, sample_dcsbm
from .graph import (GraphFormatError, LabelVector, estimate_rho_B, load_edge_list, load_labels,
                    write_edge_list, write_labels)
from .metrics import modularity, overlap
from .nonbacktracking import log_abs_det_H
from .pipeline import BASELINES, AlgorithmOptions, InfeasibleK, algorithm1, baseline_cluster
from .spectra import build_bethe_hessian, smallest_eigenpairs

EXIT_IO = 2
EXIT_INFEASIBLE = 3

log = logging.getLogger("bhcd")


class CliError(Exception):
    def __init__(self, msg, code):
        super().__init__(msg)
        self.code = code


def _read_graph(path, one_indexed=False):
    try:
        return load_edge_list(path, one_indexed)
    except (OSError, GraphFormatError) as exc:
        raise CliError(f"cannot read graph {path}: {exc}", EXIT_IO) from exc


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read config {path}: {exc}", EXIT_IO) from exc


# ---------------------------------------------------------------- subcommands

def cmd_generate(args) -> int:
    cfg = _read_json(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    try:
        params = DcsbmParams.from_dict(cfg)
        sample = sample_dcsbm(params)
    except InfeasibleParameters as exc:
        raise CliError(str(exc), EXIT_INFEASIBLE) from exc
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    g = sample.graph
    write_edge_list(g, out / "edges.txt")
    write_labels(g, sample.labels, out / "labels.txt")
    np.savetxt(out / "theta.txt", sample.theta, fmt="%.17g")
    zt = None
    if params.k == 2:
        c_in, c_out = params.C[0, 0], params.C[0, 1]
        zt = zeta_true(c_in, c_out)
    meta = {
        "params": params.to_dict(),
        "n": g.n,
        "m": g.m,
        "phi": params.theta.phi,
        "zeta_true": zt,
        "n_clipped": int(sample.n_clipped),
    }
    text = json.dumps(meta, indent=2, sort_keys=True)
    (out / "meta.json").write_text(text + "\n")
    if args.json:
        print(text)
    else:
        print(f"wrote n={g.n} m={g.m} to {out}")
    return 0


def _parse_k(s: str):
    if s == "auto":
        return None
    try:
        return int(s)
    except ValueError:
        raise argparse.ArgumentTypeError("k must be an integer or 'auto'")


def cmd_cluster(args) -> int:
    g = _read_graph(args.graph, args.one_indexed)
    truth = None
    if args.labels:
        try:
            truth = load_labels(args.labels, g)
        except (OSError, GraphFormatError, ValueError) as exc:
            raise CliError(f"cannot read labels {args.labels}: {exc}", EXIT_IO) from exc
    opts = AlgorithmOptions(k=args.k, tol=args.tol, seed=args.seed or 0, grid=args.grid)
    try:
        if args.method == "algorithm1":
            out = algorithm1(g, opts).to_dict()
        else:
            if args.k is None:
                raise InfeasibleK(f"method {args.method} needs an explicit --k")
            lab = baseline_cluster(g, args.method, args.k, truth=truth, r=args.r, opts=opts)
            out = {"k_hat": lab.k, "labels": lab.labels.tolist()}
    except InfeasibleK as exc:
        raise CliError(str(exc), EXIT_INFEASIBLE) from exc
    except ValueError as exc:
        if "exceeds the number of distinct points" in str(exc) or "needs ground-truth" in str(exc):
            raise CliError(str(exc), EXIT_INFEASIBLE) from exc
        raise
    out["node_ids"] = g.node_ids.tolist()
    if truth is not None:
        est = LabelVector.from_array(out["labels"])
        out["overlap"] = overlap(est, truth) if truth.k > 1 else None
        out["modularity"] = modularity(g, est)
    print(json.dumps(out, indent=2 if args.json else None))
    return 0


def cmd_sweep(args) -> int:
    cfg = _read_json(args.config)
    try:
        spec = ExperimentSpec.from_dict(cfg)
    except (TypeError, ValueError) as exc:
        raise CliError(f"invalid experiment spec: {exc}", EXIT_INFEASIBLE) from exc
    if args.tol is not None:
        spec.tol = args.tol
    rows = run_sweep(spec, args.jobs)
    path = write_outputs(spec, rows, args.out)
    if args.json:
        print(json.dumps({"csv": str(path), "summary": summarize(rows)}, indent=2))
    else:
        print(f"wrote {len(rows)} rows to {path}")
        for s in summarize(rows):
            print(f"  c_in={s['c_in']:<8.4g} {s['method']:<16} overlap={s['mean_overlap']:.4f}")
    return 0


def _parse_scan(s: str, g):
    try:
        lo, hi, steps = s.split(":")
        top = np.sqrt(estimate_rho_B(g))
        conv = lambda v: top if v.strip() in ("sqrt(rho)", "sqrtrho") else float(v)  # noqa: E731
        return np.linspace(conv(lo), conv(hi), int(steps))
    except ValueError as exc:
        raise CliError(f"bad --scan {s!r}; expected lo:hi:steps", EXIT_INFEASIBLE) from exc


def cmd_spectrum(args) -> int:
    g = _read_graph(args.graph, args.one_indexed)
    if not 1 <= args.p <= g.n:
        raise CliError(f"p={args.p} is not in [1, {g.n}]", EXIT_INFEASIBLE)
    rs = _parse_scan(args.scan, g) if args.scan else np.array([args.r])
    header = ["r"] + [f"nu_{i}" for i in range(1, args.p + 1)] + ["det_sign", "n_negative"]
    records = []
    for r in rs:
        H = build_bethe_hessian(g, r)
        nus = [e.value for e in smallest_eigenpairs(H, args.p, args.tol, rng=args.seed)]
        det = log_abs_det_H(g, r)
        records.append([float(r)] + nus + [det.sign, det.n_negative])
    if args.json:
        print(json.dumps([dict(zip(header, rec)) for rec in records]))
    else:
        print(",".join(header))
        for rec in records:
            print(",".join(fmt(float(v)) if i <= args.p else str(v) for i, v in enumerate(rec)))
    return 0


# ---------------------------------------------------------------- parser

def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # subcommands accept the same flags; SUPPRESS keeps them from resetting values given earlier
    dflt = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)  # noqa: E731
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=dflt(None), help="random seed")
    common.add_argument("--jobs", type=int, default=dflt(1), help="worker processes for sweeps")
    common.add_argument("--tol", type=float, default=dflt(1e-10),
                        help="relative eigen-residual tolerance")
    common.add_argument("--json", action="store_true", default=dflt(False),
                        help="machine-readable JSON output")
    common.add_argument("-v", "--verbose", action="count", default=dflt(0))
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags(suppress=True)
    p = argparse.ArgumentParser(prog="bhcd", parents=[_global_flags(suppress=False)],
                                description="Bethe-Hessian community detection on sparse graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="sample a DC-SBM graph")
    g.add_argument("config", help="JSON DcsbmParams config")
    g.add_argument("--out", default="graph", help="output directory")
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("cluster", parents=[common], help="cluster an edge list")
    c.add_argument("graph")
    c.add_argument("--k", type=_parse_k, default=None, help="number of classes or 'auto'")
    c.add_argument("--method", default="algorithm1", choices=("algorithm1",) + BASELINES)
    c.add_argument("--labels", help="ground-truth labels; adds overlap and modularity")
    c.add_argument("--r", type=float, default=None, help="r for bethe_fixed_r (default sqrt(rho_hat))")
    c.add_argument("--grid", type=int, default=32, help="grid points for the zeta line search")
    c.add_argument("--one-indexed", action="store_true")
    c.set_defaults(func=cmd_cluster)

    s = sub.add_parser("sweep", parents=[common], help="run an experiment spec, write CSV")
    s.add_argument("config", help="JSON ExperimentSpec")
    s.add_argument("--out", default=None, help="output directory (default: spec output)")
    s.set_defaults(func=cmd_sweep)

    e = sub.add_parser("spectrum", parents=[common], help="eigenvalue curves nu_p(r) of H_r")
    e.add_argument("graph")
    grp = e.add_mutually_exclusive_group(required=True)
    grp.add_argument("--r", type=float)
    grp.add_argument("--scan", help="lo:hi:steps; 'sqrt(rho)' allowed for lo or hi")
    e.add_argument("--p", type=int, default=2)
    e.add_argument("--one-indexed", action="store_true")
    e.set_defaults(func=cmd_spectrum)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
