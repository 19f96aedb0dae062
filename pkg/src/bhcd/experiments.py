"""Parameter sweeps over DC-SBM graphs with CSV output."""
from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .generate import DcsbmParams, ThetaDistribution, sample_dcsbm
from .metrics import overlap
from .pipeline import BASELINES, AlgorithmOptions, algorithm1, baseline_cluster
from .theory import TheoryParams, predicted_overlap

METHODS = ("algorithm1",) + BASELINES
CSV_COLUMNS = ("c_in", "c_out", "n", "phi", "alpha", "alpha_c", "method", "seed", "overlap",
               "predicted_overlap", "zeta_hat", "zeta_true", "k_hat", "wall_ms", "error")


def fmt(x) -> str:
    """CSV cell: floats with 17 significant digits, None as empty."""
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def zeta_true(c_in: float, c_out: float) -> float | None:
    if c_in == c_out:
        return None
    return (c_in + c_out) / (c_in - c_out)


def _grid(spec) -> list[float]:
    if isinstance(spec, dict):
        return np.linspace(spec["start"], spec["stop"], int(spec["steps"])).tolist()
    if isinstance(spec, (int, float)):
        return [float(spec)]
    return [float(v) for v in spec]


@dataclass
class ExperimentSpec:
    name: str
    c_in: list[float]
    c_out: float
    n: int = 5000
    k: int = 2
    f: float = 0.0
    theta: ThetaDistribution = field(default_factory=ThetaDistribution.constant)
    seeds: list[int] = field(default_factory=lambda: list(range(10)))
    methods: list[str] = field(default_factory=lambda: ["algorithm1", "bethe_fixed_r"])
    output: str = "results"
    k_mode: str = "known"  # "known": methods receive the true k; "auto": algorithm1 estimates it
    degree_policy: str = "realized"  # degrees fed to predicted_overlap: "realized" or "expected-degree"
    tol: float = 1e-10

    def __post_init__(self):
        self.c_in = _grid(self.c_in)
        if not self.c_in:
            raise ValueError("sweep grid is empty")
        if not self.seeds:
            raise ValueError("no seeds given")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ValueError(f"unknown methods {bad}; valid: {METHODS}")
        if self.k_mode not in ("known", "auto"):
            raise ValueError("k_mode must be 'known' or 'auto'")
        if self.degree_policy not in ("realized", "expected-degree"):
            raise ValueError("degree_policy must be 'realized' or 'expected-degree'")
        if isinstance(self.theta, (dict, str)):
            self.theta = ThetaDistribution.from_dict(self.theta)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        d = dict(d)
        sweep = d.pop("sweep", {})
        return cls(**{**sweep, **d})

    @classmethod
    def from_json(cls, path) -> "ExperimentSpec":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["theta"] = self.theta.to_dict()
        return d

    def params(self, c_in: float, seed: int) -> DcsbmParams:
        if self.k == 2:
            return DcsbmParams.two_class(self.n, c_in, self.c_out, self.theta, seed)
        return DcsbmParams.from_dict(dict(n=self.n, c_in=c_in, c_out=self.c_out, k=self.k,
                                          f=self.f, theta=self.theta.to_dict(), seed=seed))

    def cells(self):
        return [(c, s) for c in self.c_in for s in self.seeds]


def expected_degrees(theta: ThetaDistribution, n: int, c: float) -> np.ndarray:
    """c * theta at n evenly spaced quantiles: a seed-free stand-in for realised degrees."""
    if theta.kind == "constant":
        return np.full(n, c)
    q = (np.arange(n) + 0.5) / n
    u = theta.a + q * (theta.b - theta.a)
    return c * u**theta.exponent / theta.normaliser


def run_cell(spec: ExperimentSpec, c_in: float, seed: int) -> list[dict]:
    """One graph, every method: a list of CSV rows as dicts."""
    c_out = spec.c_out
    tp = TheoryParams(c_in, c_out, spec.theta.phi)
    base = dict(c_in=float(c_in), c_out=float(c_out), n=spec.n, phi=tp.phi, seed=seed,
                alpha=tp.alpha if c_in + c_out > 0 else None, alpha_c=tp.alpha_c,
                zeta_true=zeta_true(c_in, c_out) if spec.k == 2 else None)
    try:
        sample = sample_dcsbm(spec.params(c_in, seed))
    except Exception as exc:  # infeasible recipe etc.
        return [dict(base, method=m, error=f"{type(exc).__name__}: {exc}") for m in spec.methods]
    g, truth = sample.graph, sample.labels
    pred = None
    if spec.k == 2:
        degs = g.degrees if spec.degree_policy == "realized" else expected_degrees(spec.theta, spec.n, tp.c)
        pred = predicted_overlap(degs, tp)
    rows = []
    for m in spec.methods:
        opts = AlgorithmOptions(k=spec.k if spec.k_mode == "known" else None, seed=seed, tol=spec.tol)
        row = dict(base, method=m, predicted_overlap=pred)
        t0 = time.perf_counter()
        try:
            if m == "algorithm1":
                res = algorithm1(g, opts)
                labels = res.labels
                row["k_hat"] = res.k_hat
                row["zeta_hat"] = res.zetas[0] if res.zetas else None
            else:
                labels = baseline_cluster(g, m, spec.k, truth=truth, opts=opts)
            row["overlap"] = overlap(labels, truth)
        except Exception as exc:
            row["error"] = f"{type(exc).__name__}: {exc}"
        row["wall_ms"] = 1000 * (time.perf_counter() - t0)
        rows.append(row)
    return rows


def _run_cell_args(args):
    return run_cell(*args)


def run_sweep(spec: ExperimentSpec, jobs: int = 1) -> list[dict]:
    """All rows, in grid order (c_in, then seed, then method) whatever the completion order."""
    cells = spec.cells()
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            parts = list(ex.map(_run_cell_args, [(spec, c, s) for c, s in cells]))
    else:
        parts = [run_cell(spec, c, s) for c, s in cells]
    return [row for part in parts for row in part]


def rows_to_csv(rows, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([fmt(r.get(c)) for c in CSV_COLUMNS])


def csv_text(rows) -> str:
    buf = io.StringIO()
    rows_to_csv(rows, buf)
    return buf.getvalue()


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def summarize(rows) -> list[dict]:
    """Mean overlap per (c_in, method) over seeds, ignoring failed cells."""
    acc: dict[tuple, list] = {}
    for r in rows:
        ov = r.get("overlap")
        if ov in (None, ""):
            continue
        acc.setdefault((float(r["c_in"]), r["method"]), []).append(float(ov))
    out = []
    for (c_in, m), v in sorted(acc.items()):
        out.append(dict(c_in=c_in, method=m, mean_overlap=float(np.mean(v)),
                        sem=float(np.std(v, ddof=1) / math.sqrt(len(v))) if len(v) > 1 else None,
                        count=len(v)))
    return out


def write_outputs(spec: ExperimentSpec, rows, outdir=None) -> Path:
    out = Path(outdir or spec.output)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{spec.name}.csv"
    with open(path, "w", newline="") as fh:
        rows_to_csv(rows, fh)
    with open(out / f"{spec.name}.spec.json", "w") as fh:
        json.dump(spec.to_dict(), fh, indent=2, sort_keys=True)
    return path
