import json

import numpy as np
import pytest

from bhcd import karate_paths
from bhcd.cli import main
from bhcd.graph import load_edge_list, write_edge_list, write_labels
from helpers import cliques, cycle


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cluster_karate(capsys):
    edges, labels = karate_paths()
    code, out, _ = run(capsys, "cluster", edges, "--k", "2", "--labels", labels)
    d = json.loads(out)
    assert code == 0 and d["overlap"] == 1.0 and d["k_hat"] == 2
    assert d["modularity"] == pytest.approx(0.3715, abs=1e-4)


def test_cluster_is_deterministic(capsys):
    edges, _ = karate_paths()
    a = run(capsys, "--seed", 5, "cluster", edges, "--k", "2")[1]
    b = run(capsys, "cluster", edges, "--k", "2", "--seed", 5)[1]
    assert a == b


def test_cluster_two_cliques_auto(tmp_path, capsys):
    g, truth = cliques([12, 12])
    write_edge_list(g, tmp_path / "e.txt")
    write_labels(g, truth, tmp_path / "l.txt")
    code, out, _ = run(capsys, "cluster", tmp_path / "e.txt", "--k", "auto", "--labels", tmp_path / "l.txt")
    d = json.loads(out)
    assert d["k_hat"] == 2 and d["overlap"] == 1.0


def test_cluster_baseline_method(capsys):
    edges, labels = karate_paths()
    code, out, _ = run(capsys, "cluster", edges, "--k", "2", "--method", "bethe_fixed_r",
                       "--labels", labels)
    assert code == 0 and json.loads(out)["overlap"] == 1.0


def test_exit_codes(tmp_path, capsys):
    assert run(capsys, "cluster", tmp_path / "missing.txt")[0] == 2
    (tmp_path / "bad.txt").write_text("0 1\nfoo bar\n")
    code, _, err = run(capsys, "cluster", tmp_path / "bad.txt")
    assert code == 2 and "line 2" in err
    edges, _ = karate_paths()
    assert run(capsys, "cluster", edges, "--k", "35")[0] == 3
    assert run(capsys, "cluster", edges, "--method", "adjacency")[0] == 3
    assert run(capsys, "cluster", edges, "--k", "2", "--method", "rw_oracle_best")[0] == 3


def test_spectrum_small_cases(tmp_path, capsys):
    write_edge_list(cycle(4), tmp_path / "c4.txt")
    code, out, _ = run(capsys, "spectrum", tmp_path / "c4.txt", "--r", 2, "--p", 4)
    header, row = out.strip().splitlines()
    assert header == "r,nu_1,nu_2,nu_3,nu_4,det_sign,n_negative"
    vals = [float(v) for v in row.split(",")]
    assert np.allclose(vals[1:5], [1, 5, 5, 9]) and vals[5:] == [1, 0]
    write_edge_list(cycle(3), tmp_path / "c3.txt")
    out = run(capsys, "spectrum", tmp_path / "c3.txt", "--r", 1, "--p", 1)[1]
    _, row = out.strip().splitlines()
    assert abs(float(row.split(",")[1])) < 1e-12 and row.split(",")[2] == "0"


def test_spectrum_scan_single_sign_change(tmp_path, capsys):
    from bhcd.generate import DcsbmParams, sample_dcsbm
    from bhcd.graph import largest_component
    g = sample_dcsbm(DcsbmParams.two_class(1500, 13, 5, seed=3)).graph
    g = g.subgraph(largest_component(g))
    write_edge_list(g, tmp_path / "g.txt")
    out = run(capsys, "--json", "spectrum", tmp_path / "g.txt", "--scan", "1:sqrt(rho):64")[1]
    nu2 = np.array([rec["nu_2"] for rec in json.loads(out)])
    assert (np.diff(np.sign(nu2)) != 0).sum() == 1


def test_generate(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 5000, "c_in": 20, "c_out": 6, "seed": 1,
                               "theta": {"kind": "powerlaw", "a": 3, "b": 10, "exponent": 4}}))
    assert run(capsys, "generate", cfg, "--out", tmp_path / "a")[0] == 0
    meta = json.loads((tmp_path / "a" / "meta.json").read_text())
    assert meta["n"] == 5000 and meta["zeta_true"] == pytest.approx(26 / 14)
    assert len(np.loadtxt(tmp_path / "a" / "theta.txt")) == 5000
    assert len((tmp_path / "a" / "labels.txt").read_text().splitlines()) == 5000
    run(capsys, "generate", cfg, "--out", tmp_path / "b")
    for f in ("edges.txt", "labels.txt", "theta.txt", "meta.json"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
    g = load_edge_list(tmp_path / "a" / "edges.txt")
    assert g.m == meta["m"]


def test_generate_zero_c_out(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 400, "c_in": 10, "c_out": 0}))
    code, out, _ = run(capsys, "--json", "generate", cfg, "--out", tmp_path / "z")
    assert json.loads(out)["zeta_true"] == 1.0


def test_generate_infeasible(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 400, "c_in": 1, "c_out": 10, "k": 2, "pi": [0.9, 0.1]}))
    assert run(capsys, "generate", cfg)[0] == 3
    assert run(capsys, "generate", tmp_path / "nope.json")[0] == 2


def test_sweep_writes_csv(tmp_path, capsys):
    cfg = tmp_path / "spec.json"
    cfg.write_text(json.dumps({"name": "t", "sweep": {"c_in": [9, 12], "c_out": 2, "n": 600},
                               "seeds": [0, 1], "methods": ["algorithm1", "rw_second"],
                               "output": str(tmp_path / "out")}))
    code, out, _ = run(capsys, "sweep", cfg)
    assert code == 0
    lines = (tmp_path / "out" / "t.csv").read_text().splitlines()
    assert lines[0].startswith("c_in,c_out,n,phi,alpha,alpha_c,method,seed,overlap")
    assert len(lines) == 1 + 2 * 2 * 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"name": "t", "c_in": [], "c_out": 1}))
    assert run(capsys, "sweep", bad)[0] == 3
