import json
import math
import os
import subprocess

import numpy as np
import pytest

import rggfpp


def test_ppp_deterministic():
    a = rggfpp.sample_ppp(1.0, 10.0, seed=3)
    b = rggfpp.sample_ppp(1.0, 10.0, seed=3)
    assert a.shape[1] == 2
    assert 250 < a.shape[0] < 560
    assert np.array_equal(a, b)
    assert np.all(np.abs(a) <= 10.0)


def test_rgg_strict_threshold():
    pts, edges = rggfpp.rgg_edges(np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 0.0]]), 1.0, 2.0)
    assert len(pts) == 3
    # the pair at distance exactly 1 is not joined
    assert len(edges) == 2


def test_passage_times_path():
    pts = np.array([[0.0, 0.0], [0.8, 0.0], [1.6, 0.0]])
    t = rggfpp.passage_times(pts, 1.0, 2.0, json.dumps({"family": "constant", "params": {"c": 2.0}}), seed=1)
    assert t == [0.0, 2.0, 4.0]


def test_pc_and_a1():
    assert rggfpp.pc_lower_bound(1.0, 2.0, 2) == pytest.approx(1 / (4 * math.pi), abs=1e-12)
    spec = json.dumps({"family": "bernoulli", "params": {"p": 0.05}})
    res = rggfpp.check_A1(spec, 1.0, 2.0, 2)
    assert res["satisfied"]


def test_branching_run():
    nodes, parent, birth = rggfpp.branching_run(3, seed=5)
    assert len(nodes) == 4
    assert parent[0] == -1
    assert birth == sorted(birth)


def test_errors_are_raised():
    with pytest.raises(rggfpp.RggfppError):
        rggfpp.sample_ppp(-1.0, 1.0)


def test_run_experiment(tmp_path):
    m = rggfpp.run_experiment({"kind": "ppp", "lambda": 1.0, "box": 5.0, "seed": 2}, tmp_path)
    assert "points.ndjson" in m["outputs"]
    assert (tmp_path / "manifest.json").exists()


def test_cli_round_trip(tmp_path):
    cli = os.environ.get("RGGFPP_CLI")
    if not cli:
        pytest.skip("CLI path not provided")
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"kind": "ppp", "lambda": 1.0, "box": 5.0, "seed": 2}))
    out = subprocess.run([cli, "--config", str(cfg), "--out", str(tmp_path / "o"), "run"], capture_output=True, text=True)
    assert out.returncode == 0, out.stderr
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"kind": "ppp", "nope": 1}))
    out = subprocess.run([cli, "--config", str(bad), "run"], capture_output=True, text=True)
    assert out.returncode == 2
    assert json.loads(out.stderr)["exit_code"] == 2
