import csv
import json
import subprocess
import sys

import pytest

import optomo
from optomo import cli, physics


@pytest.fixture
def net_path():
    return str(optomo.example_network_path())


def run(argv):
    return cli.main([str(a) for a in argv])


def write(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


def test_plan_writes_plan_and_cover(tmp_path, net_path, capsys):
    out = tmp_path / "plan.json"
    assert run(["plan", "--network", net_path, "--out", out]) == 0
    plan = json.loads(out.read_text())
    cover = json.loads((tmp_path / "plan.cover.json").read_text())
    assert len(plan) == 6 and all(p["impl"] == "squeezed" and p["t"] == 1 and p["c"] == 1 for p in plan)
    assert cover["attained"] == 3 == cover["bound"] and cover["valid"]


def test_plan_single_edge(tmp_path, capsys):
    net = write(tmp_path / "n.json", {"nodes": [1, 2], "monitors": [1], "edges": [{"id": "a", "u": 1, "v": 2}]})
    assert run(["plan", "--network", net]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["plan"]) == 1 and doc["cover"]["attained"] == 1


def test_plan_disconnected_network_fails(tmp_path, capsys):
    net = write(tmp_path / "n.json", {"nodes": [1, 2, 3], "monitors": [1], "edges": [{"id": "a", "u": 1, "v": 2}]})
    assert run(["plan", "--network", net]) == 1
    assert "disconnected" in capsys.readouterr().err


def test_missing_file_and_bad_usage(capsys):
    assert run(["plan", "--network", "/nonexistent.json"]) == 1
    assert run(["plan"]) == 1
    assert run(["bogus"]) == 1


def test_analyze(tmp_path, net_path, capsys):
    doc = optomo.network.network_to_dict(optomo.example_network())
    for e in doc["edges"]:
        e["eta"] = 0.9
    net = write(tmp_path / "n.json", doc)
    plan = tmp_path / "p.json"
    run(["plan", "--network", net, "--out", plan])
    capsys.readouterr()
    assert run(["analyze", "--network", net, "--plan", plan]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["identifiable"]
    assert rep["discrepancy"]["det"] < 1e-9 and rep["discrepancy"]["trace_inv"] < 1e-9


def test_analyze_non_identifiable_is_a_diagnosis(tmp_path, net_path, capsys):
    plan = tmp_path / "p.json"
    run(["plan", "--network", net_path, "--out", plan])
    short = write(tmp_path / "short.json", json.loads(plan.read_text())[:5])
    capsys.readouterr()
    assert run(["analyze", "--network", net_path, "--plan", short]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["identifiable"] is False and rep["trace_inv"] is None


def test_compare(tmp_path, net_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(["plan", "--network", net_path, "--impl", "coherent", "--out", a])
    run(["plan", "--network", net_path, "--out", b])
    capsys.readouterr()
    assert run(["compare", "--network", net_path, "--plan", a, "--plan-b", b]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["det_ratio"] > 1 and doc["trace_delta"] < 0
    other = json.loads(b.read_text())
    other[-1] = {"walk": [1, 5, 1], "impl": "squeezed"}
    c = write(tmp_path / "c.json", other)
    assert run(["compare", "--network", net_path, "--plan", a, "--plan-b", c]) == 1
    assert "plans-not-comparable" in capsys.readouterr().err


def test_sweep_csv(tmp_path, capsys):
    out = tmp_path / "s.csv"
    assert run(["sweep", "--mode", "independent-split", "--grid", "0.02:1:10", "--out", out]) == 0
    rows = list(csv.reader(out.open()))
    assert tuple(rows[0]) == ("eta1", "eta2", "det_s", "det_e", "trinv_s", "trinv_e", "diff_det", "diff_trinv")
    assert len(rows) == 101
    assert min(float(r[7]) for r in rows[1:]) > 0
    assert "diff_trinv: min=" in capsys.readouterr().out


def test_sweep_single_point(tmp_path):
    out = tmp_path / "s.csv"
    assert run(["sweep", "--mode", "shared-split", "--grid", "0.5:0.5:1", "--out", out]) == 0
    assert len(out.read_text().strip().splitlines()) == 2
    assert run(["sweep", "--mode", "shared-split", "--grid", "nope"]) == 1


def test_simulate(tmp_path, net_path, capsys):
    plan = tmp_path / "p.json"
    run(["plan", "--network", net_path, "--copies", 50, "--out", plan])
    out = tmp_path / "sim.json"
    assert run(["simulate", "--network", net_path, "--plan", plan, "--trials", 20, "--seed", 1, "--out", out]) == 0
    doc = json.loads(out.read_text())
    assert {"bias", "empirical_cov_trace", "crb_trace", "ratio"} <= set(doc)
    run(["simulate", "--network", net_path, "--plan", plan, "--trials", 20, "--seed", 1, "--out", tmp_path / "again.json"])
    assert (tmp_path / "again.json").read_text() == out.read_text()


def test_outputs_use_twelve_digits():
    assert cli.fmt(1 / 3) == 0.333333333333
    assert cli.fmt([float("inf")]) == [None]


def test_verify_passes(capsys):
    assert run(["verify", "--scope", "all", "--seed", 7]) == 0
    assert "verify: pass" in capsys.readouterr().out


def test_verify_catches_corrupted_c_n(monkeypatch, capsys):
    real = physics.c_n
    monkeypatch.setattr(physics, "c_n", lambda Na, n: real(Na, n) * (1 + 1e-3))
    assert run(["verify", "--scope", "claim1"]) == 2
    assert "FAIL claim1/fim-vs-fd" in capsys.readouterr().out


def test_console_entry_point(net_path):
    res = subprocess.run([sys.executable, "-m", "optomo.cli", "plan", "--network", net_path],
                         capture_output=True, text=True)
    assert res.returncode == 0 and '"attained": 3' in res.stdout
