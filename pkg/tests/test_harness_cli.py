import csv
import json
import subprocess
import sys

import pytest

from flipsmooth import cli, harness
from flipsmooth.analysis import gaps_from_flags
from flipsmooth.generators import gen_forest_union
from flipsmooth.graph_core import WeightAssignment, from_edge_list, read_graph, write_graph
from flipsmooth.smoothing import SmoothedModel, sample_weights


def strip_timing(line):
    rec = json.loads(line)
    for k in harness.TIMING_FIELDS:
        rec.pop(k, None)
    return rec


def read_summary(d):
    return [json.loads(x) for x in (d / "summary.jsonl").read_text().splitlines()]


@pytest.mark.parametrize("argv, m", [
    (["--family", "complete", "--n", "6"], 15),
    (["--family", "grid", "--rows", "4", "--cols", "4"], 24),
])
def test_generate_fixed(tmp_path, capsys, argv, m):
    out = tmp_path / "g.json"
    assert cli.main(["generate", *argv, "-o", str(out)]) == 0
    g, w = read_graph(out)
    assert g.m == m and w is None
    assert f"m={m}" in capsys.readouterr().out


def test_generate_forest_union(tmp_path):
    out = tmp_path / "g.json"
    assert cli.main(["generate", "--family", "forest-union", "--n", "50", "--alpha", "2",
                     "--seed", "1", "-o", str(out)]) == 0
    g, _ = read_graph(out)
    assert g.n == 50 and g.m <= 98


def test_generate_bad_spec(tmp_path, capsys):
    assert cli.main(["generate", "--family", "forest-union", "--n", "5",
                     "-o", str(tmp_path / "x.json")]) == 2
    assert cli.main(["generate", "--family", "grid", "-o", str(tmp_path / "x.json")]) == 2


def test_run_single_edge(tmp_path):
    gpath = tmp_path / "e.json"
    write_graph(gpath, from_edge_list(2, [(0, 1)]))
    out = tmp_path / "run"
    assert cli.main(["run", "--graph", str(gpath), "--trials", "1", "-o", str(out)]) == 0
    (rec,) = read_summary(out)
    assert rec["T"] in (0, 1)
    assert (out / "traces" / "trace_0000.csv").exists()
    assert json.loads((out / "leveling.json").read_text())["levels"] == [1, 1]


def test_run_budget_zero(tmp_path):
    out = tmp_path / "run"
    code = cli.main(["run", "--family", "forest-union", "--n", "30", "--alpha", "2",
                     "--trials", "3", "--max-steps", "0", "-o", str(out)])
    assert code == 1
    assert {r["status"] for r in read_summary(out)} == {"BudgetExhausted"}


@pytest.mark.filterwarnings("ignore:degeneracy")
def test_run_partition_failure(tmp_path, capsys):
    code = cli.main(["run", "--family", "complete", "--n", "12", "--alpha", "1",
                     "--trials", "1", "-o", str(tmp_path / "x")])
    assert code == 2
    assert "no vertex removable" in capsys.readouterr().err


def test_run_deterministic(tmp_path):
    args = ["run", "--family", "preferential-attachment", "--n", "80", "--m-attach", "2",
            "--trials", "4", "--seed", "7", "--rule", "random-improving"]
    assert cli.main(args + ["-o", str(tmp_path / "a")]) == 0
    assert cli.main(args + ["-o", str(tmp_path / "b"), "--threads", "2"]) == 0
    a = (tmp_path / "a" / "summary.jsonl").read_text().splitlines()
    b = (tmp_path / "b" / "summary.jsonl").read_text().splitlines()
    assert [strip_timing(x) for x in a] == [strip_timing(x) for x in b]
    for t in range(4):
        name = f"trace_{t:04d}.csv"
        assert (tmp_path / "a" / "traces" / name).read_bytes() == \
            (tmp_path / "b" / "traces" / name).read_bytes()


def test_summary_matches_trace(tmp_path):
    out = tmp_path / "r"
    assert cli.main(["run", "--family", "preferential-attachment", "--n", "100",
                     "--m-attach", "2", "--trials", "3", "-o", str(out)]) == 0
    for rec in read_summary(out):
        with open(out / "traces" / f"trace_{rec['trial']:04d}.csv") as f:
            rows = list(csv.DictReader(f))
        assert len(rows) == rec["T"]
        good = [r["good_move"] == "1" for r in rows]
        assert sum(good) == rec["good_pairs"]
        assert gaps_from_flags(good)[0] == rec["max_gap"]
        if rows:
            assert float(rows[-1]["cut_weight"]) == rec["final_cut_weight"]
        last_gain, pair_gains = {}, []
        for r, gd in zip(rows, good):
            if gd:
                pair_gains.append(last_gain[r["node"]] + float(r["gain"]))
            last_gain[r["node"]] = float(r["gain"])
        assert (min(pair_gains) if pair_gains else None) == rec["min_pair_gain"]
        pots = [int(r["potential_after"]) for r in rows]
        assert all(p <= int(rec["initial_potential"]) for p in pots)


def test_config_file_and_initial_cut_file(tmp_path):
    init = tmp_path / "cut.json"
    init.write_text(json.dumps({"side": [1] * 20}))
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps({
        "graph": {"family": "forest-union", "n": 20, "alpha": 2, "seed": 3},
        "model": {"kind": "AdversarialPlusNoise", "phi": 2.0, "base": -0.25},
        "init": str(init), "trials": 2, "seed": 4,
    }))
    out = tmp_path / "o"
    assert cli.main(["run", "--config", str(cfgfile), "-o", str(out)]) == 0
    cfg = json.loads((out / "config.json").read_text())
    assert cfg["model"]["phi"] == 2.0
    ctx = harness.prepare(harness.ExperimentConfig.from_dict(
        {k: v for k, v in cfg.items()}))
    assert harness.trial_initial_cut(ctx, 0) == (1,) * 20
    w = harness.trial_weights(ctx, 0)
    assert all(-0.25 <= x <= 0.25 for x in w.weights)


def test_config_errors(tmp_path):
    with pytest.raises(harness.ConfigError):
        harness.ExperimentConfig.from_dict({"graph": {}, "bogus": 1})
    with pytest.raises(harness.ConfigError):
        harness.ExperimentConfig(graph={"family": "complete", "n": 3}, rule="nope")
    with pytest.raises(harness.ConfigError):
        harness.prepare(harness.ExperimentConfig(graph={"family": "torus"}))
    assert cli.main(["run", "--family", "complete", "--n", "4", "--phi", "2",
                     "-o", str(tmp_path / "x")]) == 2


def test_weights_independent_of_cut_policy():
    base = {"graph": {"family": "forest-union", "n": 30, "alpha": 2}, "seed": 5}
    a = harness.prepare(harness.ExperimentConfig(**base, init="zeros"))
    b = harness.prepare(harness.ExperimentConfig(**base, init="random"))
    assert harness.trial_weights(a, 3) == harness.trial_weights(b, 3)


def test_sweep(tmp_path, capsys):
    out = tmp_path / "s"
    code = cli.main(["sweep", "--family", "forest-union", "--n", "64", "128", "256",
                     "--alpha", "2", "--trials", "3", "-o", str(out)])
    assert code == 0
    with open(out / "sweep.csv") as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 9
    assert {r["config"] for r in rows} == {"0", "1", "2"}
    assert all(r["within_bound"] == "True" for r in rows)
    with open(out / "sweep_medians.csv") as f:
        meds = list(csv.DictReader(f))
    assert [m["n"] for m in meds] == ["64", "128", "256"]


@pytest.mark.filterwarnings("ignore:degeneracy")
def test_sweep_errors_do_not_abort():
    cfgs = [harness.ExperimentConfig(graph={"family": "complete", "n": 10}, alpha=1, trials=1),
            harness.ExperimentConfig(graph={"family": "grid", "rows": 3, "cols": 3}, trials=2)]
    rows, meds = harness.sweep(cfgs)
    assert "no vertex removable" in rows[0]["error"]
    assert len(rows) == 3 and meds[1]["trials"] == 2
    with pytest.raises(harness.ConfigError):
        harness.sweep([])


def test_verify_cli(capsys):
    code = cli.main(["verify", "--family", "forest-union", "--n", "12", "--alpha", "2",
                     "--trials", "20"])
    assert code == 0
    assert "passed=20 failed=0" in capsys.readouterr().out
    assert cli.main(["verify", "--family", "forest-union", "--n", "17", "--alpha", "2"]) == 2


def test_verify_negative_control():
    g = gen_forest_union(10, 2, 0)
    w = sample_weights(SmoothedModel.uniform(), g, 0)
    from flipsmooth.flip_engine import PivotRule, run
    tr = run(g, w, (0,) * 10, PivotRule.MAX_GAIN, 10**6)
    assert harness.verify_cut(g, w, tr.final)[0]
    corrupted = list(tr.final)
    # moving any node off a local optimum makes moving it back strictly improving
    v = max(range(10), key=lambda x: g.degree(x))
    corrupted[v] ^= 1
    ok, why = harness.verify_cut(g, w, tuple(corrupted))
    assert not ok and "local optima" in why


def test_verify_budget_counted_separately():
    cfg = harness.ExperimentConfig(graph={"family": "forest-union", "n": 12, "alpha": 2},
                                   trials=5, max_steps=0)
    rep = harness.verify(cfg)
    assert rep.budget_exhausted == 5 and rep.failed == 0 and rep.ok


def test_bound_cli(capsys):
    assert cli.main(["bound", "--n", "4", "--phi", "1", "--alpha", "1", "--beta", "2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["window"] == "33" and doc["explicit_bound"] == 342144.0


def test_threads_env(monkeypatch):
    monkeypatch.setenv("FLIP_SMOOTH_THREADS", "3")
    assert harness.default_threads() == 3
    monkeypatch.setenv("FLIP_SMOOTH_THREADS", "x")
    assert harness.default_threads() == 1


def test_console_script(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "flipsmooth.cli", "bound", "--n", "8",
                           "--alpha", "1"], capture_output=True, text=True)
    assert proc.returncode == 0 and "explicit_bound" in proc.stdout
