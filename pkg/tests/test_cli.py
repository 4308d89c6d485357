import csv
import io
import json

import pytest

from covcomp import cli
from covcomp.scenario import load_scenario


def gen(tmp_path, n=6, seed=1, name="sc.json", extra=()):
    out = tmp_path / name
    argv = ["gen", "--n", str(n), "--square-km", "2", "--D", "500", "--resolution-m", "40", "--seed", str(seed), "--out", str(out), *extra]
    assert cli.main(argv) == 0
    return out


def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_gen_deterministic(tmp_path):
    a = gen(tmp_path, name="a.json")
    b = gen(tmp_path, name="b.json")
    assert a.read_bytes() == b.read_bytes()
    sc = load_scenario(a)
    assert sc.n == 6 and sc.coverage_radius_D == 500


def test_gen_seed_changes_layout(tmp_path):
    a = gen(tmp_path, seed=1, name="a.json")
    b = gen(tmp_path, seed=2, name="b.json")
    assert a.read_bytes() != b.read_bytes()


def test_gen_rejects_zero_nodes(tmp_path):
    with pytest.raises(SystemExit) as exc:
        cli.main(["gen", "--n", "0", "--out", str(tmp_path / "x.json")])
    assert exc.value.code == 2
    assert not (tmp_path / "x.json").exists()


def test_gen_one_dimensional(tmp_path):
    out = tmp_path / "line.json"
    assert cli.main(["gen", "--n", "4", "--dimension", "1", "--square-km", "2", "--method", "exact1d", "--out", str(out)]) == 0
    assert load_scenario(out).region.dimension == 1


def test_solve_lambda_zero_single_master(tmp_path, capsys):
    sc = gen(tmp_path)
    topo = tmp_path / "topo.json"
    trace = tmp_path / "trace.csv"
    assert cli.main(["solve", "--scenario", str(sc), "--lambda", "0", "--out-topology", str(topo), "--trace", str(trace)]) == 0
    assert "masters=1 " in capsys.readouterr().out
    doc = json.loads(topo.read_text())
    assert len(doc["clusters"]) == 1
    rows = read_csv(trace.read_text())
    ls = [float(r["lagrangian"]) for r in rows]
    assert ls == sorted(ls)


def test_solve_missing_scenario(tmp_path, capsys):
    assert cli.main(["solve", "--scenario", str(tmp_path / "nope.json"), "--lambda", "0.1"]) == 1
    assert "error" in capsys.readouterr().err


def test_solve_malformed_scenario(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["solve", "--scenario", str(bad), "--lambda", "0.1"]) == 1
    assert "parse error" in capsys.readouterr().err


def test_sweep_csv_and_pareto(tmp_path, capsys):
    sc = gen(tmp_path)
    out = tmp_path / "sweep.csv"
    assert cli.main(["sweep", "--scenario", str(sc), "--lambdas", "0,0.05,0.3,2", "--out-csv", str(out)]) == 0
    rows = read_csv(out.read_text())
    assert len(rows) == 4 and rows[0]["master_count"] == "1"
    capsys.readouterr()
    assert cli.main(["sweep", "--scenario", str(sc), "--grid", "0.01,1,4", "--with-zero", "--pareto"]) == 0
    front = read_csv(capsys.readouterr().out)
    covs = [float(r["coverage_fraction"]) for r in front]
    rates = [float(r["rate_tasks_per_s"]) for r in front]
    assert covs == sorted(covs) and rates == sorted(rates, reverse=True)


def test_sweep_topology_dir(tmp_path):
    sc = gen(tmp_path)
    d = tmp_path / "topos"
    assert cli.main(["sweep", "--scenario", str(sc), "--lambdas", "0,1", "--topology-dir", str(d), "--out-csv", str(tmp_path / "s.csv")]) == 0
    assert sorted(p.name for p in d.iterdir()) == ["topology_000.json", "topology_001.json"]


@pytest.mark.parametrize("argv", [["--grid", "0.1,1,0"], ["--lambdas", "-1"], ["--lambdas", "0.1", "--grid", "0.1,1,3"]])
def test_sweep_usage_errors(tmp_path, argv):
    sc = gen(tmp_path)
    with pytest.raises(SystemExit) as exc:
        cli.main(["sweep", "--scenario", str(sc), *argv])
    assert exc.value.code == 2


def test_oracle_refuses_large(tmp_path, capsys):
    sc = gen(tmp_path, n=20)
    assert cli.main(["oracle", "--scenario", str(sc), "--lambda", "0"]) == 1
    assert "20" in capsys.readouterr().err


def test_oracle_lambda_and_pareto(tmp_path, capsys):
    sc = gen(tmp_path, n=5)
    capsys.readouterr()
    assert cli.main(["oracle", "--scenario", str(sc), "--lambda", "0"]) == 0
    rows = read_csv(capsys.readouterr().out.split("\n", 1)[1])
    assert rows[0]["master_count"] == "1"
    assert cli.main(["oracle", "--scenario", str(sc), "--pareto"]) == 0
    front = read_csv(capsys.readouterr().out)
    covs = [float(r["coverage_fraction"]) for r in front]
    assert covs == sorted(covs) and len(front) >= 1


def test_oracle_needs_one_mode(tmp_path):
    sc = gen(tmp_path, n=4)
    with pytest.raises(SystemExit):
        cli.main(["oracle", "--scenario", str(sc)])


def test_simulate_matches_topology(tmp_path, capsys):
    sc = gen(tmp_path)
    topo = tmp_path / "topo.json"
    assert cli.main(["solve", "--scenario", str(sc), "--lambda", "0.3", "--out-topology", str(topo)]) == 0
    capsys.readouterr()
    outs = {}
    for T in ("1", "2"):
        assert cli.main(["simulate", "--scenario", str(sc), "--topology", str(topo), "--T", T, "--out-csv", str(tmp_path / f"ev{T}.csv")]) == 0
        lines = [ln for ln in capsys.readouterr().out.splitlines() if ln.startswith("cluster")]
        outs[T] = lines
        for ln in lines:
            err = float(ln.rsplit("rel_err=", 1)[1])
            assert err <= 1e-9
    sims = {T: [float(ln.split("simulated_rate=")[1].split()[0]) for ln in v] for T, v in outs.items()}
    assert sims["1"] == pytest.approx(sims["2"], rel=1e-12)
    ev = read_csv((tmp_path / "ev1.csv").read_text())
    assert set(ev[0]) == {"node", "phase", "start_s", "end_s"}


@pytest.mark.parametrize(
    "doc",
    [
        {"clusters": [{"master": 1, "workers": [2, 3, 4, 9]}]},
        {"clusters": [{"master": 7, "workers": [1, 2, 3, 4]}]},
        {"clusters": [{"master": 1, "members": [1, 2, 3, 4]}]},
        {"nodes": []},
    ],
)
def test_simulate_bad_topology(tmp_path, capsys, doc):
    sc = gen(tmp_path, n=4)
    topo = tmp_path / "topo.json"
    topo.write_text(json.dumps(doc))
    assert cli.main(["simulate", "--scenario", str(sc), "--topology", str(topo)]) == 1
    assert "error" in capsys.readouterr().err


def test_simulate_bad_T(tmp_path):
    sc = gen(tmp_path, n=4)
    with pytest.raises(SystemExit):
        cli.main(["simulate", "--scenario", str(sc), "--topology", "x.json", "--T", "0"])
