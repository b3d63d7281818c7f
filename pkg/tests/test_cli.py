import argparse
import json

import pytest

from functorlab import cli
from functorlab.cli import Report, RunConfig, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_koszul_example(capsys):
    code, doc = run(capsys, "koszul", "--p", "2", "--group", "Z/2", "--nmax", "6")
    assert code == 0
    table = doc["result"]["table"]
    assert table["2,1"] == 1
    assert all(v == 0 for k, v in table.items() if int(k.split(",")[0]) > 2 * int(k.split(",")[1]))
    assert doc["result"]["violations"] == []


def test_sdim_example(capsys):
    code, doc = run(capsys, "sdim", "--p", "3", "--group", "Z/27", "--dmax", "30")
    assert code == 0
    assert doc["result"]["dims"] == [1] * 27 + [0] * 4
    assert set(doc["result"]) >= {"group", "p", "dims"}


def test_missing_config_exits_2(capsys):
    code, doc = run(capsys, "run", "--config", "missing.json")
    assert code == 2 and "not found" in doc["error"]


def test_invalid_config_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"task": "ext", "params": {"F": "k", "G": "k", "nonsense": 1}, "skeleton": {"generators": ["Z/2"], "K": 2}}))
    code, doc = run(capsys, "run", "--config", str(path))
    assert code == 2 and "unknown parameter" in doc["error"]
    path.write_text(json.dumps({"task": "ext", "skeleton": {"generators": ["Z/2"], "K": 2}}))
    code, doc = run(capsys, "run", "--config", str(path))
    assert code == 2 and "missing required" in doc["error"]


def test_guard_errors_exit_2(capsys):
    code, doc = run(capsys, "trunc", "--functor", "k[Hom(V1,-)]", "--d", "3", "--K", "3")
    assert code == 2 and doc["guard_exceeded"]
    code, doc = run(capsys, "excl", "--K", "2")
    assert code == 2 and doc["guard_exceeded"]


def test_degree_reports_guard(capsys):
    code, doc = run(capsys, "degree", "--functor", "Lam^2(Hom(V1,-))", "--K", "3")
    assert code == 0 and doc["result"]["degree"] == 2 and not doc["guard_exceeded"]
    assert doc["skeleton"]["K"] == 3
    code, doc = run(capsys, "degree", "--functor", "kbar[Hom(V1,-)]", "--K", "2", "--dmax", "3")
    assert code == 2 and doc["result"]["guard_exceeded"]


def test_assertion_failure_exits_1(monkeypatch, capsys):
    monkeypatch.setitem(cli.HANDLERS, "sdim", lambda args: Report({"x": 1}, {"always false": False}))
    code, doc = run(capsys, "sdim", "--group", "Z/2")
    assert code == 1
    assert doc["failures"] == ["always false"] and not doc["ok"]


def test_config_round_trip_and_run(tmp_path, capsys):
    data = {
        "task": "ext",
        "skeleton": {"generators": ["Z/2"], "K": 2, "p": 2, "mod": None},
        "params": {"F": "Hom(V1,-)", "G": "Sym^2(Hom(V1,-))", "imax": 1},
        "output": str(tmp_path / "out.json"),
        "jobs": 1,
        "seed": 0,
    }
    cfg = RunConfig.from_json(data)
    assert RunConfig.from_json(cfg.to_json()) == cfg
    assert cfg.to_json() == data
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(data))
    assert main(["run", "--config", str(path)]) == 0
    doc = json.loads((tmp_path / "out.json").read_text())
    assert doc["result"]["dims"] == {"0": 1, "1": 0}
    assert doc["result"]["truncated"]


def test_output_is_deterministic_up_to_timestamp(tmp_path):
    docs = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        assert main(["compare", "--F", "Hom(V1,-)", "--G", "Hom(V1,-)", "--d", "1", "--K", "2", "--out", str(out)]) == 0
        d = json.loads(out.read_text())
        d.pop("timestamp")
        d.pop("seconds")
        docs.append(json.dumps(d, sort_keys=True))
    assert docs[0] == docs[1]
    doc = json.loads(docs[0])
    assert doc["result"]["comparison"]["iso_upto"] >= 1
    assert "skeleton" in doc and "guard_exceeded" in doc


def test_compare_sweep_keeps_guarded_cells(tmp_path):
    out = tmp_path / "s.json"
    code = main(["compare", "--F", "Hom(V1,-)", "--G", "Hom(V1,-)", "--d", "1", "--sweep", "1,2", "--out", str(out)])
    doc = json.loads(out.read_text())
    # K=1 cannot hold two nonzero summands, so that cell is a reported guard violation
    assert code == 2
    assert doc["result"]["guard_errors"].keys() == {"1"}
    assert doc["result"]["comparison"]["iso_upto"] >= 1


def test_plots_are_written(tmp_path, capsys):
    code, doc = run(capsys, "ext", "--F", "Hom(V1,-)", "--G", "Hom(V1,-)", "--K", "2", "--imax", "1", "--plot", str(tmp_path))
    assert code == 0
    assert (tmp_path / "ext.png").stat().st_size > 0
    code, doc = run(capsys, "dold", "--functor", "Sym^2(Hom(V1,-))", "--K", "4", "--n", "1", "--plot", str(tmp_path))
    assert code == 0 and (tmp_path / "dold_terms.png").exists()


def test_verify_all_subset(capsys):
    code, doc = run(capsys, "verify-all", "--only", "1,11")
    assert code == 0
    assert [c["number"] for c in doc["result"]["criteria"]] == [1, 11]


def test_exploratory_flag_has_no_acceptance_status(capsys):
    code, doc = run(capsys, "ext", "--F", "Hom(V1,-)", "--G", "Hom(V1,-)", "--gens", "Z/4", "--K", "1", "--imax", "1", "--exploratory")
    assert code == 0 and doc["result"]["acceptance"] is False


def test_args_from_config_rejects_skeleton_for_group_tasks():
    with pytest.raises(cli.ConfigError):
        cli.args_from_config(RunConfig("sdim", {"generators": ["Z/2"], "K": 1}, {"group": "Z/4"}))
    args = cli.args_from_config(RunConfig("sdim", None, {"group": "Z/4", "dmax": 5}))
    assert isinstance(args, argparse.Namespace) and args.group == "Z/4" and args.dmax == 5
