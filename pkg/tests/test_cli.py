import csv
import json

import pytest

import likegame.model
import likegame.utility
from likegame.cli import main
from likegame.engine import run_game
from likegame.io import config_to_dict, save_config, write_run
from likegame.scenarios import salient_type, two_player
from likegame.sweep import (
    SweepSpecError,
    derive_seeds,
    load_spec,
    parse_range,
    run_sweep,
    set_path,
    spec_from_dict,
)


@pytest.fixture
def config_path(tmp_path):
    path = tmp_path / "two.json"
    save_config(two_player(gamma=0.5, horizon=3, allow_new_content=True, pool_size=2), path)
    return path


def write_spec(tmp_path, name, **over):
    doc = {"base_config": "two.json", "parameters": {"gamma": "0:1:0.5"}, "seeds": 2, "master_seed": 3, "out_dir": name}
    doc.update(over)
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


# --- run


def test_run_writes_three_files(config_path, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", "--config", str(config_path), "--out", str(out)]) == 0
    assert sorted(p.name for p in out.iterdir()) == ["metrics.csv", "summary.json", "trace.jsonl"]


def test_run_is_byte_stable(config_path, tmp_path):
    for name in ("a", "b"):
        assert main(["run", "--config", str(config_path), "--seed", "5", "--out", str(tmp_path / name)]) == 0
    assert (tmp_path / "a" / "trace.jsonl").read_bytes() == (tmp_path / "b" / "trace.jsonl").read_bytes()


def test_run_reports_violation(tmp_path, capsys):
    doc = config_to_dict(two_player())
    doc["n_players"] = 0
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    assert main(["run", "--config", str(path), "--out", str(tmp_path / "o")]) == 1
    assert "n_players must be positive" in capsys.readouterr().err


def test_run_io_failures(config_path, tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path / "o")]) == 2
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["run", "--config", str(config_path), "--out", str(blocker / "sub")]) == 2


def test_run_malformed_json_is_a_config_error(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{", encoding="utf-8")
    assert main(["run", "--config", str(path), "--out", str(tmp_path / "o")]) == 1


# --- sweep


def test_sweep_counts_and_consistency(config_path, tmp_path):
    spec = write_spec(tmp_path, "sw")
    assert main(["sweep", "--spec", str(spec), "--workers", "1"]) == 0
    rows = list(csv.DictReader(open(tmp_path / "sw" / "aggregate.csv", encoding="utf-8")))
    assert len(rows) == 6
    assert [float(r["gamma"]) for r in rows] == [0.0, 0.0, 0.5, 0.5, 1.0, 1.0]
    for row in rows:
        summ = json.loads((tmp_path / "sw" / row["run"] / "summary.json").read_text())
        assert int(row["seed"]) == summ["seed"]
        for key in ("engagement_entropy", "mean_alignment", "mean_combined_utility"):
            assert float(row[key]) == summ[key]
        assert int(row["total_reshares"]) == summ["total_reshares"]


def test_sweep_parallel_bytes_match(config_path, tmp_path, monkeypatch):
    write_spec(tmp_path, "one")
    write_spec(tmp_path, "eight")
    monkeypatch.setenv("LIKEGAME_WORKERS", "1")
    assert main(["sweep", "--spec", str(tmp_path / "one.json")]) == 0
    monkeypatch.setenv("LIKEGAME_WORKERS", "8")
    assert main(["sweep", "--spec", str(tmp_path / "eight.json")]) == 0
    assert (tmp_path / "one" / "aggregate.csv").read_bytes() == (tmp_path / "eight" / "aggregate.csv").read_bytes()


def test_sweep_partial_failure(config_path, tmp_path, capsys):
    spec = write_spec(tmp_path, "bad", parameters={"gamma": [0.5, 1.5]}, seeds=[1])
    assert main(["sweep", "--spec", str(spec), "--workers", "1"]) == 3
    rows = list(csv.DictReader(open(tmp_path / "bad" / "aggregate.csv", encoding="utf-8")))
    assert [r["status"] for r in rows] == ["ok", "error"]
    assert "gamma out of [0" in rows[1]["error"]


def test_sweep_spec_errors(config_path, tmp_path):
    assert main(["sweep", "--spec", str(write_spec(tmp_path, "e1", seeds=[]))]) == 1
    assert main(["sweep", "--spec", str(write_spec(tmp_path, "e2", parameters={"nope": [1]}))]) == 1
    assert main(["sweep", "--spec", str(tmp_path / "absent.json")]) == 2


def test_range_and_seed_helpers():
    assert parse_range("0:1:0.5") == [0.0, 0.5, 1.0]
    assert parse_range("0.1:0.3:0.1") == [0.1, 0.2, 0.3]
    with pytest.raises(SweepSpecError):
        parse_range("1:0:0.5")
    assert derive_seeds(3, 7) == derive_seeds(3, 7)
    assert len(set(derive_seeds(50, 7))) == 50
    assert all(0 <= s < 2**63 for s in derive_seeds(5, 1))


def test_set_path_forms():
    doc = config_to_dict(two_player())
    set_path(doc, "players.1.gamma", 0.3)
    assert [p["gamma"] for p in doc["players"]] == [0.0, 0.3]
    set_path(doc, "players.*.audience_multiplier", 2.0)
    assert {p["audience_multiplier"] for p in doc["players"]} == {2.0}
    set_path(doc, "info_mode", "imperfect")
    assert doc["info_mode"] == "imperfect"
    with pytest.raises(SweepSpecError, match="numeric or enum"):
        set_path(doc, "allow_new_content", 1)
    with pytest.raises(SweepSpecError):
        set_path(doc, "players.9.gamma", 0.1)


def test_spec_paths_are_relative_to_spec(tmp_path):
    spec = spec_from_dict({"base_config": "b.json", "parameters": {"gamma": [0]}, "seeds": [1], "out_dir": "o"}, tmp_path)
    assert spec.base_config == tmp_path / "b.json" and spec.out_dir == tmp_path / "o"


def test_run_sweep_direct(config_path, tmp_path):
    rows, agg = run_sweep(load_spec(write_spec(tmp_path, "direct", seeds=[4, 2])), workers=1)
    assert [r["seed"] for r in rows] == [2, 4, 2, 4, 2, 4]
    assert agg.exists()


# --- verify


def test_verify_passes(capsys):
    assert main(["verify"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 6


def test_verify_catches_swapped_weights(monkeypatch, capsys):
    monkeypatch.setattr(likegame.utility, "mix", lambda g, p, s: g * s + (1 - g) * p)
    assert main(["verify", "--claim", "endpoint_reduction"]) == 4
    assert "endpoint_reduction" in capsys.readouterr().err


def test_verify_catches_self_engagement(monkeypatch, capsys):
    monkeypatch.setattr(likegame.model, "_is_self_engagement", lambda player, author, sharer: False)
    assert main(["verify", "--claim", "legality"]) == 4
    assert "legality" in capsys.readouterr().err


# --- plot


@pytest.fixture(scope="module")
def reference_trace(tmp_path_factory):
    out = tmp_path_factory.mktemp("ref")
    write_run(run_game(salient_type()), out)
    return out / "trace.jsonl"


def test_plot_fci_one_line_per_type(reference_trace, tmp_path):
    out = tmp_path / "fci.svg"
    assert main(["plot", "--in", str(reference_trace), "--metric", "fci", "--out", str(out)]) == 0
    svg = out.read_text()
    assert svg.startswith("<svg") and svg.count("<polyline") == 4


def test_plot_is_byte_stable(reference_trace, tmp_path):
    for name in ("a.svg", "b.svg"):
        assert main(["plot", "--in", str(reference_trace), "--metric", "amplification", "--out", str(tmp_path / name)]) == 0
    assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()


@pytest.mark.parametrize("metric", ["alignment", "engagement_entropy", "reshare_entropy", "dissent", "visible_count"])
def test_plot_other_trace_metrics(reference_trace, tmp_path, metric):
    assert main(["plot", "--in", str(reference_trace), "--metric", metric, "--out", str(tmp_path / "m.svg")]) == 0


def test_plot_empty_and_unknown(reference_trace, tmp_path, capsys):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    assert main(["plot", "--in", str(empty), "--metric", "fci", "--out", str(tmp_path / "x.svg")]) == 5
    assert "no data for metric" in capsys.readouterr().err
    assert main(["plot", "--in", str(reference_trace), "--metric", "nope", "--out", str(tmp_path / "x.svg")]) == 5
    assert main(["plot", "--in", str(tmp_path / "gone.jsonl"), "--metric", "fci", "--out", str(tmp_path / "x.svg")]) == 2


def test_plot_header_only_trace_has_no_data(reference_trace, tmp_path, capsys):
    head = tmp_path / "head.jsonl"
    head.write_text(reference_trace.read_text().splitlines()[0] + "\n")
    assert main(["plot", "--in", str(head), "--metric", "fci", "--out", str(tmp_path / "x.svg")]) == 5


def test_plot_aggregate(config_path, tmp_path):
    write_spec(tmp_path, "agg")
    assert main(["sweep", "--spec", str(tmp_path / "agg.json"), "--workers", "1"]) == 0
    out = tmp_path / "agg.svg"
    assert main(["plot", "--in", str(tmp_path / "agg" / "aggregate.csv"), "--metric", "mean_combined_utility", "--out", str(out)]) == 0
    assert out.read_text().count("<polyline") == 1
    assert main(["plot", "--in", str(tmp_path / "agg" / "aggregate.csv"), "--metric", "fci_0", "--out", str(out)]) == 5
