import csv
import io
import json
import random

import pytest

from rolloutmix.cli import main
from rolloutmix.errors import ConfigError, ParseError, UnknownCoverSet
from rolloutmix.experiment import (
    SIMULATE_COLUMNS,
    ExperimentConfig,
    derive_seed,
    read_report,
    render_report,
    run_experiment,
    write_report,
)
from rolloutmix.problem_io import fixture_path, load_problem, load_schemata, read_document

FIG2 = str(fixture_path("fig2"))


def test_load_fixture_aliases(fig2):
    doc = read_document(fixture_path("fig2"))
    assert doc["aliases"]["4a"] == "3b"
    assert fig2.population[2].states == ("6c", "3b", "7b", "5b", "7c")


def test_parse_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ParseError):
        load_problem(bad)
    doc = read_document(fixture_path("fig2"))
    del doc["population"][0]["terminal"]
    with pytest.raises(ParseError) as info:
        load_problem(json.dumps(doc))
    assert "population[0]" in str(info.value)


def test_unknown_schema_set(fig2):
    with pytest.raises(UnknownCoverSet):
        load_schemata(["beta,99,f2"], fig2)


def test_config_checks():
    for kw in ({"steps": 0}, {"inflation_levels": (0,)}, {"replicas": 0}, {"mode": "nope"}):
        with pytest.raises(ConfigError):
            ExperimentConfig(**{"mode": "simulate", **kw})


def test_seed_derivation_is_stable():
    assert derive_seed(0, 0, 1) == derive_seed(0, 0, 1)
    assert len({derive_seed(0, r, m) for r in range(4) for m in (1, 2)}) == 8


def test_simulate_report(fig2, tmp_path):
    cfg = ExperimentConfig("simulate", (1, 2), steps=500, replicas=2, seed=9)
    rep = run_experiment(fig2, cfg, load_schemata(FIG2, fig2))
    text = render_report(rep)
    rows = list(csv.reader(io.StringIO(text)))
    assert ",".join(rows[0]) == "m,t,replica,schema,phi_hat,predicted,abs_error,seed"
    assert tuple(rows[0]) == SIMULATE_COLUMNS
    keys = [(int(r[0]), r[3], int(r[2])) for r in rows[1:]]
    assert len(keys) == 2 * 2 * 2
    assert {r[5] for r in rows[1:] if r[3] == "(beta,4,7,5,f2)"} == {"1/441"}
    path = tmp_path / "r.json"
    write_report(rep, path, "json")
    assert read_report(path) == rep


def test_predict_never_draws(fig2, monkeypatch):
    def boom(*a, **k):
        raise AssertionError("random stream touched")

    monkeypatch.setattr(random.Random, "random", boom)
    monkeypatch.setattr(random.Random, "seed", boom)
    rep = run_experiment(fig2, ExperimentConfig("predict"), load_schemata(FIG2, fig2))
    assert rep.rows[0][:2] == ("(beta,4,7,5,f2)", "1/441")


def test_cli_modes(tmp_path, capsys):
    assert main(["validate", "--input", FIG2]) == 0
    assert "false" in capsys.readouterr().out
    out = tmp_path / "p.json"
    assert main(["predict", "--input", FIG2, "--output", str(out), "--format", "json"]) == 0
    data = json.loads(out.read_text())
    assert data["rows"][0][1] == "1/441"
    assert main(["payoff", "--input", FIG2, "--samples", "2000"]) == 0
    assert "29/12" in capsys.readouterr().out
    assert main(["enumerate", "--input", str(fixture_path("t1")), "--schema", "#"]) == 0
    assert main(["simulate", "--input", FIG2, "--steps", "50", "--inflation", "1,2"]) == 0


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["simulate", "--input", FIG2, "--steps", "0"]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("[]")
    assert main(["validate", "--input", str(bad)]) == 1
    assert main(["enumerate", "--input", FIG2, "--class-bound", "10"]) == 2
    assert main(["predict", "--input", FIG2, "--schema", "beta,99,f2"]) == 1
    capsys.readouterr()
