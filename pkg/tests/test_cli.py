import json
import subprocess
import sys

import numpy as np
import pytest

from mubcoh import bounds as bd
from mubcoh.cli import main, parse_mrange
from mubcoh.mub import construct_mub, serialize_mub
from mubcoh.states import sample_density, serialize_state

SUBCOMMANDS = [[], ["mub"], ["mub", "gen"], ["mub", "verify"], ["coherence"], ["bounds"], ["bounds", "eval"],
               ["sweep"], ["table1"], ["compare"]]


@pytest.mark.parametrize("sub", SUBCOMMANDS)
def test_help_everywhere(sub, capsys):
    assert main(sub + ["--help"]) == 0
    assert "usage" in capsys.readouterr().out


def test_unknown_flag_is_usage_error(capsys):
    assert main(["table1", "--dmax", "10", "--frobnicate"]) == 2
    assert "unrecognized" in capsys.readouterr().err


def test_bad_values_rejected_before_work(capsys):
    assert main(["table1", "--dmax", "-4"]) == 2
    assert main(["table1", "--dmax", "1"]) == 2
    assert main(["bounds", "eval", "--bound", "prop1", "--d", "2", "--M", "x"]) == 2
    assert main(["mub", "verify", "--file", "f", "--tol", "nan"]) == 2


def test_table1_rows(capsys):
    assert main(["table1", "--dmax", "3104", "--format", "csv"]) == 0
    assert capsys.readouterr().out == "M1,d_low,d_high\n3,2,20\n4,21,243\n5,244,3104\n"


def test_table1_human(capsys):
    assert main(["table1", "--dmax", "3104"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 5 and out[-1].split() == ["5", "244", "3104"]


def test_bounds_eval_prop1(capsys):
    assert main(["bounds", "eval", "--bound", "prop1", "--d", "2", "--M", "3", "--purity", "1", "--entropy", "0"]) == 0
    out = capsys.readouterr().out
    assert "0.405465108108" in out


def test_bounds_eval_machine_precision(tmp_path, capsys):
    out = tmp_path / "b.json"
    assert main(["bounds", "eval", "--bound", "rmub12", "--d", "100", "--M", "2", "--format", "json",
                 "--out", str(out)]) == 0
    (row,) = json.loads(out.read_text())
    assert row["rhs"] == bd.rmub12_rhs(100, 2)


def test_bounds_eval_out_of_range_purity(capsys):
    assert main(["bounds", "eval", "--bound", "prop2", "--d", "3", "--M", "2", "--purity", "0.1"]) == 2


def test_mub_gen_unsupported(capsys):
    assert main(["mub", "gen", "--d", "6"]) == 2
    assert "UnsupportedDimension" in capsys.readouterr().err


def test_mub_gen_verify_round_trip(tmp_path, capsys):
    path = tmp_path / "m.json"
    assert main(["mub", "gen", "--d", "5", "--out", str(path)]) == 0
    assert path.read_bytes() == serialize_mub(construct_mub(5))
    assert main(["mub", "verify", "--file", str(path)]) == 0
    assert "True" in capsys.readouterr().out


def test_mub_verify_failure_exit_code(tmp_path, capsys):
    eye = [[[1 if i == j else 0, 0] for i in range(3)] for j in range(3)]
    path = tmp_path / "dup.json"
    path.write_text(json.dumps({"d": 3, "label": "dup", "bases": [eye, eye]}))
    assert main(["mub", "verify", "--file", str(path)]) == 1


def test_mub_verify_malformed(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{")
    assert main(["mub", "verify", "--file", str(path)]) == 2
    assert main(["mub", "verify", "--file", str(tmp_path / "missing.json")]) == 2


def test_coherence_from_files(tmp_path, capsys):
    s = tmp_path / "s.json"
    s.write_bytes(serialize_state(sample_density(3, 3, 1)))
    b = tmp_path / "b.json"
    b.write_bytes(serialize_mub(construct_mub(3)))
    out = tmp_path / "c.csv"
    assert main(["coherence", "--basis-file", str(b), "--state-file", str(s), "--measure", "c1",
                 "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "basis,c1" and len(lines) == 6
    assert lines[-1].startswith("mean,")


@pytest.mark.parametrize("measure", ["c1", "cg-bounds", "cg-numeric"])
def test_coherence_random_is_reproducible(measure, tmp_path, capsys):
    args = ["coherence", "--mub-d", "3", "--random", "--seed", "9", "--measure", measure, "--starts", "4",
            "--format", "csv"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_coherence_pure_state(capsys):
    assert main(["coherence", "--mub-d", "2", "--random", "--kind", "pure", "--measure", "cg-pure",
                 "--format", "json"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert len(rows) == 4 and all(0 <= r["cg"] <= 0.5 for r in rows)


def test_coherence_cg_pure_rejects_mixed(capsys):
    assert main(["coherence", "--mub-d", "3", "--random", "--measure", "cg-pure"]) == 2


def test_coherence_argument_conflicts(capsys):
    assert main(["coherence", "--mub-d", "3", "--measure", "c1"]) == 2
    assert main(["coherence", "--mub-d", "3", "--random", "--rank", "4", "--measure", "c1"]) == 2
    assert main(["coherence", "--mub-d", "3", "--random", "--M", "9", "--measure", "c1"]) == 2


def test_compare(capsys):
    assert main(["compare", "--d", "100", "--mrange", "2", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    fields = dict(zip(lines[0].split(","), lines[1].split(",")))
    assert fields["cg_winner"] == "prop2_lp_pure" and fields["hinf_winner"] == "prop3"
    assert float(fields["prop3"]) == bd.prop3_rhs(100, 2)
    assert main(["compare", "--d", "5", "--mrange", "2:x"]) == 2


def test_parse_mrange():
    assert parse_mrange("2:5") == [2, 3, 4, 5]
    assert parse_mrange("2,4") == [2, 4]
    assert parse_mrange("7") == [7]


def _write_config(tmp_path, **kw):
    cfg = {"dims": [2, 3], "ensembles": ["pure", "mixed"], "trials": 20, "master_seed": 5}
    cfg.update(kw)
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(cfg))
    return p


def test_sweep_success_and_reproducible(tmp_path, capsys):
    cfg = _write_config(tmp_path)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    summ = tmp_path / "s.json"
    assert main(["sweep", "--config", str(cfg), "--out", str(a), "--summary", str(summ)]) == 0
    assert main(["sweep", "--config", str(cfg), "--out", str(b), "--threads", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(summ.read_text())["total_violations"] == 0
    assert "entropy chain" in capsys.readouterr().out


def test_sweep_violation_exit_code(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(bd, "rmub12_rhs", lambda d, M: np.float64(5.0))
    ce = tmp_path / "ce"
    cfg = _write_config(tmp_path, counterexample_dir=str(ce), trials=3)
    assert main(["sweep", "--config", str(cfg)]) == 1
    assert "VIOLATION" in capsys.readouterr().err
    files = sorted(ce.iterdir())
    assert files and json.loads(files[0].read_text())["bound_id"] == "rmub12"


def test_sweep_bad_config(tmp_path, capsys):
    assert main(["sweep", "--config", str(tmp_path / "none.json")]) == 2
    bad = _write_config(tmp_path, unknown_key=1)
    assert main(["sweep", "--config", str(bad)]) == 2
    bad = _write_config(tmp_path, dims=[6])
    assert main(["sweep", "--config", str(bad)]) == 2


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "mubcoh", "mub", "gen", "--d", "4"], capture_output=True, text=True)
    assert out.returncode == 2 and "UnsupportedDimension" in out.stderr
