"""
End-to-end tests of the command-line interface
"""

import csv
import json
import logging

import pytest

from risdcc.config import Config
from risdcc.core.diffraction import GeneratorMatrix, distinct_entries, read_generator_csv
from risdcc.main import main

REPETITION = """
seed = 1

[geometry]
preset = "repetition_42"
params = { a = 0.4, h = 0.2, dz = 10.0 }

[code]
type = "block"
"""

UNCODED = """
seed = 3
label = "{label}"

[code]
type = "uncoded"
symbols_per_frame = 16

[sweep]
points = [0.0, 2.0]

[stopping]
target_errors = 100
frames_per_batch = 100
"""


@pytest.fixture(autouse=True)
def single_worker(monkeypatch):
    monkeypatch.setattr(Config, "WORKERS", "1")


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_version(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["--version"])
    assert excinfo.value.code == 0
    assert capsys.readouterr().out.startswith("risdcc ")


def test_validate_ok(tmp_path, capsys):
    assert main(["validate", "--config", _write(tmp_path, "rep.toml", REPETITION)]) == 0
    assert capsys.readouterr().out == "ok\n"


def test_validate_reports_spacing(tmp_path, capsys):
    config = _write(tmp_path, "rep.toml", REPETITION)
    assert main(["validate", "--config", config, "--set", "geometry.params.a=0.05"]) == 3
    assert "spacing_below_min" in capsys.readouterr().out


def test_validate_json(tmp_path, capsys):
    assert main(["validate", "--config", _write(tmp_path, "rep.toml", REPETITION), "--format", "json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["ok"] is True
    assert report["input_dim"] == 2
    assert report["separation_wavelengths"] == pytest.approx(10.0)


def test_missing_key_exits_2(tmp_path, caplog):
    config = _write(tmp_path, "bad.toml", "[geometry]\nparams = { a = 0.4 }\n")
    assert main(["validate", "--config", config]) == 2
    assert "geometry.preset" in caplog.text


def test_invalid_runtime_settings(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(Config, "WORKERS", "many")
    assert main(["validate", "--config", _write(tmp_path, "rep.toml", REPETITION)]) == 2
    assert "RISDCC_WORKERS" in capsys.readouterr().err


@pytest.mark.parametrize("preset,params,distinct", [
    ("repetition_42", "{ a = 0.4, h = 0.2, dz = 10.0 }", 2),
    ("systematic_42", "{ d = 0.4, dz = 10.0 }", 3),
])
def test_gen_matrix_distinct_entries(tmp_path, preset, params, distinct):
    config = _write(tmp_path, "rep.toml", REPETITION)
    out = tmp_path / "G.csv"
    assert main(["gen-matrix", "--config", config, "--set", f"geometry.preset={preset}",
                 "--set", f"geometry.params={params}", "--output", str(out)]) == 0
    with open(out) as f:
        G = GeneratorMatrix.from_entries(read_generator_csv(f))
    assert G.entries.shape == (4, 2)
    assert len(distinct_entries(G)) == distinct


def test_gen_matrix_tables(tmp_path, capsys):
    config = _write(tmp_path, "rep.toml", REPETITION)
    assert main(["gen-matrix", "--config", config, "--table", "constellation"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "symbol,re,im,bit_label"
    assert main(["gen-matrix", "--config", config, "--table", "conformance"]) == 0
    assert "1000 1000110" in capsys.readouterr().out
    assert main(["gen-matrix", "--config", config, "--table", "trellis"]) == 2


def test_distance(tmp_path):
    out = tmp_path / "d.csv"
    assert main(["distance", "--config", _write(tmp_path, "rep.toml", REPETITION), "--output", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["dataword_a", "dataword_b", "distance"]
    assert len(rows) == 7


def test_encode_hamming(tmp_path, capsys):
    text = 'seed = 0\n[code]\ntype = "hamming"\n[encode]\ndatawords = [[1, 0, 0, 0], [1, 1, 1, 1]]\n'
    assert main(["encode", "--config", _write(tmp_path, "h.toml", text)]) == 0
    assert capsys.readouterr().out.splitlines() == ["dataword,codeword", "1000,1000110", "1111,1111111"]


def test_encode_block(tmp_path, capsys):
    config = _write(tmp_path, "rep.toml", REPETITION + "\n[encode]\ndatawords = [[0, 1]]\n")
    assert main(["encode", "--config", config]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "dataword,entry,re,im"
    assert len(lines) == 5
    assert lines[1].startswith("01,0,")


def test_ber_is_reproducible_across_workers(tmp_path, monkeypatch):
    config = _write(tmp_path, "u.toml", UNCODED.format(label="uncoded"))
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["ber", "--config", config, "--output", str(first)]) == 0
    monkeypatch.setattr(Config, "WORKERS", "2")
    assert main(["ber", "--config", config, "--output", str(second)]) == 0
    assert first.read_text() == second.read_text()
    rows = list(csv.DictReader(first.open()))
    assert [r["eb_n0_db"] for r in rows] == ["0.0", "2.0"]
    assert all(r["seed"] == "3" for r in rows)


def test_compare_merges_curves(tmp_path):
    a = _write(tmp_path, "a.toml", UNCODED.format(label="first"))
    b = _write(tmp_path, "b.toml", UNCODED.format(label="second"))
    out = tmp_path / "merged.csv"
    assert main(["compare", a, b, "--output", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert [r["scheme"] for r in rows] == ["first", "first", "second", "second"]


def test_compare_rejects_duplicate_labels(tmp_path):
    a = _write(tmp_path, "a.toml", UNCODED.format(label="same"))
    b = _write(tmp_path, "b.toml", UNCODED.format(label="same"))
    assert main(["compare", a, b, "--output", str(tmp_path / "m.csv")]) == 2


def test_compare_needs_two_files(tmp_path):
    assert main(["compare", _write(tmp_path, "a.toml", UNCODED.format(label="x"))]) == 2


def test_optimize_writes_valid_geometry(tmp_path):
    config = _write(tmp_path, "rep.toml", REPETITION + "\n[optimizer]\nbudget = 20\nrestarts = 2\n")
    geom, trace = tmp_path / "best.geom", tmp_path / "trace.csv"
    args = ["optimize", "--config", config, "--output", str(geom), "--set", f'optimizer.trace_output="{trace}"']
    assert main(args) == 0
    first_trace = trace.read_text()
    assert first_trace.startswith("iteration,d_min\n")

    assert main(["validate", "--config", config, "--set", "geometry.preset=file",
                 "--set", f'geometry.file="{geom}"']) == 0
    assert main(args) == 0
    assert trace.read_text() == first_trace


def test_infeasible_optimization_exits_4(tmp_path):
    config = _write(tmp_path, "rep.toml", REPETITION + "\n[optimizer]\nz_max = 5.0\n")
    assert main(["optimize", "--config", config]) == 4


def test_ber_logs_run_summary(tmp_path, caplog):
    caplog.set_level(logging.INFO, logger="risdcc")
    config = _write(tmp_path, "u.toml", UNCODED.format(label="anchor"))
    assert main(["ber", "--config", config, "--output", str(tmp_path / "u.csv")]) == 0
    assert "✓ anchor: 2 point(s) in " in caplog.text


def test_compare_ranks_schemes_at_highest_shared_point(tmp_path, caplog):
    caplog.set_level(logging.INFO, logger="risdcc")
    a = _write(tmp_path, "a.toml", UNCODED.format(label="first"))
    b = _write(tmp_path, "b.toml", UNCODED.format(label="second"))
    assert main(["compare", a, b, "--output", str(tmp_path / "m.csv")]) == 0
    ranking = next(r.getMessage() for r in caplog.records if r.getMessage().startswith("Ranking at"))
    assert ranking.startswith("Ranking at 2.0 dB: ")
    assert "first" in ranking and "second" in ranking
    assert "✓ compared 2 schemes in " in caplog.text


def test_optimize_logs_evaluations(tmp_path, caplog):
    caplog.set_level(logging.INFO, logger="risdcc")
    config = _write(tmp_path, "rep.toml", REPETITION + "\n[optimizer]\nbudget = 1\n")
    assert main(["optimize", "--config", config, "--output", str(tmp_path / "best.geom")]) == 0
    assert "after 1 evaluations in " in caplog.text
