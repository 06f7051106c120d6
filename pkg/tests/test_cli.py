import csv
import io
import json

import pytest

from ggvol import FIXTURE_NAMES, fixture_path
from ggvol.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_complexity_surface(capsys):
    code, out, _ = run(capsys, "complexity", "--builtin", "surface_amalgam", "--params", "2")
    assert code == 0
    row = list(csv.DictReader(io.StringIO(out)))[0]
    assert (row["complexity"], row["weighted_num"], row["weighted_den"]) == ("2", "4", "1")


def test_complexity_doc(capsys):
    code, out, _ = run(capsys, "complexity", "--input", str(fixture_path("modular")),
                       "--format", "doc")
    doc = json.loads(out)
    assert code == 0 and doc["complexity"] == 2 and doc["weighted_complexity"] == [17, 6]


def test_reduce_emits_trace_and_document(capsys):
    code, out, _ = run(capsys, "reduce", "--builtin", "wedge", "--params", "2")
    assert code == 0
    assert out.startswith("# collapse e1: o into c1")
    assert "[group]" in out


def test_subgroups_and_induce(capsys):
    code, out, _ = run(capsys, "subgroups", "--builtin", "modular", "--max-index", "6")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["quotient_id"] for r in rows] == ["N1.1", "N2.1", "N3.1", "N6.1", "N6.2"]
    assert [r["torsion_free"] for r in rows] == ["false", "false", "false", "true", "true"]
    code, out, _ = run(capsys, "induce", "--builtin", "modular", "--max-index", "6",
                       "--quotient", "N6.1", "--format", "doc")
    doc = json.loads(out)
    assert code == 0 and doc["rank"] == 2 and len(doc["edges"]) == 6


def test_volume_csv_and_figure(capsys, tmp_path):
    out_csv = tmp_path / "mod.csv"
    code, _, _ = run(capsys, "volume", "--builtin", "modular", "--max-index", "24",
                     "--out", str(out_csv))
    assert code == 0
    assert (tmp_path / "mod.png").stat().st_size > 0
    rows = list(csv.DictReader(out_csv.open()))
    tf = {r["quotient_id"] for r in rows if r["quotient_id"] in
          ("N6.1", "N6.2", "N12.1", "N18.1", "N24.1", "N24.2")}
    assert len(tf) == 6
    for r in rows:
        if r["quotient_id"] in tf:
            assert (int(r["residual_num"]), int(r["residual_den"])) == (1, int(r["index"]))


def test_volume_is_deterministic(capsys, tmp_path):
    texts = []
    for i in range(2):
        p = tmp_path / f"w{i}.csv"
        run(capsys, "volume", "--builtin", "wedge", "--params", "2", "--family", "cyclic",
            "--max-index", "5", "--out", str(p), "--figure", str(tmp_path / f"w{i}.png"))
        texts.append(p.read_text())
    assert texts[0] == texts[1]


def test_volume_doc(capsys):
    code, out, _ = run(capsys, "volume", "--builtin", "infinite_dihedral", "--max-index", "6",
                       "--format", "doc")
    doc = json.loads(out)
    assert doc["closed_form"]["value"] == [0, 1]


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_verify_fixtures(capsys, name):
    max_index = "3" if name == "surface_amalgam2" else "8"
    code, out, _ = run(capsys, "verify", "--input", str(fixture_path(name)),
                       "--max-index", max_index)
    assert code == 0, out
    assert "FAIL" not in out


def test_verify_random(capsys):
    code, out, _ = run(capsys, "verify", "--builtin", "modular", "--random", "50", "--seed", "3")
    assert code == 0, out


def test_errors_exit_codes(capsys, tmp_path):
    code, _, err = run(capsys, "complexity", "--builtin", "nope")
    assert code == 2 and "nope" in err
    code, _, err = run(capsys, "complexity")
    assert code == 2
    code, _, err = run(capsys, "induce", "--builtin", "modular")
    assert code == 2 and "--quotient" in err
    code, _, err = run(capsys, "subgroups", "--builtin", "wedge", "--params", "2",
                       "--max-index", "12", "--node-cap", "20")
    assert code == 3 and "node" in err
    bad = tmp_path / "bad.toml"
    bad.write_text("[group\n")
    code, _, err = run(capsys, "complexity", "--input", str(bad))
    assert code == 2 and "ParseError" in err
