import json
import shutil

import pytest

from knightmove.cli import RunConfig, default_threads, run
from knightmove.errors import ValidationError
from knightmove.grading import DimTable
from knightmove.knotio import catalog_text


def test_kh_grid_for_the_trefoil():
    code, out, _ = run(["kh", "--catalog", "trefoil_r", "--format", "grid"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0].split("|")[1:] == ["  0", "  1", "  2", "  3"]
    body = [line.split("|") for line in lines[2:]]
    assert [int(row[0]) for row in body] == [9, 7, 5, 3, 1]
    cells = [tok for row in body for tok in row[1:] if tok.strip()]
    assert sum(int(c) for c in cells) == 4


def test_kh_json_and_csv_agree():
    _, js, _ = run(["kh", "--catalog", "figure8", "--format", "json"])
    _, cs, _ = run(["kh", "--catalog", "figure8", "--format", "csv"])
    payload = json.loads(js)
    a = DimTable.from_json(json.dumps(payload["table"]))
    assert a == DimTable.from_csv(cs)
    assert payload["total_rank"] == a.total() == 6
    assert payload["method"] == "direct"


def test_kh_by_scan_past_the_cap():
    code, out, _ = run(["kh", "--catalog", "7_4", "--max-direct", "3", "--format", "json"])
    assert code == 0 and json.loads(out)["method"] == "scan"
    _, direct, _ = run(["kh", "--catalog", "7_4", "--format", "json"])
    assert json.loads(out)["table"] == json.loads(direct)["table"]


def test_kh_from_a_braid():
    code, out, _ = run(["kh", "--braid", "1,1,1", "--strands", "2", "--format", "csv"])
    assert code == 0
    assert DimTable.from_csv(out).total() == 4


def test_empty_pd_file_is_a_parse_error(tmp_path):
    p = tmp_path / "empty.pd"
    p.write_text("")
    code, out, err = run(["kh", "--pd", str(p)])
    assert code == 2 and out == ""
    assert "PDParseError" in err


def test_malformed_pd_file(tmp_path):
    p = tmp_path / "bad.pd"
    p.write_text("X[1,2,3]")
    assert run(["kh", "--pd", str(p)])[0] == 2


def test_two_sources_is_a_validation_error():
    code, _, err = run(["kh", "--catalog", "trefoil_r", "--braid", "1,1,1", "--strands", "2"])
    assert code == 3
    assert "exactly one input source" in err


def test_no_source():
    assert run(["jones"])[0] == 3


def test_budget_exceeded_exit_code():
    code, _, err = run(["kh", "--catalog", "7_7", "--max-direct", "2", "--budget-time", "1e-9"])
    assert code == 4
    assert "BudgetExceeded" in err


def test_budgets_must_be_positive():
    assert run(["kh", "--catalog", "trefoil_r", "--budget-mem", "0"])[0] == 3
    with pytest.raises(ValidationError):
        RunConfig("kh", catalog="x", threads=0)


def test_odd_s_is_rejected():
    assert run(["audit", "--catalog", "figure8", "--s", "1"])[0] == 3


def test_lee_reports():
    code, out, _ = run(["lee", "--catalog", "unknot", "--format", "json"])
    assert code == 0 and json.loads(out)["s"] == 0
    _, out, _ = run(["lee", "--catalog", "trefoil_r", "--format", "json"])
    rep = json.loads(out)
    assert rep["s"] == 2
    assert rep["nonzero_differentials"] == [1]
    _, out, _ = run(["lee", "--catalog", "figure8", "--format", "json"])
    assert json.loads(out)["s"] == 0


def test_lee_past_the_cap_points_to_the_table_audit():
    code, _, err = run(["lee", "--catalog", "7_4", "--max-direct", "3"])
    assert code == 4
    assert "--table" in err


def test_audit_figure8_holds():
    code, out, _ = run(["audit", "--catalog", "figure8"])
    assert code == 0
    assert "satisfies the Knight Move Conjecture" in out


def test_audit_table_needs_s(table1_path):
    code, _, err = run(["audit", "--table", str(table1_path)])
    assert code == 3
    assert "--s" in err


def test_audit_of_the_published_table(table1_path):
    code, out, _ = run(["audit", "--table", str(table1_path), "--s", "0", "--format", "json"])
    assert code == 0
    km = json.loads(out)["knight_move"]
    assert km["verdict"] == "fails"
    assert km["witness"] == [1, 1]
    assert km["certificates"] == [{"n": 2, "source": [1, 1], "target": [2, 9], "bidegree": [1, 8]}]


def test_alexander_and_jones_commands():
    code, out, _ = run(["alexander", "--catalog", "6_1"])
    assert code == 0 and "Fox-Milnor: passes" in out
    code, out, _ = run(["alexander", "--catalog", "trefoil_r", "--format", "json"])
    assert json.loads(out)["fox_milnor"]["status"] == "fails"
    code, out, _ = run(["jones", "--catalog", "trefoil_r", "--format", "json"])
    assert code == 0 and json.loads(out)["coefficients"]


def test_catalog_listing_and_entry():
    code, out, _ = run(["catalog", "--format", "json"])
    names = {r["name"] for r in json.loads(out)}
    assert {"unknot", "trefoil_r", "figure8"} <= names
    code, out, _ = run(["catalog", "figure8"])
    assert code == 0 and out == catalog_text("figure8")


def test_batch_on_an_empty_directory(tmp_path):
    code, out, _ = run(["batch", str(tmp_path)])
    assert code == 0
    assert out.strip().split(",")[0] == "knot" and len(out.strip().splitlines()) == 1


def test_batch_continues_past_bad_files(tmp_path):
    for name in ("trefoil_r", "figure8", "5_2"):
        (tmp_path / f"{name}.pd").write_text(catalog_text(name))
    (tmp_path / "broken.pd").write_text("X[1,2")
    code, out, _ = run(["batch", str(tmp_path), "--threads", "2"])
    assert code == 0
    rows = out.strip().splitlines()[1:]
    assert len(rows) == 4
    broken = [r for r in rows if r.startswith("broken")]
    assert "PDParseError" in broken[0]
    assert sum(",holds," in r for r in rows) == 3


def test_batch_needs_a_directory(tmp_path):
    assert run(["batch", str(tmp_path / "missing")])[0] == 3


def test_threads_from_the_environment(monkeypatch):
    monkeypatch.setenv("KNIGHTMOVE_THREADS", "3")
    assert default_threads() == 3


def test_scan_checkpoint_flag(tmp_path):
    ck = tmp_path / "ck.json.gz"
    code, _, _ = run(["kh", "--catalog", "7_2", "--max-direct", "2", "--checkpoint", str(ck)])
    assert code == 0 and ck.exists()


def test_unknown_command_exits_nonzero():
    assert run(["frobnicate"])[0] != 0


@pytest.mark.skipif(shutil.which("knightmove") is None, reason="console script not installed")
def test_console_script():
    import subprocess

    res = subprocess.run(["knightmove", "jones", "--catalog", "trefoil_r"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip()


def test_kh_of_the_38_crossing_knot_matches_the_table(table1, scan_checkpoints):
    ck = scan_checkpoints / "K_paper.scan.gz"
    code, out, _ = run(["kh", "--catalog", "K_paper", "--format", "json", "--checkpoint", str(ck)])
    assert code == 0
    payload = json.loads(out)
    assert payload["method"] == "scan"
    assert DimTable.from_json(json.dumps(payload["table"])) == table1


def test_audit_of_the_38_crossing_knot(scan_checkpoints):
    ck = scan_checkpoints / "K_paper.scan.gz"
    code, out, _ = run(["audit", "--catalog", "K_paper", "--s", "0", "--format", "json", "--checkpoint", str(ck)])
    assert code == 0
    rep = json.loads(out)
    assert rep["knight_move"]["witness"] == [1, 1]
    assert [c["n"] for c in rep["knight_move"]["certificates"]] == [2]
    assert rep["alexander"]["alexander"] == "-3*t^-1 + 7 - 3*t"


def test_batch_flags_only_the_38_crossing_knot(tmp_path, scan_checkpoints):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    for name in ("K_paper", "trefoil_r", "figure8", "8_19"):
        (corpus / f"{name}.pd").write_text(catalog_text(name))
    code, out, _ = run(["batch", str(corpus), "--checkpoint", str(scan_checkpoints)])
    assert code == 0
    rows = {r.split(",")[0]: r for r in out.strip().splitlines()[1:]}
    flagged = [k for k, r in rows.items() if "HIGHER-DIFFERENTIAL" in r]
    assert flagged == ["K_paper"]
    assert all(",holds," in r for k, r in rows.items() if k != "K_paper")
