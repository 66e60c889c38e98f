import io
import json

import pytest

from conftest import FIXTURES, load_fixture
from toriclab.cli import golden_diff, golden_entry, main
from toriclab.schemas.complements import certificate_to_json
from toriclab.services.complement import local_complement


def germ_path(name: str) -> str:
    return str(FIXTURES / "germs" / f"{name}.json")


def run_json(capsys, *argv):
    code = main(list(argv))
    return code, json.loads(capsys.readouterr().out)


# ============================================================
# CODES DE SORTIE
# ============================================================

def test_check_ct_holds(capsys):
    code, report = run_json(capsys, "check-ct", germ_path("p1xa1"), "--t", "1")
    assert code == 0
    assert report["holds"] is True
    assert report["report"] == "N ∩ int(tU) = ∅"


def test_check_ct_fails_with_witness(capsys):
    code, report = run_json(capsys, "check-ct", germ_path("p1xa1"), "--t", "3/2")
    assert code == 1
    assert report["witness"] == ["0", "1"]
    assert "report" not in report


def test_input_errors_exit_2(capsys):
    code, report = run_json(capsys, "check-ct", germ_path("p1xa1"), "--t", "0")
    assert code == 2
    assert report["error"]["code"] == "NONPOSITIVE_T"

    code, report = run_json(capsys, "check-ct", germ_path("p1xa1"))
    assert code == 2
    assert report["error"]["command"] == "check-ct"

    code, report = run_json(capsys, "mld", "/nonexistent/germ.json")
    assert code == 2


def test_error_goes_to_stderr(capsys):
    main(["reduce", germ_path("p1xa1"), "--t", "3"])
    captured = capsys.readouterr()
    assert "❌ INTERIOR_POINT_PRESENT" in captured.err
    assert json.loads(captured.out)["error"]["witness"] == ["-1", "1"]


def test_float_t_is_rejected_by_parser():
    assert main(["check-ct", germ_path("p1xa1"), "--t", "0.5"]) == 2


def test_cap_exit_3(capsys):
    code, report = run_json(capsys, "complement", germ_path("p1_point"), "--t", "1/2", "--scope", "total", "--cap-index", "1")
    assert code == 3
    assert report["error"]["limit"] == 1


def test_internal_error_exit_4(capsys, monkeypatch):
    monkeypatch.setattr("toriclab.services.complement.discrepancy_minimum", lambda *args: (0, None))
    code, report = run_json(capsys, "complement", germ_path("p1xa1"), "--t", "1")
    assert code == 4
    assert report["error"]["code"] == "COMPLEMENT_MLD_MISMATCH"


def test_stdin_input(capsys, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO((FIXTURES / "germs" / "cyclic_2_11.json").read_text(encoding="utf-8")))
    code, report = run_json(capsys, "mld", "-")
    assert code == 0
    assert report == {"scope": "fiber", "mld": "1", "minimizer": ["1/2", "1/2"]}


# ============================================================
# COMMANDES
# ============================================================

def test_validate_sorts_rays(capsys):
    code, report = run_json(capsys, "validate", germ_path("blowup_a2"))
    assert code == 0
    assert [r["e"] for r in report["rays"]] == [["0", "1"], ["1", "0"], ["1", "1"]]


def test_mld_total_scope(capsys):
    code, report = run_json(capsys, "mld", germ_path("p1_point"), "--scope", "total")
    assert code == 0
    assert report["mld"] == "1/2"


def test_reduce_outputs_certificate(capsys):
    code, report = run_json(capsys, "reduce", germ_path("p1xa1"), "--t", "1")
    assert code == 0
    assert report["kind"] == "reduction"
    assert report["phi"]["matrix"] == [[0, 1]]


def test_complement_text_output(capsys):
    assert main(["complement", germ_path("p1xa1"), "--t", "1", "--output", "text"]) == 0
    out = capsys.readouterr().out
    assert "caractères" in out
    assert "(0, -1)" in out


def test_hyperplane_lists_sections(capsys):
    code, report = run_json(capsys, "hyperplane", germ_path("p1xa1"), "--t", "1")
    assert code == 0
    assert report == [{"kind": "hyperplane", "m_bar": ["1"], "m_prime": ["1"], "gamma_h": "1"}]


def test_series_agrees(capsys):
    code, report = run_json(capsys, "series", germ_path("cyclic_2_11"))
    assert code == 0
    assert all(c["series"] == c["ct"] for c in report["checks"])


# ============================================================
# ORACLE
# ============================================================

def test_oracle_crosscheck(capsys):
    code, report = run_json(capsys, "oracle", germ_path("a2_mixed"))
    assert code == 0
    assert report["agree"] is True
    assert report["oracle_mld"] == "5/6"


def test_oracle_verifies_certificate(capsys, tmp_path):
    cert = certificate_to_json(local_complement(load_fixture("p1xa1"), 1))
    path = tmp_path / "cert.json"
    path.write_text(json.dumps(cert), encoding="utf-8")
    code, report = run_json(capsys, "oracle", germ_path("p1xa1"), "--certificate", str(path))
    assert code == 0
    assert report == {"kind": "complement", "ok": True, "clause": None}

    cert["bplus_coeffs"] = ["1", "1", "1"]
    path.write_text(json.dumps(cert), encoding="utf-8")
    code, report = run_json(capsys, "oracle", germ_path("p1xa1"), "--certificate", str(path))
    assert code == 1
    assert report["clause"] == "bplus"


def test_oracle_certificate_requires_germ(capsys, tmp_path):
    path = tmp_path / "cert.json"
    path.write_text("{}", encoding="utf-8")
    code, _ = run_json(capsys, "oracle", "--certificate", str(path))
    assert code == 2


# ============================================================
# GOLDEN
# ============================================================

def test_golden_files_are_up_to_date(capsys):
    assert golden_diff() == []
    code, report = run_json(capsys, "oracle")
    assert code == 0
    assert report["diffs"] == []


@pytest.mark.parametrize("name", sorted(p.name for p in (FIXTURES / "golden").glob("*.json")))
def test_golden_entry(name):
    stored = json.loads((FIXTURES / "golden" / name).read_text(encoding="utf-8"))
    assert golden_entry(stored) == stored


def test_golden_diff_detects_changes(tmp_path):
    stored = json.loads((FIXTURES / "golden" / "check_ct_p1xa1_t1.json").read_text(encoding="utf-8"))
    stored["report"]["mld"] = "2"
    (tmp_path / "stale.json").write_text(json.dumps(stored), encoding="utf-8")
    assert golden_diff(tmp_path) == ["stale.json"]
