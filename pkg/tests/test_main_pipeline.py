"""コマンドライン（出力と終了コード）"""
import json
import os

import pytest

import main_pipeline
import output_utils
from config import EXIT_IDENTITY, EXIT_OK, EXIT_PRECISION, EXIT_USAGE
from recognition import IntPolynomial


@pytest.fixture(autouse=True)
def _logs_in_tmp(tmp_path, monkeypatch):
    monkeypatch.setattr(main_pipeline, "LOGS_DIR", str(tmp_path / "logs"))


def _run(capsys, *argv):
    code = main_pipeline.main(list(argv) + ["--quiet"])
    out = capsys.readouterr().out
    return code, out


def test_eval_j_at_i(capsys):
    code, out = _run(capsys, "eval", "j", "--tau", "quad:-1:0,1,1", "--prec", "64")
    assert code == EXIT_OK
    data = json.loads(out)
    assert abs(float(data["value"]["re"]) - 1728) < 1e-9
    assert data["func"] == "j"
    assert data["prec_bits"] == 64
    assert "relative_error_estimate" in data


def test_eval_phi_ratio_example(capsys):
    code, out = _run(capsys, "eval", "phi_ratio", "--m", "3", "--tau", "quad:-1:0,1,1")
    assert code == EXIT_OK
    value = float(json.loads(out)["value"]["re"])
    assert abs(value - 1.59451) < 1e-5


def test_eval_siegel_text_output(capsys):
    code, out = _run(capsys, "eval", "siegel", "--index", "1/2,1/2", "--tau", "c:0,1", "--out", "text")
    assert code == EXIT_OK
    assert out.startswith("siegel(c:0,1) = ")


def test_eval_usage_errors(capsys):
    code, _ = _run(capsys, "eval", "siegel", "--tau", "c:0,1")
    assert code == EXIT_USAGE
    code, _ = _run(capsys, "eval", "phi_ratio", "--tau", "c:0,1")
    assert code == EXIT_USAGE
    code, _ = _run(capsys, "eval", "eta", "--tau", "i")
    assert code == EXIT_USAGE
    code, _ = _run(capsys, "eval", "eta", "--tau", "c:0,1", "--prec", "16")
    assert code == EXIT_USAGE


def test_eval_lower_half_plane_is_a_precision_error(capsys):
    code, _ = _run(capsys, "eval", "eta", "--tau", "c:0,-1")
    assert code == EXIT_PRECISION


def test_missing_required_flag_exits_with_usage_code():
    with pytest.raises(SystemExit) as info:
        main_pipeline.main(["eval", "eta"])
    assert info.value.code == EXIT_USAGE


def test_certify_example_m3(capsys):
    code, out = _run(capsys, "certify", "--disc", "-4", "--m", "3")
    assert code == EXIT_OK
    data = json.loads(out)
    cert = data["certificate"]
    assert cert["minpoly"] == ["531441", "-106366932", "5322287574", "-145908", "1"]
    assert cert["divides"] == str(3 ** 12)
    assert cert["is_unit"] is False
    assert cert["radical"] == {"a": "3", "b": "2", "d": 3, "root": 4}
    assert data["hypothesis"]["holds"] is False
    assert data["run"]["attempts"] == [256]


def test_certify_example_m5_default_output(capsys):
    code, out = _run(capsys, "certify", "--disc", "-4", "--m", "5")
    assert code == EXIT_OK
    cert = json.loads(out)["certificate"]
    quadratic = IntPolynomial((1, -41473935220454921602871195774259272002, 1))
    assert cert["minpoly"] == (quadratic ** 4).to_json()
    assert cert["minpoly"][0] == "1"
    assert cert["is_unit"] is True
    assert cert["radical"] == {"a": "682", "b": "305", "d": 5, "root": 10}


def test_certify_radical_root_flag(capsys):
    code, out = _run(capsys, "certify", "--disc", "-4", "--m", "5", "--radical-root", "2")
    assert code == EXIT_OK
    assert json.loads(out)["certificate"]["radical"] == {"a": "2", "b": "1", "d": 5, "root": 2}


def test_certify_even_m_is_rejected(tmp_path, capsys):
    code, out = _run(capsys, "certify", "--disc", "-4", "--m", "4")
    assert code == EXIT_USAGE
    assert out == ""
    logs = os.listdir(tmp_path / "logs")
    assert len(logs) == 1
    assert logs[0].startswith("ERROR_") and logs[0].endswith("_certify.txt")


def test_certify_saves_json(tmp_path, capsys):
    target = tmp_path / "out" / "cert.json"
    code, out = _run(capsys, "certify", "--disc", "-4", "--m", "3", "--save", str(target))
    assert code == EXIT_OK
    assert json.loads(target.read_text(encoding="utf-8")) == json.loads(out)


def test_bare_save_name_goes_under_output_dir(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(output_utils, "OUTPUT_DIR", str(tmp_path / "output"))
    code, _ = _run(capsys, "eval", "eta", "--tau", "c:0,1", "--prec", "64", "--save", "eta.json")
    assert code == EXIT_OK
    saved = tmp_path / "output" / "eval" / "eta.json"
    assert json.loads(saved.read_text(encoding="utf-8"))["func"] == "eta"


def test_conjugates_command(capsys):
    code, out = _run(capsys, "conjugates", "--disc", "-4", "--m", "3", "--prec", "128")
    assert code == EXIT_OK
    data = json.loads(out)
    assert len(data["conjugates"]) == 4


def test_identity_check_passes(capsys):
    code, out = _run(capsys, "identity-check", "--samples", "2", "--prec", "64")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["failures"] == []
    assert report["prec_bits"] == 64


def test_identity_check_default_precision(capsys):
    code, out = _run(capsys, "identity-check", "--samples", "1")
    assert code == EXIT_OK
    assert json.loads(out)["prec_bits"] == 192


def test_identity_check_detects_injected_error(capsys):
    code, out = _run(
        capsys, "identity-check", "--samples", "2", "--prec", "64",
        "--inject-sign-error", "phi_eta_siegel",
    )
    assert code == EXIT_IDENTITY
    report = json.loads(out)
    assert {f["identity"] for f in report["failures"]} == {"phi_eta_siegel"}
