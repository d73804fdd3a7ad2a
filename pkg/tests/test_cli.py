import json

from qpsi.cli import main, read_series_spec
from qpsi.core.qseries import BILATERAL, qpow, vwp_pair


def test_list(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    for name in ("SIXPSI6_SUM", "SEMI_10PHI9", "ONEPSI1_SUM"):
        assert name in out
    assert "lam = qa^2/bcd" in out


def test_verify_writes_report(tmp_path):
    out = tmp_path / "out" / "report.json"
    code = main(["verify", "--identity", "SIXPHI5_SUM", "--samples", "2", "--seed", "1", "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text(encoding="utf-8"))
    assert payload["identity"] == "SIXPHI5_SUM"
    assert payload["seed"] == 1
    assert payload["summary"]["passed"] == 2


def test_verify_text_to_stdout(capsysbinary):
    assert main(["verify", "--identity", "ONEPSI1_SUM", "--samples", "1", "--format", "text"]) == 0
    assert b"samples=1 passed=1" in capsysbinary.readouterr().out


def test_configuration_errors_exit_with_two(tmp_path):
    assert main(["verify", "--identity", "SIXPHI5_SUM", "--digits", "10"]) == 2
    assert main(["verify", "--identity", "SIXPHI5_SUM", "--format", "xlsx"]) == 2
    assert main(["eval", "--series-spec", str(tmp_path / "missing.yaml")]) == 2


def test_eval_series_spec(tmp_path, capsys):
    path = tmp_path / "onepsi1.yaml"
    path.write_text(
        "q: 0.4\nz: 0.6\nlower: bilateral\nnumer: [0.8]\ndenom: ['0.2']\n",
        encoding="utf-8",
    )
    assert main(["eval", "--series-spec", str(path)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["converged"] is True
    assert out["terms_down"] > 0
    assert float(out["value"]) > 0


def test_series_spec_entries(tmp_path):
    path = tmp_path / "spec.json"
    path.write_text(
        json.dumps({"q": "0.3", "z": "0.2", "lower": "bilateral",
                    "numer": [{"vwp": 0.4}, 0.5], "denom": [{"vwp": 0.4}, {"qpower": 1}]}),
        encoding="utf-8",
    )
    spec = read_series_spec(str(path))
    assert spec.lower == BILATERAL
    assert spec.numer[0] == vwp_pair(0.4)
    assert spec.denom[1] == qpow(1)
    assert spec.cutoff == 0


def _onepsi1_spec(tmp_path):
    path = tmp_path / "onepsi1.yaml"
    path.write_text("q: 0.4\nz: 0.6\nlower: bilateral\nnumer: [0.8]\ndenom: [0.2]\n", encoding="utf-8")
    return str(path)


def test_eval_precision_follows_environment_and_flag(tmp_path, capsys, monkeypatch):
    spec = _onepsi1_spec(tmp_path)
    monkeypatch.setenv("QPSI_PRECISION", "60")
    assert main(["eval", "--series-spec", spec]) == 0
    assert json.loads(capsys.readouterr().out)["precision_digits"] == 60
    assert main(["eval", "--series-spec", spec, "--digits", "70"]) == 0
    assert json.loads(capsys.readouterr().out)["precision_digits"] == 70
    monkeypatch.setenv("QPSI_PRECISION", "sixty")
    assert main(["eval", "--series-spec", spec]) == 2


def test_eval_precision_from_config_file(tmp_path, capsys):
    config = tmp_path / "verify.yaml"
    config.write_text("sweep:\n  precision_digits: 40\n", encoding="utf-8")
    assert main(["eval", "--series-spec", _onepsi1_spec(tmp_path), "--config", str(config)]) == 0
    assert json.loads(capsys.readouterr().out)["precision_digits"] == 40
    assert main(["eval", "--series-spec", _onepsi1_spec(tmp_path)]) == 0
    assert json.loads(capsys.readouterr().out)["precision_digits"] == 50
