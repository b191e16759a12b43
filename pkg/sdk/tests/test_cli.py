import io
import json

import pandas as pd
from typer.testing import CliRunner

from lacunary import extremality
from lacunary.cli import EXIT_ANOMALY, EXIT_REFUSED, app
from lacunary.exceptions import NumericalAnomalyError

runner = CliRunner()


def _report(path):
    return json.loads(path.read_text(encoding="utf-8"))


def test_set_info(tmp_path):
    """Tests the set-info report"""
    out = tmp_path / "set.json"
    result = runner.invoke(app, ["set-info", "--set", "AP(2,0)", "--out", str(out)])
    assert result.exit_code == 0
    report = _report(out)
    assert report["schema_version"] == "1"
    assert report["command"] == "set-info"
    assert report["result"]["canonical"] == "2Z"
    assert report["result"]["period"]["period"] == 2


def test_witness_l1(tmp_path):
    out = tmp_path / "witness.json"
    result = runner.invoke(app, ["witness-l1", "--set", "Z \\ {0}", "--f", "z", "--out", str(out)])
    assert result.exit_code == 0
    report = _report(out)
    assert report["verdict"] == "NonExtreme"
    assert report["result"]["l1_witness"]["method"] == "cofinite"
    assert report["residuals"]["spectral"] <= 1e-9
    assert report["config"]["f"] == "z"


def test_witness_l1_search_inconclusive(tmp_path):
    out = tmp_path / "search.json"
    result = runner.invoke(
        app, ["witness-l1", "--set", "Zplus", "--f", "(pi/4)*(1+z)", "--degree", "4", "--out", str(out)]
    )
    assert result.exit_code == 0
    assert _report(out)["verdict"] == "Inconclusive"


def test_refused_input_exit_code():
    """Tests that a refused input exits with code 1"""
    result = runner.invoke(app, ["witness-l1", "--set", "2Z", "--f", "2*z^2"])
    assert result.exit_code == EXIT_REFUSED

    result = runner.invoke(app, ["set-info", "--set", "AP(2"])
    assert result.exit_code == EXIT_REFUSED


def test_numerical_anomaly_exit_code(monkeypatch):
    def explode(*args, **kwargs):
        raise NumericalAnomalyError("forced")

    monkeypatch.setattr(extremality, "cofinite_linf_witness", explode)
    result = runner.invoke(app, ["witness-linf", "--set", "Z \\ {0}", "--f", "(z+z^2)/2"])
    assert result.exit_code == EXIT_ANOMALY


def test_classify_commands(tmp_path):
    cases = [
        (["classify-h1", "--f", "z"], "NonExtreme"),
        (["classify-hinf", "--set", "2Zplus", "--f", "z^2"], "ExtremeByLogIntegral"),
        (["classify-linf", "--set", "Z \\ {0}", "--f", "z^3"], "ExtremeByUnimodular"),
        (["dset-check", "--set", "Zplus", "--f", "z^3"], "ExtremeByDSet"),
        (["log-integral", "--f", "(1+z)/2"], "finite"),
    ]
    for i, (args, verdict) in enumerate(cases):
        out = tmp_path / f"report{i}.json"
        result = runner.invoke(app, args + ["--out", str(out)])
        assert result.exit_code == 0, args
        assert _report(out)["verdict"] == verdict


def test_toeplitz_kernel(tmp_path):
    out = tmp_path / "kernel.json"
    result = runner.invoke(app, ["toeplitz-kernel", "--phi", "zbar^3", "--cap", "5", "--out", str(out)])
    assert result.exit_code == 0
    report = _report(out)
    assert report["result"]["dimension"] == 3
    assert report["verdict"] == "dimension 3"


def test_oracle(tmp_path):
    out = tmp_path / "oracle.json"
    result = runner.invoke(
        app, ["oracle", "--f", "(z+z^2)/2", "--set", "Zplus", "--degree", "1", "--out", str(out)]
    )
    assert result.exit_code == 0
    assert _report(out)["verdict"] == "NonExtreme"

    result = runner.invoke(app, ["oracle", "--f", "z"])
    assert result.exit_code == EXIT_REFUSED


def test_scan_writes_rows_and_summary(tmp_path):
    """Tests a scan run writing CSV rows and a JSON summary"""
    config = tmp_path / "experiment.json"
    config.write_text(
        json.dumps({"p": "1", "check": "cofinite-l1", "sets": ["Z \\ {0}"], "random": {"seed": 7}}),
        encoding="utf-8",
    )
    rows_path = tmp_path / "rows.csv"
    result = runner.invoke(
        app, ["scan", "--config", str(config), "--reps", "2", "--out", str(rows_path), "--format", "csv"]
    )
    assert result.exit_code == 0
    rows = pd.read_csv(rows_path)
    assert len(rows) == 2
    assert set(rows["verdict"]) == {"NonExtreme"}
    summary = _report(tmp_path / "rows.summary.json")
    assert summary["command"] == "scan"
    assert summary["result"]["trials"] == 2


def test_scan_csv_rows_to_stdout(tmp_path):
    """Tests that CSV rows go to stdout when no --out is given"""
    config = tmp_path / "experiment.json"
    config.write_text(
        json.dumps({"p": "1", "check": "cofinite-l1", "sets": ["Z \\ {0}"], "random": {"seed": 7}}),
        encoding="utf-8",
    )
    result = runner.invoke(app, ["scan", "--config", str(config), "--reps", "2", "--format", "csv"])
    assert result.exit_code == 0
    lines = result.stdout.splitlines()
    header = next(i for i, line in enumerate(lines) if line.startswith("set_index,"))
    rows = pd.read_csv(io.StringIO("\n".join(lines[header : header + 3])))
    assert list(rows["trial"]) == [0, 1]
    assert set(rows["verdict"]) == {"NonExtreme"}
    assert not list(tmp_path.glob("*.summary.json"))


def test_scan_parquet_needs_out(tmp_path):
    config = tmp_path / "experiment.json"
    config.write_text(json.dumps({"p": "1", "check": "cofinite-l1", "sets": ["Z \\ {0}"]}), encoding="utf-8")
    result = runner.invoke(app, ["scan", "--config", str(config), "--format", "parquet"])
    assert result.exit_code == EXIT_REFUSED


def test_scan_rejects_bad_config(tmp_path):
    config = tmp_path / "experiment.json"
    config.write_text(json.dumps({"p": "1", "check": "oracle", "sets": ["Zplus"]}), encoding="utf-8")
    result = runner.invoke(app, ["scan", "--config", str(config)])
    assert result.exit_code == EXIT_REFUSED
