import json

import numpy as np
import pandas as pd
import pytest

from oodlab import __version__
from oodlab.cli.main import run
from oodlab.config import SEED_ENV_VAR, ExitCode
from oodlab.reports import read_matrix_csv, write_matrix_csv

from conftest import CRNN_CER, DOMAINS, VAN_CER, long_cross_table

SMALL_AE = """
[ae]
input_h = 8
input_w = 32
enc_channels = [1, 2]
latent_dim = 4
batch_size = 4
"""


@pytest.fixture(autouse=True)
def no_seed_from_environment(monkeypatch):
    monkeypatch.delenv(SEED_ENV_VAR, raising=False)


@pytest.fixture
def workspace(tmp_path):
    return tmp_path / "ws"


def oodlab(workspace, *args) -> int:
    return run(["--workspace", str(workspace), "--workers", "2", *map(str, args)])


# ============================================================================
# GLOBAL BEHAVIOUR
# ============================================================================

def test_version(capsys):
    assert run(["--version"]) == 0
    assert __version__ in capsys.readouterr().out


def test_missing_subcommand_is_a_usage_error():
    assert run([]) == ExitCode.USAGE


def test_missing_required_flag(workspace):
    assert oodlab(workspace, "synth") == ExitCode.USAGE


def test_no_registered_domains(workspace):
    assert oodlab(workspace, "textdiv") == ExitCode.USAGE


def test_missing_input_is_a_data_error(workspace, tmp_path):
    assert oodlab(workspace, "eval", tmp_path / "none.tsv") == ExitCode.DATA


def test_invalid_config_file(workspace, tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("nmax = 9\n", encoding="utf-8")
    assert run(["--config", str(path), "--workspace", str(workspace), "report"]) == ExitCode.USAGE


# ============================================================================
# DOMAINS AND DIVERGENCES
# ============================================================================

@pytest.fixture
def two_domains(workspace):
    assert oodlab(workspace, "--seed", 3, "synth", "--name", "plain", "--lines", 10) == 0
    assert oodlab(workspace, "--seed", 4, "synth", "--name", "slanted", "--language", "fr",
                  "--lines", 10, "--slant", 0.3, "--ink", 1) == 0
    return workspace


def test_synth_registers_domains(two_domains):
    registry = pd.read_csv(two_domains / "domains.csv", dtype=str)
    assert list(registry["name"]) == ["plain", "slanted"]
    assert list(registry["language"]) == ["en", "fr"]
    style = json.loads((two_domains / "domains" / "slanted" / "style.json").read_text())
    assert style["style"]["slant"] == 0.3


def test_synth_rejects_an_invalid_style(workspace):
    assert oodlab(workspace, "synth", "--name", "x", "--lines", 2, "--paper", 2.0) == ExitCode.USAGE


def test_ingest_writes_the_alphabet(two_domains):
    manifests = [two_domains / "domains" / name / "manifest.jsonl" for name in ("plain", "slanted")]
    assert oodlab(two_domains, "ingest", *manifests) == 0
    alphabet = json.loads((two_domains / "alphabet.json").read_text(encoding="utf-8"))
    assert alphabet


def test_textdiv_matrices(two_domains):
    assert oodlab(two_domains, "textdiv", "--nmax", 3, "--normalize",
                  "--synthetic-lines", 20, "--pgm") == 0
    matrix = read_matrix_csv(two_domains / "textdiv" / "textual.csv")
    assert list(matrix.index) == ["plain", "slanted"]
    assert np.all(np.diag(matrix.to_numpy()) == 0.0)
    assert matrix.loc["plain", "slanted"] > 0
    normalized = read_matrix_csv(two_domains / "textdiv" / "textual_normalized.csv")
    assert normalized.to_numpy().max() == pytest.approx(100.0)
    assert (two_domains / "textdiv" / "textual_synthetic.csv").is_file()
    assert (two_domains / "textdiv" / "textual.pgm").read_bytes().startswith(b"P5")


def test_visdiv_train_then_score(two_domains, tmp_path):
    config = tmp_path / "small.toml"
    config.write_text(SMALL_AE, encoding="utf-8")
    train = ["--config", str(config), "--workspace", str(two_domains), "--workers", "2"]
    assert run(train + ["visdiv", "train", "--epochs", "1"]) == 0
    assert (two_domains / "visdiv" / "params" / "plain.oodae").is_file()
    history = json.loads((two_domains / "visdiv" / "history" / "slanted.json").read_text())
    assert history["config"]["input_w"] == 32
    assert [record["epoch"] for record in history["history"]] == [0, 1]

    assert run(train + ["visdiv", "score", "--per-image"]) == 0
    matrix = read_matrix_csv(two_domains / "visdiv" / "visual.csv")
    assert matrix.shape == (2, 2)
    assert (matrix.to_numpy() > 0).all()
    per_image = pd.read_csv(two_domains / "visdiv" / "reconstruction_errors.csv")
    mean = per_image.query("source == 'plain' and target == 'slanted'")["mse"].mean()
    assert mean == pytest.approx(matrix.loc["plain", "slanted"])

    assert run(train + ["visdiv", "score", "--split", "val"]) == 0
    on_val = read_matrix_csv(two_domains / "visdiv" / "visual.csv")
    for name in ("plain", "slanted"):
        report = json.loads((two_domains / "visdiv" / "history" / f"{name}.json").read_text())
        assert on_val.loc[name, name] == pytest.approx(report["best_val_mse"], rel=1e-4)


def test_visdiv_score_without_training(two_domains):
    assert oodlab(two_domains, "visdiv", "score") == ExitCode.DATA


# ============================================================================
# RECOGNIZER OUTPUTS
# ============================================================================

def test_eval_with_calibration(workspace, tmp_path):
    path = tmp_path / "crnn_iam.tsv"
    path.write_text("sample_id\treference\thypothesis\tconfidences\n"
                    "l1\tabcd\tabcx\t0.9,0.9,0.9,0.3\n", encoding="utf-8")
    assert oodlab(workspace, "eval", path, "--ece", "--bins", 5) == 0
    report = json.loads((workspace / "eval" / "crnn_iam.json").read_text())
    assert report["cer"] == pytest.approx(25.0)
    assert report["ece"] == pytest.approx(0.25 * 0.3 + 0.75 * 0.1)
    reliability = pd.read_csv(workspace / "eval" / "crnn_iam_reliability.csv")
    assert reliability["count"].sum() == 4


def test_select_summary(workspace, tmp_path):
    log = tmp_path / "val.csv"
    pd.DataFrame([("c1", "S", 1.0), ("c1", "A", 9.0), ("c1", "T", 9.0),
                  ("c2", "S", 5.0), ("c2", "A", 2.0), ("c2", "T", 8.0),
                  ("c3", "S", 6.0), ("c3", "A", 6.0), ("c3", "T", 1.0)],
                 columns=["checkpoint", "domain", "val_cer"]).to_csv(log, index=False)
    assert oodlab(workspace, "select", log, "--source", "S", "--target", "T") == 0
    report = json.loads((workspace / "select" / "S__T.json").read_text())
    assert [c["checkpoint"] for c in report["choices"]] == ["c1", "c2", "c3"]
    assert oodlab(workspace, "select", log, "--source", "S", "--target", "Q",
                  "--strategy", "oracle") == ExitCode.DATA


def test_report_from_cross_tables(workspace, tmp_path):
    table = tmp_path / "crnn.csv"
    long_cross_table(CRNN=CRNN_CER).to_csv(table, index=False)
    van = tmp_path / "van_matrix.csv"
    write_matrix_csv(pd.DataFrame(VAN_CER, index=DOMAINS, columns=DOMAINS), van)
    params = tmp_path / "params.csv"
    params.write_text("model,params_millions\nCRNN,9.6\nVAN,2.7\n", encoding="utf-8")

    assert oodlab(workspace, "report", table, "--matrix", f"VAN={van}",
                  "--outlier", "CRNN:ICFHR", "--group", "CRNN:ctc", "--group", "VAN:ctc",
                  "--params", params) == 0
    per_model = pd.read_csv(workspace / "report" / "per_model.csv").set_index("model")
    assert per_model.loc["CRNN", "mean_id"] == pytest.approx(31.9 / 6)
    assert per_model.loc["CRNN", "num_outliers"] == 1
    assert per_model.loc["VAN", "num_outliers"] == 0
    best = pd.read_csv(workspace / "report" / "best_source.csv", index_col=0)
    assert best.loc["IAM", "CRNN"] == "Bentham"
    assert (workspace / "report" / "groups.csv").is_file()


def test_report_needs_input(workspace):
    assert oodlab(workspace, "report") == ExitCode.USAGE


def test_report_rejects_malformed_outlier(workspace, tmp_path):
    table = tmp_path / "crnn.csv"
    long_cross_table(CRNN=CRNN_CER).to_csv(table, index=False)
    assert oodlab(workspace, "report", table, "--outlier", "CRNN") == ExitCode.USAGE


# ============================================================================
# METRICS TABLE AND ANALYSIS
# ============================================================================

def test_assemble_then_analyze(workspace, tmp_path):
    errors = tmp_path / "errors.csv"
    long_cross_table(CRNN=CRNN_CER, VAN=VAN_CER).to_csv(errors, index=False)
    params = tmp_path / "params.csv"
    params.write_text("model,params_millions\nCRNN,9.6\nVAN,2.7\n", encoding="utf-8")
    rng = np.random.default_rng(5)
    visual = pd.DataFrame(rng.uniform(0.01, 0.05, size=(7, 7)), index=DOMAINS, columns=DOMAINS)
    visual_file = write_matrix_csv(visual, tmp_path / "visual.csv")

    assert oodlab(workspace, "assemble", "--errors", errors, "--params", params,
                  "--visual", visual_file) == 0
    metrics = pd.read_csv(workspace / "metrics.csv")
    assert len(metrics) == 2 * 7 * 6
    assert metrics["delta_L"].isna().all()

    assert oodlab(workspace, "analyze", "--features", "cer_id", "params_millions",
                  "delta_S", "delta_T") == 0
    regression = json.loads((workspace / "analysis" / "regression.json").read_text())
    assert regression["protocol"] == "leave-one-domain-out"
    assert regression["num_predictions"] == 84
    assert regression["cumulative_percent"][-1] == 100.0
    factors = json.loads((workspace / "analysis" / "factors.json").read_text())
    assert factors["columns"] == ["params_millions", "cer_id", "cer_ood", "delta_S", "delta_T"]
    predictions = pd.read_csv(workspace / "analysis" / "predictions.csv")
    assert sorted(predictions["fold"].unique()) == sorted(DOMAINS)


def test_analyze_rejects_the_target_as_feature(workspace, tmp_path):
    assert oodlab(workspace, "analyze", tmp_path / "m.csv",
                  "--features", "cer_ood") == ExitCode.USAGE
