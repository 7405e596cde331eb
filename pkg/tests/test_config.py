import pytest

from oodlab.config import (DEFAULT_SEED, ColumnMapper, ExitCode, OutputFormat,
                           load_run_config)
from oodlab.errors import DataError, ManifestError, NumericalError, UsageError


def test_defaults():
    config = load_run_config(environ={})
    assert config.seed == DEFAULT_SEED
    assert config.nmax == 5
    assert config.alpha == 1.0
    assert config.ece_bins == 15
    assert config.formats == [OutputFormat.CSV]
    assert "cer_ood" not in config.features


def test_file_then_flags_then_environment(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text("seed = 7\nnmax = 3\nworkers = 2\n\n[ae]\nlatent_dim = 16\n")

    config = load_run_config(path, {"nmax": 4, "workers": None}, environ={})
    assert config.seed == 7
    assert config.nmax == 4
    assert config.workers == 2
    assert config.ae == {"latent_dim": 16}

    config = load_run_config(path, {"seed": 9}, environ={"OODLAB_SEED": "11"})
    assert config.seed == 11


def test_empty_manifest_flag_keeps_file_value(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text('manifests = ["a.jsonl"]\n')
    config = load_run_config(path, {"manifests": []}, environ={})
    assert [p.name for p in config.manifests] == ["a.jsonl"]


@pytest.mark.parametrize("overrides, fragment", [
    ({"nmax": 6}, "nmax"),
    ({"alpha": -1.0}, "alpha"),
    ({"ece_bins": 0}, "ece_bins"),
    ({"features": ["cer_id", "cer_ood"]}, "features"),
    ({"features": ["nonsense"]}, "nonsense"),
])
def test_invalid_values_are_usage_errors(overrides, fragment):
    with pytest.raises(UsageError, match=fragment):
        load_run_config(None, overrides, environ={})


def test_bad_config_files(tmp_path):
    with pytest.raises(UsageError, match="not found"):
        load_run_config(tmp_path / "missing.toml", environ={})
    broken = tmp_path / "broken.toml"
    broken.write_text("seed = \n")
    with pytest.raises(UsageError, match="not valid TOML"):
        load_run_config(broken, environ={})


def test_bad_seed_environment():
    with pytest.raises(UsageError, match="OODLAB_SEED"):
        load_run_config(environ={"OODLAB_SEED": "forty-two"})


def test_require_manifests(tmp_path):
    with pytest.raises(UsageError):
        load_run_config(environ={}).require_manifests()
    config = load_run_config(None, {"manifests": [tmp_path / "nope.jsonl"]}, environ={})
    with pytest.raises(DataError, match="nope.jsonl"):
        config.require_manifests()


def test_column_mapper():
    assert ColumnMapper.canonical(" Delta_T ") == "delta_T"
    assert ColumnMapper.canonical("params") == "params_millions"
    assert ColumnMapper.canonical("cer_ood") == "cer_ood"
    assert ColumnMapper.canonical("notes") == "notes"


def test_exit_codes_follow_error_class(tmp_path):
    assert UsageError("x").exit_code == ExitCode.USAGE
    assert DataError("x").exit_code == ExitCode.DATA
    assert NumericalError("x").exit_code == ExitCode.NUMERICAL
    error = ManifestError(tmp_path / "m.jsonl", "bad record", line=3)
    assert error.exit_code == ExitCode.DATA
    assert str(error).endswith("m.jsonl:3: bad record")
