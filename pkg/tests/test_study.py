import numpy as np
import pytest

from oodlab.study import MATCHERS, run_desk_study, study_domains

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def study(tmp_path_factory):
    return run_desk_study(tmp_path_factory.mktemp("desk"), num_lines=80, epochs=3, seed=11,
                          synthetic_lines=80, max_workers=2)


def test_same_language_domains_are_textually_closer(study):
    shared, crossed = study.pairs(study.textual, "language")
    assert max(shared) < min(crossed)


def test_same_style_domains_are_visually_closer(study):
    shared, crossed = study.pairs(study.visual, "style")
    assert max(shared) < min(crossed)


def test_metrics_table_covers_every_ood_case(study):
    n = len(study_domains())
    assert len(study.metrics) == len(MATCHERS) * n * (n - 1)
    assert study.metrics.frame[["cer_id", "cer_ood", "delta_S", "delta_T", "delta_L",
                                "delta_GT"]].notna().all().all()


def test_residual_distribution_is_cumulative(study):
    cumulative = study.residuals.cumulative_percent
    assert cumulative[-1] == 100.0
    assert np.all(np.diff(cumulative) >= 0)
    assert len(study.evaluation.predictions) == len(study.metrics)


def test_outputs_are_written(study):
    assert all(path.is_file() for path in study.files)
