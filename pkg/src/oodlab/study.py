"""
Desk-scale domain study.

Builds synthetic domains (languages × styles), measures textual and visual divergence
between them, scores a nearest-neighbour line matcher as a stand-in recognizer, and
runs the metrics-table analysis on the result. scripts/desk_study.py is the command-line
driver; the slow end-to-end test calls run_desk_study directly.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .analysis import (FactorModel, MetricsTable, RegressionEvaluation, ResidualDistribution,
                       build_metrics_table, evaluate_regressor, factor_analysis,
                       fit_ood_regressor, residual_distribution)
from .batch import run_units
from .config import DEFAULT_SEED, METRIC_COLUMNS, Split
from .corpus import DatasetManifest, build_alphabet, load_split_images, normalize_text
from .errmetrics import PredictionRecord, corpus_cer, ece
from .errors import DataError
from .reports import write_matrix_csv
from .synthgen import BitmapFont, StyleParams, make_domain, sample_lines
from .textdiv import divergence_matrix, textual_divergence
from .visdiv import AEConfig, save_params, train_autoencoder, visual_divergence_matrix

logger = logging.getLogger(__name__)


# ============================================================================
# STUDY LAYOUT
# ============================================================================

# dark ink on white paper, and light ink on near-black paper
STYLES: Dict[str, StyleParams] = {
    "clean": StyleParams(),
    "inverted": StyleParams(paper=0.05, ink_level=0.95, slant=0.2, ink=1),
}

LANGUAGES = ("en", "fr")

# nearest-neighbour matchers compared as "models": name -> average-pooling factor
MATCHERS: Dict[str, int] = {"nn-full": 1, "nn-pooled": 4}


@dataclass(frozen=True)
class DomainSpec:
    name: str
    language: str
    style: str


def study_domains(languages: Sequence[str] = LANGUAGES,
                  styles: Sequence[str] = tuple(STYLES)) -> List[DomainSpec]:
    return [DomainSpec(f"{lang}_{style}", lang, style) for lang in languages for style in styles]


# ============================================================================
# STAND-IN RECOGNIZER
# ============================================================================

def _pool(images: np.ndarray, factor: int) -> np.ndarray:
    if factor == 1:
        return images.reshape(len(images), -1)
    n, h, w = images.shape
    pooled = images.reshape(n, h // factor, factor, w // factor, factor).mean(axis=(2, 4))
    return pooled.reshape(n, -1)


@dataclass
class NearestNeighbourMatcher:
    """
    Transcribes an image with the transcript of the closest training image.

    Closeness is the mean squared pixel difference after average pooling. Every output
    character gets the same confidence, 1 / (1 + d / scale), where d is the distance to
    the match and scale the mean nearest-neighbour distance on the source val split.
    """
    name: str
    pool: int
    train: np.ndarray
    transcripts: List[str]
    scale: float = 1.0

    @property
    def num_parameters(self) -> int:
        return int(self.train.size)

    @classmethod
    def fit(cls, name: str, pool: int, train: np.ndarray, transcripts: Sequence[str],
            val: np.ndarray) -> "NearestNeighbourMatcher":
        matcher = cls(name=name, pool=pool, train=_pool(train, pool),
                      transcripts=list(transcripts))
        distances = matcher._nearest(val)[1]
        matcher.scale = max(float(np.mean(distances)), 1e-12)
        return matcher

    def _nearest(self, images: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        queries = _pool(images, self.pool)
        d = (np.sum(queries ** 2, axis=1)[:, None] - 2.0 * queries @ self.train.T
             + np.sum(self.train ** 2, axis=1)[None, :]) / queries.shape[1]
        index = np.argmin(d, axis=1)
        return index, np.maximum(d[np.arange(len(index)), index], 0.0)

    def predict(self, images: np.ndarray, references: Sequence[str],
                prefix: str) -> List[PredictionRecord]:
        index, distances = self._nearest(images)
        records = []
        for i, (j, d) in enumerate(zip(index, distances)):
            hypothesis = self.transcripts[int(j)]
            confidence = 1.0 / (1.0 + float(d) / self.scale)
            records.append(PredictionRecord(sample_id=f"{prefix}-{i}", reference=references[i],
                                            hypothesis=hypothesis,
                                            confidences=(confidence,) * len(hypothesis)))
        return records


# ============================================================================
# STUDY
# ============================================================================

@dataclass
class DeskStudyResult:
    domains: List[DomainSpec]
    manifests: Dict[str, DatasetManifest]
    textual: pd.DataFrame
    synthetic: pd.DataFrame
    visual: pd.DataFrame
    errors: pd.DataFrame
    params_millions: Dict[str, float]
    metrics: MetricsTable
    factors: Optional[FactorModel]
    evaluation: RegressionEvaluation
    residuals: ResidualDistribution
    files: List[Path] = field(default_factory=list)

    def pairs(self, matrix: pd.DataFrame, same: str) -> Tuple[List[float], List[float]]:
        """Off-diagonal entries of pairs sharing `same` (language or style), then the rest"""
        attribute = {d.name: getattr(d, same) for d in self.domains}
        shared, crossed = [], []
        for s in matrix.index:
            for t in matrix.columns:
                if s == t:
                    continue
                (shared if attribute[s] == attribute[t] else crossed).append(
                    float(matrix.loc[s, t]))
        return shared, crossed


def build_study_domains(workspace: Path, domains: Sequence[DomainSpec], num_lines: int,
                        seed: int, font: BitmapFont,
                        max_workers: int = 1) -> Dict[str, DatasetManifest]:
    manifests = {}
    for i, spec in enumerate(domains):
        corpus = sample_lines(spec.language, num_lines, seed + i)
        style = STYLES[spec.style].model_copy(update={"seed": seed + i})
        manifests[spec.name] = make_domain(corpus, font, style,
                                           Path(workspace) / "domains" / spec.name,
                                           name=spec.name, language=spec.language,
                                           max_workers=max_workers)
    return manifests


def score_matchers(manifests: Dict[str, DatasetManifest],
                   images: Dict[Tuple[str, Split], np.ndarray],
                   matchers: Dict[str, int] = MATCHERS) -> Tuple[pd.DataFrame, Dict[str, float]]:
    """Long CER/ECE table (model, source, target, cer, ece) and parameters per model"""
    rows = []
    params: Dict[str, float] = {}
    for model, pool in matchers.items():
        sizes = []
        for source, manifest in manifests.items():
            matcher = NearestNeighbourMatcher.fit(model, pool, images[(source, Split.TRAIN)],
                                                  manifest.texts(Split.TRAIN),
                                                  images[(source, Split.VAL)])
            sizes.append(matcher.num_parameters)
            for target, target_manifest in manifests.items():
                records = matcher.predict(images[(target, Split.TEST)],
                                          target_manifest.texts(Split.TEST),
                                          prefix=f"{source}-{target}")
                rows.append({"model": model, "source": source, "target": target,
                             "cer": corpus_cer(records), "ece": ece(records)})
        params[model] = float(np.mean(sizes)) / 1e6
    return pd.DataFrame(rows), params


def run_desk_study(workspace: Path, num_lines: int = 200, epochs: int = 5,
                   seed: int = DEFAULT_SEED, ae: Optional[AEConfig] = None,
                   nmax: int = 5, synthetic_lines: int = 200,
                   max_workers: int = 1) -> DeskStudyResult:
    """
    Run the whole desk-scale study and write its tables under workspace.

    Args:
        workspace: Output directory
        num_lines: Lines per domain (split 80/10/10)
        epochs: Autoencoder epochs per source domain
        seed: Base seed for text, rendering and training
        ae: Autoencoder configuration (default: desk scale, lr 0.005)
        nmax: Highest n-gram order
        synthetic_lines: Size of the per-language synthetic corpus behind delta_L
        max_workers: Threads for per-domain work
    """
    workspace = Path(workspace)
    domains = study_domains()
    ae = ae or AEConfig.desk_scale(seed=seed).with_overrides(lr=0.005)
    manifests = build_study_domains(workspace, domains, num_lines, seed, BitmapFont.default(),
                                    max_workers)
    names = list(manifests)

    alphabet = build_alphabet(list(manifests.values()))
    corpora = {n: [normalize_text(t, alphabet) for t in m.texts(Split.TRAIN)]
               for n, m in manifests.items()}
    textual = divergence_matrix(list(corpora.values()), names=names, nmax=nmax,
                                max_workers=max_workers)
    synthetic_seed = seed + len(domains)
    synthetic_text = {
        lang: [normalize_text(t, alphabet)
               for t in sample_lines(lang, synthetic_lines, synthetic_seed)]
        for lang in sorted({d.language for d in domains})
    }
    language_of = {d.name: d.language for d in domains}
    synthetic = pd.DataFrame(
        [[textual_divergence(corpora[s], synthetic_text[language_of[t]], nmax) for t in names]
         for s in names],
        index=names, columns=names)

    units = [(n, split) for n in names for split in Split]
    stacks = run_units(lambda u: load_split_images(manifests[u[0]], u[1], ae.input_h,
                                                   ae.input_w),
                       units, max_workers=max_workers, desc="Loading images")
    images = dict(zip(units, stacks))

    params = {}
    for name in names:
        params[name] = train_autoencoder(ae, images[(name, Split.TRAIN)],
                                         images[(name, Split.VAL)], epochs)
        save_params(params[name], workspace / "visdiv" / "params" / f"{name}.oodae")
    visual = visual_divergence_matrix(params, {n: images[(n, Split.TEST)] for n in names},
                                      max_workers=max_workers)

    errors, params_millions = score_matchers(manifests, images)
    metrics = build_metrics_table(errors, params_millions, visual=visual, textual=textual,
                                  synthetic=synthetic)
    try:
        columns = [c for c in METRIC_COLUMNS if metrics.frame[c].notna().all()]
        factors = factor_analysis(metrics, columns)
    except DataError as e:
        logger.warning("factor analysis skipped: %s", e)
        factors = None
    model = fit_ood_regressor(metrics)
    evaluation = evaluate_regressor(model, metrics)
    residuals = residual_distribution(evaluation.residuals)

    files = [
        write_matrix_csv(textual, workspace / "textdiv" / "textual.csv"),
        write_matrix_csv(synthetic, workspace / "textdiv" / "textual_synthetic.csv"),
        write_matrix_csv(visual, workspace / "visdiv" / "visual.csv"),
        metrics.to_csv(workspace / "metrics.csv"),
    ]
    errors_file = workspace / "errors.csv"
    errors.to_csv(errors_file, index=False, float_format="%.17g")
    residuals_file = workspace / "analysis" / "residuals.csv"
    residuals_file.parent.mkdir(parents=True, exist_ok=True)
    residuals.to_frame().to_csv(residuals_file, index=False, float_format="%.17g")
    files.extend([errors_file, residuals_file])

    logger.info("Desk study finished: %d domains, %d metrics rows, MAE %.2f",
                len(domains), len(metrics), evaluation.mae)
    return DeskStudyResult(domains=domains, manifests=manifests, textual=textual,
                           synthetic=synthetic, visual=visual, errors=errors,
                           params_millions=params_millions, metrics=metrics, factors=factors,
                           evaluation=evaluation, residuals=residuals, files=files)
