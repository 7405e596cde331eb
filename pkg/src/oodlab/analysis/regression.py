"""
OOD-error estimation from label-free proxies.

Ordinary least squares on standardized features predicting cer_ood. The normal
equations are solved through the Jacobi eigendecomposition, with a pseudo-inverse when
the design is rank-deficient. Evaluation holds out one target domain at a time.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from ..config import (DEFAULT_BUCKET_WIDTH, REGRESSION_FEATURES, REGRESSION_TARGET,
                      EvalProtocol)
from ..errors import DataError, UsageError
from .factors import eigendecompose
from .table import MetricsTable

logger = logging.getLogger(__name__)

RANK_TOL = 1e-10


@dataclass
class RegressionModel:
    """Linear model on z-scored features: y = intercept + Σ coef_i · (x_i − mean_i) / scale_i"""
    features: List[str]
    coefficients: np.ndarray
    intercept: float
    means: np.ndarray
    scales: np.ndarray
    rank_deficient: bool = False

    def __post_init__(self):
        if len(self.coefficients) != len(self.features):
            raise DataError("one coefficient per feature is required")

    def predict(self, data) -> np.ndarray:
        x = _design(data, self.features)
        return self.intercept + ((x - self.means) / self.scales) @ self.coefficients

    @property
    def raw_coefficients(self) -> np.ndarray:
        """Coefficients on the original feature scale"""
        return self.coefficients / self.scales

    @property
    def raw_intercept(self) -> float:
        return float(self.intercept - np.dot(self.raw_coefficients, self.means))


def _design(data, features: Sequence[str]) -> np.ndarray:
    if isinstance(data, MetricsTable):
        return data.require(features).to_numpy(dtype=np.float64)
    frame = data if isinstance(data, pd.DataFrame) else pd.DataFrame(data, columns=features)
    missing = [f for f in features if f not in frame.columns]
    if missing:
        raise DataError(f"missing feature column(s): {', '.join(missing)}")
    values = frame[list(features)].to_numpy(dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise DataError("feature columns hold missing or non-finite values")
    return values


def _target(data, target: str) -> np.ndarray:
    frame = data.frame if isinstance(data, MetricsTable) else data
    if target not in frame.columns:
        raise DataError(f"missing target column {target}")
    y = frame[target].to_numpy(dtype=np.float64)
    if not np.all(np.isfinite(y)):
        raise DataError(f"target column {target} holds missing values")
    return y


def fit_ood_regressor(table, features: Sequence[str] = REGRESSION_FEATURES,
                      target: str = REGRESSION_TARGET) -> RegressionModel:
    """
    Least-squares fit of the target on standardized features.

    A zero-variance feature keeps scale 1, which leaves an all-zero design column; like
    any other rank deficiency it is absorbed by the pseudo-inverse and logged.

    Raises:
        DataError: fewer than len(features) + 1 rows, or missing values
    """
    features = list(features)
    x = _design(table, features)
    y = _target(table, target)
    n, p = x.shape
    if n < p + 1:
        raise DataError(f"regression needs at least {p + 1} rows, got {n}")

    means = x.mean(axis=0)
    scales = x.std(axis=0, ddof=1) if n > 1 else np.ones(p)
    flat = scales <= 1e-12 * np.maximum(1.0, np.abs(means))
    scales = np.where(flat, 1.0, scales)
    z = (x - means) / scales
    y_mean = float(y.mean())

    gram = z.T @ z
    values, vectors = eigendecompose((gram + gram.T) / 2.0)
    cutoff = RANK_TOL * max(values[0], 1e-300) * p
    keep = values > cutoff
    rank_deficient = not np.all(keep)
    if rank_deficient:
        logger.warning("regression design is rank-deficient (rank %d of %d); "
                       "using the pseudo-inverse", int(keep.sum()), p)
    inverse = (vectors[:, keep] / values[keep]) @ vectors[:, keep].T
    coefficients = inverse @ (z.T @ (y - y_mean))
    return RegressionModel(features=features, coefficients=coefficients, intercept=y_mean,
                           means=means, scales=scales, rank_deficient=rank_deficient)


@dataclass
class RegressionEvaluation:
    """Held-out predictions and their error summary"""
    protocol: EvalProtocol
    predictions: pd.DataFrame
    mae: float
    mse: float
    rank_deficient_folds: List[str] = field(default_factory=list)

    @property
    def residuals(self) -> np.ndarray:
        """Absolute prediction errors in fold order"""
        return self.predictions["residual"].to_numpy()


def evaluate_regressor(model: Optional[RegressionModel], table: MetricsTable,
                       protocol: EvalProtocol = EvalProtocol.LEAVE_ONE_DOMAIN_OUT,
                       features: Optional[Sequence[str]] = None,
                       target: str = REGRESSION_TARGET) -> RegressionEvaluation:
    """
    Score a regressor.

    leave-one-domain-out refits on every row whose target differs from the held-out
    target (targets in sorted order) and predicts the held-out rows; in-sample predicts
    every row with the given model.

    Returns:
        RegressionEvaluation with per-row predictions, MAE and MSE

    Raises:
        DataError: fewer than 2 target domains (leave-one-domain-out)
    """
    protocol = EvalProtocol(protocol)
    if features is None:
        features = model.features if model is not None else list(REGRESSION_FEATURES)
    frame = table.frame
    pieces = []
    deficient: List[str] = []

    if protocol == EvalProtocol.IN_SAMPLE:
        if model is None:
            model = fit_ood_regressor(table, features, target)
        predicted = model.predict(table)
        pieces.append(pd.DataFrame({
            "fold": "all",
            "model": frame["model"], "source": frame["source"], "target": frame["target"],
            "actual": _target(table, target), "predicted": predicted,
        }))
    else:
        targets = sorted(frame["target"].unique())
        if len(targets) < 2:
            raise DataError("leave-one-domain-out needs at least 2 target domains")
        for held_out in targets:
            train = frame[frame["target"] != held_out]
            test = frame[frame["target"] == held_out]
            try:
                fold_model = fit_ood_regressor(train, features, target)
            except DataError as e:
                raise DataError(f"fold holding out {held_out}: {e}")
            if fold_model.rank_deficient:
                deficient.append(held_out)
            pieces.append(pd.DataFrame({
                "fold": held_out,
                "model": test["model"], "source": test["source"], "target": test["target"],
                "actual": _target(test, target), "predicted": fold_model.predict(test),
            }))

    predictions = pd.concat(pieces, ignore_index=True)
    errors = predictions["predicted"] - predictions["actual"]
    predictions["residual"] = errors.abs()
    mae = float(predictions["residual"].mean())
    mse = float((errors ** 2).mean())
    logger.info("Regressor (%s): MAE %.4f, MSE %.4f over %d predictions",
                protocol.value, mae, mse, len(predictions))
    return RegressionEvaluation(protocol=protocol, predictions=predictions, mae=mae, mse=mse,
                                rank_deficient_folds=deficient)


@dataclass
class ResidualDistribution:
    """Residual counts per [i·w, (i+1)·w) bucket and the cumulative percentage"""
    bucket_width: float
    counts: np.ndarray
    cumulative_percent: np.ndarray
    residuals: np.ndarray

    @property
    def edges(self) -> np.ndarray:
        return np.arange(len(self.counts) + 1) * self.bucket_width

    def share_below(self, threshold: float) -> float:
        """Percentage of residuals strictly below a threshold"""
        return 100.0 * float(np.mean(self.residuals < threshold))

    def to_frame(self) -> pd.DataFrame:
        edges = self.edges
        return pd.DataFrame({
            "lower": edges[:-1], "upper": edges[1:],
            "count": self.counts, "cumulative_percent": self.cumulative_percent,
        })


def residual_distribution(residuals: Sequence[float],
                          bucket_width: float = DEFAULT_BUCKET_WIDTH) -> ResidualDistribution:
    """
    Cumulative share of residuals per bucket.

    Buckets are [0, w), [w, 2w), ... up to the one holding the largest residual; the
    last cumulative value is exactly 100.

    Raises:
        DataError: empty input or a negative residual
    """
    if bucket_width <= 0:
        raise UsageError("bucket width must be positive")
    values = np.asarray(residuals, dtype=np.float64)
    if values.size == 0:
        raise DataError("no residuals")
    if not np.all(np.isfinite(values)):
        raise DataError("residuals must be finite")
    if np.any(values < 0):
        raise DataError("residuals must be nonnegative")

    num_buckets = int(math.floor(values.max() / bucket_width)) + 1
    index = np.minimum(np.floor(values / bucket_width).astype(np.int64), num_buckets - 1)
    counts = np.bincount(index, minlength=num_buckets)
    cumulative = np.cumsum(counts) * 100.0 / values.size
    return ResidualDistribution(bucket_width=float(bucket_width), counts=counts,
                                cumulative_percent=cumulative, residuals=values)
