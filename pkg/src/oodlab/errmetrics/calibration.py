"""
Character-level calibration.

Each hypothesis character aligned to a reference character (match or substitution) is
one scored prediction: its confidence against whether it matched. Inserted hypothesis
characters have no reference position and are not scored.

Bins are equal-width on [0, 1] and right-closed, (lo, hi]; a confidence of exactly 0
falls in the first bin.
"""

import math
from typing import Sequence, Tuple

import numpy as np
import pandas as pd

from ..config import DEFAULT_ECE_BINS
from ..errors import DataError, UsageError
from .edit_distance import EditOp, align
from .rates import PredictionRecord


def scored_characters(records: Sequence[PredictionRecord]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Confidence and correctness of every scored hypothesis character.

    Raises:
        DataError: a record has no confidences
    """
    confidences, correct = [], []
    for record in records:
        if not record.has_confidences:
            raise DataError(f"{record.sample_id}: record has no confidences")
        for pair in align(record.reference, record.hypothesis):
            if pair.op in (EditOp.MATCH, EditOp.SUBSTITUTE):
                confidences.append(record.confidences[pair.hyp_index])
                correct.append(pair.op == EditOp.MATCH)
    return np.array(confidences, dtype=np.float64), np.array(correct, dtype=bool)


def _bin_index(confidences: np.ndarray, bins: int) -> np.ndarray:
    index = np.ceil(confidences * bins).astype(np.int64) - 1
    return np.clip(index, 0, bins - 1)


def reliability_table(records: Sequence[PredictionRecord],
                      bins: int = DEFAULT_ECE_BINS) -> pd.DataFrame:
    """
    Per-bin statistics behind a reliability diagram.

    Returns:
        DataFrame with columns bin, lower, upper, count, confidence, accuracy, gap;
        empty bins carry NaN confidence/accuracy/gap
    """
    if bins < 1:
        raise UsageError(f"bins must be at least 1, got {bins}")
    conf, correct = scored_characters(records)
    if conf.size == 0:
        raise DataError("no aligned characters to score")
    index = _bin_index(conf, bins)

    rows = []
    for b in range(bins):
        mask = index == b
        count = int(mask.sum())
        mean_conf = float(conf[mask].mean()) if count else math.nan
        accuracy = float(correct[mask].mean()) if count else math.nan
        rows.append({
            "bin": b,
            "lower": b / bins,
            "upper": (b + 1) / bins,
            "count": count,
            "confidence": mean_conf,
            "accuracy": accuracy,
            "gap": abs(accuracy - mean_conf) if count else math.nan,
        })
    return pd.DataFrame(rows)


def ece(records: Sequence[PredictionRecord], bins: int = DEFAULT_ECE_BINS) -> float:
    """Expected calibration error: Σ_b (|B_b| / N) · |acc(B_b) − conf(B_b)|, in [0, 1]"""
    table = reliability_table(records, bins)
    filled = table[table["count"] > 0]
    weights = filled["count"] / filled["count"].sum()
    return float(min(1.0, (weights * filled["gap"]).sum()))


def mce(records: Sequence[PredictionRecord], bins: int = DEFAULT_ECE_BINS) -> float:
    """Maximum calibration error over non-empty bins"""
    table = reliability_table(records, bins)
    return float(table.loc[table["count"] > 0, "gap"].max())
