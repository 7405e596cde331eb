"""
The metrics table: one row per (model, source, target) OOD case.

ID quantities (cer_id, ece_id, delta_S) come from the source == target cell of each
model/source and are repeated on every row of that source; OOD quantities come from
the row's own (source, target) cell.
"""

import logging
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from ..config import KEY_COLUMNS, METRIC_COLUMNS, ColumnMapper
from ..errors import DataError

logger = logging.getLogger(__name__)

NONNEGATIVE_COLUMNS = METRIC_COLUMNS


class MetricsTable:
    """Validated wrapper around the metrics DataFrame"""

    def __init__(self, frame: pd.DataFrame):
        frame = frame.rename(columns=ColumnMapper.rename_map(frame.columns))
        missing = [c for c in KEY_COLUMNS if c not in frame.columns]
        if missing:
            raise DataError(f"metrics table is missing key columns: {', '.join(missing)}")
        for column in KEY_COLUMNS:
            frame[column] = frame[column].astype(str)

        duplicated = frame.duplicated(subset=list(KEY_COLUMNS), keep=False)
        if duplicated.any():
            first = frame.loc[duplicated, list(KEY_COLUMNS)].iloc[0].tolist()
            raise DataError(f"duplicate metrics row for (model, source, target) = {tuple(first)}")

        for column in METRIC_COLUMNS:
            if column in frame.columns:
                frame[column] = pd.to_numeric(frame[column], errors="coerce")
                if (frame[column] < 0).any():
                    raise DataError(f"column {column} holds negative values")
        ordered = list(KEY_COLUMNS) + [c for c in METRIC_COLUMNS if c in frame.columns]
        extra = [c for c in frame.columns if c not in ordered]
        self.frame = frame[ordered + extra].reset_index(drop=True)

    def __len__(self) -> int:
        return len(self.frame)

    @property
    def targets(self) -> list:
        return sorted(self.frame["target"].unique())

    def require(self, columns: Sequence[str]) -> pd.DataFrame:
        """The selected columns, checking they exist and hold no missing values."""
        missing = [c for c in columns if c not in self.frame.columns]
        if missing:
            raise DataError(f"metrics table has no column(s): {', '.join(missing)}")
        subset = self.frame[list(columns)]
        empty = [c for c in columns if subset[c].isna().any()]
        if empty:
            raise DataError(f"missing values in column(s): {', '.join(empty)}")
        return subset.astype(np.float64)

    def subset(self, mask) -> "MetricsTable":
        return MetricsTable(self.frame.loc[mask].copy())

    @classmethod
    def from_csv(cls, path: Path) -> "MetricsTable":
        path = Path(path)
        if not path.is_file():
            raise DataError(f"metrics table not found: {path}")
        frame = pd.read_csv(path, dtype={c: str for c in KEY_COLUMNS},
                            float_precision="round_trip")
        if frame.empty:
            raise DataError(f"{path}: metrics table is empty")
        return cls(frame)

    def to_csv(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.frame.to_csv(path, index=False, float_format="%.17g")
        return path


def _matrix_value(matrix: Optional[pd.DataFrame], source: str, target: str) -> float:
    if matrix is None:
        return np.nan
    try:
        return float(matrix.loc[source, target])
    except KeyError:
        return np.nan


def build_metrics_table(errors: pd.DataFrame,
                        params_millions: Mapping[str, float],
                        visual: Optional[pd.DataFrame] = None,
                        textual: Optional[pd.DataFrame] = None,
                        synthetic: Optional[pd.DataFrame] = None) -> MetricsTable:
    """
    Assemble the metrics table.

    Args:
        errors: Long table with columns model, source, target, cer and optionally ece;
            must contain the source == target row of every (model, source)
        params_millions: Parameter count per model, in millions
        visual: Source × target reconstruction-error matrix (delta_S on the diagonal)
        textual: Source × target KL to the target's ground-truth text (delta_GT)
        synthetic: Source × target KL to a synthetic corpus in the target's language
            (delta_L)

    Returns:
        MetricsTable with one row per off-diagonal (model, source, target)
    """
    required = {"model", "source", "target", "cer"}
    if not required.issubset(errors.columns):
        raise DataError(f"error table needs columns {sorted(required)}")
    errors = errors.copy()
    for column in ("model", "source", "target"):
        errors[column] = errors[column].astype(str)
    has_ece = "ece" in errors.columns

    diagonal = errors[errors["source"] == errors["target"]].set_index(["model", "source"])
    rows = []
    for record in errors[errors["source"] != errors["target"]].itertuples(index=False):
        key = (record.model, record.source)
        if key not in diagonal.index:
            raise DataError(f"no in-domain result for model {record.model} on {record.source}")
        if record.model not in params_millions:
            raise DataError(f"no parameter count for model {record.model}")
        in_domain = diagonal.loc[key]
        rows.append({
            "model": record.model,
            "source": record.source,
            "target": record.target,
            "params_millions": float(params_millions[record.model]),
            "cer_id": float(in_domain["cer"]),
            "cer_ood": float(record.cer),
            "ece_id": float(in_domain["ece"]) if has_ece else np.nan,
            "ece_ood": float(record.ece) if has_ece else np.nan,
            "delta_S": _matrix_value(visual, record.source, record.source),
            "delta_T": _matrix_value(visual, record.source, record.target),
            "delta_L": _matrix_value(synthetic, record.source, record.target),
            "delta_GT": _matrix_value(textual, record.source, record.target),
        })
    if not rows:
        raise DataError("no cross-domain rows to assemble")
    table = MetricsTable(pd.DataFrame(rows))
    logger.info("Assembled metrics table with %d rows", len(table))
    return table
