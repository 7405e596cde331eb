"""
Prediction logs.

UTF-8 TSV with a header row:

    sample_id  reference  hypothesis  confidences

The confidences column is optional; when present it holds comma-separated decimals,
one per hypothesis character (empty for an empty hypothesis).
"""

import csv
import logging
from pathlib import Path
from typing import List, Sequence

import pandas as pd

from ..errors import DataError
from .rates import PredictionRecord

logger = logging.getLogger(__name__)

REQUIRED_COLUMNS = ("sample_id", "reference", "hypothesis")
CONFIDENCE_COLUMN = "confidences"


def _parse_confidences(cell: str, sample_id: str) -> tuple:
    if cell == "":
        return ()
    try:
        return tuple(float(value) for value in cell.split(","))
    except ValueError:
        raise DataError(f"{sample_id}: malformed confidences {cell!r}")


def load_predictions(path: Path) -> List[PredictionRecord]:
    """
    Read a prediction log.

    Raises:
        DataError: missing file or columns, bad confidence values or lengths
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"prediction log not found: {path}")
    frame = pd.read_csv(path, sep="\t", dtype=str, keep_default_na=False,
                        quoting=csv.QUOTE_NONE, encoding="utf-8")
    missing = [column for column in REQUIRED_COLUMNS if column not in frame.columns]
    if missing:
        raise DataError(f"{path}: missing columns {', '.join(missing)}")

    with_conf = CONFIDENCE_COLUMN in frame.columns
    records = []
    for row in frame.itertuples(index=False):
        confidences = _parse_confidences(getattr(row, CONFIDENCE_COLUMN), row.sample_id) \
            if with_conf else None
        records.append(PredictionRecord(sample_id=row.sample_id, reference=row.reference,
                                        hypothesis=row.hypothesis, confidences=confidences))
    logger.info("Loaded %d predictions from %s", len(records), path)
    return records


def write_predictions(records: Sequence[PredictionRecord], path: Path) -> Path:
    """Write records in the prediction-log format (confidences only if every record has them)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with_conf = bool(records) and all(r.has_confidences for r in records)
    rows = []
    for r in records:
        row = {"sample_id": r.sample_id, "reference": r.reference, "hypothesis": r.hypothesis}
        if with_conf:
            row[CONFIDENCE_COLUMN] = ",".join(repr(c) for c in r.confidences)
        rows.append(row)
    columns = list(REQUIRED_COLUMNS) + ([CONFIDENCE_COLUMN] if with_conf else [])
    pd.DataFrame(rows, columns=columns).to_csv(path, sep="\t", index=False,
                                               quoting=csv.QUOTE_NONE, escapechar=None)
    return path
