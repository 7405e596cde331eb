"""
Artifact writers shared by the CLI commands: labelled CSV matrices, PGM heatmaps and
JSON reports.
"""

import logging
from pathlib import Path

import numpy as np
import pandas as pd
from sqlmodel import SQLModel

from .config import HEATMAP_SCALE
from .corpus.images import GrayImage, save_image
from .errors import DataError

logger = logging.getLogger(__name__)

HEATMAP_CELL = 16


def write_matrix_csv(matrix: pd.DataFrame, path: Path) -> Path:
    """Square matrix with a header row and a header column of domain names."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    matrix.to_csv(path, index=True, index_label="", float_format="%.17g")
    return path


def read_matrix_csv(path: Path) -> pd.DataFrame:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"matrix file not found: {path}")
    frame = pd.read_csv(path, index_col=0, float_precision="round_trip")
    frame.index = frame.index.astype(str)
    frame.columns = frame.columns.astype(str)
    if list(frame.index) != list(frame.columns):
        raise DataError(f"{path}: row and column labels differ")
    return frame


def write_heatmap(matrix: pd.DataFrame, path: Path, cell: int = HEATMAP_CELL) -> Path:
    """
    Draw a normalized matrix as a PGM heatmap.

    Entries must lie in [0, 100]; 0 is drawn white and 100 black, each entry as a
    cell x cell square.
    """
    values = np.asarray(matrix, dtype=np.float64)
    if values.size == 0 or values.min() < 0 or values.max() > HEATMAP_SCALE:
        raise DataError(f"heatmap entries must lie in [0, {HEATMAP_SCALE:g}]")
    intensity = 1.0 - values / HEATMAP_SCALE
    pixels = np.kron(intensity, np.ones((cell, cell)))
    save_image(GrayImage.from_array(pixels), path)
    return Path(path)


def write_json(report: SQLModel, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.debug("Wrote %s", path)
    return path
