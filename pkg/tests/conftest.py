from pathlib import Path
from typing import Callable, Optional

import numpy as np
import pandas as pd
import pytest

from oodlab.corpus import DatasetManifest
from oodlab.synthgen import BitmapFont, StyleParams, make_domain, sample_lines


# ============================================================================
# CROSS-DOMAIN CER FIXTURES (rows: source, columns: target)
# ============================================================================

DOMAINS = ["IAM", "Rimes", "G.W.", "Bentham", "S.G.", "Rodrigo", "ICFHR"]

CRNN_CER = [
    [6.4, 25.0, 31.1, 25.3, 45.5, 40.9, 86.2],
    [35.4, 3.7, 49.0, 50.2, 52.3, 47.1, 87.9],
    [55.6, 61.5, 8.2, 59.2, 69.3, 66.2, 100.0],
    [34.9, 45.3, 32.2, 4.7, 57.8, 43.8, 78.7],
    [77.7, 74.5, 89.3, 78.0, 7.2, 52.8, 100.0],
    [65.7, 61.4, 71.8, 66.3, 33.6, 1.7, 85.3],
    [74.9, 78.4, 81.6, 75.4, 77.9, 75.6, 5.2],
]

VAN_CER = [
    [6.6, 21.3, 34.5, 26.6, 39.8, 38.5, 82.9],
    [28.6, 5.6, 46.1, 45.0, 47.2, 43.7, 88.4],
    [73.7, 67.4, 9.3, 59.3, 67.1, 69.6, 100.0],
    [37.2, 41.7, 32.0, 7.4, 49.4, 38.6, 75.3],
    [96.1, 85.0, 93.1, 83.1, 7.8, 57.7, 100.0],
    [76.5, 70.7, 78.2, 68.1, 41.1, 2.3, 87.3],
    [70.8, 74.8, 76.4, 67.8, 72.1, 71.4, 7.5],
]


def cer_matrix(values) -> pd.DataFrame:
    return pd.DataFrame(values, index=DOMAINS, columns=DOMAINS)


def long_cross_table(**blocks) -> pd.DataFrame:
    rows = []
    for model, values in blocks.items():
        matrix = cer_matrix(values)
        for source in DOMAINS:
            for target in DOMAINS:
                rows.append({"model": model, "source": source, "target": target,
                             "cer": float(matrix.loc[source, target])})
    return pd.DataFrame(rows)


@pytest.fixture
def crnn_van_cross() -> pd.DataFrame:
    return long_cross_table(CRNN=CRNN_CER, VAN=VAN_CER)


# ============================================================================
# SYNTHETIC DOMAINS
# ============================================================================

@pytest.fixture(scope="session")
def font() -> BitmapFont:
    return BitmapFont.default()


@pytest.fixture
def make_synthetic(tmp_path, font) -> Callable[..., DatasetManifest]:
    """Factory rendering a small synthetic domain under tmp_path/domains/<name>"""

    def _make(name: str, language: str = "en", lines: int = 20, seed: int = 1,
              style: Optional[StyleParams] = None) -> DatasetManifest:
        corpus = sample_lines(language, lines, seed)
        style = style or StyleParams(seed=seed)
        return make_domain(corpus, font, style, tmp_path / "domains" / name, name=name,
                           language=language)

    return _make


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


def write_pgm(path: Path, raster: np.ndarray) -> Path:
    """Hand-written P5 file, independent of the library writer"""
    height, width = raster.shape
    path.write_bytes(f"P5\n{width} {height}\n255\n".encode("ascii")
                     + raster.astype(np.uint8).tobytes())
    return path
