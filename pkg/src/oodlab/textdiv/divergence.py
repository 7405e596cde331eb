"""
Textual divergence between domains.

The divergence of a target corpus from a source corpus is the KL divergence between
their smoothed character n-gram distributions, averaged over orders 1..nmax. Logs are
natural, so values are in nats. The measure is directional: source first.
"""

import logging
import math
from typing import List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from ..batch import run_units
from ..config import DEFAULT_ALPHA, DEFAULT_NMAX, HEATMAP_SCALE
from ..errors import DataError, UsageError
from .ngrams import Line, NgramModel, fit_orders

logger = logging.getLogger(__name__)

Corpus = Sequence[Line]


def kl_divergence(P: NgramModel, Q: NgramModel) -> float:
    """
    KL(P || Q) over the union of both models' observed n-grams.

    Each model is smoothed with its own alpha over that union. With alpha=0 an n-gram
    seen only in P makes the divergence infinite; a warning is logged in that case.

    Raises:
        UsageError: the models have different orders
    """
    if P.order != Q.order:
        raise UsageError(f"order mismatch: {P.order} vs {Q.order}")

    support = sorted(P.vocab | Q.vocab)
    if not support:
        return 0.0
    p = P.probabilities(support)
    q = Q.probabilities(support)

    mask = p > 0
    if np.any(q[mask] == 0):
        logger.warning("order-%d KL is infinite: source n-grams missing from target "
                       "and alpha=0", P.order)
        return math.inf

    terms = p[mask] * np.log(p[mask] / q[mask])
    return max(0.0, math.fsum(terms.tolist()))


def _average_kl(src_models: List[NgramModel], tgt_models: List[NgramModel]) -> float:
    values = [kl_divergence(P, Q) for P, Q in zip(src_models, tgt_models)]
    return math.fsum(values) / len(values)


def textual_divergence(src: Corpus, tgt: Corpus, nmax: int = DEFAULT_NMAX,
                       alpha: float = DEFAULT_ALPHA) -> float:
    """
    Average KL divergence of order 1..nmax between a source and a target corpus.

    Args:
        src: Source lines
        tgt: Target lines
        nmax: Highest n-gram order
        alpha: Additive smoothing mass

    Returns:
        Nonnegative divergence in nats; 0 when the corpora are identical
    """
    if not 1 <= nmax <= 5:
        raise UsageError(f"nmax must be between 1 and 5, got {nmax}")
    return _average_kl(fit_orders(src, nmax, alpha), fit_orders(tgt, nmax, alpha))


def normalize_matrix(matrix: Union[pd.DataFrame, np.ndarray]):
    """
    Affine map of the off-diagonal entries onto [0, 100] (min to 0, max to 100).

    The diagonal is excluded from the min/max and set to 0. When every off-diagonal
    entry is equal they all map to 0 and a warning is logged.
    """
    values = np.array(matrix, dtype=np.float64)
    if values.ndim != 2 or values.shape[0] != values.shape[1] or values.shape[0] < 2:
        raise UsageError(f"expected a square matrix of size >= 2, got shape {values.shape}")
    if not np.all(np.isfinite(values)):
        raise DataError("cannot normalize a matrix with non-finite entries")

    off = ~np.eye(values.shape[0], dtype=bool)
    lo, hi = values[off].min(), values[off].max()
    out = np.zeros_like(values)
    if hi > lo:
        out[off] = (values[off] - lo) / (hi - lo) * HEATMAP_SCALE
    else:
        logger.warning("all off-diagonal divergences are equal (%g); normalized to 0", lo)

    if isinstance(matrix, pd.DataFrame):
        return pd.DataFrame(out, index=matrix.index, columns=matrix.columns)
    return out


def divergence_matrix(corpora: Sequence[Corpus], names: Optional[Sequence[str]] = None,
                      normalize: bool = False, nmax: int = DEFAULT_NMAX,
                      alpha: float = DEFAULT_ALPHA, max_workers: int = 1) -> pd.DataFrame:
    """
    Pairwise textual divergence between corpora.

    Args:
        corpora: Two or more corpora
        names: Row/column labels (defaults to "0", "1", ...)
        normalize: Rescale off-diagonal entries onto [0, 100]
        nmax: Highest n-gram order
        alpha: Smoothing mass
        max_workers: Threads used to evaluate cells

    Returns:
        DataFrame with entry (i, j) = textual_divergence(corpora[i], corpora[j])
    """
    if len(corpora) < 2:
        raise UsageError("divergence_matrix needs at least 2 corpora")
    names = [str(i) for i in range(len(corpora))] if names is None else list(names)
    if len(names) != len(corpora):
        raise UsageError("one name per corpus is required")
    if not 1 <= nmax <= 5:
        raise UsageError(f"nmax must be between 1 and 5, got {nmax}")

    models = run_units(lambda corpus: fit_orders(corpus, nmax, alpha), list(corpora),
                       max_workers=max_workers, desc="Fitting n-grams")

    size = len(corpora)
    cells = [(i, j) for i in range(size) for j in range(size) if i != j]
    values = run_units(lambda cell: _average_kl(models[cell[0]], models[cell[1]]), cells,
                       max_workers=max_workers, desc="Textual divergence")

    matrix = np.zeros((size, size), dtype=np.float64)
    for (i, j), value in zip(cells, values):
        matrix[i, j] = value
    frame = pd.DataFrame(matrix, index=names, columns=names)
    logger.info("Textual divergence matrix over %d corpora (nmax=%d, alpha=%g)", size, nmax, alpha)
    return normalize_matrix(frame) if normalize else frame
