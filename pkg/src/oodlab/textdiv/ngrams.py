"""
Character n-gram models.

A corpus is a list of lines; each line is a string or a sequence of alphabet symbols
(so "[UNK]" counts as a single symbol). N-grams never cross line boundaries.
"""

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np

from ..config import DEFAULT_ALPHA
from ..errors import DataError, UsageError

Line = Union[str, Sequence[str]]
Ngram = Tuple[str, ...]

MAX_ORDER = 5


@dataclass
class NgramModel:
    """Counts of every contiguous length-n substring plus the smoothing mass"""
    order: int
    counts: Counter = field(default_factory=Counter)
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self):
        if not 1 <= self.order <= MAX_ORDER:
            raise UsageError(f"n-gram order must be between 1 and {MAX_ORDER}, got {self.order}")
        if self.alpha < 0:
            raise UsageError(f"smoothing alpha must be nonnegative, got {self.alpha}")
        if any(count < 0 for count in self.counts.values()):
            raise DataError("n-gram counts must be nonnegative")

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def vocab(self) -> set:
        """N-grams observed at least once"""
        return {gram for gram, count in self.counts.items() if count > 0}

    def probabilities(self, support: Sequence[Ngram]) -> np.ndarray:
        """
        Additive-smoothed probabilities over an evaluation support.

        p(j) = (c(j) + alpha) / (N + alpha * |support|)

        Raises:
            DataError: the model carries no mass on the support (alpha=0 and no counts)
        """
        counts = np.array([self.counts.get(gram, 0) for gram in support], dtype=np.float64)
        mass = counts.sum() + self.alpha * len(support)
        if len(support) and mass <= 0:
            raise DataError(f"order-{self.order} model has no n-grams and alpha=0")
        return (counts + self.alpha) / mass if len(support) else counts


def line_ngrams(line: Line, n: int) -> Iterable[Ngram]:
    symbols = tuple(line)
    return (symbols[i:i + n] for i in range(len(symbols) - n + 1))


def fit_ngrams(corpus: Sequence[Line], n: int, alpha: float = DEFAULT_ALPHA) -> NgramModel:
    """
    Count n-grams of one order over a corpus.

    Args:
        corpus: Normalized lines
        n: Order (1..5)
        alpha: Smoothing mass per n-gram used when deriving probabilities

    Returns:
        NgramModel whose total equals the sum over lines of max(len - n + 1, 0)

    Raises:
        DataError: the corpus has no lines or only empty lines
    """
    if not corpus or all(len(line) == 0 for line in corpus):
        raise DataError("cannot fit n-grams on an empty corpus")
    counts: Counter = Counter()
    for line in corpus:
        counts.update(line_ngrams(line, n))
    return NgramModel(order=n, counts=counts, alpha=alpha)


def fit_orders(corpus: Sequence[Line], nmax: int, alpha: float = DEFAULT_ALPHA) -> List[NgramModel]:
    """Models of every order 1..nmax for one corpus"""
    return [fit_ngrams(corpus, n, alpha) for n in range(1, nmax + 1)]
