"""
Pooled character and word error rates.

Both rates are micro-averages: total edits over total reference length, times 100.
WER can exceed 100 when hypotheses carry many inserted words.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence

from ..errors import DataError
from .edit_distance import levenshtein


@dataclass(frozen=True)
class PredictionRecord:
    """One recognized line with optional per-character confidences"""
    sample_id: str
    reference: str
    hypothesis: str
    confidences: Optional[tuple] = None

    def __post_init__(self):
        if self.confidences is not None:
            confidences = tuple(float(c) for c in self.confidences)
            if len(confidences) != len(self.hypothesis):
                raise DataError(
                    f"{self.sample_id}: {len(confidences)} confidences for a "
                    f"{len(self.hypothesis)}-character hypothesis"
                )
            if any(not 0.0 <= c <= 1.0 for c in confidences):
                raise DataError(f"{self.sample_id}: confidences must lie in [0, 1]")
            object.__setattr__(self, "confidences", confidences)

    @property
    def has_confidences(self) -> bool:
        return self.confidences is not None


def words(text: str) -> List[str]:
    """Whitespace tokenization; runs of whitespace are a single separator"""
    return text.split()


def corpus_cer(records: Sequence[PredictionRecord]) -> float:
    """
    100 · Σ levenshtein(ref, hyp) / Σ len(ref) over all records.

    Raises:
        DataError: no records, or every reference is empty
    """
    if not records:
        raise DataError("no prediction records")
    total = sum(len(r.reference) for r in records)
    if total == 0:
        raise DataError("all references are empty")
    edits = sum(levenshtein(r.reference, r.hypothesis) for r in records)
    return 100.0 * edits / total


def corpus_wer(records: Sequence[PredictionRecord]) -> float:
    """Same pooling as corpus_cer over whitespace-separated words"""
    if not records:
        raise DataError("no prediction records")
    refs = [words(r.reference) for r in records]
    total = sum(len(ref) for ref in refs)
    if total == 0:
        raise DataError("all references are empty")
    edits = sum(levenshtein(ref, words(r.hypothesis)) for ref, r in zip(refs, records))
    return 100.0 * edits / total
