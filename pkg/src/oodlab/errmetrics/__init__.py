"""Character/word error rates and character-level calibration of recognizer outputs."""

from .calibration import ece, mce, reliability_table, scored_characters
from .edit_distance import AlignedPair, EditOp, align, levenshtein
from .predictions import load_predictions, write_predictions
from .rates import PredictionRecord, corpus_cer, corpus_wer

__all__ = [
    "levenshtein", "align", "AlignedPair", "EditOp",
    "PredictionRecord", "corpus_cer", "corpus_wer",
    "ece", "mce", "reliability_table", "scored_characters",
    "load_predictions", "write_predictions",
]
