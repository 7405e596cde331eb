"""Character n-gram distributions and averaged-KL textual divergence."""

from .divergence import divergence_matrix, kl_divergence, normalize_matrix, textual_divergence
from .ngrams import NgramModel, fit_ngrams, fit_orders

__all__ = [
    "NgramModel", "fit_ngrams", "fit_orders",
    "kl_divergence", "textual_divergence", "divergence_matrix", "normalize_matrix",
]
