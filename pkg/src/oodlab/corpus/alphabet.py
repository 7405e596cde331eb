"""
Unified evaluation alphabet and transcript normalization.

All datasets share one alphabet built from the union of their (folded) transcripts.
Symbols are ordered by code point after the four special tokens.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, Sequence, Tuple, Union

from ..errors import DataError
from .fold_table import FOLD_TABLE, fold_text
from .manifest import DatasetManifest

BOS = "[BOS]"
PAD = "[PAD]"
UNK = "[UNK]"
EOS = "[EOS]"

SPECIAL_TOKENS = (BOS, PAD, UNK, EOS)


@dataclass(frozen=True)
class Alphabet:
    """Ordered symbol inventory with the four special tokens"""
    symbols: Tuple[str, ...]
    specials: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if len(set(self.symbols)) != len(self.symbols):
            raise DataError("alphabet contains duplicate symbols")
        specials = self.specials or {
            token: self.symbols.index(token) for token in SPECIAL_TOKENS if token in self.symbols
        }
        missing = [token for token in SPECIAL_TOKENS if token not in specials]
        if missing:
            raise DataError(f"alphabet is missing special tokens: {', '.join(missing)}")
        if len(set(specials.values())) != len(SPECIAL_TOKENS):
            raise DataError("special tokens must occupy distinct indices")
        for token, index in specials.items():
            if not 0 <= index < len(self.symbols) or self.symbols[index] != token:
                raise DataError(f"special token {token} is not at index {index}")
        object.__setattr__(self, "specials", dict(specials))
        object.__setattr__(self, "_index", {symbol: i for i, symbol in enumerate(self.symbols)})

    def __len__(self) -> int:
        return len(self.symbols)

    def __contains__(self, symbol: str) -> bool:
        return symbol in self._index

    def index(self, symbol: str) -> int:
        return self._index.get(symbol, self.specials[UNK])

    @property
    def characters(self) -> Tuple[str, ...]:
        """Symbols without the special tokens"""
        return tuple(symbol for symbol in self.symbols if symbol not in SPECIAL_TOKENS)

    def to_dict(self) -> dict:
        return {"symbols": list(self.symbols), "specials": dict(self.specials)}

    @classmethod
    def from_characters(cls, characters: Iterable[str]) -> "Alphabet":
        """Specials first, then the characters sorted by code point."""
        chars = sorted(set(characters) - set(SPECIAL_TOKENS))
        return cls(symbols=SPECIAL_TOKENS + tuple(chars))


def build_alphabet(corpora: Sequence[DatasetManifest]) -> Alphabet:
    """
    Build the shared alphabet from every transcript of every split.

    Args:
        corpora: One or more dataset manifests

    Returns:
        Alphabet of the four specials plus every folded character, sorted by code point
    """
    if not corpora:
        raise DataError("build_alphabet needs at least one corpus")
    characters = set()
    for manifest in corpora:
        for text in manifest.all_texts():
            characters.update(fold_text(text))
    return Alphabet.from_characters(characters)


def normalize_text(raw: Union[str, Sequence[str]], alphabet: Alphabet) -> Tuple[str, ...]:
    """
    Map a transcript onto the alphabet.

    Each character is kept when it is an alphabet symbol, replaced by its fold when
    every folded character is in the alphabet, and replaced by [UNK] otherwise.
    Special tokens pass through, so the function is idempotent on its own output.

    Args:
        raw: A string, or an already-normalized token sequence
        alphabet: Target alphabet

    Returns:
        Tuple of alphabet symbols
    """
    tokens = []
    for char in raw:
        if char in SPECIAL_TOKENS:
            tokens.append(char if char in alphabet else UNK)
        elif char in alphabet:
            tokens.append(char)
        else:
            folded = FOLD_TABLE.get(char)
            if folded and all(piece in alphabet for piece in folded):
                tokens.extend(folded)
            else:
                tokens.append(UNK)
    return tuple(tokens)
