"""
ASCII fold table for transcript normalization.

Maps Latin-1 letters, common typographic punctuation and a few ligatures to plain
ASCII. Characters absent from the table are left to the alphabet: they survive when
the alphabet contains them and become [UNK] otherwise.

The table is fixed so normalization is deterministic across machines.
"""

from typing import Dict


# ============================================================================
# LATIN-1 LETTERS
# ============================================================================

LATIN1_FOLDS: Dict[str, str] = {
    # A
    "À": "A", "Á": "A", "Â": "A", "Ã": "A", "Ä": "A", "Å": "A", "Æ": "AE",
    "à": "a", "á": "a", "â": "a", "ã": "a", "ä": "a", "å": "a", "æ": "ae",
    # C / D
    "Ç": "C", "ç": "c", "Ð": "D", "ð": "d",
    # E
    "È": "E", "É": "E", "Ê": "E", "Ë": "E",
    "è": "e", "é": "e", "ê": "e", "ë": "e",
    # I
    "Ì": "I", "Í": "I", "Î": "I", "Ï": "I",
    "ì": "i", "í": "i", "î": "i", "ï": "i",
    # N / O
    "Ñ": "N", "ñ": "n",
    "Ò": "O", "Ó": "O", "Ô": "O", "Õ": "O", "Ö": "O", "Ø": "O",
    "ò": "o", "ó": "o", "ô": "o", "õ": "o", "ö": "o", "ø": "o",
    # U / Y
    "Ù": "U", "Ú": "U", "Û": "U", "Ü": "U",
    "ù": "u", "ú": "u", "û": "u", "ü": "u",
    "Ý": "Y", "ý": "y", "ÿ": "y",
    # Others
    "Þ": "Th", "þ": "th", "ß": "ss",
}


# ============================================================================
# LATIN EXTENDED (frequent in historical transcriptions)
# ============================================================================

EXTENDED_FOLDS: Dict[str, str] = {
    "Œ": "OE", "œ": "oe",
    "Š": "S", "š": "s", "Ž": "Z", "ž": "z", "Ÿ": "Y",
    "ſ": "s",                     # long s
    "ﬁ": "fi", "ﬂ": "fl", "ﬀ": "ff",
    "ā": "a", "ē": "e", "ī": "i", "ō": "o", "ū": "u",   # macrons (Latin)
    "ą": "a", "ę": "e", "ł": "l", "ń": "n", "ś": "s", "ź": "z", "ż": "z",
}


# ============================================================================
# PUNCTUATION AND SPACING
# ============================================================================

PUNCTUATION_FOLDS: Dict[str, str] = {
    "‘": "'", "’": "'", "‚": "'", "‛": "'", "´": "'",
    "“": '"', "”": '"', "„": '"', "«": '"', "»": '"',
    "‐": "-", "‑": "-", "‒": "-", "–": "-", "—": "-", "―": "-", "¬": "-",
    "…": "...",
    "•": "*", "·": ".",
    "¡": "!", "¿": "?",
    "×": "x", "÷": "/",
    " ": " ",                # no-break space
    " ": " ",                # thin space
    "\t": " ",
}


FOLD_TABLE: Dict[str, str] = {**LATIN1_FOLDS, **EXTENDED_FOLDS, **PUNCTUATION_FOLDS}


def fold_char(char: str) -> str:
    """Fold a single character; characters without an entry are returned unchanged."""
    return FOLD_TABLE.get(char, char)


def fold_text(text: str) -> str:
    """Fold every character of a string."""
    return "".join(fold_char(char) for char in text)
