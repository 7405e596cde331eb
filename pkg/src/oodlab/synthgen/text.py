"""Synthetic text lines from small embedded word lists."""

from typing import Dict, List, Tuple

import numpy as np

from ..corpus.fold_table import fold_text
from ..errors import UsageError

MIN_WORDS = 3
MAX_WORDS = 7


# ============================================================================
# WORD LISTS (folded to ASCII before use)
# ============================================================================

WORDS: Dict[str, Tuple[str, ...]] = {
    "en": (
        "the", "of", "and", "to", "in", "that", "was", "his", "with", "for", "had",
        "which", "from", "they", "have", "were", "their", "been", "would", "there",
        "when", "what", "should", "through", "thought", "right", "house", "letter",
        "morning", "church", "little", "great", "people", "year", "water", "before",
        "every", "against", "might", "brought", "company", "order", "know", "shall",
        "these", "young", "while", "together", "nothing", "anything", "whether",
        "friend", "country", "herself", "himself", "myself", "town", "king", "white",
    ),
    "fr": (
        "le", "la", "les", "des", "une", "que", "qui", "dans", "pour", "pas", "sur",
        "est", "avec", "sont", "mais", "nous", "vous", "leur", "elle", "cette",
        "aussi", "comme", "fait", "peut", "entre", "depuis", "toujours", "chez",
        "maison", "monsieur", "madame", "lettre", "jour", "nuit", "enfant", "beaucoup",
        "demande", "dossier", "contrat", "assurance", "veuillez", "agréer", "salutations",
        "être", "déjà", "après", "très", "où", "français", "élève", "général", "époque",
        "heureux", "quelque", "chose", "pourquoi", "ainsi", "seulement", "encore",
    ),
    "es": (
        "el", "la", "los", "las", "del", "que", "por", "con", "una", "para", "como",
        "pero", "sus", "este", "esta", "entre", "cuando", "muy", "sin", "sobre",
        "también", "hasta", "donde", "quien", "desde", "todo", "nos", "durante",
        "señor", "señora", "reino", "caballero", "batalla", "castillo", "ciudad",
        "historia", "rey", "después", "así", "año", "niño", "corazón", "tierra",
        "guerra", "pueblo", "camino", "mucho", "tiempo", "hombre", "mujer", "noche",
        "mañana", "dijo", "hizo", "nuestro", "vuestro", "siempre", "fuerza", "cosa",
    ),
    "de": (
        "der", "die", "das", "und", "nicht", "ist", "ein", "eine", "mit", "sich",
        "auf", "für", "dem", "den", "auch", "wird", "nach", "wie", "aber", "oder",
        "wenn", "noch", "über", "schon", "durch", "zwischen", "gegen", "während",
        "müssen", "können", "würde", "große", "straße", "schloss", "herr", "frau",
        "kaiser", "stadt", "brief", "zeit", "jahr", "kirche", "hause", "morgen",
        "abend", "schön", "früh", "immer", "wieder", "diese", "jener", "welche",
        "landes", "rechte", "könig", "gnädig", "heute", "niemand", "alles", "nichts",
    ),
    "la": (
        "et", "in", "est", "non", "cum", "ad", "ut", "quod", "sed", "qui", "quae",
        "esse", "sunt", "enim", "autem", "per", "ab", "ex", "de", "nec", "atque",
        "etiam", "tamen", "deus", "dominus", "rex", "regis", "populus", "urbs",
        "terra", "caelum", "anima", "corpus", "gratia", "pater", "filius", "spiritus",
        "sanctus", "ecclesia", "episcopus", "anno", "domini", "omnia", "magnus",
        "bellum", "pax", "lex", "verbum", "liber", "tempus", "nomine", "vita",
        "mundi", "fides", "amen", "hodie", "semper", "nunc", "ergo", "igitur",
    ),
}

LANGUAGES = tuple(WORDS)


def sample_lines(language: str, count: int, seed: int) -> List[str]:
    """
    Draw text lines of 3 to 7 words from a language's word list.

    Args:
        language: One of en, fr, es, de, la
        count: Number of lines
        seed: Generator seed; equal seeds give equal lines

    Returns:
        ASCII lines (accented letters folded), first word capitalized
    """
    if language not in WORDS:
        raise UsageError(f"no word list for language {language!r} "
                         f"(choose from {', '.join(LANGUAGES)})")
    if count < 0:
        raise UsageError("line count must be nonnegative")
    vocabulary = [fold_text(word) for word in WORDS[language]]
    rng = np.random.default_rng(seed)
    lines = []
    for _ in range(count):
        size = int(rng.integers(MIN_WORDS, MAX_WORDS + 1))
        picked = [vocabulary[int(i)] for i in rng.integers(0, len(vocabulary), size=size)]
        line = " ".join(picked)
        lines.append(line[0].upper() + line[1:])
    return lines
