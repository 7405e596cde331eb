"""Synthetic line rendering for desk-scale domain studies."""

from .domain import MANIFEST_NAME, STYLE_NAME, line_seed, make_domain, split_indices
from .font import FONT_5X7, BitmapFont
from .render import StyleParams, render_line
from .text import LANGUAGES, WORDS, sample_lines

__all__ = [
    "BitmapFont", "FONT_5X7", "StyleParams", "render_line",
    "make_domain", "split_indices", "line_seed", "MANIFEST_NAME", "STYLE_NAME",
    "sample_lines", "WORDS", "LANGUAGES",
]
