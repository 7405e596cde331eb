"""
Embedded 5×7 bitmap font for printable ASCII.

Each glyph is five column bytes; bit 0 is the top row, bit 6 the bottom row. Blank
columns at either side are trimmed when the font is built so glyph widths vary; the
space keeps a fixed width.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, List

import numpy as np

from ..errors import DataError, UsageError

GLYPH_ROWS = 7
SPACE_WIDTH = 3


# ============================================================================
# GLYPH TABLE (0x20 - 0x7E)
# ============================================================================

FONT_5X7: Dict[str, bytes] = {
    " ": bytes((0x00, 0x00, 0x00, 0x00, 0x00)),
    "!": bytes((0x00, 0x00, 0x5F, 0x00, 0x00)),
    '"': bytes((0x00, 0x07, 0x00, 0x07, 0x00)),
    "#": bytes((0x14, 0x7F, 0x14, 0x7F, 0x14)),
    "$": bytes((0x24, 0x2A, 0x7F, 0x2A, 0x12)),
    "%": bytes((0x23, 0x13, 0x08, 0x64, 0x62)),
    "&": bytes((0x36, 0x49, 0x55, 0x22, 0x50)),
    "'": bytes((0x00, 0x05, 0x03, 0x00, 0x00)),
    "(": bytes((0x00, 0x1C, 0x22, 0x41, 0x00)),
    ")": bytes((0x00, 0x41, 0x22, 0x1C, 0x00)),
    "*": bytes((0x14, 0x08, 0x3E, 0x08, 0x14)),
    "+": bytes((0x08, 0x08, 0x3E, 0x08, 0x08)),
    ",": bytes((0x00, 0x50, 0x30, 0x00, 0x00)),
    "-": bytes((0x08, 0x08, 0x08, 0x08, 0x08)),
    ".": bytes((0x00, 0x60, 0x60, 0x00, 0x00)),
    "/": bytes((0x20, 0x10, 0x08, 0x04, 0x02)),
    "0": bytes((0x3E, 0x51, 0x49, 0x45, 0x3E)),
    "1": bytes((0x00, 0x42, 0x7F, 0x40, 0x00)),
    "2": bytes((0x42, 0x61, 0x51, 0x49, 0x46)),
    "3": bytes((0x21, 0x41, 0x45, 0x4B, 0x31)),
    "4": bytes((0x18, 0x14, 0x12, 0x7F, 0x10)),
    "5": bytes((0x27, 0x45, 0x45, 0x45, 0x39)),
    "6": bytes((0x3C, 0x4A, 0x49, 0x49, 0x30)),
    "7": bytes((0x01, 0x71, 0x09, 0x05, 0x03)),
    "8": bytes((0x36, 0x49, 0x49, 0x49, 0x36)),
    "9": bytes((0x06, 0x49, 0x49, 0x29, 0x1E)),
    ":": bytes((0x00, 0x36, 0x36, 0x00, 0x00)),
    ";": bytes((0x00, 0x56, 0x36, 0x00, 0x00)),
    "<": bytes((0x08, 0x14, 0x22, 0x41, 0x00)),
    "=": bytes((0x14, 0x14, 0x14, 0x14, 0x14)),
    ">": bytes((0x00, 0x41, 0x22, 0x14, 0x08)),
    "?": bytes((0x02, 0x01, 0x51, 0x09, 0x06)),
    "@": bytes((0x32, 0x49, 0x79, 0x41, 0x3E)),
    "A": bytes((0x7E, 0x11, 0x11, 0x11, 0x7E)),
    "B": bytes((0x7F, 0x49, 0x49, 0x49, 0x36)),
    "C": bytes((0x3E, 0x41, 0x41, 0x41, 0x22)),
    "D": bytes((0x7F, 0x41, 0x41, 0x22, 0x1C)),
    "E": bytes((0x7F, 0x49, 0x49, 0x49, 0x41)),
    "F": bytes((0x7F, 0x09, 0x09, 0x09, 0x01)),
    "G": bytes((0x3E, 0x41, 0x49, 0x49, 0x7A)),
    "H": bytes((0x7F, 0x08, 0x08, 0x08, 0x7F)),
    "I": bytes((0x00, 0x41, 0x7F, 0x41, 0x00)),
    "J": bytes((0x20, 0x40, 0x41, 0x3F, 0x01)),
    "K": bytes((0x7F, 0x08, 0x14, 0x22, 0x41)),
    "L": bytes((0x7F, 0x40, 0x40, 0x40, 0x40)),
    "M": bytes((0x7F, 0x02, 0x0C, 0x02, 0x7F)),
    "N": bytes((0x7F, 0x04, 0x08, 0x10, 0x7F)),
    "O": bytes((0x3E, 0x41, 0x41, 0x41, 0x3E)),
    "P": bytes((0x7F, 0x09, 0x09, 0x09, 0x06)),
    "Q": bytes((0x3E, 0x41, 0x51, 0x21, 0x5E)),
    "R": bytes((0x7F, 0x09, 0x19, 0x29, 0x46)),
    "S": bytes((0x46, 0x49, 0x49, 0x49, 0x31)),
    "T": bytes((0x01, 0x01, 0x7F, 0x01, 0x01)),
    "U": bytes((0x3F, 0x40, 0x40, 0x40, 0x3F)),
    "V": bytes((0x1F, 0x20, 0x40, 0x20, 0x1F)),
    "W": bytes((0x3F, 0x40, 0x38, 0x40, 0x3F)),
    "X": bytes((0x63, 0x14, 0x08, 0x14, 0x63)),
    "Y": bytes((0x07, 0x08, 0x70, 0x08, 0x07)),
    "Z": bytes((0x61, 0x51, 0x49, 0x45, 0x43)),
    "[": bytes((0x00, 0x7F, 0x41, 0x41, 0x00)),
    "\\": bytes((0x02, 0x04, 0x08, 0x10, 0x20)),
    "]": bytes((0x00, 0x41, 0x41, 0x7F, 0x00)),
    "^": bytes((0x04, 0x02, 0x01, 0x02, 0x04)),
    "_": bytes((0x40, 0x40, 0x40, 0x40, 0x40)),
    "`": bytes((0x00, 0x01, 0x02, 0x04, 0x00)),
    "a": bytes((0x20, 0x54, 0x54, 0x54, 0x78)),
    "b": bytes((0x7F, 0x48, 0x44, 0x44, 0x38)),
    "c": bytes((0x38, 0x44, 0x44, 0x44, 0x20)),
    "d": bytes((0x38, 0x44, 0x44, 0x48, 0x7F)),
    "e": bytes((0x38, 0x54, 0x54, 0x54, 0x18)),
    "f": bytes((0x08, 0x7E, 0x09, 0x01, 0x02)),
    "g": bytes((0x0C, 0x52, 0x52, 0x52, 0x3E)),
    "h": bytes((0x7F, 0x08, 0x04, 0x04, 0x78)),
    "i": bytes((0x00, 0x44, 0x7D, 0x40, 0x00)),
    "j": bytes((0x20, 0x40, 0x44, 0x3D, 0x00)),
    "k": bytes((0x7F, 0x10, 0x28, 0x44, 0x00)),
    "l": bytes((0x00, 0x41, 0x7F, 0x40, 0x00)),
    "m": bytes((0x7C, 0x04, 0x18, 0x04, 0x78)),
    "n": bytes((0x7C, 0x08, 0x04, 0x04, 0x78)),
    "o": bytes((0x38, 0x44, 0x44, 0x44, 0x38)),
    "p": bytes((0x7C, 0x14, 0x14, 0x14, 0x08)),
    "q": bytes((0x08, 0x14, 0x14, 0x18, 0x7C)),
    "r": bytes((0x7C, 0x08, 0x04, 0x04, 0x08)),
    "s": bytes((0x48, 0x54, 0x54, 0x54, 0x20)),
    "t": bytes((0x04, 0x3F, 0x44, 0x40, 0x20)),
    "u": bytes((0x3C, 0x40, 0x40, 0x20, 0x7C)),
    "v": bytes((0x1C, 0x20, 0x40, 0x20, 0x1C)),
    "w": bytes((0x3C, 0x40, 0x30, 0x40, 0x3C)),
    "x": bytes((0x44, 0x28, 0x10, 0x28, 0x44)),
    "y": bytes((0x0C, 0x50, 0x50, 0x50, 0x3C)),
    "z": bytes((0x44, 0x64, 0x54, 0x4C, 0x44)),
    "{": bytes((0x00, 0x08, 0x36, 0x41, 0x00)),
    "|": bytes((0x00, 0x00, 0x7F, 0x00, 0x00)),
    "}": bytes((0x00, 0x41, 0x36, 0x08, 0x00)),
    "~": bytes((0x10, 0x08, 0x08, 0x10, 0x08)),
}


def _column_bitmap(columns: bytes) -> np.ndarray:
    """7 × 5 boolean bitmap from column bytes (bit 0 at the top)"""
    rows = np.arange(GLYPH_ROWS)
    return np.array([[(col >> row) & 1 for col in columns] for row in rows], dtype=bool)


def _trim(bitmap: np.ndarray) -> np.ndarray:
    used = np.flatnonzero(bitmap.any(axis=0))
    if used.size == 0:
        return bitmap[:, :0]
    return bitmap[:, used[0]:used[-1] + 1]


@dataclass
class BitmapFont:
    """Boolean glyph bitmaps of uniform height"""
    height: int
    glyphs: Dict[str, np.ndarray] = field(default_factory=dict)
    spacing: int = 1
    name: str = "embedded-5x7"

    def __post_init__(self):
        for char, bitmap in self.glyphs.items():
            if bitmap.ndim != 2 or bitmap.shape[0] != self.height:
                raise DataError(f"glyph {char!r} has height {bitmap.shape[0]}, "
                                f"expected {self.height}")

    def __contains__(self, char: str) -> bool:
        return char in self.glyphs

    def glyph(self, char: str) -> np.ndarray:
        try:
            return self.glyphs[char]
        except KeyError:
            raise DataError(f"no glyph for character {char!r}")

    def missing(self, text: Iterable[str]) -> List[str]:
        """Characters of text that have no glyph, in first-seen order"""
        return list(dict.fromkeys(char for char in text if char not in self.glyphs))

    def to_dict(self) -> dict:
        return {"name": self.name, "height": self.height, "spacing": self.spacing,
                "num_glyphs": len(self.glyphs)}

    @classmethod
    def default(cls, upscale: int = 2) -> "BitmapFont":
        """The embedded font, each pixel blown up to an upscale × upscale block."""
        if upscale < 1:
            raise UsageError("upscale must be at least 1")
        block = np.ones((upscale, upscale), dtype=bool)
        glyphs = {}
        for char, columns in FONT_5X7.items():
            bitmap = _trim(_column_bitmap(columns))
            if char == " ":
                bitmap = np.zeros((GLYPH_ROWS, SPACE_WIDTH), dtype=bool)
            glyphs[char] = np.kron(bitmap, block).astype(bool)
        return cls(height=GLYPH_ROWS * upscale, glyphs=glyphs, spacing=upscale,
                   name=f"embedded-5x7x{upscale}")
