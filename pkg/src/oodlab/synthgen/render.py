"""
Deterministic text-line rendering.

Geometry is integer-only: nearest-neighbour glyph scaling, shear as a per-row integer
offset, dilation by pixel shifts. The only floating-point randomness is the pixel noise,
drawn from a generator seeded by the style.
"""

import logging
from typing import List, Tuple

import numpy as np
from sqlmodel import Field, SQLModel

from ..corpus.images import GrayImage
from ..errors import DataError, UsageError
from .font import BitmapFont

logger = logging.getLogger(__name__)

CANVAS_HEIGHT = 32
MARGIN = 4


class StyleParams(SQLModel):
    """Visual style of a synthetic domain"""
    scale: float = Field(default=1.0, gt=0)
    slant: float = 0.0                              # columns of shift per row, bottom row fixed
    ink: int = Field(default=0, ge=0, le=2)         # dilation radius
    noise_sigma: float = Field(default=0.0, ge=0)
    baseline_jitter: int = Field(default=0, ge=0)
    seed: int = Field(default=42, ge=0, lt=2 ** 64)
    paper: float = Field(default=1.0, ge=0, le=1)
    ink_level: float = Field(default=0.0, ge=0, le=1)
    height: int = Field(default=CANVAS_HEIGHT, ge=1)
    margin: int = Field(default=MARGIN, ge=0)


def _scaled(bitmap: np.ndarray, scale: float) -> np.ndarray:
    """Nearest-neighbour resize with source index floor(i · in / out)."""
    if scale == 1.0:
        return bitmap
    h, w = bitmap.shape
    out_h = max(1, int(round(h * scale)))
    out_w = int(round(w * scale)) if w else 0
    rows = (np.arange(out_h) * h) // out_h
    cols = (np.arange(out_w) * w) // out_w if out_w else np.zeros(0, dtype=np.int64)
    return bitmap[np.ix_(rows, cols)]


def _shear_offsets(height: int, slant: float) -> np.ndarray:
    """Integer right-shift per row; the bottom row stays put."""
    rise = (height - 1) - np.arange(height)
    return np.floor(slant * rise + 0.5).astype(np.int64)


def _dilate(mask: np.ndarray, radius: int) -> np.ndarray:
    if radius == 0:
        return mask
    h, w = mask.shape
    padded = np.pad(mask, radius)
    out = np.zeros_like(mask)
    for dy in range(2 * radius + 1):
        for dx in range(2 * radius + 1):
            out |= padded[dy:dy + h, dx:dx + w]
    return out


def _layout(text: str, font: BitmapFont, style: StyleParams,
            rng: np.random.Generator) -> Tuple[List[np.ndarray], List[int], int]:
    """Scaled glyphs, their vertical offsets and the inter-glyph gap"""
    glyphs = [_scaled(font.glyph(char), style.scale) for char in text]
    if style.baseline_jitter:
        jitter = rng.integers(-style.baseline_jitter, style.baseline_jitter + 1,
                              size=len(glyphs)).tolist()
    else:
        jitter = [0] * len(glyphs)
    gap = max(1, int(round(font.spacing * style.scale))) if font.spacing else 0
    return glyphs, jitter, gap


def render_line(text: str, font: BitmapFont, style: StyleParams) -> GrayImage:
    """
    Render one line of text.

    Glyphs are placed left to right with the font spacing, vertically centred on a canvas
    of style.height rows, then sheared, dilated and jittered. Noise is added last and the
    result clipped to [0, 1]. Identical (text, font, style) give identical pixels.

    Args:
        text: Line to render; every character needs a glyph
        font: Glyph set
        style: Rendering parameters

    Returns:
        GrayImage of style.height rows; paper where there is no ink

    Raises:
        DataError: a character has no glyph
        UsageError: the scaled glyphs do not fit the canvas height
    """
    missing = font.missing(text)
    if missing:
        raise DataError(f"no glyph for character(s): {', '.join(repr(c) for c in missing)}")

    rng = np.random.default_rng(style.seed)
    glyphs, jitter, gap = _layout(text, font, style, rng)
    height = style.height
    glyph_h = glyphs[0].shape[0] if glyphs else 0
    if glyph_h + 2 * style.baseline_jitter > height:
        raise UsageError(f"scaled glyph height {glyph_h} (jitter {style.baseline_jitter}) "
                         f"does not fit a canvas of height {height}")

    text_w = sum(g.shape[1] for g in glyphs) + gap * max(0, len(glyphs) - 1)
    offsets = _shear_offsets(height, style.slant)
    shear_w = int(offsets.max() - offsets.min()) if glyphs else 0
    width = text_w + shear_w + 2 * style.margin + 2 * style.ink
    width = max(width, 2 * style.margin, 1)

    mask = np.zeros((height, width), dtype=bool)
    top = (height - glyph_h) // 2
    x = style.margin + style.ink
    for glyph, dy in zip(glyphs, jitter):
        gh, gw = glyph.shape
        mask[top + dy:top + dy + gh, x:x + gw] |= glyph
        x += gw + gap

    if glyphs and shear_w:
        sheared = np.zeros_like(mask)
        shifts = offsets - offsets.min()
        for row, shift in enumerate(shifts):
            if shift:
                sheared[row, shift:] = mask[row, :width - shift]
            else:
                sheared[row] = mask[row]
        mask = sheared

    mask = _dilate(mask, style.ink)
    pixels = np.where(mask, style.ink_level, style.paper).astype(np.float64)
    if style.noise_sigma > 0:
        pixels = pixels + rng.normal(0.0, style.noise_sigma, size=pixels.shape)
        pixels = np.clip(pixels, 0.0, 1.0)
    return GrayImage.from_array(pixels)
