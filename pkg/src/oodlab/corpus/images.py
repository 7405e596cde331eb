"""
Grayscale line images.

The canonical on-disk format is binary PGM (P5) with a max value of 255. Pixels are held
as float64 intensities in [0, 1], 0 being black ink and 1 white paper.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple

import numpy as np

from ..config import Split
from ..errors import DataError, UsageError
from .manifest import DatasetManifest

logger = logging.getLogger(__name__)

PGM_MAGIC = b"P5"
PGM_MAXVAL = 255


@dataclass
class GrayImage:
    """A height × width grid of intensities in [0, 1]"""
    height: int
    width: int
    pixels: np.ndarray

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=np.float64)
        if self.pixels.ndim == 1:
            if self.pixels.size != self.height * self.width:
                raise DataError(
                    f"pixel buffer holds {self.pixels.size} values, "
                    f"expected {self.height}x{self.width}"
                )
            self.pixels = self.pixels.reshape(self.height, self.width)
        if self.pixels.shape != (self.height, self.width):
            raise DataError(f"pixel array has shape {self.pixels.shape}, "
                            f"expected ({self.height}, {self.width})")
        if self.pixels.size and (self.pixels.min() < 0.0 or self.pixels.max() > 1.0):
            raise DataError("pixel intensities must lie in [0, 1]")

    @classmethod
    def from_array(cls, array: np.ndarray) -> "GrayImage":
        array = np.asarray(array, dtype=np.float64)
        if array.ndim != 2:
            raise DataError(f"expected a 2-D array, got shape {array.shape}")
        return cls(height=array.shape[0], width=array.shape[1], pixels=array)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.height, self.width

    def quantized(self) -> np.ndarray:
        """8-bit representation as written to disk"""
        return np.round(self.pixels * PGM_MAXVAL).astype(np.uint8)


def _read_header(data: bytes, path: Path) -> Tuple[int, int, int, int]:
    """Parse magic, width, height and maxval; return them with the payload offset."""
    if data[:2] != PGM_MAGIC:
        raise DataError(f"{path}: unsupported magic number {data[:2]!r} (expected P5)")

    tokens = []
    pos = 2
    while len(tokens) < 3:
        if pos >= len(data):
            raise DataError(f"{path}: truncated header")
        byte = data[pos:pos + 1]
        if byte == b"#":
            end = data.find(b"\n", pos)
            pos = len(data) if end < 0 else end + 1
        elif byte.isspace():
            pos += 1
        else:
            start = pos
            while pos < len(data) and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
                pos += 1
            token = data[start:pos]
            if not token.isdigit():
                raise DataError(f"{path}: malformed header field {token!r}")
            tokens.append(int(token))

    # exactly one whitespace byte separates maxval from the raster
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise DataError(f"{path}: truncated header")
    width, height, maxval = tokens
    return width, height, maxval, pos + 1


def load_image(path: Path) -> GrayImage:
    """
    Read a binary 8-bit PGM file.

    Args:
        path: Path to a P5 file with max value 255

    Returns:
        GrayImage with intensities scaled by 1/255

    Raises:
        DataError: unsupported magic number or max value, truncated payload
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except FileNotFoundError:
        raise DataError(f"image not found: {path}")

    width, height, maxval, offset = _read_header(data, path)
    if maxval != PGM_MAXVAL:
        raise DataError(f"{path}: unsupported max value {maxval} (expected {PGM_MAXVAL})")
    if width < 1 or height < 1:
        raise DataError(f"{path}: empty image ({width}x{height})")

    expected = width * height
    payload = data[offset:offset + expected]
    if len(payload) < expected:
        raise DataError(f"{path}: truncated payload ({len(payload)} of {expected} bytes)")

    raster = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
    return GrayImage(height=height, width=width, pixels=raster / float(PGM_MAXVAL))


def save_image(img: GrayImage, path: Path) -> Path:
    """Write a GrayImage as binary PGM, quantizing each intensity to round(p * 255)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = f"P5\n{img.width} {img.height}\n{PGM_MAXVAL}\n".encode("ascii")
    with open(path, "wb") as f:
        f.write(header)
        f.write(img.quantized().tobytes())
    return path


def _source_coords(out_size: int, in_size: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Half-pixel-centred source coordinates: lower index, upper index and weight."""
    coords = (np.arange(out_size, dtype=np.float64) + 0.5) * (in_size / out_size) - 0.5
    coords = np.clip(coords, 0.0, in_size - 1)
    lower = np.floor(coords).astype(np.int64)
    upper = np.minimum(lower + 1, in_size - 1)
    return lower, upper, coords - lower


def resize_image(img: GrayImage, h: int, w: int) -> GrayImage:
    """
    Bilinear resize to exactly (h, w).

    Sample positions use pixel centres, so resizing to the same size is the identity
    and every output value is a convex combination of input values.

    Raises:
        UsageError: non-positive target size
    """
    if h < 1 or w < 1:
        raise UsageError(f"target size must be positive, got {h}x{w}")
    if (h, w) == img.shape:
        return GrayImage(height=h, width=w, pixels=img.pixels.copy())

    y0, y1, wy = _source_coords(h, img.height)
    x0, x1, wx = _source_coords(w, img.width)
    src = img.pixels

    top = src[y0][:, x0] * (1.0 - wx) + src[y0][:, x1] * wx
    bottom = src[y1][:, x0] * (1.0 - wx) + src[y1][:, x1] * wx
    out = top * (1.0 - wy)[:, None] + bottom * wy[:, None]
    return GrayImage(height=h, width=w, pixels=np.clip(out, 0.0, 1.0))


def load_split_images(manifest: DatasetManifest, split: Split, h: int, w: int) -> np.ndarray:
    """
    Load and resize every image of a split.

    Returns:
        float64 array of shape (N, h, w) in manifest order
    """
    samples = manifest.split(split)
    if not samples:
        raise DataError(f"{manifest.name}: split {Split(split).value} is empty")
    stack = np.empty((len(samples), h, w), dtype=np.float64)
    for i, sample in enumerate(samples):
        stack[i] = resize_image(load_image(sample.image_path), h, w).pixels
    logger.debug("Loaded %d %s images from %s", len(samples), Split(split).value, manifest.name)
    return stack
