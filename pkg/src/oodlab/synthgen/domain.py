"""
Synthetic domains: a text corpus rendered in one style, written as PGM images plus a
manifest and a style.json sidecar.
"""

import hashlib
import json
import logging
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

from ..batch import run_units
from ..config import Split
from ..corpus.images import save_image
from ..corpus.manifest import DatasetManifest, SampleRef, write_manifest
from ..errors import DataError
from .font import BitmapFont
from .render import StyleParams, render_line

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.jsonl"
STYLE_NAME = "style.json"
IMAGE_DIR = "images"

TRAIN_SHARE = 0.8
VAL_SHARE = 0.1


def _digest(text: str) -> bytes:
    return hashlib.sha256(text.encode("utf-8")).digest()


def line_seed(style_seed: int, index: int) -> int:
    """Per-line seed: the first 8 bytes of SHA-256("{style_seed}:{index}")"""
    return int.from_bytes(_digest(f"{style_seed}:{index}")[:8], "little")


def split_indices(n: int) -> Dict[Split, List[int]]:
    """
    80/10/10 split of line indices 0..n-1.

    Indices are ordered by the SHA-256 of their decimal form; the first floor(0.8n) go
    to train, the next floor(0.1n) to val, the rest to test. Each split is returned in
    ascending index order.
    """
    order = sorted(range(n), key=lambda i: _digest(str(i)))
    n_train = int(n * TRAIN_SHARE)
    n_val = int(n * VAL_SHARE)
    parts = {
        Split.TRAIN: order[:n_train],
        Split.VAL: order[n_train:n_train + n_val],
        Split.TEST: order[n_train + n_val:],
    }
    return {split: sorted(indices) for split, indices in parts.items()}


def make_domain(corpus: Sequence[str], font: BitmapFont, style: StyleParams, out_dir: Path,
                name: str, language: str = "en", max_workers: int = 1,
                show_progress: bool = False) -> DatasetManifest:
    """
    Render a corpus into a synthetic domain on disk.

    Args:
        corpus: Text lines, one sample each
        font: Glyph set
        style: Domain style; each line renders with a seed derived from style.seed
        out_dir: Directory receiving images/, manifest.jsonl and style.json
        name: Domain name written to the manifest header
        language: Two-letter language tag
        max_workers: Threads used for rendering

    Returns:
        The manifest that was written

    Raises:
        DataError: empty corpus, or lines with unmapped characters (all listed)
    """
    lines = list(corpus)
    if not lines:
        raise DataError("cannot build a domain from an empty corpus")
    unmapped = [(i, font.missing(line)) for i, line in enumerate(lines)]
    unmapped = [(i, chars) for i, chars in unmapped if chars]
    if unmapped:
        detail = "; ".join(f"line {i}: {''.join(chars)!r}" for i, chars in unmapped[:10])
        more = f" (and {len(unmapped) - 10} more)" if len(unmapped) > 10 else ""
        raise DataError(f"{len(unmapped)} line(s) have characters without glyphs: {detail}{more}")

    out_dir = Path(out_dir)
    image_dir = out_dir / IMAGE_DIR
    image_dir.mkdir(parents=True, exist_ok=True)

    def _render(unit: Tuple[int, str]) -> Path:
        index, text = unit
        line_style = style.model_copy(update={"seed": line_seed(style.seed, index)})
        return save_image(render_line(text, font, line_style), image_dir / f"{index:06d}.pgm")

    paths = run_units(_render, list(enumerate(lines)), max_workers=max_workers,
                      desc=f"Rendering {name}", show_progress=show_progress)

    splits = {
        split: [SampleRef(image_path=paths[i], transcript=lines[i]) for i in indices]
        for split, indices in split_indices(len(lines)).items()
    }
    manifest = DatasetManifest(name=name, language=language, splits=splits, root=out_dir)
    write_manifest(manifest, out_dir / MANIFEST_NAME)

    sidecar = {"name": name, "language": language, "num_lines": len(lines),
               "style": style.model_dump(), "font": font.to_dict()}
    with open(out_dir / STYLE_NAME, "w", encoding="utf-8", newline="\n") as f:
        json.dump(sidecar, f, indent=2, sort_keys=True)
        f.write("\n")

    logger.info("Built synthetic domain %s in %s: %s", name, out_dir, manifest.split_sizes())
    return manifest
