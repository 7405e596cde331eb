"""Dataset manifests, grayscale images and the shared evaluation alphabet."""

from .alphabet import (BOS, EOS, PAD, SPECIAL_TOKENS, UNK, Alphabet, build_alphabet,
                       normalize_text)
from .fold_table import FOLD_TABLE, fold_text
from .images import GrayImage, load_image, load_split_images, resize_image, save_image
from .manifest import (DatasetManifest, ManifestHeader, ManifestRecord, SampleRef,
                       load_manifest, write_manifest)

__all__ = [
    "Alphabet", "BOS", "EOS", "PAD", "UNK", "SPECIAL_TOKENS",
    "build_alphabet", "normalize_text", "FOLD_TABLE", "fold_text",
    "GrayImage", "load_image", "save_image", "resize_image", "load_split_images",
    "DatasetManifest", "ManifestHeader", "ManifestRecord", "SampleRef",
    "load_manifest", "write_manifest",
]
