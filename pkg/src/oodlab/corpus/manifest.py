"""
Dataset manifests.

A manifest is a UTF-8 JSON-lines file: one header line

    {"name": "iam", "language": "en"}

followed by one record per sample

    {"split": "train", "image": "images/000001.pgm", "text": "A MOVE to stop"}

Image paths are relative to the directory holding the manifest.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from pydantic import ValidationError, field_validator
from sqlmodel import Field, SQLModel

from ..config import Split
from ..errors import ManifestError

logger = logging.getLogger(__name__)


# ============================================================================
# On-disk records
# ============================================================================

class ManifestHeader(SQLModel):
    """First line of a manifest"""
    name: str = Field(min_length=1)
    language: str = Field(min_length=2, max_length=2, regex=r"^[a-z]{2}$")

    @field_validator("name", mode="before")
    @classmethod
    def _strip(cls, value):
        return value.strip() if isinstance(value, str) else value


class ManifestRecord(SQLModel):
    """One sample line of a manifest"""
    split: Split
    image: str = Field(min_length=1)
    text: str = Field(min_length=1)

    @field_validator("image", "text", mode="before")
    @classmethod
    def _strip(cls, value):
        return value.strip() if isinstance(value, str) else value


# ============================================================================
# In-memory types
# ============================================================================

@dataclass(frozen=True)
class SampleRef:
    """One (image, transcript) pair"""
    image_path: Path
    transcript: str


@dataclass
class DatasetManifest:
    """A domain: named splits of samples plus a language tag"""
    name: str
    language: str
    splits: Dict[Split, List[SampleRef]] = field(default_factory=dict)
    root: Path = Path(".")

    def split(self, split: Split) -> List[SampleRef]:
        return self.splits.get(Split(split), [])

    def texts(self, split: Split) -> List[str]:
        return [sample.transcript for sample in self.split(split)]

    def all_texts(self) -> List[str]:
        return [sample.transcript for samples in self.splits.values() for sample in samples]

    def split_sizes(self) -> Dict[str, int]:
        return {split.value: len(self.split(split)) for split in Split}

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "language": self.language,
            "root": str(self.root),
            "splits": {
                split.value: [
                    {"image": str(sample.image_path), "text": sample.transcript}
                    for sample in samples
                ]
                for split, samples in self.splits.items()
            },
        }


def _first_error(e: ValidationError) -> str:
    err = e.errors()[0]
    where = ".".join(str(part) for part in err["loc"]) or "record"
    return f"{where}: {err['msg']}"


def load_manifest(path: Path) -> DatasetManifest:
    """
    Read and validate a manifest file.

    Args:
        path: Path to the JSON-lines manifest

    Returns:
        DatasetManifest with image paths resolved against the manifest directory

    Raises:
        ManifestError: missing file, malformed record, duplicate image path or unknown
            split name; the message cites the offending line
    """
    path = Path(path)
    if not path.is_file():
        raise ManifestError(path, "manifest file not found")

    header: Optional[ManifestHeader] = None
    splits: Dict[Split, List[SampleRef]] = {}
    seen: Dict[Split, Dict[str, int]] = {}

    with open(path, "r", encoding="utf-8") as f:
        for line_no, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                payload = json.loads(line)
            except json.JSONDecodeError as e:
                raise ManifestError(path, f"invalid JSON ({e.msg})", line_no)
            if not isinstance(payload, dict):
                raise ManifestError(path, "expected a JSON object", line_no)

            if header is None:
                try:
                    header = ManifestHeader.model_validate(payload)
                except ValidationError as e:
                    raise ManifestError(path, f"bad header, {_first_error(e)}", line_no)
                continue

            split_name = payload.get("split")
            if split_name not in {split.value for split in Split}:
                raise ManifestError(path, f"unknown split name {split_name!r}", line_no)
            try:
                record = ManifestRecord.model_validate(payload)
            except ValidationError as e:
                raise ManifestError(path, f"malformed record, {_first_error(e)}", line_no)

            split_seen = seen.setdefault(record.split, {})
            if record.image in split_seen:
                raise ManifestError(
                    path,
                    f"duplicate image path {record.image!r} in split {record.split.value} "
                    f"(first seen on line {split_seen[record.image]})",
                    line_no,
                )
            split_seen[record.image] = line_no
            splits.setdefault(record.split, []).append(
                SampleRef(image_path=path.parent / record.image, transcript=record.text)
            )

    if header is None:
        raise ManifestError(path, "empty manifest (header line missing)")

    manifest = DatasetManifest(name=header.name, language=header.language,
                               splits=splits, root=path.parent)
    logger.info("Loaded manifest %s: %s", manifest.name, manifest.split_sizes())
    return manifest


def write_manifest(manifest: DatasetManifest, path: Path) -> Path:
    """
    Write a manifest in the JSON-lines format.

    Image paths are written relative to the manifest directory; splits appear in
    train, val, test order.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = ManifestHeader(name=manifest.name, language=manifest.language)
    lines = [json.dumps(header.model_dump(), ensure_ascii=False)]
    for split in Split:
        for sample in manifest.split(split):
            image = Path(sample.image_path)
            try:
                image = image.relative_to(path.parent)
            except ValueError:
                pass
            record = {"split": split.value, "image": image.as_posix(), "text": sample.transcript}
            lines.append(json.dumps(record, ensure_ascii=False))
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")
    return path
