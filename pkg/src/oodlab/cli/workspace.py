"""
Workspace layout shared by the subcommands.

    <workspace>/
        domains.csv                 registered domains (name, language, manifest)
        alphabet.json               shared alphabet written by ingest
        domains/<name>/             synthetic domains written by synth
        textdiv/                    textual divergence matrices
        visdiv/params/<name>.oodae  trained autoencoders
        visdiv/history/<name>.json  training histories
        visdiv/                     visual divergence matrices
        eval/                       recognizer metrics reports
        analysis/                   factor and regression reports
        select/                     model-selection reports
        report/                     cross-domain summary tables
        metrics.csv                 assembled metrics table
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional

import pandas as pd

from ..config import RunConfig
from ..corpus.manifest import DatasetManifest, load_manifest
from ..errors import DataError, UsageError

logger = logging.getLogger(__name__)

REGISTRY_COLUMNS = ("name", "language", "manifest")
PARAMS_SUFFIX = ".oodae"


@dataclass
class Workspace:
    root: Path

    @classmethod
    def from_config(cls, config: RunConfig) -> "Workspace":
        return cls(root=Path(config.workspace))

    def path(self, *parts: str) -> Path:
        return self.root.joinpath(*parts)

    def directory(self, *parts: str) -> Path:
        path = self.path(*parts)
        path.mkdir(parents=True, exist_ok=True)
        return path

    @property
    def registry_file(self) -> Path:
        return self.path("domains.csv")

    def params_file(self, source: str) -> Path:
        return self.path("visdiv", "params", f"{source}{PARAMS_SUFFIX}")

    def history_file(self, source: str) -> Path:
        return self.path("visdiv", "history", f"{source}.json")

    # ------------------------------------------------------------------
    # Domain registry
    # ------------------------------------------------------------------

    def registered(self) -> pd.DataFrame:
        if not self.registry_file.is_file():
            return pd.DataFrame(columns=list(REGISTRY_COLUMNS))
        return pd.read_csv(self.registry_file, dtype=str, keep_default_na=False)

    def register(self, manifest: DatasetManifest, manifest_path: Path) -> None:
        """Add or replace a domain in domains.csv (rows kept sorted by name)."""
        frame = self.registered()
        frame = frame[frame["name"] != manifest.name]
        row = pd.DataFrame([{"name": manifest.name, "language": manifest.language,
                             "manifest": str(Path(manifest_path).resolve())}])
        frame = pd.concat([frame, row], ignore_index=True).sort_values("name", kind="stable")
        self.root.mkdir(parents=True, exist_ok=True)
        frame.to_csv(self.registry_file, index=False)
        logger.debug("Registered domain %s", manifest.name)

    def manifest_paths(self, config: RunConfig) -> List[Path]:
        """Manifests named in the configuration, else the registered ones."""
        if config.manifests:
            return config.require_manifests()
        frame = self.registered()
        if frame.empty:
            raise UsageError("no manifests given and no domains registered in "
                             f"{self.registry_file} (run ingest or synth first)")
        paths = [Path(p) for p in frame["manifest"]]
        missing = [str(p) for p in paths if not p.is_file()]
        if missing:
            raise DataError(f"registered manifest not found: {', '.join(missing)}")
        return paths

    def manifests(self, config: RunConfig) -> List[DatasetManifest]:
        loaded = [load_manifest(path) for path in self.manifest_paths(config)]
        names = [m.name for m in loaded]
        duplicates = sorted({n for n in names if names.count(n) > 1})
        if duplicates:
            raise DataError(f"duplicate domain name(s): {', '.join(duplicates)}")
        return loaded


def read_params_table(path: Path) -> Dict[str, float]:
    """Model parameter counts (columns model, params_millions) as a mapping"""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"parameter table not found: {path}")
    frame = pd.read_csv(path, dtype={"model": str})
    if not {"model", "params_millions"}.issubset(frame.columns):
        raise DataError(f"{path}: needs columns model, params_millions")
    return {str(m): float(p) for m, p in zip(frame["model"], frame["params_millions"])}


def parse_pairs(values: Optional[List[str]], flag: str, separator: str = ":") -> List[tuple]:
    """Split repeated KEY:VALUE flag values."""
    pairs = []
    for value in values or []:
        key, sep, rest = value.partition(separator)
        if not sep or not key or not rest:
            raise UsageError(f"{flag} expects KEY{separator}VALUE, got {value!r}")
        pairs.append((key, rest))
    return pairs
