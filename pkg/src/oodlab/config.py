"""
Centralized Configuration for oodlab

This module defines the standardized vocabulary shared by every part of the toolkit:
split names, model-selection strategies, evaluation protocols, metric column names
and the run configuration read from TOML files and command-line flags.

Precedence for run settings (lowest to highest):
- defaults declared on RunConfig
- the TOML config file (--config)
- command-line flags
- the OODLAB_SEED environment variable (seed only)
"""

import os
import tomllib
from enum import Enum, IntEnum
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

from pydantic import ValidationError, field_validator
from sqlmodel import Field, SQLModel

from .errors import DataError, UsageError


# ============================================================================
# STANDARDIZED NAMES
# ============================================================================

class Split(str, Enum):
    """Dataset split names allowed in a manifest"""

    TRAIN = "train"
    VAL = "val"
    TEST = "test"


class SelectionStrategy(str, Enum):
    """Checkpoint selection strategies for OOD evaluation"""

    NO_SELECTION = "id"           # best validation CER on the source domain
    HELDOUT = "heldout"           # mean validation CER over every domain but the target
    ORACLE = "oracle"             # best validation CER on the target domain (upper bound)


class EvalProtocol(str, Enum):
    """How the OOD-error regressor is evaluated"""

    LEAVE_ONE_DOMAIN_OUT = "leave-one-domain-out"
    IN_SAMPLE = "in-sample"


class OutputFormat(str, Enum):
    """Artifact formats the CLI can emit next to the CSV tables"""

    CSV = "csv"
    PGM = "pgm"


class ExitCode(IntEnum):
    """Process exit codes of the oodlab command"""

    OK = 0
    USAGE = 1
    DATA = 2
    NUMERICAL = 3


# ============================================================================
# DEFAULTS
# ============================================================================

DEFAULT_SEED = 42
SEED_ENV_VAR = "OODLAB_SEED"

DEFAULT_NMAX = 5
DEFAULT_ALPHA = 1.0
DEFAULT_ECE_BINS = 15
DEFAULT_BUCKET_WIDTH = 5.0
DEFAULT_WORKERS = 4

# Heatmaps are rescaled so that the largest off-diagonal divergence reads as 100
HEATMAP_SCALE = 100.0


# ============================================================================
# METRICS TABLE COLUMNS
# ============================================================================

KEY_COLUMNS = ("model", "source", "target")

METRIC_COLUMNS = (
    "params_millions",    # model capacity
    "cer_id",             # CER on the source test split (%)
    "cer_ood",            # CER on the target test split (%)
    "ece_id",             # calibration error on the source test split
    "ece_ood",            # calibration error on the target test split
    "delta_S",            # reconstruction error of the source AE on source test images
    "delta_T",            # reconstruction error of the source AE on target test images
    "delta_L",            # KL to a synthetic corpus in the target's language
    "delta_GT",           # KL to the target's ground-truth transcripts
)

# Label-free proxies the OOD error is estimated from
REGRESSION_FEATURES = (
    "cer_id",
    "ece_id",
    "params_millions",
    "delta_S",
    "delta_T",
    "delta_L",
)

REGRESSION_TARGET = "cer_ood"


class ColumnMapper:
    """Maps loose column spellings found in user CSVs to the canonical names"""

    ALIASES = {
        "params": "params_millions",
        "parameters": "params_millions",
        "params_m": "params_millions",
        "delta_s": "delta_S",
        "delta_t": "delta_T",
        "delta_l": "delta_L",
        "delta_gt": "delta_GT",
        "cer_ood": "cer_ood",
        "cer_id": "cer_id",
        "ece_id": "ece_id",
        "ece_ood": "ece_ood",
    }

    @classmethod
    def canonical(cls, column: str) -> str:
        """
        Get the canonical metric name for a column header.

        Args:
            column: Header as written in the file

        Returns:
            Canonical name if known, otherwise the stripped header unchanged
        """
        stripped = column.strip()
        if stripped in METRIC_COLUMNS or stripped in KEY_COLUMNS:
            return stripped
        return cls.ALIASES.get(stripped.lower(), stripped)

    @classmethod
    def rename_map(cls, columns) -> Dict[str, str]:
        return {column: cls.canonical(column) for column in columns}


# ============================================================================
# RUN CONFIGURATION
# ============================================================================

class RunConfig(SQLModel):
    """Settings shared by every CLI subcommand"""

    workspace: Path = Path("workspace")
    manifests: List[Path] = Field(default_factory=list)
    ae: Dict[str, Any] = Field(default_factory=dict)
    nmax: int = DEFAULT_NMAX
    alpha: float = DEFAULT_ALPHA
    ece_bins: int = DEFAULT_ECE_BINS
    features: List[str] = Field(default_factory=lambda: list(REGRESSION_FEATURES))
    formats: List[OutputFormat] = Field(default_factory=lambda: [OutputFormat.CSV])
    seed: int = DEFAULT_SEED
    workers: int = DEFAULT_WORKERS
    outliers: List[str] = Field(default_factory=list)
    alignments: Dict[str, str] = Field(default_factory=dict)

    @field_validator("nmax")
    @classmethod
    def _check_nmax(cls, value: int) -> int:
        if not 1 <= value <= 5:
            raise ValueError("nmax must be between 1 and 5")
        return value

    @field_validator("ece_bins", "workers")
    @classmethod
    def _check_positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("must be at least 1")
        return value

    @field_validator("alpha")
    @classmethod
    def _check_alpha(cls, value: float) -> float:
        if value < 0:
            raise ValueError("alpha must be nonnegative")
        return value

    @field_validator("features")
    @classmethod
    def _check_features(cls, value: List[str]) -> List[str]:
        unknown = [name for name in value if name not in METRIC_COLUMNS]
        if unknown:
            raise ValueError(f"unknown feature columns: {', '.join(unknown)}")
        if REGRESSION_TARGET in value:
            raise ValueError(f"{REGRESSION_TARGET} is the regression target, not a feature")
        return value

    def wants(self, fmt: OutputFormat) -> bool:
        return fmt in self.formats

    def require_manifests(self) -> List[Path]:
        """Return the manifest paths, checking that each one exists."""
        if not self.manifests:
            raise UsageError("no manifests configured (use --manifest or the config file)")
        missing = [str(path) for path in self.manifests if not Path(path).is_file()]
        if missing:
            raise DataError(f"manifest not found: {', '.join(missing)}")
        return [Path(path) for path in self.manifests]


def load_run_config(config_path: Optional[Path] = None,
                    overrides: Optional[Mapping[str, Any]] = None,
                    environ: Optional[Mapping[str, str]] = None) -> RunConfig:
    """
    Build the run configuration from file, flags and environment.

    Args:
        config_path: Optional TOML file; top-level keys are RunConfig fields
        overrides: Values from command-line flags (None values are ignored)
        environ: Environment mapping (defaults to os.environ)

    Returns:
        A validated RunConfig
    """
    values: Dict[str, Any] = {}
    if config_path is not None:
        try:
            with open(config_path, "rb") as f:
                values.update(tomllib.load(f))
        except FileNotFoundError:
            raise UsageError(f"config file not found: {config_path}")
        except tomllib.TOMLDecodeError as e:
            raise UsageError(f"config file {config_path} is not valid TOML: {e}")

    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key == "manifests" and not value:
            continue
        values[key] = value

    env = os.environ if environ is None else environ
    if env.get(SEED_ENV_VAR):
        try:
            values["seed"] = int(env[SEED_ENV_VAR])
        except ValueError:
            raise UsageError(f"{SEED_ENV_VAR} must be an integer, got {env[SEED_ENV_VAR]!r}")

    try:
        return RunConfig.model_validate(values)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(part) for part in err['loc'])}: {err['msg']}" for err in e.errors()
        )
        raise UsageError(f"invalid configuration: {problems}")
