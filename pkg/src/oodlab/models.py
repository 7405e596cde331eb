from sqlmodel import SQLModel, Field
from typing import Any, Dict, List, Optional


# ============================================================================
# Report Models (written as JSON next to the CSV tables)
# ============================================================================

class EpochRecord(SQLModel):
    """Train/validation MSE after one autoencoder epoch (epoch 0 is the initialization)"""
    epoch: int
    train_mse: Optional[float] = None
    val_mse: float
    is_best: bool = False


class TrainingReport(SQLModel):
    """Outcome of training one source-domain autoencoder"""
    source: str
    params_file: str
    num_parameters: int
    config: Dict[str, Any] = Field(default_factory=dict)
    best_epoch: int
    best_val_mse: float
    history: List[EpochRecord] = Field(default_factory=list)


class EvalReport(SQLModel):
    """Recognition error and calibration of one prediction log"""
    predictions: str
    num_records: int
    cer: float
    wer: float
    ece: Optional[float] = None
    mce: Optional[float] = None
    bins: Optional[int] = None


class FactorReport(SQLModel):
    """Eigen-decomposition of the metrics correlation matrix and the rotated loadings"""
    columns: List[str]
    num_rows: int
    eigenvalues: List[float]
    retained_k: int
    loadings_unrotated: List[List[float]]
    loadings_rotated: List[List[float]]
    rotation: List[List[float]]
    criterion_history: List[float] = Field(default_factory=list)
    converged: bool = True


class RegressionReport(SQLModel):
    """OOD-error regressor and its residual statistics"""
    features: List[str]
    coefficients: List[float]
    intercept: float
    protocol: str
    mae: float
    mse: float
    num_predictions: int
    bucket_width: float
    bucket_counts: List[int]
    cumulative_percent: List[float]
    rank_deficient: bool = False


class StrategyChoice(SQLModel):
    """Checkpoint picked by one selection strategy"""
    strategy: str
    checkpoint: str
    target_val_cer: Optional[float] = None


class SelectionReport(SQLModel):
    """All three selection strategies for one (source, target) pair"""
    source: str
    target: str
    choices: List[StrategyChoice] = Field(default_factory=list)
