"""
Checkpoint selection for OOD evaluation.

Validation logs hold one row per (checkpoint, domain) with the validation CER of that
checkpoint on that domain, plus an optional ``step`` (or ``epoch``) column. Ties go to
the earliest checkpoint: lowest step, then first appearance in the log.
"""

import logging
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import pandas as pd

from ..config import SelectionStrategy
from ..errors import DataError
from ..models import SelectionReport, StrategyChoice

logger = logging.getLogger(__name__)

LOG_COLUMNS = ("checkpoint", "domain", "val_cer")
STEP_COLUMNS = ("step", "epoch")

Records = Union[pd.DataFrame, Iterable[Tuple[str, str, float]]]


def _as_frame(records: Records) -> pd.DataFrame:
    frame = records if isinstance(records, pd.DataFrame) else pd.DataFrame(
        list(records), columns=list(LOG_COLUMNS))
    missing = [c for c in LOG_COLUMNS if c not in frame.columns]
    if missing:
        raise DataError(f"validation log is missing column(s): {', '.join(missing)}")
    if frame.empty:
        raise DataError("validation log is empty")
    step = next((c for c in STEP_COLUMNS if c in frame.columns), None)
    steps = (pd.to_numeric(frame[step], errors="raise") if step
             else pd.Series(range(len(frame)), index=frame.index))
    frame = frame[list(LOG_COLUMNS)].copy()
    frame["step"] = steps
    frame["checkpoint"] = frame["checkpoint"].astype(str)
    frame["domain"] = frame["domain"].astype(str)
    frame["val_cer"] = pd.to_numeric(frame["val_cer"], errors="raise")
    return frame


def checkpoint_order(frame: pd.DataFrame) -> List[str]:
    """Checkpoints from earliest to latest"""
    first = frame.groupby("checkpoint", sort=False)["step"].min()
    return list(first.sort_values(kind="stable").index)


def load_validation_log(path: Path) -> pd.DataFrame:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"validation log not found: {path}")
    return _as_frame(pd.read_csv(path, dtype={"checkpoint": str, "domain": str}))


def _argmin_first(scores: pd.Series, order: Sequence[str]) -> str:
    """Lowest score; ties go to the checkpoint listed first in `order`."""
    best = scores.min()
    for checkpoint in order:
        if checkpoint in scores.index and scores[checkpoint] == best:
            return checkpoint
    raise DataError("no checkpoint to select")


def select_model(records: Records, strategy: SelectionStrategy, source: str,
                 target: Optional[str] = None) -> str:
    """
    Pick a checkpoint.

    Args:
        records: Validation log (checkpoint, domain, val_cer)
        strategy: id (source domain), heldout (mean over every domain but the target)
            or oracle (target domain)
        source: Training domain
        target: Evaluation domain (required by heldout and oracle)

    Returns:
        The chosen checkpoint id

    Raises:
        DataError: the strategy needs a domain the log does not contain
    """
    frame = _as_frame(records)
    strategy = SelectionStrategy(strategy)
    order = checkpoint_order(frame)
    domains = set(frame["domain"])

    if strategy == SelectionStrategy.NO_SELECTION:
        needed = [source]
    elif target is None:
        raise DataError(f"{strategy.value} selection needs a target domain")
    elif strategy == SelectionStrategy.ORACLE:
        needed = [target]
    else:
        needed = sorted(domains - {target})
    absent = [d for d in needed if d not in domains]
    if absent or not needed:
        what = ", ".join(absent) if absent else f"any domain other than {target}"
        raise DataError(f"{strategy.value} selection needs validation results for {what}")

    subset = frame[frame["domain"].isin(needed)]
    scores = subset.groupby("checkpoint", sort=False)["val_cer"].mean()
    chosen = _argmin_first(scores, order)
    logger.debug("%s selection (%s -> %s): %s", strategy.value, source, target, chosen)
    return chosen


def selection_summary(records: Records, source: str, target: str) -> SelectionReport:
    """The checkpoint of every strategy with its validation CER on the target"""
    frame = _as_frame(records)
    on_target = frame[frame["domain"] == target].drop_duplicates("checkpoint")
    on_target = on_target.set_index("checkpoint")["val_cer"]
    choices = []
    for strategy in SelectionStrategy:
        checkpoint = select_model(frame, strategy, source, target)
        cer = float(on_target[checkpoint]) if checkpoint in on_target.index else None
        choices.append(StrategyChoice(strategy=strategy.value, checkpoint=checkpoint,
                                      target_val_cer=cer))
    return SelectionReport(source=source, target=target, choices=choices)
