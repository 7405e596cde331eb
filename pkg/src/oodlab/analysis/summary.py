"""
Cross-domain result aggregation.

A cross table is a long DataFrame with columns model, source, target, cer: the test CER
of a model trained on `source` and evaluated on `target`. The source == target rows are
the in-domain (ID) results.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Optional, Set, Tuple

import numpy as np
import pandas as pd

from ..errors import DataError

logger = logging.getLogger(__name__)

CROSS_COLUMNS = ("model", "source", "target", "cer")


def check_cross_table(cross: pd.DataFrame) -> pd.DataFrame:
    missing = [c for c in CROSS_COLUMNS if c not in cross.columns]
    if missing:
        raise DataError(f"cross-domain table is missing column(s): {', '.join(missing)}")
    if cross.empty:
        raise DataError("cross-domain table is empty")
    cross = cross.copy()
    for column in ("model", "source", "target"):
        cross[column] = cross[column].astype(str)
    cross["cer"] = pd.to_numeric(cross["cer"], errors="raise")
    if cross.duplicated(subset=["model", "source", "target"]).any():
        raise DataError("cross-domain table has duplicate (model, source, target) rows")
    return cross


def load_cross_table(path: Path) -> pd.DataFrame:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"cross-domain table not found: {path}")
    try:
        frame = pd.read_csv(path, dtype={"model": str, "source": str, "target": str})
    except pd.errors.EmptyDataError:
        raise DataError(f"{path}: cross-domain table is empty")
    return check_cross_table(frame)


def cross_table_from_matrix(matrix: pd.DataFrame, model: str) -> pd.DataFrame:
    """Long rows from a source × target CER matrix (rows are sources)"""
    rows = [
        {"model": model, "source": str(source), "target": str(target), "cer": float(value)}
        for source, row in matrix.iterrows()
        for target, value in row.items()
        if pd.notna(value)
    ]
    return pd.DataFrame(rows, columns=list(CROSS_COLUMNS))


def best_source(cross: pd.DataFrame, target: str, model: str) -> Tuple[str, float]:
    """
    Lowest-CER source for a (model, target), excluding the target itself.

    Ties go to the source listed first.

    Raises:
        DataError: no cross-domain entry for that model and target
    """
    cross = check_cross_table(cross)
    rows = cross[(cross["model"] == model) & (cross["target"] == target)
                 & (cross["source"] != target)]
    if rows.empty:
        raise DataError(f"no cross-domain results for model {model} on target {target}")
    best = rows.loc[rows["cer"].idxmin()]
    return str(best["source"]), float(best["cer"])


def _in_order(values: Iterable[str]) -> list:
    return list(dict.fromkeys(values))


def best_source_map(cross: pd.DataFrame) -> pd.DataFrame:
    """Target × model table of best source domains"""
    cross = check_cross_table(cross)
    models = _in_order(cross["model"])
    targets = _in_order(cross["target"])
    data = {}
    for model in models:
        column = {}
        for target in targets:
            try:
                column[target] = best_source(cross, target, model)[0]
            except DataError:
                column[target] = None
        data[model] = column
    frame = pd.DataFrame(data, index=targets, columns=models)
    frame.index.name = "target"
    return frame


def best_source_share(cross: pd.DataFrame) -> pd.Series:
    """Percentage of (model, target) cells in which each source is the best source"""
    cells = best_source_map(cross).to_numpy().ravel()
    sources = pd.Series([cell for cell in cells if cell is not None], dtype=object)
    if sources.empty:
        raise DataError("no cross-domain cells")
    share = sources.value_counts(sort=False) * 100.0 / len(sources)
    share.name = "share_percent"
    return share.sort_values(ascending=False, kind="stable")


@dataclass
class AggregateSummary:
    """Per-(model, target) ID/OOD values and per-model means"""
    per_target: pd.DataFrame
    per_model: pd.DataFrame


def aggregate_summary(cross: pd.DataFrame,
                      outlier_ids: Optional[Set[Tuple[str, str]]] = None,
                      include_outlier_ood: bool = False) -> AggregateSummary:
    """
    ID and best-source OOD results with outlier-filtered means.

    Args:
        cross: Cross-domain CER table
        outlier_ids: (model, target) pairs whose training did not converge
        include_outlier_ood: Keep outlier rows in the OOD mean (only the ID mean is
            filtered then)

    Returns:
        per_target: model, target, id_cer, ood_cer, best_source, gap, outlier
            (gap = ood - id, NaN for outliers)
        per_model: model, mean_id, mean_ood, mean_gap, num_targets, num_outliers

    Raises:
        DataError: every row is an outlier
    """
    cross = check_cross_table(cross)
    outliers = {(str(m), str(t)) for m, t in (outlier_ids or set())}

    rows = []
    for model in _in_order(cross["model"]):
        mine = cross[cross["model"] == model]
        for target in _in_order(mine["target"]):
            diagonal = mine[(mine["source"] == target) & (mine["target"] == target)]
            if diagonal.empty:
                raise DataError(f"no in-domain result for model {model} on {target}")
            source, ood = best_source(cross, target, model)
            id_cer = float(diagonal["cer"].iloc[0])
            is_outlier = (model, target) in outliers
            rows.append({
                "model": model, "target": target, "id_cer": id_cer, "ood_cer": ood,
                "best_source": source, "gap": np.nan if is_outlier else ood - id_cer,
                "outlier": is_outlier,
            })
    per_target = pd.DataFrame(rows)
    if per_target["outlier"].all():
        raise DataError("every row is marked as an outlier")

    summaries = []
    for model, group in per_target.groupby("model", sort=False):
        kept = group[~group["outlier"]]
        if kept.empty:
            logger.warning("all targets of model %s are outliers", model)
        ood_rows = group if include_outlier_ood else kept
        summaries.append({
            "model": model,
            "mean_id": kept["id_cer"].mean() if not kept.empty else np.nan,
            "mean_ood": ood_rows["ood_cer"].mean() if not ood_rows.empty else np.nan,
            "mean_gap": kept["gap"].mean() if not kept.empty else np.nan,
            "num_targets": len(group),
            "num_outliers": int(group["outlier"].sum()),
        })
    return AggregateSummary(per_target=per_target, per_model=pd.DataFrame(summaries))


def group_summary(per_model: pd.DataFrame, groups: Mapping[str, str]) -> pd.DataFrame:
    """Mean ID/OOD per model group (for example the alignment family)"""
    frame = per_model.copy()
    unknown = [m for m in frame["model"] if m not in groups]
    if unknown:
        raise DataError(f"no group given for model(s): {', '.join(unknown)}")
    frame["group"] = frame["model"].map(groups)
    summary = frame.groupby("group", sort=False).agg(
        mean_id=("mean_id", "mean"), mean_ood=("mean_ood", "mean"), num_models=("model", "count")
    )
    return summary.reset_index()


def capacity_correlation(per_model: pd.DataFrame, params_millions: Mapping[str, float]) -> float:
    """Pearson correlation between parameter count and mean OOD CER across models"""
    frame = per_model.dropna(subset=["mean_ood"])
    missing = [m for m in frame["model"] if m not in params_millions]
    if missing:
        raise DataError(f"no parameter count for model(s): {', '.join(missing)}")
    if len(frame) < 2:
        raise DataError("capacity correlation needs at least 2 models")
    x = np.array([params_millions[m] for m in frame["model"]], dtype=np.float64)
    y = frame["mean_ood"].to_numpy(dtype=np.float64)
    if np.std(x) == 0 or np.std(y) == 0:
        raise DataError("capacity correlation is undefined for constant inputs")
    return float(np.corrcoef(x, y)[0, 1])
