import logging
from pathlib import Path
from typing import Optional

import pandas as pd

from ...analysis import build_metrics_table
from ...config import RunConfig
from ...errors import DataError
from ...reports import read_matrix_csv
from .. import output
from ..workspace import Workspace, read_params_table

logger = logging.getLogger(__name__)

NAME = "assemble"


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        NAME, help="assemble the metrics table",
        description="Join per-(model, source, target) errors with model sizes and the "
                    "divergence matrices into one metrics CSV (model, source, target, "
                    "params_millions, cer_id, cer_ood, ece_id, ece_ood, delta_S, delta_T, "
                    "delta_L, delta_GT).")
    parser.add_argument("--errors", type=Path, required=True,
                        help="CSV of model, source, target, cer[, ece]")
    parser.add_argument("--params", type=Path, required=True,
                        help="CSV of model, params_millions")
    parser.add_argument("--visual", type=Path,
                        help="visual matrix (default: visdiv/visual.csv if present)")
    parser.add_argument("--textual", type=Path,
                        help="textual matrix (default: textdiv/textual.csv if present)")
    parser.add_argument("--synthetic", type=Path,
                        help="synthetic textual matrix "
                             "(default: textdiv/textual_synthetic.csv if present)")
    parser.add_argument("--out", type=Path, help="output CSV (default: <workspace>/metrics.csv)")
    parser.set_defaults(handler=run)


def _matrix(explicit: Optional[Path], default: Path) -> Optional[pd.DataFrame]:
    if explicit is not None:
        return read_matrix_csv(explicit)
    if default.is_file():
        return read_matrix_csv(default)
    logger.info("no matrix at %s; the corresponding columns stay empty", default)
    return None


def run(args, config: RunConfig) -> int:
    output.banner("Assemble metrics table")
    workspace = Workspace.from_config(config)
    if not args.errors.is_file():
        raise DataError(f"error table not found: {args.errors}")
    errors = pd.read_csv(args.errors, dtype={"model": str, "source": str, "target": str})
    table = build_metrics_table(
        errors,
        read_params_table(args.params),
        visual=_matrix(args.visual, workspace.path("visdiv", "visual.csv")),
        textual=_matrix(args.textual, workspace.path("textdiv", "textual.csv")),
        synthetic=_matrix(args.synthetic, workspace.path("textdiv", "textual_synthetic.csv")),
    )
    path = table.to_csv(args.out or workspace.path("metrics.csv"))
    empty = [c for c in table.frame.columns if table.frame[c].isna().all()]
    output.ok(f"{len(table)} rows")
    if empty:
        output.detail(f"empty columns: {', '.join(empty)}")
    output.wrote([path])
    output.footer()
    return 0
