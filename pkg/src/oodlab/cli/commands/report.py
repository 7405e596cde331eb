import logging
from pathlib import Path

import pandas as pd

from ...analysis import (aggregate_summary, best_source_map, best_source_share,
                         capacity_correlation, cross_table_from_matrix, group_summary,
                         load_cross_table)
from ...analysis.summary import check_cross_table
from ...config import RunConfig
from ...errors import UsageError
from ...reports import read_matrix_csv
from .. import output
from ..workspace import Workspace, parse_pairs, read_params_table

logger = logging.getLogger(__name__)

NAME = "report"


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        NAME, help="ID/OOD summary, best-source map and gaps",
        description="Summarize cross-domain CERs. Inputs are long CSVs (model, source, "
                    "target, cer) and/or source x target CER matrices given as "
                    "MODEL=path. Writes report/per_target.csv (model, target, id_cer, "
                    "ood_cer, best_source, gap, outlier), report/per_model.csv (model, "
                    "mean_id, mean_ood, mean_gap, num_targets, num_outliers), "
                    "report/best_source.csv, report/best_source_share.csv and, with "
                    "groups, report/groups.csv.")
    parser.add_argument("tables", nargs="*", type=Path, help="long cross-domain CSVs")
    parser.add_argument("--matrix", action="append", metavar="MODEL=PATH",
                        help="source x target CER matrix of one model (repeatable)")
    parser.add_argument("--outlier", action="append", dest="outliers", metavar="MODEL:TARGET",
                        help="exclude a (model, target) from the averages (repeatable)")
    parser.add_argument("--group", action="append", dest="alignments", metavar="MODEL:GROUP",
                        help="model group for the group summary (repeatable)")
    parser.add_argument("--include-outlier-ood", action="store_true",
                        help="keep outliers in the OOD mean (only the ID mean is filtered)")
    parser.add_argument("--params", type=Path,
                        help="CSV of model, params_millions for the capacity correlation")
    parser.set_defaults(handler=run)


def collect_cross_table(tables, matrices) -> pd.DataFrame:
    frames = [load_cross_table(path) for path in tables]
    for model, path in parse_pairs(matrices, "--matrix", separator="="):
        frames.append(cross_table_from_matrix(read_matrix_csv(Path(path)), model))
    if not frames:
        raise UsageError("report needs at least one cross-domain table or --matrix")
    return check_cross_table(pd.concat(frames, ignore_index=True))


def run(args, config: RunConfig) -> int:
    output.banner("Cross-domain report")
    cross = collect_cross_table(args.tables, args.matrix)
    outliers = set(parse_pairs(config.outliers, "--outlier"))
    summary = aggregate_summary(cross, outliers, include_outlier_ood=args.include_outlier_ood)
    best = best_source_map(cross)
    share = best_source_share(cross).rename_axis("source").to_frame()

    out_dir = Workspace.from_config(config).directory("report")
    written = []
    for name, frame, index in (("per_target", summary.per_target, False),
                               ("per_model", summary.per_model, False),
                               ("best_source", best, True),
                               ("best_source_share", share, True)):
        path = out_dir / f"{name}.csv"
        frame.to_csv(path, index=index, float_format="%.17g")
        written.append(path)

    output.ok("Per-model averages (outliers filtered)")
    output.table(summary.per_model.set_index("model"), float_format="{:.1f}")
    output.ok("Best source domain per target")
    output.table(best)

    if config.alignments:
        groups = group_summary(summary.per_model, config.alignments)
        path = out_dir / "groups.csv"
        groups.to_csv(path, index=False, float_format="%.17g")
        written.append(path)
        output.ok("Per-group averages")
        output.table(groups.set_index("group"), float_format="{:.1f}")

    if args.params is not None:
        r = capacity_correlation(summary.per_model, read_params_table(args.params))
        output.ok(f"Correlation of parameter count with mean OOD CER: {r:.3f}")

    output.wrote(written)
    output.footer()
    return 0
