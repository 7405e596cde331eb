import logging
from pathlib import Path
from typing import List, Optional

import pandas as pd

from ...analysis import (MetricsTable, evaluate_regressor, factor_analysis, fit_ood_regressor,
                         residual_distribution)
from ...config import DEFAULT_BUCKET_WIDTH, METRIC_COLUMNS, EvalProtocol, RunConfig
from ...errors import UsageError
from ...models import RegressionReport
from ...reports import write_json
from .. import output
from ..workspace import Workspace

logger = logging.getLogger(__name__)

NAME = "analyze"


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        NAME, help="factor analysis and OOD-error regression on a metrics table",
        description="Reads a metrics CSV (model, source, target plus metric columns). "
                    "Writes analysis/factors.json, analysis/regression.json, "
                    "analysis/predictions.csv (fold, model, source, target, actual, "
                    "predicted, residual), analysis/residuals.csv (lower, upper, count, "
                    "cumulative_percent) and analysis/loadings.csv.")
    parser.add_argument("metrics", nargs="?", type=Path,
                        help="metrics table (default: <workspace>/metrics.csv)")
    parser.add_argument("--columns", nargs="+",
                        help="factor-analysis columns (default: every complete metric column)")
    parser.add_argument("--features", nargs="+", help="regression features")
    parser.add_argument("--protocol", type=EvalProtocol, choices=list(EvalProtocol),
                        default=EvalProtocol.LEAVE_ONE_DOMAIN_OUT)
    parser.add_argument("--bucket-width", type=float, default=DEFAULT_BUCKET_WIDTH)
    parser.set_defaults(handler=run)


def factor_columns(table: MetricsTable, requested: Optional[List[str]]) -> List[str]:
    if requested:
        unknown = [c for c in requested if c not in METRIC_COLUMNS]
        if unknown:
            raise UsageError(f"unknown metric column(s): {', '.join(unknown)}")
        return list(requested)
    frame = table.frame
    return [c for c in METRIC_COLUMNS if c in frame.columns and frame[c].notna().all()]


def run(args, config: RunConfig) -> int:
    output.banner("Metrics analysis")
    workspace = Workspace.from_config(config)
    table = MetricsTable.from_csv(args.metrics or workspace.path("metrics.csv"))
    output.ok(f"{len(table)} OOD cases over {len(table.targets)} target domains")

    columns = factor_columns(table, args.columns)
    factors = factor_analysis(table, columns)
    out_dir = workspace.directory("analysis")
    written = [write_json(factors.to_report(), out_dir / "factors.json")]
    loadings = pd.DataFrame(factors.loadings_rotated, index=factors.columns,
                            columns=[f"factor_{i + 1}" for i in range(factors.retained_k)])
    loadings_file = out_dir / "loadings.csv"
    loadings.to_csv(loadings_file, index_label="column", float_format="%.17g")
    written.append(loadings_file)

    output.ok(f"Eigenvalues: {', '.join(f'{v:.3f}' for v in factors.eigenvalues)}")
    output.ok(f"Retained k = {factors.retained_k} factor(s)"
              + ("" if factors.converged else " (rotation did not converge)"))
    output.table(loadings)

    features = list(config.features)
    model = fit_ood_regressor(table, features)
    evaluation = evaluate_regressor(model, table, args.protocol, features)
    residuals = residual_distribution(evaluation.residuals, args.bucket_width)
    report = RegressionReport(
        features=features,
        coefficients=model.coefficients.tolist(),
        intercept=model.intercept,
        protocol=evaluation.protocol.value,
        mae=evaluation.mae,
        mse=evaluation.mse,
        num_predictions=len(evaluation.predictions),
        bucket_width=residuals.bucket_width,
        bucket_counts=residuals.counts.tolist(),
        cumulative_percent=residuals.cumulative_percent.tolist(),
        rank_deficient=model.rank_deficient or bool(evaluation.rank_deficient_folds),
    )
    written.append(write_json(report, out_dir / "regression.json"))
    predictions_file = out_dir / "predictions.csv"
    evaluation.predictions.to_csv(predictions_file, index=False, float_format="%.17g")
    residuals_file = out_dir / "residuals.csv"
    residuals.to_frame().to_csv(residuals_file, index=False, float_format="%.17g")
    written.extend([predictions_file, residuals_file])

    output.ok(f"Regression ({evaluation.protocol.value}): MAE {evaluation.mae:.3f}, "
              f"MSE {evaluation.mse:.3f}")
    output.table(residuals.to_frame(), float_format="{:.1f}")
    output.wrote(written)
    output.footer()
    return 0
