"""Metrics table, factor analysis, OOD-error regression, model selection and aggregation."""

from .factors import (FactorModel, RotationResult, Standardized, correlation_matrix,
                      eigendecompose, factor_analysis, loadings, oblimax_criterion,
                      oblimax_rotate, retain_factors, standardize)
from .regression import (RegressionEvaluation, RegressionModel, ResidualDistribution,
                         evaluate_regressor, fit_ood_regressor, residual_distribution)
from .selection import load_validation_log, select_model, selection_summary
from .summary import (AggregateSummary, aggregate_summary, best_source, best_source_map,
                      best_source_share, capacity_correlation, cross_table_from_matrix,
                      group_summary, load_cross_table)
from .table import MetricsTable, build_metrics_table

__all__ = [
    "MetricsTable", "build_metrics_table",
    "Standardized", "standardize", "correlation_matrix", "eigendecompose", "retain_factors",
    "loadings", "oblimax_criterion", "oblimax_rotate", "RotationResult", "FactorModel",
    "factor_analysis",
    "RegressionModel", "RegressionEvaluation", "ResidualDistribution", "fit_ood_regressor",
    "evaluate_regressor", "residual_distribution",
    "select_model", "selection_summary", "load_validation_log",
    "best_source", "best_source_map", "best_source_share", "aggregate_summary",
    "AggregateSummary", "group_summary", "capacity_correlation", "cross_table_from_matrix",
    "load_cross_table",
]
