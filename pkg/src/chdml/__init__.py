"""chdml — coronary-heart-disease risk modelling on tabular cohort data.

The package covers the full journey from a raw cohort CSV to evaluation
reports: typed ingestion, cleaning (row drops, mean imputation, outlier
removal), mutual-information feature selection, SMOTE oversampling, six
classifiers implemented from first principles on numpy, ROC-AUC evaluation
by stratified cross-validation and hold-out testing, and a reproducible,
configuration-driven pipeline with a CLI.

Everything stochastic is seeded; a pipeline run is a pure function of its
configuration and input file.
"""

from . import eval as evaluation
from .errors import ChdmlError, ConfigError, DataError
from .eval import (
    EvalSummary,
    RocCurve,
    SmoteMode,
    cross_validate,
    grid_search,
    holdout_evaluate,
    roc_auc,
    roc_curve,
    stratified_kfold,
    stratified_split,
)
from .features import (
    FeatureScores,
    SelectionResult,
    discretize,
    mutual_information,
    score_features,
    select_k_best,
)
from .ingest import (
    FRAMINGHAM,
    CohortTable,
    FeatureKind,
    MissingReport,
    Schema,
    class_balance,
    load_csv,
    missing_report,
    schema_from_json,
    write_csv,
)
from .models import (
    ALGORITHMS,
    ClassifierSpec,
    Prediction,
    fit,
    load_model,
    model_from_json,
    model_to_json,
    predict,
    save_model,
    score,
)
from .pipeline import DEFAULT_CONFIG, PipelineConfig, RunReport, emit_tables, run_pipeline
from .preprocess import (
    ColumnStats,
    Dataset,
    OutlierReport,
    column_stats,
    drop_rows_missing,
    impute_mean,
    iqr_outlier_mask,
    pearson_correlation,
    remove_outliers,
    sigma_outlier_mask,
    standardize,
    to_dataset,
)
from .resample import SmoteParams, minority_neighbors, smote

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "ChdmlError",
    "ConfigError",
    "DataError",
    # ingest
    "FRAMINGHAM",
    "CohortTable",
    "FeatureKind",
    "MissingReport",
    "Schema",
    "class_balance",
    "load_csv",
    "missing_report",
    "schema_from_json",
    "write_csv",
    # preprocess
    "ColumnStats",
    "Dataset",
    "OutlierReport",
    "column_stats",
    "drop_rows_missing",
    "impute_mean",
    "iqr_outlier_mask",
    "pearson_correlation",
    "remove_outliers",
    "sigma_outlier_mask",
    "standardize",
    "to_dataset",
    # features
    "FeatureScores",
    "SelectionResult",
    "discretize",
    "mutual_information",
    "score_features",
    "select_k_best",
    # resample
    "SmoteParams",
    "minority_neighbors",
    "smote",
    # models
    "ALGORITHMS",
    "ClassifierSpec",
    "Prediction",
    "fit",
    "score",
    "predict",
    "model_to_json",
    "model_from_json",
    "save_model",
    "load_model",
    # eval
    "evaluation",
    "EvalSummary",
    "RocCurve",
    "SmoteMode",
    "cross_validate",
    "grid_search",
    "holdout_evaluate",
    "roc_auc",
    "roc_curve",
    "stratified_kfold",
    "stratified_split",
    # pipeline
    "DEFAULT_CONFIG",
    "PipelineConfig",
    "RunReport",
    "run_pipeline",
    "emit_tables",
]
