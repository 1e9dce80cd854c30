"""Active dictionary learning and sparse-representation classification."""

import json

from ._core import (
    AdlResult,
    ClassResiduals,
    ConfigError,
    Dataset,
    Dictionary,
    DictionaryFile,
    DictionaryMethod,
    DimensionError,
    Error,
    ErrorLedger,
    EvaluationReport,
    FoldPlan,
    IoError,
    LassoConfig,
    MissingCellError,
    NumericError,
    PcaModel,
    Scaler,
    SchemaError,
    SparseCode,
    SrcResult,
    adl_learn,
    aggregate_reports,
    fit_scaler,
    lasso_kkt_residual,
    lasso_objective,
    load_csv,
    load_dictionary,
    make_folds,
    ngas_dictionary,
    pca_fit,
    random_dictionary,
    solve_lasso,
    som_dictionary,
    src_classify,
    src_predict,
    standardize,
    wd_dictionary,
    write_csv,
)
from ._core import run_experiment_json as _run_experiment_json

__all__ = [name for name in dir() if not name.startswith("_") and name != "json"] + ["run_experiment", "summary"]


def run_experiment(dataset, config=None, dataset_id="dataset"):
    """Cross-validated comparison of dictionary methods.

    `config` uses the same keys as the "experiment" object of a run manifest.
    """
    return _run_experiment_json(dataset, json.dumps(config or {}), dataset_id)


def summary(report):
    """The report's summary document as a dict."""
    return json.loads(report.summary_json())
