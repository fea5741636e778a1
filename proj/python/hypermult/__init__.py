"""Hyperparameter multiplicity: prediction discrepancy and tunability of tuned models."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

from ._core import (  # noqa: F401
    Config,
    Dataset,
    DiscrepancyResult,
    HypermultError,
    HyperparamSpace,
    ParamSpec,
    PredictionEntry,
    PredictionSet,
    TunabilityResult,
    __version__,
    aggregate,
    disagreement,
    equal_range_bins,
    export_predictions,
    f1,
    format_mean_std,
    import_predictions,
    import_predictions_file,
    joint_discrepancy,
    load_csv,
    marginal_discrepancy,
    marginal_grid,
    marginal_params,
    model_discrepancy,
    pairwise_grid,
    restrict_to,
    run_sweep,
    sample_full,
    space_for,
    space_for_dataset,
    split,
    tunability,
)
from . import _core


@dataclass
class RunResult:
    """Outcome of a pipeline command; report is the parsed report.json."""

    exit_code: int
    failed_configs: int
    report: dict
    files: list = field(default_factory=list)


def _result(outcome) -> RunResult:
    return RunResult(outcome.exit_code, outcome.failed_configs, json.loads(outcome.report_json),
                     [os.fspath(f) for f in outcome.files])


def sweep(config: str, out: str, *, force: bool = False, jobs: int = 1) -> RunResult:
    """Run the sweeps described by a JSON sweep config."""
    return _result(_core._sweep(config, out, force, jobs))


def marginal(model: str, param: str, data: Sequence[str], out: str, *, points: int = 10,
             target: str = "", positive: Optional[str] = None, seed: int = 0,
             split_fraction: float = 0.3, eval_on: str = "holdout", impute: str = "reject",
             force: bool = False, jobs: int = 1) -> RunResult:
    return _result(_core._marginal(model, param, points, list(data), target, positive, seed,
                                   split_fraction, eval_on, impute, out, force, jobs))


def joint(model: str, h1: str, h2: str, data: Sequence[str], out: str, *, points: int = 5,
          axis_bins: Optional[int] = None, target: str = "", positive: Optional[str] = None,
          seed: int = 0, split_fraction: float = 0.3, eval_on: str = "holdout",
          impute: str = "reject", force: bool = False, jobs: int = 1) -> RunResult:
    return _result(_core._joint(model, h1, h2, points, list(data), target, positive, seed,
                                split_fraction, eval_on, impute, axis_bins, out, force, jobs))


def import_files(files: Sequence[str], out: str, *, force: bool = False) -> RunResult:
    """Score prediction files in the interchange format."""
    return _result(_core._import(list(files), out, force))
