"""Benchmark harness: dataset loading, synthetic charts, runs and reports."""

from .datasets import CsSample, FcqaSample, LcqaSample, load_dataset
from .report import emit_report, split_accuracies, split_average
from .runner import RunConfig, run_experiment, select_samples
from .synthetic import SyntheticChart, generate_synthetic_charts

__all__ = [
    "CsSample",
    "FcqaSample",
    "LcqaSample",
    "RunConfig",
    "SyntheticChart",
    "emit_report",
    "generate_synthetic_charts",
    "load_dataset",
    "run_experiment",
    "select_samples",
    "split_accuracies",
    "split_average",
]
