"""Experiment orchestration: training protocol, evaluation and reporting."""
from .config import ExperimentConfig
from .evaluation import (
    SnrSelection,
    UndefinedRatioError,
    compute_nve,
    nnd_ber,
    noiseless_ber,
    select_training_snr,
    time_per_sample,
    train_cell,
    validation_map_bers,
)
from .training import (
    SamplePool,
    TrainingSubset,
    TrainResult,
    make_training_subset,
    sample_batch,
    subset_size,
    train,
)
from .experiment import CSV_COLUMNS, EvalReport, run_experiment, write_report

__all__ = [
    "CSV_COLUMNS", "EvalReport", "ExperimentConfig", "SamplePool", "SnrSelection",
    "TrainResult", "TrainingSubset", "UndefinedRatioError", "compute_nve",
    "make_training_subset", "nnd_ber", "noiseless_ber", "run_experiment", "sample_batch",
    "select_training_snr", "subset_size", "time_per_sample", "train", "train_cell",
    "validation_map_bers", "write_report",
]
