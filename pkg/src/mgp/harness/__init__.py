"""Experiment harness: synthetic data, CSV I/O, metrics, presets, CLI."""

from .data import Dataset, GeneratorSpec, load_csv, save_csv, simulate
from .experiments import ExperimentConfig, ModelConfig, PredictionRecord, preset_config, run_experiment
from .metrics import metrics

__all__ = [
    "Dataset",
    "ExperimentConfig",
    "GeneratorSpec",
    "ModelConfig",
    "PredictionRecord",
    "load_csv",
    "metrics",
    "preset_config",
    "run_experiment",
    "save_csv",
    "simulate",
]
