"""Configuration, data generation, experiment runners and CSV output."""

from .config import (ExperimentConfig, default_config, dump_config, load_config,
                     parse_config)
from .data import generate_logistic_data, read_dataset, write_dataset
from .experiments import (run_experiment, run_experiment_blr, run_experiment_dirichlet,
                          run_experiment_simplex_quadratic, run_single)
from .records import RunRecord, read_csv, write_csv
from .rng import chain_streams, stream

__all__ = [
    "ExperimentConfig", "default_config", "dump_config", "load_config", "parse_config",
    "generate_logistic_data", "read_dataset", "write_dataset",
    "run_experiment", "run_experiment_blr", "run_experiment_dirichlet",
    "run_experiment_simplex_quadratic", "run_single",
    "RunRecord", "read_csv", "write_csv", "chain_streams", "stream",
]
