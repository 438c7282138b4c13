"""fracflow experiment configuration."""

from fracflow.config.experiment import (
    PRESSURE_UNITS,
    LENGTH_UNITS,
    TIME_UNITS,
    PERMEABILITY_UNITS,
    VISCOSITY_UNITS,
    FractureConfig,
    ProblemConfig,
    ClosureConfig,
    NetworkConfig,
    CollocationConfig,
    FDConfig,
    ObservationConfig,
    EnsembleConfig,
    ExperimentConfig,
    parse_experiment,
    load_experiment,
    build_fractures,
    build_problem,
    build_collocation_set,
    build_networks,
    load_experiment_observations,
)

__all__ = [
    "PRESSURE_UNITS",
    "LENGTH_UNITS",
    "TIME_UNITS",
    "PERMEABILITY_UNITS",
    "VISCOSITY_UNITS",
    "FractureConfig",
    "ProblemConfig",
    "ClosureConfig",
    "NetworkConfig",
    "CollocationConfig",
    "FDConfig",
    "ObservationConfig",
    "EnsembleConfig",
    "ExperimentConfig",
    "parse_experiment",
    "load_experiment",
    "build_fractures",
    "build_problem",
    "build_collocation_set",
    "build_networks",
    "load_experiment_observations",
]
