"""fracflow pinn - loss assembly, two-stage training, inverse estimation and ensembles."""

from fracflow.pinn.exceptions import TrainingError, DivergenceError, NonFiniteResidualError
from fracflow.pinn.residuals import (
    kappa_constants,
    transfer_term,
    PhaseState,
    phase_state,
    matrix_residuals,
    matrix_fracture_residuals,
    fracture_residuals,
    residual_matrix,
    residual_matrix_fracture,
    residual_fracture,
)
from fracflow.pinn.losses import (
    LOSS_TERMS,
    DIAGNOSTIC_TERMS,
    CONDITION_TERMS,
    mae,
    nmae,
    threshold,
    adaptive_weighting,
    loss_ic_bc,
    loss_data_rf,
    loss_data_insitu,
    predicted_injection,
    loss_data_injection,
    LossBreakdown,
    total_loss,
)
from fracflow.pinn.inverse import (
    DEFAULT_KAPPA,
    DEFAULT_XI_M,
    inverse_value,
    randomize_initial,
    InverseParameter,
    InverseParamSet,
    build_inverse_set,
    XiField,
)
from fracflow.pinn.pretrain import PretrainTargets, pretrain_targets, pretrain_losses
from fracflow.pinn.predict import predict_fields, predict_rf
from fracflow.pinn.trainer import TrainConfig, TrainResult, networks_for, train, write_history_csv
from fracflow.pinn.ensemble import SeedResult, EnsembleReport, dispersion, ensemble_invert

__all__ = [
    # Exceptions
    "TrainingError",
    "DivergenceError",
    "NonFiniteResidualError",
    # Residuals
    "kappa_constants",
    "transfer_term",
    "PhaseState",
    "phase_state",
    "matrix_residuals",
    "matrix_fracture_residuals",
    "fracture_residuals",
    "residual_matrix",
    "residual_matrix_fracture",
    "residual_fracture",
    # Losses
    "LOSS_TERMS",
    "DIAGNOSTIC_TERMS",
    "CONDITION_TERMS",
    "mae",
    "nmae",
    "threshold",
    "adaptive_weighting",
    "loss_ic_bc",
    "loss_data_rf",
    "loss_data_insitu",
    "predicted_injection",
    "loss_data_injection",
    "LossBreakdown",
    "total_loss",
    # Inverse
    "DEFAULT_KAPPA",
    "DEFAULT_XI_M",
    "inverse_value",
    "randomize_initial",
    "InverseParameter",
    "InverseParamSet",
    "build_inverse_set",
    "XiField",
    # Pre-training
    "PretrainTargets",
    "pretrain_targets",
    "pretrain_losses",
    # Prediction
    "predict_fields",
    "predict_rf",
    # Training
    "TrainConfig",
    "TrainResult",
    "networks_for",
    "train",
    "write_history_csv",
    # Ensemble
    "SeedResult",
    "EnsembleReport",
    "dispersion",
    "ensemble_invert",
]
