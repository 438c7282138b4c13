"""Two-stage training loop: fracture pre-training, then full coupling."""

import copy
import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional

import numpy as np
import torch

from fracflow.closure import lambda_area
from fracflow.exceptions import ConfigurationError
from fracflow.geometry import CollocationSet, Tag, inlet_areas, resample
from fracflow.network import (
    FRACTURE_CONFIG,
    MATRIX_CONFIG,
    WEIGHT_CONFIG,
    MLPConfig,
    NetworkSet,
    Normalizer,
    build_network_set,
    save_checkpoint,
)
from fracflow.pinn.exceptions import DivergenceError
from fracflow.pinn.inverse import (
    DEFAULT_KAPPA,
    DEFAULT_XI_M,
    InverseParamSet,
    XiField,
)
from fracflow.pinn.losses import (
    LOSS_TERMS,
    LossBreakdown,
    adaptive_weighting,
    loss_data_injection,
    loss_data_insitu,
    loss_data_rf,
    loss_ic_bc,
    total_loss,
)
from fracflow.pinn.pretrain import pretrain_losses, pretrain_targets
from fracflow.pinn.residuals import (
    as_points,
    fracture_residuals,
    kappa_constants,
    matrix_fracture_residuals,
    matrix_residuals,
    window,
)
from fracflow.problem import FlowProblem, with_parameters

logger = logging.getLogger(__name__)

# Epoch whose total loss anchors the divergence guard
DIVERGENCE_REFERENCE_EPOCH = 10


@dataclass(frozen=True)
class TrainConfig:
    """Epoch counts, optimizer schedule and loss settings for one training run.

    With ``use_pretraining`` off the pre-training stage is skipped and the run
    is coupled from the first epoch.
    """

    pretrain_epochs: int = 5000
    coupled_epochs: int = 15000
    freeze_epochs: int = 2000
    use_pretraining: bool = True
    lr_start: float = 3e-4
    lr_end: float = 1e-4
    weight_decay: float = 1e-4
    tau: float = 0.003
    loss_weights: Mapping[str, float] = field(default_factory=dict)
    insitu_sample: int = 25000
    resample_period: float = 10
    resample_fraction: float = 0.1
    inverse: tuple[str, ...] = ()
    kappa: float = DEFAULT_KAPPA
    xi_m: float = DEFAULT_XI_M
    seed: int = 0
    log_every: int = 100
    checkpoint_every: int = 50
    divergence_factor: float = 1e6

    def __post_init__(self):
        for name in ("pretrain_epochs", "coupled_epochs", "freeze_epochs"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be >= 0, got {getattr(self, name)}")
        if self.tau < 0.0:
            raise ConfigurationError(f"tau must be >= 0, got {self.tau}")
        if not self.lr_start > 0.0 or not self.lr_end > 0.0:
            raise ConfigurationError("learning rates must be > 0")
        if self.insitu_sample < 1:
            raise ConfigurationError(f"insitu_sample must be >= 1, got {self.insitu_sample}")
        unknown = set(self.loss_weights) - set(LOSS_TERMS)
        if unknown:
            raise ConfigurationError(f"unknown loss weight keys: {sorted(unknown)}")

    @property
    def stage_a_epochs(self) -> int:
        return self.pretrain_epochs if self.use_pretraining else 0

    @property
    def total_epochs(self) -> int:
        return self.stage_a_epochs + self.coupled_epochs


@dataclass(eq=False)
class TrainResult:
    """Trained networks, fitted parameters and the per-epoch history."""

    nets: NetworkSet
    inverse: InverseParamSet | None
    xi: XiField
    colloc: CollocationSet
    history: list[dict[str, float]]
    epochs_run: int = 0

    @property
    def final_loss(self) -> float:
        return self.history[-1]["L_t"] if self.history else math.nan

    def parameters(self) -> dict[str, float]:
        return self.inverse.floats() if self.inverse is not None else {}


def networks_for(
    problem: FlowProblem,
    matrix_cfg: MLPConfig = MATRIX_CONFIG,
    fracture_cfg: MLPConfig = FRACTURE_CONFIG,
    weight_cfg: MLPConfig = WEIGHT_CONFIG,
    fourier_saturation: bool = True,
    seed: int = 0,
) -> NetworkSet:
    """NetworkSet with input and pressure scales fitted to the problem's domain."""
    geom = problem.geometry
    r = geom.radius
    z = 0.0 if geom.is_slab else r
    in_norm = Normalizer.from_range([-r, 0.0, -z, 0.0], [r, geom.length, z, problem.t_max])

    pressures = (problem.p_in, problem.p_out, problem.p_i)
    lo, hi = min(pressures), max(pressures)
    if hi - lo < 1e-6 * max(abs(hi), 1.0):
        pad = max(abs(hi), 1.0) * 0.01
        lo, hi = lo - pad, hi + pad
    return build_network_set(
        in_norm,
        window(problem.matrix),
        window(problem.fracture),
        (lo, hi),
        matrix_cfg=matrix_cfg,
        fracture_cfg=fracture_cfg,
        weight_cfg=weight_cfg,
        fourier_saturation=fourier_saturation,
        seed=seed,
    )


def _fracture_normals(colloc: CollocationSet) -> np.ndarray | None:
    normals = colloc.fractures.normals
    if len(normals) == 0 or not np.any(normals):
        return None
    return normals


def _has(observations, name: str) -> bool:
    values = getattr(observations, name, None) if observations is not None else None
    return values is not None and len(values) > 0


class _Epoch:
    """Loss evaluation for one epoch, bound to the current collocation set."""

    def __init__(self, problem, nets, colloc, xi, config, observations, rng):
        self.problem = problem
        self.nets = nets
        self.colloc = colloc
        self.xi = xi
        self.config = config
        self.observations = observations
        self.rng = rng
        self.kappa_p, self.kappa_r = kappa_constants(problem)

    def _weighted(self, terms, suffix, r_w, r_nw, X, role):
        terms[f"L_w_{suffix}"] = r_w.abs().mean() / self.kappa_r
        terms[f"L_nw_{suffix}"] = r_nw.abs().mean() / self.kappa_r
        omega = self.nets.omega(role, X)
        terms[f"L_PI_{suffix}"], terms[f"L_omega_{suffix}"] = adaptive_weighting(r_w, r_nw, omega, self.kappa_r)

    def breakdown(self, coupled: bool) -> LossBreakdown:
        problem, nets, colloc = self.problem, self.nets, self.colloc
        terms: dict[str, torch.Tensor] = {}

        X = as_points(colloc[Tag.MATRIX])
        self._weighted(terms, "M", *matrix_residuals(X, nets, problem), X, "omega_m")
        terms.update(loss_ic_bc(colloc, nets, problem, self.kappa_p))

        if colloc.n_fracture > 0:
            xi = self.xi()
            mf = colloc[Tag.MATRIX_FRACTURE]
            if coupled:
                X = as_points(mf)
                self._weighted(terms, "MF", *matrix_fracture_residuals(X, nets, problem), X, "omega_mf")
                terms["L_xi_MF"] = (xi - 1.0).abs().mean()
            else:
                targets = pretrain_targets(mf, problem, colloc.fractures.connected_to_inlet())
                terms.update(pretrain_losses(mf, nets, targets, xi, problem, self.kappa_p))

            X = as_points(colloc[Tag.FRACTURE])
            r = fracture_residuals(X, nets, problem, _fracture_normals(colloc), coupled=coupled)
            self._weighted(terms, "F", *r, X, "omega_f")

        terms.update(self._data_terms())
        return LossBreakdown(terms=terms)

    def _data_terms(self) -> dict[str, torch.Tensor]:
        obs, problem, colloc = self.observations, self.problem, self.colloc
        out: dict[str, torch.Tensor] = {}
        if _has(obs, "rf_times"):
            i = int(self.rng.integers(len(obs.rf_times)))
            out["L_RF"] = loss_data_rf(
                self.nets, colloc[Tag.MATRIX], float(obs.rf_times[i]), float(obs.rf_values[i]), problem,
            )
        if _has(obs, "insitu_values"):
            out["L_sw"] = loss_data_insitu(
                self.nets, obs.insitu_points, obs.insitu_values, problem,
                n=self.config.insitu_sample, rng=self.rng,
            )
        if _has(obs, "q_times"):
            fractures = colloc.fractures
            frac_inlet = fractures.points[fractures.inlet_mask()] if len(fractures) else None
            out["L_Qinj"] = loss_data_injection(
                self.nets, problem, colloc[Tag.INLET], frac_inlet,
                inlet_areas(colloc.geometry, fractures), obs.q_times, obs.q_values,
            )
        return out


def build_optimizer(
    nets: NetworkSet, xi: XiField, inverse: InverseParamSet | None, config: TrainConfig
) -> torch.optim.AdamW:
    """AdamW with weight decay on the networks only; multipliers and inverse exponents are not decayed."""
    groups = [
        {"params": list(nets.parameters()), "weight_decay": config.weight_decay},
        {"params": list(xi.parameters()), "weight_decay": 0.0},
    ]
    if inverse is not None:
        groups.append({"params": [inverse.theta], "weight_decay": 0.0})
    return torch.optim.AdamW(groups, lr=config.lr_start)


def _snapshot(epoch: int, nets: NetworkSet, xi: XiField, inverse: InverseParamSet | None) -> dict[str, Any]:
    return {
        "epoch": epoch,
        "nets": copy.deepcopy(nets.state_dict()),
        "xi": xi.xi.detach().clone(),
        "inverse": None if inverse is None else copy.deepcopy(inverse.state_dict()),
    }


def _restore(snapshot: dict[str, Any], nets: NetworkSet, xi: XiField, inverse: InverseParamSet | None) -> None:
    nets.load_state_dict(snapshot["nets"])
    with torch.no_grad():
        xi.xi.copy_(snapshot["xi"])
    if inverse is not None and snapshot["inverse"] is not None:
        inverse.load_state_dict(snapshot["inverse"])


def _history_row(epoch, stage_coupled, breakdown, problem, inverse) -> dict[str, float]:
    row: dict[str, float] = {"epoch": epoch, "coupled": int(stage_coupled)}
    row.update(breakdown.floats())
    if inverse is not None:
        row.update({f"gamma_{k}": v for k, v in inverse.floats().items()})
    row["lambda_bar"] = lambda_area(problem.matrix, problem.fluids)
    return row


def train(
    problem: FlowProblem,
    nets: NetworkSet,
    colloc: CollocationSet,
    config: TrainConfig,
    observations=None,
    inverse: InverseParamSet | None = None,
    checkpoint_path: Path | None = None,
    progress_callback: Optional[callable] = None,
) -> TrainResult:
    """Train the networks (and inverse parameters, if given) on the collocation set.

    Args:
        observations: Optional bundle with ``rf_times/rf_values``,
            ``q_times/q_values`` and ``insitu_points/insitu_values``
        inverse: Trainable closure parameters substituted into the problem
            every epoch
        checkpoint_path: Where to write the final (or last good) checkpoint
        progress_callback: Optional callback(current, total, stage)

    Raises:
        DivergenceError: If the total loss becomes non-finite or grows past
            ``divergence_factor`` times its early value; carries the last
            good checkpoint
    """
    xi = XiField(colloc.n_fracture)
    history: list[dict[str, float]] = []
    total = config.total_epochs
    if total == 0:
        logger.info("Zero-epoch training config, returning initial state")
        return TrainResult(nets=nets, inverse=inverse, xi=xi, colloc=colloc, history=history)

    rng = np.random.default_rng(config.seed)
    optimizer = build_optimizer(nets, xi, inverse, config)
    decay = config.lr_end / config.lr_start
    span = max(total - 1, 1)
    scheduler = torch.optim.lr_scheduler.LambdaLR(optimizer, lambda e: decay ** (min(e, span) / span))

    last_good = _snapshot(0, nets, xi, inverse)
    reference: float | None = None
    epoch = 0
    try:
        for epoch in range(total):
            coupled = epoch >= config.stage_a_epochs
            if epoch > 0:
                colloc = resample(colloc, config.resample_fraction, epoch, config.resample_period, rng)
            current = problem if inverse is None else with_parameters(problem, inverse.values())
            if inverse is not None:
                inverse.frozen = epoch < config.freeze_epochs

            optimizer.zero_grad()
            ev = _Epoch(current, nets, colloc, xi, config, observations, rng)
            breakdown = ev.breakdown(coupled)
            loss = total_loss(breakdown, config.loss_weights, config.tau)
            value = float(loss.detach())

            if epoch == DIVERGENCE_REFERENCE_EPOCH:
                reference = value
            elif reference is not None and value > config.divergence_factor * reference:
                raise DivergenceError(
                    f"total loss {value:.4g} exceeds {config.divergence_factor:g} x epoch-"
                    f"{DIVERGENCE_REFERENCE_EPOCH} value {reference:.4g}: {breakdown.dump()}"
                )

            loss.backward()
            if inverse is not None and inverse.frozen:
                inverse.theta.grad = None
            optimizer.step()
            scheduler.step()

            history.append(_history_row(epoch, coupled, breakdown, current, inverse))
            if epoch % config.checkpoint_every == 0:
                last_good = _snapshot(epoch, nets, xi, inverse)
            if config.log_every and epoch % config.log_every == 0:
                logger.info(f"epoch {epoch}/{total} [{'coupled' if coupled else 'pretrain'}] L_t={value:.4e}")
            if progress_callback:
                progress_callback(epoch + 1, total, "coupled" if coupled else "pretrain")
    except DivergenceError as e:
        logger.error(f"Training diverged at epoch {epoch}: {e}")
        _restore(last_good, nets, xi, inverse)
        if checkpoint_path is not None:
            _save(checkpoint_path, nets, xi, inverse, last_good["epoch"])
        raise DivergenceError(str(e), checkpoint=last_good) from e

    if checkpoint_path is not None:
        _save(checkpoint_path, nets, xi, inverse, total)
    logger.info(f"Training finished after {total} epochs, L_t={history[-1]['L_t']:.4e}")
    return TrainResult(nets=nets, inverse=inverse, xi=xi, colloc=colloc, history=history, epochs_run=total)


def _save(path: Path, nets: NetworkSet, xi: XiField, inverse: InverseParamSet | None, epoch: int) -> Path:
    extra = {
        "epoch": epoch,
        "xi": xi.xi.detach().clone(),
        "inverse": None if inverse is None else inverse.floats(),
    }
    return save_checkpoint(path, nets, extra)


def write_history_csv(path: Path, history: list[dict[str, float]]) -> Path:
    """Write per-epoch history; columns are the union of all row keys."""
    columns: list[str] = []
    for row in history:
        for key in row:
            if key not in columns:
                columns.append(key)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in history:
            writer.writerow([_cell(row.get(c, "")) for c in columns])
    return path


def _cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)
