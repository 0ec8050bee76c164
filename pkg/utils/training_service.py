#!/usr/bin/env python3
"""
Mini-batch training of the scoring network against the constraint objective,
plus the supervised regression baseline on the same loop machinery.
"""

import logging
import math
import time
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from models import ConstraintConfig, Dataset, LossComponent, TrainConfig, TrainReport
from models_network import MonotoneMlp
from utils.autodiff import Graph
from utils.constraint_config import config_digest
from utils.constraint_losses import build_objective
from utils.dataset_service import split
from utils.errors import DivergenceError, InvalidConfigError, ShapeError
from utils.feature_pipeline import FeaturePipeline
from utils.optimizers import make_optimizer

logger = logging.getLogger(__name__)


def evaluate_objective(model: MonotoneMlp, x: np.ndarray, constraints: ConstraintConfig,
                       enabled: Optional[frozenset] = None) -> float:
    """Objective over all rows of x as a single batch"""
    g = Graph()
    total, _ = build_objective(g, model.build(g, x), constraints, enabled)
    return float(total.value[0, 0])


class TrainingService:
    def __init__(self, cfg: TrainConfig):
        self.cfg = cfg

    def _batches(self, n_rows: int, rng: np.random.Generator):
        order = rng.permutation(n_rows) if self.cfg.shuffle else np.arange(n_rows)
        for start in range(0, n_rows, self.cfg.batch_size):
            batch = order[start:start + self.cfg.batch_size]
            # batch moments need two rows
            if len(batch) >= 2:
                yield batch

    def _validate(self, model: MonotoneMlp, x: np.ndarray, constraints: ConstraintConfig,
                  enabled: frozenset):
        if x.ndim != 2 or x.shape[1] != model.n_features:
            raise ShapeError(f"Model expects {model.n_features} features, data has {x.shape[-1]}")
        if len(constraints.features) != model.n_features:
            raise InvalidConfigError(
                f"Config lists {len(constraints.features)} features, model has {model.n_features}")
        if not enabled:
            raise InvalidConfigError("No loss component is enabled")
        if LossComponent.SENSITIVITY in enabled:
            constraints.tiers.validate(model.n_features)
        if x.shape[0] < 2:
            raise InvalidConfigError("Training needs at least 2 rows")
        if all(constraints.weights.for_component(c) == 0 for c in enabled):
            logger.warning("All enabled loss components have weight 0; parameters will not change")

    def train(self, model: MonotoneMlp, x: np.ndarray, constraints: ConstraintConfig,
              enabled: Optional[frozenset] = None) -> Tuple[MonotoneMlp, TrainReport]:
        """Minimize the weighted constraint objective; x is normalized and direction-transformed"""
        x = np.asarray(x, dtype=np.float64)
        enabled = constraints.enabled_components() if enabled is None \
            else frozenset(enabled) & constraints.enabled_components()
        self._validate(model, x, constraints, enabled)

        started = time.perf_counter()
        model = model.copy()
        optimizer = make_optimizer(model.parameters(), self.cfg.learning_rate, self.cfg.optimizer)
        rng = np.random.default_rng(self.cfg.seed)
        report = TrainReport(seed=self.cfg.seed)
        report.initial_loss = evaluate_objective(model, x, constraints, enabled)
        logger.info(f"Training on {x.shape[0]} rows with {sorted(c.value for c in enabled)}; "
                    f"initial loss {report.initial_loss:.6g}")

        step = 0
        for epoch in range(self.cfg.epochs):
            sums: Dict[str, float] = defaultdict(float)
            n_batches = 0
            for batch in self._batches(x.shape[0], rng):
                g = Graph()
                trace = model.build(g, x[batch])
                total, components = build_objective(g, trace, constraints, enabled)
                values = {c.value: float(node.value[0, 0]) for c, node in components.items()}
                values['total'] = float(total.value[0, 0])
                if not all(math.isfinite(v) for v in values.values()):
                    raise DivergenceError(step, values)

                grads = g.backward(total)
                grad_list = [grads[node.id] for node in trace.params]
                if not all(np.all(np.isfinite(gr)) for gr in grad_list):
                    raise DivergenceError(step, values)
                optimizer.step(grad_list)

                for name, value in values.items():
                    sums[name] += value
                n_batches += 1
                step += 1
                logger.debug(f"step {step}: {values}")

            record = {'epoch': epoch}
            record.update({name: total / max(n_batches, 1) for name, total in sums.items()})
            report.epochs.append(record)
            if self.cfg.log_every and (epoch + 1) % self.cfg.log_every == 0:
                logger.info(f"epoch {epoch + 1}/{self.cfg.epochs}: "
                            + ', '.join(f"{k}={v:.6g}" for k, v in record.items() if k != 'epoch'))

        report.final_loss = evaluate_objective(model, x, constraints, enabled)
        if not math.isfinite(report.final_loss):
            raise DivergenceError(step, {'total': report.final_loss})

        if constraints.rescale_after_training and constraints.bounds is not None:
            a, b = constraints.bounds
            model.fit_output_range(x, a, b)
            logger.info(f"Rescaled outputs to [{a}, {b}]")

        report.parameter_digest = model.parameter_digest()
        report.duration_seconds = time.perf_counter() - started
        logger.info(f"Training finished in {report.duration_seconds:.1f}s; final loss {report.final_loss:.6g}")
        return model, report

    def train_supervised(self, model: MonotoneMlp, x: np.ndarray,
                         labels: Optional[np.ndarray]) -> Tuple[MonotoneMlp, TrainReport]:
        """Mean squared error against standardized labels; the output affine maps back"""
        if labels is None:
            raise InvalidConfigError("Supervised training needs a label column")
        x = np.asarray(x, dtype=np.float64)
        labels = np.asarray(labels, dtype=np.float64).reshape(-1)
        if x.shape[0] != labels.shape[0]:
            raise ShapeError(f"{x.shape[0]} rows but {labels.shape[0]} labels")
        if x.shape[1] != model.n_features:
            raise ShapeError(f"Model expects {model.n_features} features, data has {x.shape[1]}")

        started = time.perf_counter()
        model = model.copy()
        shift = float(labels.mean())
        scale = float(labels.std()) or 1.0
        targets = ((labels - shift) / scale).reshape(-1, 1)

        optimizer = make_optimizer(model.parameters(), self.cfg.learning_rate, self.cfg.optimizer)
        rng = np.random.default_rng(self.cfg.seed)
        report = TrainReport(seed=self.cfg.seed, supervised=True)
        report.initial_loss = float(np.mean((model.predict_raw(x) - targets[:, 0]) ** 2))

        step = 0
        for epoch in range(self.cfg.epochs):
            total_sum, n_batches = 0.0, 0
            for batch in self._batches(x.shape[0], rng):
                g = Graph()
                trace = model.build(g, x[batch])
                residual = g.sub(trace.scores, g.constant(targets[batch]))
                loss = g.mean(g.square(residual))
                value = float(loss.value[0, 0])
                if not math.isfinite(value):
                    raise DivergenceError(step, {'mse': value})
                grads = g.backward(loss)
                optimizer.step([grads[node.id] for node in trace.params])
                total_sum += value
                n_batches += 1
                step += 1
            report.epochs.append({'epoch': epoch, 'total': total_sum / max(n_batches, 1)})
            if self.cfg.log_every and (epoch + 1) % self.cfg.log_every == 0:
                logger.info(f"supervised epoch {epoch + 1}/{self.cfg.epochs}: mse={report.epochs[-1]['total']:.6g}")

        report.final_loss = float(np.mean((model.predict_raw(x) - targets[:, 0]) ** 2))
        model.output_scale = scale
        model.output_shift = shift
        report.parameter_digest = model.parameter_digest()
        report.duration_seconds = time.perf_counter() - started
        return model, report


def train(model: MonotoneMlp, data: Dataset, constraints: ConstraintConfig,
          cfg: Optional[TrainConfig] = None, enabled: Optional[frozenset] = None) -> Tuple[MonotoneMlp, TrainReport]:
    """data rows must already be normalized and direction-transformed"""
    return TrainingService(cfg or constraints.train).train(model, data.rows, constraints, enabled)


def train_supervised(model: MonotoneMlp, data: Dataset, cfg: TrainConfig) -> Tuple[MonotoneMlp, TrainReport]:
    if not data.has_labels:
        raise InvalidConfigError("Supervised training needs a label column")
    return TrainingService(cfg).train_supervised(model, data.rows, data.labels)


@dataclass
class TrainingRun:
    model: MonotoneMlp
    report: TrainReport
    train_rows: np.ndarray
    test_rows: np.ndarray


def run_pipeline(data: Dataset, constraints: ConstraintConfig, cfg: Optional[TrainConfig] = None,
                 labels: Optional[np.ndarray] = None, supervised: bool = False,
                 enabled: Optional[frozenset] = None, train_fraction: float = 0.7) -> TrainingRun:
    """
    Raw data to trained model: fit normalization and directions on all rows,
    split with the training seed, train on the training rows, then attach
    the pipeline and config digest so the model file is self-contained.
    """
    cfg = cfg or constraints.train
    pipeline = FeaturePipeline.fit(data, constraints.features)
    x = pipeline.transform(data)
    train_rows, test_rows = split(data, train_fraction, cfg.seed)

    service = TrainingService(cfg)
    if supervised:
        if labels is None:
            raise InvalidConfigError("Supervised training needs a label column")
        model = MonotoneMlp.init(x.shape[1], cfg.hidden, monotone=False, seed=cfg.seed)
        model, report = service.train_supervised(model, x[train_rows], np.asarray(labels)[train_rows])
    else:
        model = MonotoneMlp.init(x.shape[1], cfg.hidden, monotone=cfg.monotone, seed=cfg.seed)
        model, report = service.train(model, x[train_rows], constraints, enabled)

    model.feature_pipeline = pipeline
    model.constraint_digest = config_digest(constraints)
    report.train_rows = train_rows.tolist()
    report.test_rows = test_rows.tolist()
    return TrainingRun(model, report, train_rows, test_rows)
