"""
Domain records shared by the ScoreCraft services: datasets, constraint
configuration, training settings and reports.
"""

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from utils.errors import ContractError, InvalidConfigError, SchemaMismatchError


class Direction(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    CONVEX_LINEAR = "convex_linear"
    CONVEX_QUADRATIC = "convex_quadratic"


class DistributionKind(enum.Enum):
    GAUSSIAN = "gaussian"
    EXPONENTIAL = "exponential"
    NONE = "none"


class OptimizerKind(enum.Enum):
    ADAM = "adam"
    SGD = "sgd"


class LossComponent(enum.Enum):
    BOUND = "bound"
    SENSITIVITY = "sensitivity"
    DISTRIBUTION = "distribution"
    MODE = "mode"


@dataclass(frozen=True)
class FeatureSpec:
    name: str
    direction: Direction = Direction.POSITIVE
    tier: Optional[int] = None  # 0 = most important


@dataclass(frozen=True)
class LossWeights:
    alpha: float = 1.0  # bound
    beta: float = 1.0   # sensitivity
    gamma: float = 1.0  # distribution
    delta: float = 1.0  # mode
    tiers: Tuple[float, ...] = ()  # per-tier sensitivity weights, default 1 each

    def __post_init__(self):
        for name in ('alpha', 'beta', 'gamma', 'delta'):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise InvalidConfigError(f"Loss weight {name} must be a finite value >= 0, got {value}")
        if any((not math.isfinite(w)) or w < 0 for w in self.tiers):
            raise InvalidConfigError("Tier weights must be finite values >= 0")

    def for_component(self, component: LossComponent) -> float:
        return {
            LossComponent.BOUND: self.alpha,
            LossComponent.SENSITIVITY: self.beta,
            LossComponent.DISTRIBUTION: self.gamma,
            LossComponent.MODE: self.delta,
        }[component]


@dataclass(frozen=True)
class SensitivityTiers:
    """Feature-index groups, most important first; untiered features rank below all"""

    tiers: Tuple[Tuple[int, ...], ...]

    @property
    def is_empty(self) -> bool:
        return not any(self.tiers)

    def validate(self, n_features: int):
        if self.is_empty:
            raise InvalidConfigError("Sensitivity tiers are empty")
        seen = set()
        for tier in self.tiers:
            for index in tier:
                if not 0 <= index < n_features:
                    raise InvalidConfigError(f"Tier feature index {index} outside 0..{n_features - 1}")
                if index in seen:
                    raise InvalidConfigError(f"Feature index {index} appears in more than one tier")
                seen.add(index)

    def lower_than(self, position: int, n_features: int) -> List[int]:
        """Indices in tiers strictly below the given tier, untiered features included"""
        higher = set()
        for tier in self.tiers[:position + 1]:
            higher.update(tier)
        return [i for i in range(n_features) if i not in higher]


@dataclass(frozen=True)
class TargetDistribution:
    kind: DistributionKind = DistributionKind.NONE
    mu: Optional[float] = None
    sigma: Optional[float] = None
    lam: Optional[float] = None

    def __post_init__(self):
        if self.kind is DistributionKind.GAUSSIAN:
            if self.mu is None or not math.isfinite(self.mu):
                raise InvalidConfigError("Gaussian target needs a finite mu")
            if self.sigma is None or not math.isfinite(self.sigma) or self.sigma <= 0:
                raise InvalidConfigError("Gaussian target needs sigma > 0")
        elif self.kind is DistributionKind.EXPONENTIAL:
            if self.lam is None or not math.isfinite(self.lam) or self.lam <= 0:
                raise InvalidConfigError("Exponential target needs lambda > 0")

    @classmethod
    def gaussian(cls, mu: float, sigma: float) -> 'TargetDistribution':
        return cls(DistributionKind.GAUSSIAN, mu=float(mu), sigma=float(sigma))

    @classmethod
    def exponential(cls, lam: float) -> 'TargetDistribution':
        return cls(DistributionKind.EXPONENTIAL, lam=float(lam))

    @property
    def enabled(self) -> bool:
        return self.kind is not DistributionKind.NONE


@dataclass(frozen=True)
class OptimizerConfig:
    kind: OptimizerKind = OptimizerKind.ADAM
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    momentum: float = 0.0


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 64
    epochs: int = 200
    learning_rate: float = 1e-3
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    seed: int = 7
    shuffle: bool = True
    hidden: Tuple[int, int] = (64, 64)
    monotone: bool = True
    log_every: int = 10

    def __post_init__(self):
        if self.batch_size < 2:
            raise InvalidConfigError(f"batch_size must be >= 2, got {self.batch_size}")
        if self.epochs < 1:
            raise InvalidConfigError(f"epochs must be >= 1, got {self.epochs}")
        if not self.learning_rate > 0:
            raise InvalidConfigError(f"learning_rate must be > 0, got {self.learning_rate}")
        if len(self.hidden) != 2 or min(self.hidden) < 1:
            raise InvalidConfigError(f"hidden must be two widths >= 1, got {self.hidden}")

    def with_overrides(self, **changes) -> 'TrainConfig':
        changes = {k: v for k, v in changes.items() if v is not None}
        return replace(self, **changes)


@dataclass(frozen=True)
class ConstraintConfig:
    features: Tuple[FeatureSpec, ...]
    bounds: Optional[Tuple[float, float]] = None
    mode: Optional[float] = None
    distribution: TargetDistribution = field(default_factory=TargetDistribution)
    weights: LossWeights = field(default_factory=LossWeights)
    rescale_after_training: bool = False
    squared_bound: bool = False
    label: Optional[str] = None
    train: TrainConfig = field(default_factory=TrainConfig)

    @property
    def feature_names(self) -> List[str]:
        return [spec.name for spec in self.features]

    @property
    def directions(self) -> List[Direction]:
        return [spec.direction for spec in self.features]

    @property
    def tiers(self) -> SensitivityTiers:
        levels = sorted({spec.tier for spec in self.features if spec.tier is not None})
        return SensitivityTiers(tuple(
            tuple(i for i, spec in enumerate(self.features) if spec.tier == level)
            for level in levels
        ))

    def enabled_components(self) -> FrozenSet[LossComponent]:
        enabled = set()
        if self.bounds is not None:
            enabled.add(LossComponent.BOUND)
        if self.mode is not None:
            enabled.add(LossComponent.MODE)
        if not self.tiers.is_empty:
            enabled.add(LossComponent.SENSITIVITY)
        if self.distribution.enabled:
            enabled.add(LossComponent.DISTRIBUTION)
        return frozenset(enabled)


@dataclass(frozen=True)
class Dataset:
    feature_names: Tuple[str, ...]
    rows: np.ndarray
    labels: Optional[np.ndarray] = None
    label_name: Optional[str] = None

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim != 2 or rows.shape[1] != len(self.feature_names):
            raise ContractError(f"Rows of shape {rows.shape} do not match {len(self.feature_names)} features")
        object.__setattr__(self, 'rows', rows)
        object.__setattr__(self, 'feature_names', tuple(self.feature_names))
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=np.float64).reshape(-1)
            if labels.shape[0] != rows.shape[0]:
                raise ContractError(f"{labels.shape[0]} labels for {rows.shape[0]} rows")
            object.__setattr__(self, 'labels', labels)

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]

    @property
    def n_features(self) -> int:
        return self.rows.shape[1]

    @property
    def has_labels(self) -> bool:
        return self.labels is not None

    def column(self, name: str) -> np.ndarray:
        try:
            return self.rows[:, self.feature_names.index(name)]
        except ValueError:
            raise SchemaMismatchError([name]) from None

    def select(self, names: Sequence[str]) -> 'Dataset':
        missing = [name for name in names if name not in self.feature_names]
        extra = [name for name in self.feature_names if name not in names]
        if missing:
            raise SchemaMismatchError(missing, extra)
        indices = [self.feature_names.index(name) for name in names]
        return replace(self, feature_names=tuple(names), rows=self.rows[:, indices])

    def take(self, indices: Sequence[int]) -> 'Dataset':
        indices = np.asarray(indices, dtype=np.int64)
        labels = self.labels[indices] if self.labels is not None else None
        return replace(self, rows=self.rows[indices], labels=labels)

    def with_rows(self, rows: np.ndarray) -> 'Dataset':
        return replace(self, rows=rows)


@dataclass(frozen=True)
class NormalizationStats:
    feature_names: Tuple[str, ...]
    mins: Tuple[float, ...]
    maxs: Tuple[float, ...]

    def to_dict(self) -> Dict:
        return {
            'feature_names': list(self.feature_names),
            'min': [float(v) for v in self.mins],
            'max': [float(v) for v in self.maxs],
        }

    @classmethod
    def from_dict(cls, data: Dict) -> 'NormalizationStats':
        return cls(tuple(data['feature_names']), tuple(data['min']), tuple(data['max']))


@dataclass
class MetricsReport:
    min_score: Optional[float] = None
    max_score: Optional[float] = None
    rank_correlation: Optional[float] = None
    rmse: Optional[float] = None
    kl_to_target: Optional[float] = None
    pct_within_bounds: Optional[float] = None
    feature_correlations: Dict[str, Optional[float]] = field(default_factory=dict)
    case: Optional[str] = None
    seed: Optional[int] = None
    diverged_at_step: Optional[int] = None

    def to_dict(self) -> Dict:
        """Fields without a value are left out, not zeroed"""
        data = {
            'case': self.case,
            'seed': self.seed,
            'rank_correlation': self.rank_correlation,
            'rmse': self.rmse,
            'kl_to_target': self.kl_to_target,
            'min_score': self.min_score,
            'max_score': self.max_score,
            'pct_within_bounds': self.pct_within_bounds,
            'diverged_at_step': self.diverged_at_step,
        }
        data = {key: value for key, value in data.items() if value is not None}
        data['feature_correlations'] = {
            name: rho for name, rho in self.feature_correlations.items() if rho is not None
        }
        return data


@dataclass(frozen=True)
class KdeCurve:
    grid: np.ndarray
    density: np.ndarray
    bandwidth: float

    def integral(self) -> float:
        return float(np.trapezoid(self.density, self.grid))


@dataclass
class TrainReport:
    epochs: List[Dict[str, float]] = field(default_factory=list)
    initial_loss: Optional[float] = None
    final_loss: Optional[float] = None
    parameter_digest: Optional[str] = None
    duration_seconds: float = 0.0
    seed: Optional[int] = None
    supervised: bool = False
    train_rows: List[int] = field(default_factory=list)
    test_rows: List[int] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            'seed': self.seed,
            'supervised': self.supervised,
            'initial_loss': self.initial_loss,
            'final_loss': self.final_loss,
            'parameter_digest': self.parameter_digest,
            'duration_seconds': self.duration_seconds,
            'epochs': self.epochs,
            'train_rows': self.train_rows,
            'test_rows': self.test_rows,
        }
