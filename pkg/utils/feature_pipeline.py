#!/usr/bin/env python3
"""
Min-max normalization and direction transforms applied before the network.

After the pipeline every feature lies in [0,1] and affects the score
positively, so a monotone nondecreasing network expresses the expert's
stated directions.
"""

import logging
from typing import Dict, Sequence, Tuple

import numpy as np

from models import Dataset, Direction, FeatureSpec, NormalizationStats
from utils.errors import ContractError, DegenerateFeatureError

logger = logging.getLogger(__name__)


def fit_normalize(data: Dataset) -> Tuple[Dataset, NormalizationStats]:
    """Scale every column to [0,1] using its own min and max"""
    mins = data.rows.min(axis=0)
    maxs = data.rows.max(axis=0)
    for name, low, high in zip(data.feature_names, mins, maxs):
        if high <= low:
            raise DegenerateFeatureError(name)
    stats = NormalizationStats(
        data.feature_names,
        tuple(float(v) for v in mins),
        tuple(float(v) for v in maxs),
    )
    return data.with_rows(normalize(data.rows, stats)), stats


def normalize(rows: np.ndarray, stats: NormalizationStats) -> np.ndarray:
    """Apply stored statistics; values beyond the fitted range are clamped to [0,1]"""
    mins = np.asarray(stats.mins)
    span = np.asarray(stats.maxs) - mins
    scaled = (np.asarray(rows, dtype=np.float64) - mins) / span
    return np.clip(scaled, 0.0, 1.0)


def apply_direction(x, direction: Direction):
    """Map a [0,1] value (or array) so that larger means better"""
    x = np.asarray(x, dtype=np.float64)
    if direction is Direction.POSITIVE:
        result = x
    elif direction is Direction.NEGATIVE:
        result = 1.0 - x
    elif direction is Direction.CONVEX_LINEAR:
        result = np.where(x <= 0.5, x, 1.0 - x)
    elif direction is Direction.CONVEX_QUADRATIC:
        result = np.where(x <= 0.5, x * x, (1.0 - x) ** 2)
    else:
        raise ContractError(f"Unknown direction {direction}")
    return float(result) if result.ndim == 0 else result


class FeaturePipeline:
    """Normalization statistics plus per-feature directions, persisted with the model"""

    def __init__(self, stats: NormalizationStats, directions: Sequence[Direction]):
        if len(directions) != len(stats.feature_names):
            raise ContractError("One direction per feature is required")
        self.stats = stats
        self.directions = tuple(directions)

    @property
    def feature_names(self) -> Tuple[str, ...]:
        return self.stats.feature_names

    @classmethod
    def fit(cls, data: Dataset, features: Sequence[FeatureSpec]) -> 'FeaturePipeline':
        selected = data.select([spec.name for spec in features])
        _, stats = fit_normalize(selected)
        logger.debug(f"Fitted normalization on {selected.n_rows} rows, {selected.n_features} features")
        return cls(stats, [spec.direction for spec in features])

    def transform(self, data: Dataset) -> np.ndarray:
        """Rows of the model's features, normalized and direction-transformed"""
        selected = data.select(self.feature_names)
        unit = normalize(selected.rows, self.stats)
        columns = [apply_direction(unit[:, j], direction) for j, direction in enumerate(self.directions)]
        return np.column_stack(columns) if columns else unit

    def to_dict(self) -> Dict:
        data = self.stats.to_dict()
        data['directions'] = [direction.value for direction in self.directions]
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> 'FeaturePipeline':
        return cls(NormalizationStats.from_dict(data), [Direction(value) for value in data['directions']])
