#!/usr/bin/env python3
"""
Evaluation metrics for generated scores and the kernel density report.
"""

import json
import logging
import math
from pathlib import Path
from typing import Dict, Iterable, Optional, Union

import numpy as np
import pandas as pd
from scipy.stats import gaussian_kde, spearmanr

from models import ConstraintConfig, Dataset, DistributionKind, KdeCurve, MetricsReport, TargetDistribution
from utils.constraint_losses import exponential_kl_value, gaussian_kl_value
from utils.errors import MetricError

logger = logging.getLogger(__name__)

KDE_GRID_POINTS = 256


def _series(values, name: str = 'series') -> np.ndarray:
    values = np.asarray(values, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(values)):
        raise MetricError(f"{name} contains non-finite values")
    return values


def spearman(a, b) -> float:
    """Rank correlation with average ranks for ties"""
    a, b = _series(a, 'a'), _series(b, 'b')
    if a.shape != b.shape:
        raise MetricError(f"Series lengths differ: {a.size} vs {b.size}")
    if a.size < 2:
        raise MetricError("Rank correlation needs at least 2 values")
    if np.ptp(a) == 0 or np.ptp(b) == 0:
        raise MetricError("Rank correlation is undefined for a constant series")
    return float(spearmanr(a, b).statistic)


def rmse(pred, truth) -> float:
    pred, truth = _series(pred, 'pred'), _series(truth, 'truth')
    if pred.shape != truth.shape:
        raise MetricError(f"Series lengths differ: {pred.size} vs {truth.size}")
    if pred.size == 0:
        raise MetricError("RMSE needs at least 1 value")
    return float(np.sqrt(np.mean((pred - truth) ** 2)))


def kl_to_target(scores, target: TargetDistribution) -> float:
    """Gaussian moment fit of the scores (population std), then the closed form"""
    scores = _series(scores, 'scores')
    if not target.enabled:
        raise MetricError("No target distribution to compare against")
    if scores.size < 2:
        raise MetricError("KL divergence needs at least 2 scores")
    mu, sigma = float(scores.mean()), float(scores.std())
    if not sigma > 0:
        raise MetricError("KL divergence is undefined for constant scores")
    if target.kind is DistributionKind.GAUSSIAN:
        return gaussian_kl_value(mu, sigma, target.mu, target.sigma)
    return exponential_kl_value(mu, sigma, target.lam)


def bounds_coverage(scores, a: float, b: float) -> float:
    """Percentage of scores in [a, b], endpoints included"""
    scores = _series(scores, 'scores')
    if not b > a:
        raise MetricError(f"Bounds need b > a, got [{a}, {b}]")
    if scores.size == 0:
        raise MetricError("Coverage of an empty series")
    inside = np.count_nonzero((scores >= a) & (scores <= b))
    return 100.0 * inside / scores.size


def feature_correlations(data: Dataset, scores) -> Dict[str, Optional[float]]:
    """Spearman of every raw feature column against the scores; None for constant columns"""
    scores = _series(scores, 'scores')
    if scores.size != data.n_rows:
        raise MetricError(f"{scores.size} scores for {data.n_rows} rows")
    correlations: Dict[str, Optional[float]] = {}
    for j, name in enumerate(data.feature_names):
        try:
            correlations[name] = spearman(data.rows[:, j], scores)
        except MetricError:
            logger.debug(f"No correlation for constant column '{name}'")
            correlations[name] = None
    return correlations


def silverman_bandwidth(scores) -> float:
    scores = _series(scores, 'scores')
    return 1.06 * float(scores.std(ddof=1)) * scores.size ** (-0.2)


def kde(scores, bandwidth: Optional[float] = None, grid_points: int = KDE_GRID_POINTS) -> KdeCurve:
    """Gaussian kernel estimate on a uniform grid over [min - 3h, max + 3h]"""
    scores = _series(scores, 'scores')
    if scores.size < 2:
        raise MetricError("Density estimate needs at least 2 scores")
    if grid_points < 2:
        raise MetricError("Density grid needs at least 2 points")
    spread = float(scores.std(ddof=1))
    if not spread > 0:
        raise MetricError("Density estimate is undefined for constant scores")
    h = silverman_bandwidth(scores) if bandwidth is None else float(bandwidth)
    if not (math.isfinite(h) and h > 0):
        raise MetricError(f"Bandwidth must be > 0, got {bandwidth}")

    # scipy scales its factor by the sample std
    estimator = gaussian_kde(scores, bw_method=h / spread)
    grid = np.linspace(scores.min() - 3 * h, scores.max() + 3 * h, grid_points)
    return KdeCurve(grid, estimator(grid), h)


def write_kde_csv(curve: KdeCurve, path: Union[str, Path]):
    frame = pd.DataFrame({'grid': curve.grid, 'density': curve.density})
    frame.to_csv(path, index=False, float_format='%.17g', lineterminator='\n')


def evaluate_scores(scores, data: Dataset, config: Optional[ConstraintConfig] = None,
                    truth=None, case: Optional[str] = None, seed: Optional[int] = None) -> MetricsReport:
    """
    One report row. Label-dependent fields need truth; KL needs a configured
    target; coverage needs bounds. Missing prerequisites leave the field unset.
    """
    scores = _series(scores, 'scores')
    if scores.size != data.n_rows:
        raise MetricError(f"{scores.size} scores for {data.n_rows} data rows")
    if scores.size == 0:
        raise MetricError("No scores to evaluate")

    report = MetricsReport(min_score=float(scores.min()), max_score=float(scores.max()), case=case, seed=seed)
    if truth is not None:
        truth = _series(truth, 'truth')
        report.rmse = rmse(scores, truth)
        try:
            report.rank_correlation = spearman(scores, truth)
        except MetricError as e:
            logger.warning(f"Rank correlation left out: {e}")
    if config is not None:
        if config.distribution.enabled:
            try:
                report.kl_to_target = kl_to_target(scores, config.distribution)
            except MetricError as e:
                logger.warning(f"KL divergence left out: {e}")
        if config.bounds is not None:
            report.pct_within_bounds = bounds_coverage(scores, *config.bounds)
    report.feature_correlations = feature_correlations(data, scores)
    return report


def write_reports(reports: Union[MetricsReport, Iterable[MetricsReport]], path: Union[str, Path]):
    """A single report is written as an object, several as an array"""
    if isinstance(reports, MetricsReport):
        payload = reports.to_dict()
    else:
        payload = [report.to_dict() for report in reports]
    Path(path).write_text(json.dumps(payload, indent=2) + '\n', encoding='utf-8')
