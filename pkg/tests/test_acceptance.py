"""
Long training runs on the synthetic benchmark. Deselect with -m "not slow".
"""

from dataclasses import replace

import numpy as np
import pytest

from models import LossComponent, LossWeights, TargetDistribution
from models_network import MonotoneMlp
from utils.autodiff import Graph
from utils.dataset_service import SyntheticSpec, synth_generate
from utils.evaluation_service import evaluate_scores, kde
from utils.feature_pipeline import FeaturePipeline
from utils.presets import preset
from utils.training_service import TrainingService, run_pipeline

pytestmark = pytest.mark.slow


@pytest.fixture(scope='module')
def synthetic():
    return synth_generate(SyntheticSpec(n=10000, seed=42))


def _test_metrics(data, constraints, seed, enabled=None, learning_rate=None):
    cfg = constraints.train.with_overrides(seed=seed, learning_rate=learning_rate)
    run = run_pipeline(data, constraints, cfg, enabled=enabled)
    test = data.take(run.test_rows)
    scores = run.model.score(test)
    return run, evaluate_scores(scores, test, constraints, test.labels)


def test_all_losses_monotone(synthetic):
    constraints = preset('synthetic')
    passed = 0
    for seed in (1, 2, 3):
        _, report = _test_metrics(synthetic, constraints, seed)
        correlations = report.feature_correlations
        top = max(correlations, key=lambda name: correlations[name] or -1.0)
        if report.rank_correlation >= 0.80 and report.pct_within_bounds >= 99 and top == 'x4':
            passed += 1
    assert passed >= 2


def test_bound_only(synthetic):
    constraints = replace(preset('synthetic'), weights=LossWeights(1.0, 0.0, 0.0, 0.0))
    _, report = _test_metrics(synthetic, constraints, 7, enabled=frozenset({LossComponent.BOUND}),
                              learning_rate=1e-3)
    assert report.pct_within_bounds == 100.0
    assert all(value > 0.2 for value in report.feature_correlations.values())


def test_supervised_baseline(synthetic):
    constraints = preset('synthetic')
    cfg = constraints.train.with_overrides(epochs=200, learning_rate=1e-3)
    run = run_pipeline(synthetic, constraints, cfg, labels=synthetic.labels, supervised=True)
    test = synthetic.take(run.test_rows)
    report = evaluate_scores(run.model.score(test), test, constraints, test.labels)
    assert report.rank_correlation >= 0.95


class TestDistributionShaping:
    def _unit_features(self, synthetic):
        constraints = preset('synthetic')
        pipeline = FeaturePipeline.fit(synthetic, constraints.features)
        return constraints, pipeline.transform(synthetic)

    def _config(self, constraints):
        return constraints.train.with_overrides(learning_rate=1e-3)

    def test_gaussian_target(self, synthetic):
        constraints, x = self._unit_features(synthetic)
        constraints = replace(constraints, bounds=(0.0, 10.0), distribution=TargetDistribution.gaussian(5.0, 1.0))
        cfg = self._config(constraints)
        model = MonotoneMlp.init(4, cfg.hidden, True, cfg.seed)
        trained, _ = TrainingService(cfg).train(model, x, constraints)
        scores = trained.predict(x)
        assert abs(scores.mean() - 5.0) <= 0.5
        assert abs(scores.std() - 1.0) <= 0.3
        assert 0.97 <= kde(scores).integral() <= 1.03

    def test_exponential_target(self, synthetic):
        constraints, x = self._unit_features(synthetic)
        constraints = replace(constraints, distribution=TargetDistribution.exponential(1.0))
        cfg = self._config(constraints)
        model = MonotoneMlp.init(4, cfg.hidden, True, cfg.seed)
        _, report = TrainingService(cfg).train(model, x, constraints, frozenset({LossComponent.DISTRIBUTION}))
        assert report.epochs[-1]['distribution'] < 0.1 * report.epochs[0]['distribution']


def test_trained_model_is_monotone(synthetic):
    run, _ = _test_metrics(synthetic, preset('synthetic'), 7)
    rng = np.random.default_rng(0)
    low = rng.uniform(size=(1000, 4))
    high = low + rng.uniform(0.0, 0.5, size=(1000, 4))
    assert np.all(run.model.predict(high) >= run.model.predict(low) - 1e-9)
    assert np.all(run.model.input_gradients(low, Graph()).value > 0)


def test_default_run_reduces_loss(synthetic):
    run, _ = _test_metrics(synthetic, preset('synthetic'), 7)
    assert run.report.final_loss < run.report.initial_loss
