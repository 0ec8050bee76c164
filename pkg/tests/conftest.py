"""Shared fixtures for the ScoreCraft test suite."""

import json

import numpy as np
import pytest
from click.testing import CliRunner

from models import ConstraintConfig, FeatureSpec, LossWeights, TargetDistribution, TrainConfig
from models_network import MonotoneMlp
from utils.dataset_service import SyntheticSpec, synth_generate, write_csv


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_model():
    """4 features, width 8, the size used for gradient checks"""
    return MonotoneMlp.init(4, (8, 8), monotone=True, seed=3)


@pytest.fixture
def unit_rows(rng):
    return rng.uniform(0.0, 1.0, size=(16, 4))


@pytest.fixture
def unit_config():
    """All four losses on [0,1]-scale scores"""
    return ConstraintConfig(
        features=(
            FeatureSpec('x1'),
            FeatureSpec('x2', tier=2),
            FeatureSpec('x3', tier=1),
            FeatureSpec('x4', tier=0),
        ),
        bounds=(0.2, 0.8),
        mode=0.5,
        distribution=TargetDistribution.gaussian(0.5, 0.2),
        weights=LossWeights(1.0, 1.0, 1.0, 1.0),
        train=TrainConfig(batch_size=16, epochs=3, seed=5, hidden=(8, 8), log_every=0),
    )


@pytest.fixture
def synthetic_small():
    return synth_generate(SyntheticSpec(n=200, seed=11))


@pytest.fixture
def config_document():
    """A small, quick-to-train config as a JSON-ready dict"""
    return {
        'features': [
            {'name': 'x1', 'direction': 'positive'},
            {'name': 'x2', 'direction': 'positive', 'tier': 2},
            {'name': 'x3', 'direction': 'positive', 'tier': 1},
            {'name': 'x4', 'direction': 'positive', 'tier': 0},
        ],
        'bounds': [0.0, 10.0],
        'distribution': {'kind': 'gaussian', 'mu': 5.0, 'sigma': 1.0},
        'weights': {'alpha': 1.0, 'beta': 1.0, 'gamma': 1.0, 'delta': 1.0},
        'label': 'y',
        'train': {'batch_size': 32, 'epochs': 4, 'seed': 7, 'hidden': [8, 8], 'log_every': 0},
    }


@pytest.fixture
def config_file(tmp_path, config_document):
    path = tmp_path / 'config.json'
    path.write_text(json.dumps(config_document), encoding='utf-8')
    return path


@pytest.fixture
def data_file(tmp_path, synthetic_small):
    path = tmp_path / 'data.csv'
    write_csv(synthetic_small, path)
    return path


@pytest.fixture
def runner():
    return CliRunner()
