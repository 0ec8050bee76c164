#!/usr/bin/env python3
"""
Shipped constraint configurations for the benchmark datasets.

The data files are user-supplied; column names below are the ones the
configs expect in the CSV header.
"""

import copy
import math
from typing import Any, Dict, List

from models import ConstraintConfig
from utils.constraint_config import config_from_dict
from utils.errors import InvalidConfigError


def _features(*specs) -> List[Dict[str, Any]]:
    features = []
    for name, direction, tier in specs:
        entry: Dict[str, Any] = {'name': name, 'direction': direction}
        if tier is not None:
            entry['tier'] = tier
        features.append(entry)
    return features


# y = x1 + 5*x2 + 15*x3 + x4^2 with x ~ N(10, 3): E[y] = 313, Var[y] = 1971
SYNTHETIC = {
    'features': _features(
        ('x1', 'positive', None),
        ('x2', 'positive', 2),
        ('x3', 'positive', 1),
        ('x4', 'positive', 0),
    ),
    'bounds': [19.62, 654.45],
    'distribution': {'kind': 'gaussian', 'mu': 313.0, 'sigma': math.sqrt(1971.0)},
    # Ratio terms have no minimum short of zero gradient on every lower feature,
    # so the run length sets how far x1..x3 are suppressed. Heavier lower tiers
    # hold x3 and x2 up against the x4 tier.
    'weights': {'alpha': 1.0, 'beta': 1.0, 'gamma': 1.0, 'delta': 1.0, 'tiers': [1.0, 3.0, 3.0]},
    'train': {'epochs': 200, 'learning_rate': 1.5e-4},
    'label': 'y',
}

CWUR = {
    'features': _features(
        ('national_rank', 'positive', 3),
        ('quality_of_faculty', 'positive', 2),
        ('publications', 'positive', 0),
        ('influence', 'positive', 1),
        ('citations', 'positive', 1),
        ('broad_impact', 'positive', 2),
        ('patents', 'positive', 0),
    ),
    'bounds': [40.0, 100.0],
    'mode': 45.0,
    'squared_bound': True,
    'weights': {'alpha': 1.0, 'beta': 1.0, 'gamma': 1.0, 'delta': 1.0},
    'label': 'score',
}

JOURNAL = {
    'features': _features(
        ('percent_cited', 'positive', 2),
        ('snip', 'positive', 1),
        ('sjr', 'positive', 0),
    ),
    'bounds': [5.0, 150.0],
    'mode': 13.0,
    'squared_bound': True,
    'weights': {'alpha': 1.0, 'beta': 1.0, 'gamma': 1.0, 'delta': 1.0},
    'label': 'impact_rating',
}

AD = {
    'features': _features(
        ('amount_spent', 'negative', None),
        ('clicks', 'positive', 2),
        ('click_through_rate', 'positive', None),
        ('cost_per_click', 'negative', None),
        ('cost_per_lead', 'negative', 1),
        ('impressions', 'positive', 2),
        ('leads', 'positive', 2),
        ('lead_generation_rate', 'positive', 0),
    ),
    'bounds': [0.0, 10.0],
    'distribution': {'kind': 'gaussian', 'mu': 5.0, 'sigma': 1.0},
    'weights': {'alpha': 1.0, 'beta': 1.0, 'gamma': 1.0, 'delta': 1.0},
}

IMDB = {
    'features': _features(
        ('votes', 'positive', None),
        ('avg_vote', 'positive', None),
        ('budget', 'negative', None),
        ('gross_income', 'positive', 0),
        ('metascore', 'positive', None),
        ('reviews_from_users', 'positive', None),
        ('reviews_from_critics', 'positive', None),
    ),
    'bounds': [0.0, 10.0],
    'distribution': {'kind': 'gaussian', 'mu': 5.0, 'sigma': 1.0},
    'weights': {'alpha': 1.0, 'beta': 1.0, 'gamma': 1.0, 'delta': 1.0},
}

PRESETS: Dict[str, Dict[str, Any]] = {
    'synthetic': SYNTHETIC,
    'cwur': CWUR,
    'journal': JOURNAL,
    'ad': AD,
    'imdb': IMDB,
}


def preset_document(name: str) -> Dict[str, Any]:
    try:
        return copy.deepcopy(PRESETS[name])
    except KeyError:
        raise InvalidConfigError(f"Unknown preset '{name}'; choose from {', '.join(PRESETS)}") from None


def preset(name: str) -> ConstraintConfig:
    """A validated config for one of the shipped datasets"""
    return config_from_dict(preset_document(name))
