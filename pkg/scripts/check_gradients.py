#!/usr/bin/env python3
"""
Script to compare autodiff parameter gradients of every loss against
central finite differences on a small random model
"""

import os
import sys

import numpy as np

# Add the project root to Python path
BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, BASE_DIR)

from models import ConstraintConfig, FeatureSpec, LossComponent, LossWeights, TargetDistribution
from models_network import MonotoneMlp
from utils.autodiff import Graph, numerical_gradient
from utils.constraint_losses import build_objective

CONFIG = ConstraintConfig(
    features=(FeatureSpec('x1'), FeatureSpec('x2', tier=2), FeatureSpec('x3', tier=1), FeatureSpec('x4', tier=0)),
    bounds=(0.2, 0.8),
    mode=0.5,
    distribution=TargetDistribution.gaussian(0.5, 0.2),
    weights=LossWeights(1.0, 1.0, 1.0, 1.0),
)


def relative_error(analytic, numeric):
    scale = max(np.abs(analytic).max(), np.abs(numeric).max(), 1e-12)
    return float(np.abs(analytic - numeric).max() / scale)


def check_component(model, x, component):
    enabled = frozenset({component})

    def objective(arrays):
        g = Graph()
        params = [g.parameter(a) for a in arrays]
        total, _ = build_objective(g, model.build(g, x, params), CONFIG, enabled)
        return float(total.value[0, 0])

    g = Graph()
    trace = model.build(g, x)
    total, _ = build_objective(g, trace, CONFIG, enabled)
    grads = g.backward(total)
    analytic = [grads[node.id] for node in trace.params]
    numeric = numerical_gradient(objective, model.parameters())
    return max(relative_error(a, n) for a, n in zip(analytic, numeric))


def check_gradients(seed=0):
    rng = np.random.default_rng(seed)
    model = MonotoneMlp.init(4, (8, 8), monotone=True, seed=seed)
    x = rng.uniform(0.0, 1.0, size=(16, 4))
    print(f"Gradient check on a 4-feature, width-8 model (seed {seed})")
    worst = 0.0
    for component in LossComponent:
        error = check_component(model, x, component)
        worst = max(worst, error)
        status = "OK" if error < 1e-3 else "MISMATCH"
        print(f"  {component.value:<13} max relative error {error:.2e}  {status}")
    return worst


if __name__ == '__main__':
    worst = check_gradients(int(sys.argv[1]) if len(sys.argv) > 1 else 0)
    sys.exit(0 if worst < 1e-3 else 1)
