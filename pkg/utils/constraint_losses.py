#!/usr/bin/env python3
"""
Constraint losses as graph constructions, and the weighted objective.

All losses are batch means so their weights do not depend on batch size.
"""

import math
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from models import ConstraintConfig, DistributionKind, LossComponent, LossWeights, SensitivityTiers, TargetDistribution
from utils.autodiff import Graph, Node
from utils.errors import ContractError, DomainError, InvalidConfigError


SENSITIVITY_EPS = 1e-8
SIGMA_FLOOR = 1e-6
LOG_2PI = math.log(2.0 * math.pi)


def bound_loss(g: Graph, scores: Node, a: float, b: float, squared: bool = False) -> Node:
    """Mean hinge penalty max(0, a - f) + max(0, f - b); squared terms when asked"""
    if not b > a:
        raise InvalidConfigError(f"Bounds need a < b, got [{a}, {b}]")
    below = g.relu(g.shift(g.neg(scores), a))
    above = g.relu(g.shift(scores, -b))
    if squared:
        below, above = g.square(below), g.square(above)
    return g.mean(g.add(below, above))


def mode_loss(g: Graph, scores: Node, m: float) -> Node:
    """Mean absolute deviation from the mode m"""
    return g.mean(g.abs(g.shift(scores, -m)))


def _mask(n_features: int, indices: Sequence[int]) -> np.ndarray:
    column = np.zeros((n_features, 1))
    column[list(indices), 0] = 1.0
    return column


def sensitivity_loss(g: Graph, grads: Node, tiers: SensitivityTiers,
                     tier_weights: Sequence[float] = ()) -> Node:
    """
    Sum over tiers of (gradient mass of lower-ranked features) /
    (eps + gradient mass of the tier), averaged over the batch.

    With a single tier {i} this is sum_{j != i} df/dx_j / df/dx_i.
    """
    n_features = grads.shape[1]
    tiers.validate(n_features)

    terms = []
    for position, tier in enumerate(tiers.tiers):
        lower = tiers.lower_than(position, n_features)
        if not tier or not lower:
            continue
        numerator = g.matmul(grads, g.constant(_mask(n_features, lower)))
        denominator = g.shift(g.matmul(grads, g.constant(_mask(n_features, tier))), SENSITIVITY_EPS)
        term = g.div(numerator, denominator)
        weight = tier_weights[position] if position < len(tier_weights) else 1.0
        if weight != 1.0:
            term = g.scale(term, weight)
        terms.append(term)

    if not terms:
        return g.constant([[0.0]])
    total = terms[0]
    for term in terms[1:]:
        total = g.add(total, term)
    return g.mean(total)


def batch_moments(g: Graph, scores: Node) -> Tuple[Node, Node]:
    """Mean and population standard deviation of a score column (std floored at 1e-6)"""
    batch = scores.shape[0]
    if batch < 2:
        raise ContractError(f"Batch moments need at least 2 scores, got {batch}")
    mu = g.mean(scores)
    centered = g.sub(scores, g.matmul(g.ones(batch, 1), mu))
    variance = g.mean(g.square(centered))
    sigma = g.sqrt(g.clamp_min(variance, SIGMA_FLOOR ** 2))
    return mu, sigma


def _check_sigma(sigma: Node):
    if np.any(sigma.value <= 0):
        raise DomainError("Score standard deviation must be positive")


def kl_gaussian(g: Graph, mu1: Node, sigma1: Node, mu2: float, sigma2: float) -> Node:
    """Reverse KL(q || p), q = N(mu1, sigma1^2), p = N(mu2, sigma2^2)"""
    if not sigma2 > 0:
        raise DomainError(f"Target sigma must be positive, got {sigma2}")
    _check_sigma(sigma1)
    log_ratio = g.shift(g.neg(g.log(sigma1)), math.log(sigma2) - 0.5)
    spread = g.add(g.square(sigma1), g.square(g.shift(mu1, -mu2)))
    return g.add(log_ratio, g.scale(spread, 1.0 / (2.0 * sigma2 ** 2)))


def kl_exponential(g: Graph, mu1: Node, sigma1: Node, lam: float) -> Node:
    """-1/2 - 1/2 log(2 pi sigma1^2) - log(lam) + lam*mu1, as printed; can be negative"""
    if not lam > 0:
        raise DomainError(f"Exponential rate must be positive, got {lam}")
    _check_sigma(sigma1)
    body = g.add(g.neg(g.log(sigma1)), g.scale(mu1, lam))
    return g.shift(body, -0.5 - 0.5 * LOG_2PI - math.log(lam))


def gaussian_kl_value(mu1: float, sigma1: float, mu2: float, sigma2: float) -> float:
    if not (sigma1 > 0 and sigma2 > 0):
        raise DomainError("Standard deviations must be positive")
    return math.log(sigma2 / sigma1) + (sigma1 ** 2 + (mu1 - mu2) ** 2) / (2.0 * sigma2 ** 2) - 0.5


def exponential_kl_value(mu1: float, sigma1: float, lam: float) -> float:
    if not (sigma1 > 0 and lam > 0):
        raise DomainError("sigma and lambda must be positive")
    return -0.5 - 0.5 * math.log(2.0 * math.pi * sigma1 ** 2) - math.log(lam) + mu1 * lam


def distribution_loss(g: Graph, scores: Node, target: TargetDistribution) -> Node:
    mu1, sigma1 = batch_moments(g, scores)
    if target.kind is DistributionKind.GAUSSIAN:
        return kl_gaussian(g, mu1, sigma1, target.mu, target.sigma)
    if target.kind is DistributionKind.EXPONENTIAL:
        return kl_exponential(g, mu1, sigma1, target.lam)
    raise InvalidConfigError("No target distribution configured")


def total_loss(g: Graph, components: Mapping[LossComponent, Node], weights: LossWeights) -> Node:
    """Weighted sum over the enabled components; absent components contribute nothing"""
    if not components:
        raise InvalidConfigError("At least one loss component must be enabled")
    total = None
    for component in LossComponent:
        node = components.get(component)
        if node is None:
            continue
        weighted = g.scale(node, weights.for_component(component))
        total = weighted if total is None else g.add(total, weighted)
    return total


def build_objective(g: Graph, trace, config: ConstraintConfig,
                    enabled: Optional[frozenset] = None) -> Tuple[Node, Dict[LossComponent, Node]]:
    """Component nodes for one forward trace plus their weighted total"""
    enabled = config.enabled_components() if enabled is None else enabled & config.enabled_components()
    scores = trace.scores
    components: Dict[LossComponent, Node] = {}
    if LossComponent.BOUND in enabled:
        a, b = config.bounds
        components[LossComponent.BOUND] = bound_loss(g, scores, a, b, config.squared_bound)
    if LossComponent.MODE in enabled:
        components[LossComponent.MODE] = mode_loss(g, scores, config.mode)
    if LossComponent.SENSITIVITY in enabled:
        # input-gradient chain only when it carries weight
        if config.weights.beta > 0:
            components[LossComponent.SENSITIVITY] = sensitivity_loss(
                g, trace.input_gradients(), config.tiers, config.weights.tiers)
        else:
            components[LossComponent.SENSITIVITY] = g.constant([[0.0]])
    if LossComponent.DISTRIBUTION in enabled:
        components[LossComponent.DISTRIBUTION] = distribution_loss(g, scores, config.distribution)
    return total_loss(g, components, config.weights), components
