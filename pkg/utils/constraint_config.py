#!/usr/bin/env python3
"""
Constraint configuration: the expert's JSON document, validated strictly.

Unknown keys are rejected so that a typo in a hand-written file fails loudly
instead of silently dropping a constraint.
"""

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Union

from jsonschema import Draft7Validator

from models import (
    ConstraintConfig,
    Direction,
    DistributionKind,
    FeatureSpec,
    LossWeights,
    OptimizerConfig,
    OptimizerKind,
    TargetDistribution,
    TrainConfig,
)
from utils.errors import ConfigValidationError, InvalidConfigError

logger = logging.getLogger(__name__)

_NUMBER = {'type': 'number'}
_WEIGHT = {'type': 'number', 'minimum': 0}

CONFIG_SCHEMA: Dict[str, Any] = {
    '$schema': 'http://json-schema.org/draft-07/schema#',
    'type': 'object',
    'additionalProperties': False,
    'required': ['features'],
    'properties': {
        'features': {
            'type': 'array',
            'minItems': 1,
            'items': {
                'type': 'object',
                'additionalProperties': False,
                'required': ['name'],
                'properties': {
                    'name': {'type': 'string', 'minLength': 1},
                    'direction': {'enum': [d.value for d in Direction]},
                    'tier': {'type': 'integer', 'minimum': 0},
                },
            },
        },
        'bounds': {'type': 'array', 'items': _NUMBER, 'minItems': 2, 'maxItems': 2},
        'mode': _NUMBER,
        'distribution': {
            'type': 'object',
            'additionalProperties': False,
            'required': ['kind'],
            'properties': {
                'kind': {'enum': [k.value for k in DistributionKind]},
                'mu': _NUMBER,
                'sigma': _NUMBER,
                'lambda': _NUMBER,
            },
        },
        'weights': {
            'type': 'object',
            'additionalProperties': False,
            'properties': {
                'alpha': _WEIGHT,
                'beta': _WEIGHT,
                'gamma': _WEIGHT,
                'delta': _WEIGHT,
                'tiers': {'type': 'array', 'items': _WEIGHT},
            },
        },
        'rescale_after_training': {'type': 'boolean'},
        'squared_bound': {'type': 'boolean'},
        'label': {'type': 'string', 'minLength': 1},
        'train': {
            'type': 'object',
            'additionalProperties': False,
            'properties': {
                'batch_size': {'type': 'integer', 'minimum': 2},
                'epochs': {'type': 'integer', 'minimum': 1},
                'learning_rate': {'type': 'number', 'exclusiveMinimum': 0},
                'optimizer': {
                    'type': 'object',
                    'additionalProperties': False,
                    'properties': {
                        'kind': {'enum': [k.value for k in OptimizerKind]},
                        'beta1': {'type': 'number', 'minimum': 0, 'exclusiveMaximum': 1},
                        'beta2': {'type': 'number', 'minimum': 0, 'exclusiveMaximum': 1},
                        'eps': {'type': 'number', 'exclusiveMinimum': 0},
                        'momentum': {'type': 'number', 'minimum': 0},
                    },
                },
                'seed': {'type': 'integer'},
                'shuffle': {'type': 'boolean'},
                'hidden': {
                    'type': 'array',
                    'items': {'type': 'integer', 'minimum': 1},
                    'minItems': 2,
                    'maxItems': 2,
                },
                'monotone': {'type': 'boolean'},
                'log_every': {'type': 'integer', 'minimum': 0},
            },
        },
    },
}

_VALIDATOR = Draft7Validator(CONFIG_SCHEMA)


def _json_path(parts) -> str:
    path = '$'
    for part in parts:
        path += f'[{part}]' if isinstance(part, int) else f'.{part}'
    return path


def _schema_error(error) -> ConfigValidationError:
    parts = list(error.absolute_path)
    if error.validator == 'additionalProperties':
        allowed = set(error.schema.get('properties', {}))
        unknown = sorted(set(error.instance) - allowed)
        return ConfigValidationError('unknown_key', _json_path(parts + unknown[:1]),
                                     f"unknown key(s) {', '.join(unknown)}")
    if error.validator == 'required':
        return ConfigValidationError('missing_key', _json_path(parts), error.message)
    return ConfigValidationError('invalid_value', _json_path(parts), error.message)


def _reject_constant(token: str):
    raise ConfigValidationError('invalid_json', '$', f"non-finite number {token} is not allowed")


def _check_semantics(doc: Dict[str, Any]):
    names = set()
    for i, feature in enumerate(doc['features']):
        if feature['name'] in names:
            raise ConfigValidationError('duplicate_feature', f'$.features[{i}].name',
                                        f"feature '{feature['name']}' listed twice")
        names.add(feature['name'])

    bounds = doc.get('bounds')
    if bounds is not None and not bounds[0] < bounds[1]:
        raise ConfigValidationError('bounds_order', '$.bounds', f"lower bound {bounds[0]} must be below {bounds[1]}")

    mode = doc.get('mode')
    if mode is not None and bounds is not None and not bounds[0] <= mode <= bounds[1]:
        raise ConfigValidationError('mode_outside_bounds', '$.mode', f"mode {mode} outside bounds {bounds}")

    distribution = doc.get('distribution') or {'kind': 'none'}
    if distribution['kind'] == 'gaussian':
        if 'mu' not in distribution:
            raise ConfigValidationError('distribution_parameters', '$.distribution.mu', "gaussian target needs mu")
        if not distribution.get('sigma', 0) > 0:
            raise ConfigValidationError('distribution_parameters', '$.distribution.sigma',
                                        "gaussian target needs sigma > 0")
    elif distribution['kind'] == 'exponential' and not distribution.get('lambda', 0) > 0:
        raise ConfigValidationError('distribution_parameters', '$.distribution.lambda',
                                    "exponential target needs lambda > 0")

    tiers = {f['tier'] for f in doc['features'] if 'tier' in f}
    tier_weights = (doc.get('weights') or {}).get('tiers', [])
    if len(tier_weights) > len(tiers):
        raise ConfigValidationError('tier_weights', '$.weights.tiers',
                                    f"{len(tier_weights)} tier weights for {len(tiers)} tiers")

    if doc.get('rescale_after_training') and bounds is None:
        raise ConfigValidationError('rescale_without_bounds', '$.rescale_after_training',
                                    "rescaling needs bounds to rescale into")

    if bounds is None and mode is None and not tiers and distribution['kind'] == 'none':
        raise ConfigValidationError('no_loss_enabled', '$', "no bounds, mode, tiers or distribution configured")


def _warn_distribution_outside_bounds(config: ConstraintConfig):
    if config.bounds is None or not config.distribution.enabled:
        return
    a, b = config.bounds
    target = config.distribution
    centre = target.mu if target.kind is DistributionKind.GAUSSIAN else 1.0 / target.lam
    if not a <= centre <= b:
        logger.warning(f"Target distribution centre {centre} lies outside bounds [{a}, {b}]")


def config_from_dict(doc: Dict[str, Any]) -> ConstraintConfig:
    """Validate a decoded document and build the config"""
    errors = sorted(_VALIDATOR.iter_errors(doc), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        raise _schema_error(errors[0])
    _check_semantics(doc)

    features = tuple(
        FeatureSpec(f['name'], Direction(f.get('direction', 'positive')), f.get('tier'))
        for f in doc['features']
    )
    distribution = doc.get('distribution') or {'kind': 'none'}
    kind = DistributionKind(distribution['kind'])
    if kind is DistributionKind.GAUSSIAN:
        target = TargetDistribution.gaussian(distribution['mu'], distribution['sigma'])
    elif kind is DistributionKind.EXPONENTIAL:
        target = TargetDistribution.exponential(distribution['lambda'])
    else:
        target = TargetDistribution()

    weights_doc = doc.get('weights') or {}
    weights = LossWeights(
        alpha=weights_doc.get('alpha', 1.0),
        beta=weights_doc.get('beta', 1.0),
        gamma=weights_doc.get('gamma', 1.0),
        delta=weights_doc.get('delta', 1.0),
        tiers=tuple(weights_doc.get('tiers', ())),
    )

    train_doc = dict(doc.get('train') or {})
    optimizer_doc = dict(train_doc.pop('optimizer', {}) or {})
    if 'kind' in optimizer_doc:
        optimizer_doc['kind'] = OptimizerKind(optimizer_doc['kind'])
    if 'hidden' in train_doc:
        train_doc['hidden'] = tuple(train_doc['hidden'])
    try:
        train = TrainConfig(optimizer=OptimizerConfig(**optimizer_doc), **train_doc)
    except InvalidConfigError as e:
        raise ConfigValidationError('invalid_value', '$.train', str(e)) from None

    bounds = doc.get('bounds')
    config = ConstraintConfig(
        features=features,
        bounds=tuple(bounds) if bounds is not None else None,
        mode=doc.get('mode'),
        distribution=target,
        weights=weights,
        rescale_after_training=doc.get('rescale_after_training', False),
        squared_bound=doc.get('squared_bound', False),
        label=doc.get('label'),
        train=train,
    )
    _warn_distribution_outside_bounds(config)
    return config


def parse_config(document: str) -> ConstraintConfig:
    """Parse and validate a JSON constraint document"""
    try:
        doc = json.loads(document, parse_constant=_reject_constant)
    except json.JSONDecodeError as e:
        raise ConfigValidationError('invalid_json', '$', str(e)) from None
    return config_from_dict(doc)


def load_config(path: Union[str, Path]) -> ConstraintConfig:
    return parse_config(Path(path).read_text(encoding='utf-8'))


def config_to_dict(config: ConstraintConfig) -> Dict[str, Any]:
    features: List[Dict[str, Any]] = []
    for spec in config.features:
        entry = {'name': spec.name, 'direction': spec.direction.value}
        if spec.tier is not None:
            entry['tier'] = spec.tier
        features.append(entry)

    doc: Dict[str, Any] = {'features': features}
    if config.bounds is not None:
        doc['bounds'] = list(config.bounds)
    if config.mode is not None:
        doc['mode'] = config.mode
    target = config.distribution
    if target.kind is DistributionKind.GAUSSIAN:
        doc['distribution'] = {'kind': 'gaussian', 'mu': target.mu, 'sigma': target.sigma}
    elif target.kind is DistributionKind.EXPONENTIAL:
        doc['distribution'] = {'kind': 'exponential', 'lambda': target.lam}
    weights = config.weights
    doc['weights'] = {'alpha': weights.alpha, 'beta': weights.beta, 'gamma': weights.gamma, 'delta': weights.delta}
    if weights.tiers:
        doc['weights']['tiers'] = list(weights.tiers)
    doc['rescale_after_training'] = config.rescale_after_training
    doc['squared_bound'] = config.squared_bound
    if config.label is not None:
        doc['label'] = config.label
    train = config.train
    doc['train'] = {
        'batch_size': train.batch_size,
        'epochs': train.epochs,
        'learning_rate': train.learning_rate,
        'optimizer': {
            'kind': train.optimizer.kind.value,
            'beta1': train.optimizer.beta1,
            'beta2': train.optimizer.beta2,
            'eps': train.optimizer.eps,
            'momentum': train.optimizer.momentum,
        },
        'seed': train.seed,
        'shuffle': train.shuffle,
        'hidden': list(train.hidden),
        'monotone': train.monotone,
        'log_every': train.log_every,
    }
    return doc


def serialize_config(config: ConstraintConfig) -> str:
    return json.dumps(config_to_dict(config), indent=2, sort_keys=True)


def config_digest(config: ConstraintConfig) -> str:
    return hashlib.sha256(serialize_config(config).encode('utf-8')).hexdigest()

