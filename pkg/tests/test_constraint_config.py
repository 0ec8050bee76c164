"""Tests for constraint config parsing, validation and the shipped presets."""

import copy
import json

import pytest

from models import Direction, DistributionKind, LossComponent
from utils.constraint_config import (
    config_digest,
    config_from_dict,
    config_to_dict,
    load_config,
    parse_config,
    serialize_config,
)
from utils.errors import ConfigValidationError, InvalidConfigError
from utils.presets import PRESETS, preset, preset_document

MINIMAL = {'features': [{'name': 'a'}], 'bounds': [0, 1]}


def _codes(doc):
    with pytest.raises(ConfigValidationError) as excinfo:
        config_from_dict(doc)
    return excinfo.value


class TestParse:
    def test_minimal(self):
        config = config_from_dict(MINIMAL)
        assert config.feature_names == ['a']
        assert config.features[0].direction is Direction.POSITIVE
        assert config.enabled_components() == frozenset({LossComponent.BOUND})
        assert config.train.epochs == 200

    def test_full_document(self, config_document):
        config = config_from_dict(config_document)
        assert config.bounds == (0.0, 10.0)
        assert config.distribution.kind is DistributionKind.GAUSSIAN
        assert config.tiers.tiers == ((3,), (2,), (1,))
        assert config.train.hidden == (8, 8)
        assert config.label == 'y'

    def test_mode_inside_bounds(self):
        doc = {'features': [{'name': 'a'}], 'bounds': [40, 100], 'mode': 45}
        assert config_from_dict(doc).mode == 45

    def test_load_from_file(self, config_file):
        assert load_config(config_file).label == 'y'

    def test_round_trip(self, config_document):
        config = config_from_dict(config_document)
        assert parse_config(serialize_config(config)) == config

    def test_digest_stable(self, config_document):
        first = config_from_dict(config_document)
        second = config_from_dict(copy.deepcopy(config_document))
        assert config_digest(first) == config_digest(second)
        changed = copy.deepcopy(config_document)
        changed['bounds'] = [0.0, 11.0]
        assert config_digest(config_from_dict(changed)) != config_digest(first)

    def test_serialized_keys_sorted(self, config_document):
        text = serialize_config(config_from_dict(config_document))
        assert list(json.loads(text)) == sorted(json.loads(text))


class TestValidation:
    def test_mode_outside_bounds(self):
        error = _codes({'features': [{'name': 'a'}], 'bounds': [6, 10], 'mode': 5})
        assert error.code == 'mode_outside_bounds'
        assert error.path == '$.mode'

    def test_unknown_top_level_key(self):
        error = _codes({**MINIMAL, 'bonuds': [0, 1]})
        assert error.code == 'unknown_key'
        assert error.path == '$.bonuds'

    def test_unknown_nested_key(self):
        error = _codes({'features': [{'name': 'a', 'teir': 0}], 'bounds': [0, 1]})
        assert error.code == 'unknown_key'
        assert error.path == '$.features[0].teir'

    def test_missing_features(self):
        assert _codes({'bounds': [0, 1]}).code == 'missing_key'

    def test_bad_direction(self):
        error = _codes({'features': [{'name': 'a', 'direction': 'sideways'}], 'bounds': [0, 1]})
        assert error.code == 'invalid_value'
        assert error.path == '$.features[0].direction'

    def test_bounds_order(self):
        assert _codes({'features': [{'name': 'a'}], 'bounds': [1, 1]}).code == 'bounds_order'

    def test_duplicate_feature(self):
        error = _codes({'features': [{'name': 'a'}, {'name': 'a'}], 'bounds': [0, 1]})
        assert error.code == 'duplicate_feature'
        assert error.path == '$.features[1].name'

    def test_no_loss_enabled(self):
        assert _codes({'features': [{'name': 'a'}]}).code == 'no_loss_enabled'

    def test_rescale_without_bounds(self):
        doc = {'features': [{'name': 'a', 'tier': 0}, {'name': 'b', 'tier': 1}], 'rescale_after_training': True}
        assert _codes(doc).code == 'rescale_without_bounds'

    @pytest.mark.parametrize('distribution', [
        {'kind': 'gaussian', 'mu': 1.0},
        {'kind': 'gaussian', 'mu': 1.0, 'sigma': 0.0},
        {'kind': 'exponential'},
    ])
    def test_distribution_parameters(self, distribution):
        assert _codes({**MINIMAL, 'distribution': distribution}).code == 'distribution_parameters'

    def test_too_many_tier_weights(self):
        doc = {'features': [{'name': 'a', 'tier': 0}], 'weights': {'tiers': [1.0, 2.0]}}
        assert _codes(doc).code == 'tier_weights'

    def test_negative_weight(self):
        error = _codes({**MINIMAL, 'weights': {'alpha': -1}})
        assert error.code == 'invalid_value'
        assert error.path == '$.weights.alpha'

    def test_bad_train_section(self):
        assert _codes({**MINIMAL, 'train': {'epochs': 0}}).code == 'invalid_value'

    @pytest.mark.parametrize('text', ['{"features": [', '{"features": [{"name": "a"}], "bounds": [0, NaN]}'])
    def test_invalid_json(self, text):
        with pytest.raises(ConfigValidationError) as excinfo:
            parse_config(text)
        assert excinfo.value.code == 'invalid_json'

    def test_is_invalid_config_error(self):
        assert issubclass(ConfigValidationError, InvalidConfigError)
        assert ConfigValidationError.exit_code == 2

    def test_distribution_outside_bounds_warns(self, caplog):
        doc = {**MINIMAL, 'distribution': {'kind': 'gaussian', 'mu': 5.0, 'sigma': 1.0}}
        with caplog.at_level('WARNING'):
            config_from_dict(doc)
        assert 'outside bounds' in caplog.text


class TestPresets:
    @pytest.mark.parametrize('name', sorted(PRESETS))
    def test_every_preset_validates(self, name):
        config = preset(name)
        assert config.enabled_components()
        assert config_from_dict(config_to_dict(config)) == config

    def test_journal(self):
        config = preset('journal')
        assert config.bounds == (5.0, 150.0)
        assert config.mode == 13.0
        assert config.feature_names == ['percent_cited', 'snip', 'sjr']
        assert config.squared_bound

    def test_cwur(self):
        config = preset('cwur')
        assert config.bounds == (40.0, 100.0)
        assert config.mode == 45.0
        assert config.label == 'score'

    def test_imdb(self):
        config = preset('imdb')
        assert config.distribution.mu == 5.0 and config.distribution.sigma == 1.0
        assert Direction.NEGATIVE in config.directions

    def test_synthetic_tiers(self):
        config = preset('synthetic')
        assert config.distribution.mu == 313.0
        assert len(config.tiers.tiers) == 3
        assert config.weights.tiers == (1.0, 3.0, 3.0)
        assert config.train.epochs == 200
        assert config.train.learning_rate == 1.5e-4

    def test_document_is_a_copy(self):
        document = preset_document('cwur')
        document['features'].clear()
        assert preset('cwur').features

    def test_unknown(self):
        with pytest.raises(InvalidConfigError):
            preset('nope')
