"""Tests for normalization and direction transforms."""

import numpy as np
import pytest

from models import Dataset, Direction, FeatureSpec
from models_network import MonotoneMlp
from utils.errors import DegenerateFeatureError, SchemaMismatchError
from utils.feature_pipeline import FeaturePipeline, apply_direction, fit_normalize, normalize

ALL_DIRECTIONS = list(Direction)


class TestFitNormalize:
    def test_min_max(self):
        data = Dataset(('a',), np.array([[0.0], [5.0], [10.0]]))
        normalized, stats = fit_normalize(data)
        np.testing.assert_allclose(normalized.rows[:, 0], [0.0, 0.5, 1.0])
        assert stats.mins == (0.0,) and stats.maxs == (10.0,)

    def test_constant_column_named(self):
        data = Dataset(('a', 'flat'), np.array([[1.0, 7.0], [2.0, 7.0], [3.0, 7.0]]))
        with pytest.raises(DegenerateFeatureError) as excinfo:
            fit_normalize(data)
        assert excinfo.value.column == 'flat'

    def test_unseen_values_clamped(self):
        data = Dataset(('a',), np.array([[0.0], [10.0]]))
        _, stats = fit_normalize(data)
        np.testing.assert_allclose(normalize(np.array([[12.0], [-3.0], [4.0]]), stats), [[1.0], [0.0], [0.4]])


class TestApplyDirection:
    def test_negative(self):
        assert apply_direction(0.3, Direction.NEGATIVE) == pytest.approx(0.7)

    def test_negative_is_involution(self):
        x = np.linspace(0, 1, 101)
        np.testing.assert_allclose(apply_direction(apply_direction(x, Direction.NEGATIVE), Direction.NEGATIVE), x)

    def test_positive_is_identity(self):
        x = np.linspace(0, 1, 11)
        np.testing.assert_array_equal(apply_direction(x, Direction.POSITIVE), x)

    def test_convex_linear(self):
        assert apply_direction(0.2, Direction.CONVEX_LINEAR) == pytest.approx(0.2)
        assert apply_direction(0.8, Direction.CONVEX_LINEAR) == pytest.approx(0.2)

    def test_convex_quadratic_continuous_at_half(self):
        assert apply_direction(0.5, Direction.CONVEX_QUADRATIC) == 0.25
        assert apply_direction(0.5 + 1e-12, Direction.CONVEX_QUADRATIC) == pytest.approx(0.25)

    @pytest.mark.parametrize('direction', ALL_DIRECTIONS)
    def test_maps_unit_interval_into_itself(self, direction):
        x = np.linspace(0, 1, 1001)
        y = apply_direction(x, direction)
        assert np.all((y >= 0) & (y <= 1))

    @pytest.mark.parametrize('direction', [Direction.CONVEX_LINEAR, Direction.CONVEX_QUADRATIC])
    def test_convex_symmetric(self, direction):
        x = np.linspace(0, 1, 1001)
        np.testing.assert_allclose(apply_direction(x, direction), apply_direction(1 - x, direction), atol=1e-12)


class TestFeaturePipeline:
    def _data(self):
        rows = np.array([[0.0, 10.0, 3.0], [5.0, 20.0, 1.0], [10.0, 30.0, 2.0]])
        return Dataset(('a', 'b', 'c'), rows)

    def test_transform(self):
        features = [FeatureSpec('b', Direction.NEGATIVE), FeatureSpec('a')]
        pipeline = FeaturePipeline.fit(self._data(), features)
        np.testing.assert_allclose(pipeline.transform(self._data()), [[1.0, 0.0], [0.5, 0.5], [0.0, 1.0]])

    def test_missing_column(self):
        pipeline = FeaturePipeline.fit(self._data(), [FeatureSpec('a'), FeatureSpec('b')])
        other = Dataset(('a', 'z'), np.zeros((2, 2)))
        with pytest.raises(SchemaMismatchError) as excinfo:
            pipeline.transform(other)
        assert excinfo.value.missing == ['b']
        assert excinfo.value.extra == ['z']

    def test_round_trip(self):
        pipeline = FeaturePipeline.fit(self._data(), [FeatureSpec('c', Direction.CONVEX_QUADRATIC)])
        restored = FeaturePipeline.from_dict(pipeline.to_dict())
        np.testing.assert_array_equal(restored.transform(self._data()), pipeline.transform(self._data()))

    def test_negative_feature_decreases_score(self):
        """A monotone network after the negative transform is nonincreasing in the raw feature"""
        data = Dataset(('cost', 'quality'), np.array([[0.0, 0.0], [100.0, 1.0]]))
        features = [FeatureSpec('cost', Direction.NEGATIVE), FeatureSpec('quality')]
        model = MonotoneMlp.init(2, (8, 8), monotone=True, seed=4)
        model.feature_pipeline = FeaturePipeline.fit(data, features)

        costs = np.linspace(0, 100, 50)
        sample = Dataset(('cost', 'quality'), np.column_stack([costs, np.full(50, 0.5)]))
        scores = model.score(sample)
        assert np.all(np.diff(scores) <= 1e-12)
