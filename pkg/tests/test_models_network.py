"""Tests for the monotone scoring network and its persistence."""

import json

import numpy as np
import pytest
from scipy.stats import spearmanr

from models import Dataset, Direction, NormalizationStats
from models_network import MonotoneMlp, rescale_scores
from utils.autodiff import Graph, numerical_gradient
from utils.errors import DegenerateScoresError, InvalidConfigError, ShapeError
from utils.feature_pipeline import FeaturePipeline


def _numeric_input_gradients(model, x, h=1e-5):
    grads = np.zeros_like(x)
    for j in range(x.shape[1]):
        step = np.zeros_like(x)
        step[:, j] = h
        grads[:, j] = (model.predict_raw(x + step) - model.predict_raw(x - step)) / (2 * h)
    return grads


class TestInit:
    def test_seeded_determinism(self):
        first = MonotoneMlp.init(4, (64, 64), True, 7)
        second = MonotoneMlp.init(4, (64, 64), True, 7)
        for a, b in zip(first.parameters(), second.parameters()):
            np.testing.assert_array_equal(a, b)

    def test_different_seeds_differ(self):
        first = MonotoneMlp.init(4, (8, 8), True, 1)
        second = MonotoneMlp.init(4, (8, 8), True, 2)
        assert not np.array_equal(first.log_weights[0], second.log_weights[0])

    def test_monotone_weights_positive_and_centred(self):
        model = MonotoneMlp.init(4, (64, 64), True, 7)
        for w, fan_in in zip(model.effective_weights(), (4, 64, 64)):
            assert np.all(w > 0)
        for w, fan_in in zip(model.log_weights, (4, 64, 64)):
            assert np.all(np.abs(w - np.log(1.0 / fan_in)) <= 0.5)

    def test_non_monotone_init_range(self):
        model = MonotoneMlp.init(4, (8, 8), False, 7)
        for w, fan_in in zip(model.log_weights, (4, 8, 8)):
            assert np.all(np.abs(w) <= 1.0 / np.sqrt(fan_in))

    def test_biases_zero(self):
        model = MonotoneMlp.init(3, (5, 6), True, 0)
        assert [b.shape for b in model.biases] == [(1, 5), (1, 6), (1, 1)]
        assert all(np.all(b == 0) for b in model.biases)

    @pytest.mark.parametrize('n_features, hidden', [(0, (8, 8)), (4, (0, 8)), (4, (8,))])
    def test_invalid_dimensions(self, n_features, hidden):
        with pytest.raises(InvalidConfigError):
            MonotoneMlp.init(n_features, hidden, True, 0)


class TestForward:
    def test_batch_shape(self, small_model, rng):
        g = Graph()
        scores = small_model.forward(rng.uniform(size=(64, 4)), g)
        assert scores.shape == (64, 1)

    def test_zero_input_zero_biases(self, small_model):
        g = Graph()
        scores = small_model.forward(np.zeros((1, 4)), g)
        assert scores.value[0, 0] == 0.0

    def test_graph_matches_numpy(self, small_model, unit_rows):
        g = Graph()
        scores = small_model.forward(unit_rows, g)
        np.testing.assert_allclose(scores.value[:, 0], small_model.predict_raw(unit_rows), atol=1e-12)

    def test_feature_count_mismatch(self, small_model):
        with pytest.raises(ShapeError):
            small_model.forward(np.zeros((2, 3)), Graph())
        with pytest.raises(ShapeError):
            small_model.predict(np.zeros((2, 5)))

    def test_monotone_pairs(self, small_model):
        rng = np.random.default_rng(99)
        x = rng.uniform(size=(1000, 4))
        y = x + rng.uniform(0.0, 0.5, size=(1000, 4))
        assert np.all(small_model.predict(y) >= small_model.predict(x) - 1e-9)


class TestInputGradients:
    def test_positive_when_monotone(self, small_model):
        x = np.random.default_rng(5).uniform(size=(1000, 4))
        grads = small_model.input_gradients(x, Graph())
        assert grads.shape == (1000, 4)
        assert np.all(grads.value > 0)

    def test_unit_weights_on_positive_branch(self):
        zeros = [np.zeros((2, 1)), np.zeros((1, 1)), np.zeros((1, 1))]
        biases = [np.zeros((1, 1))] * 3
        model = MonotoneMlp([2, 1, 1, 1], zeros, biases, monotone=True)
        grads = model.input_gradients(np.array([[0.3, 0.4]]), Graph())
        np.testing.assert_allclose(grads.value, [[1.0, 1.0]])

    @pytest.mark.parametrize('monotone', [True, False])
    def test_matches_finite_differences(self, monotone):
        model = MonotoneMlp.init(4, (8, 8), monotone, seed=21)
        x = np.random.default_rng(8).uniform(size=(50, 4))
        analytic = model.input_gradients(x, Graph()).value
        np.testing.assert_allclose(analytic, _numeric_input_gradients(model, x), rtol=1e-4, atol=1e-8)

    def test_double_backprop_parameter_gradients(self, small_model, unit_rows):
        """Parameter gradients of a loss on input-gradients match finite differences"""
        def loss(g, trace):
            grads = trace.input_gradients()
            return g.mean(g.square(grads))

        g = Graph()
        trace = small_model.build(g, unit_rows)
        grads = g.backward(loss(g, trace))
        analytic = [grads[node.id] for node in trace.params]

        def value(arrays):
            h = Graph()
            params = [h.parameter(a) for a in arrays]
            return float(loss(h, small_model.build(h, unit_rows, params)).value[0, 0])

        numeric = numerical_gradient(value, small_model.parameters())
        for a, n in zip(analytic, numeric):
            np.testing.assert_allclose(a, n, rtol=1e-3, atol=1e-8)


class TestRescale:
    def test_endpoints(self):
        np.testing.assert_allclose(rescale_scores([2, 4, 6], 0, 10), [0, 5, 10])

    def test_already_spanning(self):
        np.testing.assert_allclose(rescale_scores([0, 3, 10], 0, 10), [0, 3, 10])

    def test_constant_scores(self):
        with pytest.raises(DegenerateScoresError):
            rescale_scores([5, 5, 5], 0, 10)

    def test_rank_preserving(self, rng):
        scores = rng.normal(size=200)
        rescaled = rescale_scores(scores, 40, 100)
        assert spearmanr(scores, rescaled).statistic == pytest.approx(1.0)

    def test_fit_output_range(self, small_model, unit_rows):
        model = small_model.copy()
        model.fit_output_range(unit_rows, 0.0, 10.0)
        scores = model.predict(unit_rows)
        assert scores.min() == pytest.approx(0.0, abs=1e-9)
        assert scores.max() == pytest.approx(10.0, abs=1e-9)
        np.testing.assert_array_equal(scores, rescale_scores(small_model.predict_raw(unit_rows), 0.0, 10.0))

    def test_fit_output_range_rejects_reversed_bounds(self, small_model, unit_rows):
        with pytest.raises(InvalidConfigError):
            small_model.copy().fit_output_range(unit_rows, 10.0, 0.0)


class TestPersistence:
    def _with_pipeline(self, model):
        stats = NormalizationStats(('a', 'b', 'c', 'd'), (0.0, 0.0, 1.0, -1.0), (1.0, 2.0, 3.0, 1.0))
        model = model.copy()
        model.feature_pipeline = FeaturePipeline(stats, [Direction.POSITIVE, Direction.NEGATIVE,
                                                         Direction.CONVEX_LINEAR, Direction.POSITIVE])
        model.constraint_digest = 'abc123'
        model.output_scale, model.output_shift = 2.5, -1.0
        return model

    def test_round_trip_exact(self, small_model, tmp_path):
        model = self._with_pipeline(small_model)
        path = tmp_path / 'model.json'
        model.save(path)
        loaded = MonotoneMlp.load(path)
        for a, b in zip(model.parameters(), loaded.parameters()):
            np.testing.assert_array_equal(a, b)
        assert loaded.monotone is True
        assert loaded.output_scale == 2.5 and loaded.output_shift == -1.0
        assert loaded.constraint_digest == 'abc123'
        assert loaded.feature_pipeline.directions == model.feature_pipeline.directions

    def test_document_keys(self, small_model):
        document = self._with_pipeline(small_model).to_dict()
        assert document['schema_version'] == 1
        assert document['layer_dims'] == [4, 8, 8, 1]
        assert document['monotone_flag'] is True
        assert set(document) >= {'log_weights', 'biases', 'feature_pipeline', 'constraint_config_digest'}
        json.dumps(document)

    def test_unknown_schema_version(self, small_model):
        document = small_model.to_dict()
        document['schema_version'] = 99
        with pytest.raises(InvalidConfigError):
            MonotoneMlp.from_dict(document)

    def test_score_uses_pipeline(self, small_model):
        model = self._with_pipeline(small_model)
        data = Dataset(('d', 'c', 'b', 'a', 'extra'), np.array([[0.0, 2.0, 1.0, 0.5, 9.0]]))
        x = model.feature_pipeline.transform(data)
        np.testing.assert_allclose(x, [[0.5, 0.5, 0.5, 0.5]])
        np.testing.assert_allclose(model.score(data), model.predict(x))

    def test_digest_changes_with_parameters(self, small_model):
        model = small_model.copy()
        before = model.parameter_digest()
        model.biases[0] += 1.0
        assert model.parameter_digest() != before
        assert small_model.parameter_digest() == before
