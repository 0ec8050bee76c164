#!/usr/bin/env python3
"""
The monotone scoring network and its persistence format.

Three dense layers, ELU on the two hidden layers, linear output. In
monotone mode the trainable matrices are log-weights and the effective
weights are exp(log-weight) > 0, so the score is nondecreasing in every
input. The output affine (scale, shift) carries post-training rescaling
and the label standardization of the supervised baseline.
"""

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from models import Dataset
from utils.autodiff import Graph, Node, as_tensor, elu
from utils.errors import ContractError, DegenerateScoresError, InvalidConfigError, ShapeError
from utils.feature_pipeline import FeaturePipeline

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


@dataclass
class NetworkTrace:
    """Graph nodes of one forward pass, reused by the input-gradient chain"""

    graph: Graph
    params: List[Node]
    weights: List[Node]
    pre_activations: List[Node]
    scores: Node
    _input_gradients: Optional[Node] = field(default=None, repr=False)

    def input_gradients(self) -> Node:
        """Per-row gradient of the score w.r.t. the inputs, built as graph nodes"""
        if self._input_gradients is None:
            g = self.graph
            w1, w2, w3 = self.weights
            z1, z2 = self.pre_activations
            batch = self.scores.shape[0]
            upstream = g.matmul(g.ones(batch, 1), g.transpose(w3))
            d2 = g.mul(upstream, g.elu_prime(z2))
            d1 = g.mul(g.matmul(d2, g.transpose(w2)), g.elu_prime(z1))
            self._input_gradients = g.matmul(d1, g.transpose(w1))
        return self._input_gradients


class MonotoneMlp:
    def __init__(self, layer_dims: Sequence[int], log_weights: Sequence[np.ndarray],
                 biases: Sequence[np.ndarray], monotone: bool = True,
                 output_scale: float = 1.0, output_shift: float = 0.0,
                 feature_pipeline: Optional[FeaturePipeline] = None,
                 constraint_digest: Optional[str] = None):
        self.layer_dims = tuple(int(d) for d in layer_dims)
        if len(self.layer_dims) != 4 or self.layer_dims[-1] != 1:
            raise InvalidConfigError(f"Layer dims must be [n_features, h1, h2, 1], got {list(self.layer_dims)}")
        self.log_weights = [np.array(w, dtype=np.float64) for w in log_weights]
        self.biases = [np.array(b, dtype=np.float64).reshape(1, -1) for b in biases]
        for k, (w, b) in enumerate(zip(self.log_weights, self.biases)):
            expected = (self.layer_dims[k], self.layer_dims[k + 1])
            if w.shape != expected or b.shape != (1, expected[1]):
                raise ShapeError(f"Layer {k + 1} has weights {w.shape} and bias {b.shape}, expected {expected}")
        self.monotone = bool(monotone)
        self.output_scale = float(output_scale)
        self.output_shift = float(output_shift)
        self.feature_pipeline = feature_pipeline
        self.constraint_digest = constraint_digest

    @classmethod
    def init(cls, n_features: int, hidden: Sequence[int] = (64, 64), monotone: bool = True,
             seed: int = 0) -> 'MonotoneMlp':
        """Seeded initialization; log-weights centre on log(1/fan_in)"""
        hidden = list(hidden)
        if n_features < 1 or len(hidden) != 2 or min(hidden) < 1:
            raise InvalidConfigError(f"Invalid dimensions: n_features={n_features}, hidden={hidden}")
        dims = [n_features, *hidden, 1]
        rng = np.random.default_rng(seed)
        log_weights = []
        for fan_in, fan_out in zip(dims[:-1], dims[1:]):
            if monotone:
                w = math.log(1.0 / fan_in) + rng.uniform(-0.5, 0.5, size=(fan_in, fan_out))
            else:
                limit = 1.0 / math.sqrt(fan_in)
                w = rng.uniform(-limit, limit, size=(fan_in, fan_out))
            log_weights.append(w)
        biases = [np.zeros((1, fan_out)) for fan_out in dims[1:]]
        return cls(dims, log_weights, biases, monotone)

    @property
    def n_features(self) -> int:
        return self.layer_dims[0]

    def parameters(self) -> List[np.ndarray]:
        """Trainable arrays in a fixed order: w1, b1, w2, b2, w3, b3"""
        ordered = []
        for w, b in zip(self.log_weights, self.biases):
            ordered.extend([w, b])
        return ordered

    def set_parameters(self, arrays: Sequence[np.ndarray]):
        if len(arrays) != 6:
            raise ContractError(f"Expected 6 parameter arrays, got {len(arrays)}")
        self.log_weights = [np.array(a, dtype=np.float64) for a in arrays[0::2]]
        self.biases = [np.array(a, dtype=np.float64) for a in arrays[1::2]]

    def copy(self) -> 'MonotoneMlp':
        return MonotoneMlp(self.layer_dims, self.log_weights, self.biases, self.monotone,
                           self.output_scale, self.output_shift, self.feature_pipeline,
                           self.constraint_digest)

    def effective_weights(self) -> List[np.ndarray]:
        if self.monotone:
            return [np.exp(w) for w in self.log_weights]
        return [w.copy() for w in self.log_weights]

    def _check_inputs(self, x) -> np.ndarray:
        x = as_tensor(x)
        if x.shape[1] != self.n_features:
            raise ShapeError(f"Model expects {self.n_features} features, got {x.shape[1]}")
        return x

    # Graph construction

    def build(self, g: Graph, x, params: Optional[Sequence[Node]] = None) -> NetworkTrace:
        """Forward pass as graph nodes; pass params to share parameter nodes across passes"""
        x = self._check_inputs(x)
        if params is None:
            params = [g.parameter(array) for array in self.parameters()]
        raw_w = params[0::2]
        biases = params[1::2]
        weights = [g.exp(w) if self.monotone else w for w in raw_w]

        h = g.constant(x)
        pre_activations = []
        for k in range(2):
            z = g.add_row(g.matmul(h, weights[k]), biases[k])
            pre_activations.append(z)
            h = g.elu(z)
        scores = g.add_row(g.matmul(h, weights[2]), biases[2])
        return NetworkTrace(g, list(params), weights, pre_activations, scores)

    def forward(self, x, g: Graph) -> Node:
        return self.build(g, x).scores

    def input_gradients(self, x, g: Graph) -> Node:
        return self.build(g, x).input_gradients()

    # Plain numpy evaluation

    def predict_raw(self, x) -> np.ndarray:
        """Network output before the output affine, one score per row"""
        x = self._check_inputs(x)
        w1, w2, w3 = self.effective_weights()
        b1, b2, b3 = self.biases
        h = elu(x @ w1 + b1)
        h = elu(h @ w2 + b2)
        return (h @ w3 + b3).reshape(-1)

    def predict(self, x) -> np.ndarray:
        return self.predict_raw(x) * self.output_scale + self.output_shift

    def score(self, data: Dataset) -> np.ndarray:
        """Stored normalization and directions, then the network and output affine"""
        if self.feature_pipeline is None:
            raise ContractError("Model has no feature pipeline attached")
        return self.predict(self.feature_pipeline.transform(data))

    def fit_output_range(self, x, a: float, b: float):
        """Choose the output affine so scores on x span exactly [a, b]"""
        self.output_scale, self.output_shift = rescale_affine(self.predict_raw(x), a, b)

    # Persistence

    def parameter_digest(self) -> str:
        payload = json.dumps([p.tolist() for p in self.parameters()])
        return hashlib.sha256(payload.encode('utf-8')).hexdigest()

    def to_dict(self) -> Dict:
        return {
            'schema_version': SCHEMA_VERSION,
            'layer_dims': list(self.layer_dims),
            'monotone_flag': self.monotone,
            'log_weights': [w.tolist() for w in self.log_weights],
            'biases': [b.reshape(-1).tolist() for b in self.biases],
            'output_affine': {'scale': self.output_scale, 'shift': self.output_shift},
            'feature_pipeline': self.feature_pipeline.to_dict() if self.feature_pipeline else None,
            'constraint_config_digest': self.constraint_digest,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> 'MonotoneMlp':
        if data.get('schema_version') != SCHEMA_VERSION:
            raise InvalidConfigError(f"Unsupported model schema version {data.get('schema_version')}")
        pipeline = data.get('feature_pipeline')
        affine = data.get('output_affine') or {}
        return cls(
            data['layer_dims'],
            [np.array(w, dtype=np.float64) for w in data['log_weights']],
            [np.array(b, dtype=np.float64) for b in data['biases']],
            data['monotone_flag'],
            affine.get('scale', 1.0),
            affine.get('shift', 0.0),
            FeaturePipeline.from_dict(pipeline) if pipeline else None,
            data.get('constraint_config_digest'),
        )

    def save(self, path: Union[str, Path]):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + '\n', encoding='utf-8')
        logger.info(f"Saved model to {path}")

    @classmethod
    def load(cls, path: Union[str, Path]) -> 'MonotoneMlp':
        return cls.from_dict(json.loads(Path(path).read_text(encoding='utf-8')))


def rescale_affine(scores, a: float, b: float) -> Tuple[float, float]:
    """(scale, shift) sending the observed min to a and max to b"""
    if not b > a:
        raise InvalidConfigError(f"Rescale bounds need b > a, got [{a}, {b}]")
    scores = np.asarray(scores, dtype=np.float64).reshape(-1)
    low, high = float(scores.min()), float(scores.max())
    if not high > low:
        raise DegenerateScoresError("Cannot rescale constant scores")
    scale = (b - a) / (high - low)
    return scale, a - low * scale


def rescale_scores(scores, a: float, b: float) -> np.ndarray:
    scale, shift = rescale_affine(scores, a, b)
    return np.asarray(scores, dtype=np.float64).reshape(-1) * scale + shift
