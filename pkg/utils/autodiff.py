#!/usr/bin/env python3
"""
Reverse-mode automatic differentiation over dense float64 matrices.

A Graph is a Wengert list: nodes are appended in evaluation order, so the
node list itself is a valid topological order and backward is one reverse
sweep over it. Every op has a forward rule and a vector-Jacobian rule in
the OPS table. Input-gradients of the network are built from ordinary ops
(elu_prime included), so differentiating a loss that contains them needs
nothing beyond the first-order sweep.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from utils.errors import ContractError, DomainError, InvalidInputError, ShapeError

logger = logging.getLogger(__name__)


def as_tensor(t: Any) -> np.ndarray:
    """Coerce to a finite 2-D float64 array (scalars become 1x1, vectors a row)"""
    array = np.array(t, dtype=np.float64)
    if array.ndim == 0:
        array = array.reshape(1, 1)
    elif array.ndim == 1:
        array = array.reshape(1, -1)
    elif array.ndim != 2:
        raise InvalidInputError(f"Tensors are 2-D, got {array.ndim} dimensions")
    if not np.all(np.isfinite(array)):
        raise InvalidInputError("Tensor contains non-finite entries")
    return array


@dataclass
class Node:
    id: int
    op: str
    inputs: Tuple[int, ...]
    value: np.ndarray
    trainable: bool = False
    requires_grad: bool = False
    attrs: Dict[str, float] = field(default_factory=dict)
    grad: Optional[np.ndarray] = None

    @property
    def shape(self) -> Tuple[int, int]:
        return self.value.shape


@dataclass(frozen=True)
class OpRule:
    arity: int
    forward: Callable
    vjp: Callable
    check: Optional[Callable] = None


def _same_shape(op, a, b, **_):
    if a.shape != b.shape:
        raise ShapeError(f"{op}: shapes {a.shape} and {b.shape} differ")


def _check_matmul(op, a, b, **_):
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul: cannot multiply {a.shape} by {b.shape}")


def _check_div(op, a, b, **_):
    _same_shape(op, a, b)
    if np.any(b == 0.0):
        raise DomainError("div: denominator contains zero")


def _check_log(op, a, **_):
    if np.any(a <= 0.0):
        raise DomainError("log: argument must be positive")


def _check_sqrt(op, a, **_):
    if np.any(a < 0.0):
        raise DomainError("sqrt: argument must be non-negative")


def _check_row(op, a, b, **_):
    if b.shape[0] != 1 or b.shape[1] != a.shape[1]:
        raise ShapeError(f"broadcast_add_row: row {b.shape} does not fit {a.shape}")


def elu(z):
    """Elementwise ELU on plain arrays"""
    return np.where(z > 0.0, z, np.expm1(np.minimum(z, 0.0)))


def _elu_prime(z):
    # right-limit convention: elu'(0) = 1
    return np.where(z > 0.0, 1.0, np.exp(np.minimum(z, 0.0)))


def _elu_second(z):
    return np.where(z > 0.0, 0.0, np.exp(np.minimum(z, 0.0)))


OPS: Dict[str, OpRule] = {
    'matmul': OpRule(2, lambda a, b: a @ b,
                     lambda g, a, b, out: (g @ b.T, a.T @ g), _check_matmul),
    'add': OpRule(2, lambda a, b: a + b,
                  lambda g, a, b, out: (g, g), _same_shape),
    'sub': OpRule(2, lambda a, b: a - b,
                  lambda g, a, b, out: (g, -g), _same_shape),
    'mul': OpRule(2, lambda a, b: a * b,
                  lambda g, a, b, out: (g * b, g * a), _same_shape),
    'div': OpRule(2, lambda a, b: a / b,
                  lambda g, a, b, out: (g / b, -g * a / (b * b)), _check_div),
    'broadcast_add_row': OpRule(2, lambda a, b: a + b,
                                lambda g, a, b, out: (g, g.sum(axis=0, keepdims=True)), _check_row),
    'exp': OpRule(1, np.exp, lambda g, a, out: (g * out,)),
    'log': OpRule(1, np.log, lambda g, a, out: (g / a,), _check_log),
    'neg': OpRule(1, np.negative, lambda g, a, out: (-g,)),
    'elu': OpRule(1, elu, lambda g, a, out: (g * _elu_prime(a),)),
    'elu_prime': OpRule(1, _elu_prime, lambda g, a, out: (g * _elu_second(a),)),
    'relu': OpRule(1, lambda a: np.maximum(a, 0.0), lambda g, a, out: (g * (a > 0.0),)),
    'abs': OpRule(1, np.abs, lambda g, a, out: (g * np.sign(a),)),
    'square': OpRule(1, np.square, lambda g, a, out: (2.0 * a * g,)),
    'sqrt': OpRule(1, np.sqrt, lambda g, a, out: (g / (2.0 * out),), _check_sqrt),
    'transpose': OpRule(1, lambda a: a.T.copy(), lambda g, a, out: (g.T,)),
    'sum': OpRule(1, lambda a: np.array([[a.sum()]]),
                  lambda g, a, out: (np.full(a.shape, g[0, 0]),)),
    'mean': OpRule(1, lambda a: np.array([[a.mean()]]),
                   lambda g, a, out: (np.full(a.shape, g[0, 0] / a.size),)),
    'scale': OpRule(1, lambda a, c: a * c, lambda g, a, out, c: (g * c,)),
    'shift': OpRule(1, lambda a, c: a + c, lambda g, a, out, c: (g,)),
    'clamp_min': OpRule(1, lambda a, floor: np.maximum(a, floor),
                        lambda g, a, out, floor: (g * (a > floor),)),
}


class Graph:
    """Ordered node list; node ids are positions in that list"""

    def __init__(self):
        self.nodes: List[Node] = []

    def __len__(self):
        return len(self.nodes)

    def _append(self, op, inputs, value, trainable=False, requires_grad=False, attrs=None) -> Node:
        node = Node(
            id=len(self.nodes),
            op=op,
            inputs=tuple(inputs),
            value=value,
            trainable=trainable,
            requires_grad=requires_grad,
            attrs=dict(attrs or {}),
        )
        self.nodes.append(node)
        return node

    def constant(self, t) -> Node:
        return self._append('constant', (), as_tensor(t))

    def parameter(self, t) -> Node:
        return self._append('parameter', (), as_tensor(t), trainable=True, requires_grad=True)

    def _resolve(self, ref) -> Node:
        if isinstance(ref, Node):
            ref = ref.id
        if not 0 <= ref < len(self.nodes):
            raise ContractError(f"Unknown node id {ref}")
        return self.nodes[ref]

    def apply(self, op: str, *args, **attrs) -> Node:
        """Append op applied to the given nodes (or node ids) and evaluate it"""
        rule = OPS.get(op)
        if rule is None:
            raise ContractError(f"Unknown op '{op}'")
        if len(args) != rule.arity:
            raise ContractError(f"{op} takes {rule.arity} inputs, got {len(args)}")
        inputs = [self._resolve(arg) for arg in args]
        values = [node.value for node in inputs]
        if rule.check is not None:
            rule.check(op, *values, **attrs)
        with np.errstate(over='ignore', invalid='ignore'):
            value = rule.forward(*values, **attrs)
        return self._append(
            op,
            [node.id for node in inputs],
            value,
            requires_grad=any(node.requires_grad for node in inputs),
            attrs=attrs,
        )

    # Thin builders so graph construction reads like algebra

    def matmul(self, a, b): return self.apply('matmul', a, b)
    def add(self, a, b): return self.apply('add', a, b)
    def sub(self, a, b): return self.apply('sub', a, b)
    def mul(self, a, b): return self.apply('mul', a, b)
    def div(self, a, b): return self.apply('div', a, b)
    def add_row(self, a, row): return self.apply('broadcast_add_row', a, row)
    def exp(self, a): return self.apply('exp', a)
    def log(self, a): return self.apply('log', a)
    def neg(self, a): return self.apply('neg', a)
    def elu(self, a): return self.apply('elu', a)
    def elu_prime(self, a): return self.apply('elu_prime', a)
    def relu(self, a): return self.apply('relu', a)
    def abs(self, a): return self.apply('abs', a)
    def square(self, a): return self.apply('square', a)
    def sqrt(self, a): return self.apply('sqrt', a)
    def transpose(self, a): return self.apply('transpose', a)
    def sum(self, a): return self.apply('sum', a)
    def mean(self, a): return self.apply('mean', a)
    def scale(self, a, c: float): return self.apply('scale', a, c=float(c))
    def shift(self, a, c: float): return self.apply('shift', a, c=float(c))
    def clamp_min(self, a, floor: float): return self.apply('clamp_min', a, floor=float(floor))

    def ones(self, rows: int, cols: int = 1) -> Node:
        return self.constant(np.ones((rows, cols)))

    def backward(self, root) -> Dict[int, np.ndarray]:
        """Reverse sweep from a scalar root; returns gradients keyed by parameter node id"""
        root = self._resolve(root)
        if root.shape != (1, 1):
            raise ContractError(f"backward needs a 1x1 root, got {root.shape}")

        for node in self.nodes:
            node.grad = np.zeros_like(node.value)
        root.grad = np.ones((1, 1))

        for node in reversed(self.nodes[:root.id + 1]):
            if not node.inputs or not node.requires_grad:
                continue
            rule = OPS[node.op]
            parents = [self.nodes[i] for i in node.inputs]
            input_grads = rule.vjp(node.grad, *(p.value for p in parents), node.value, **node.attrs)
            for parent, grad in zip(parents, input_grads):
                if parent.requires_grad:
                    parent.grad = parent.grad + grad

        return {node.id: node.grad.copy() for node in self.nodes if node.trainable}

    def gradient_of(self, ref) -> np.ndarray:
        node = self._resolve(ref)
        if node.grad is None:
            return np.zeros_like(node.value)
        return node.grad


def numerical_gradient(fn: Callable[[Sequence[np.ndarray]], float],
                       arrays: Sequence[np.ndarray], h: float = 1e-5) -> List[np.ndarray]:
    """Central finite differences of a scalar function of several arrays"""
    arrays = [np.array(a, dtype=np.float64) for a in arrays]
    grads = []
    for k, array in enumerate(arrays):
        grad = np.zeros_like(array)
        for index in np.ndindex(array.shape):
            original = array[index]
            array[index] = original + h
            upper = fn(arrays)
            array[index] = original - h
            lower = fn(arrays)
            array[index] = original
            grad[index] = (upper - lower) / (2.0 * h)
        grads.append(grad)
    return grads
