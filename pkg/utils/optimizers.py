#!/usr/bin/env python3
"""
First-order optimizers over a list of numpy parameter arrays.
"""

from typing import List, Sequence

import numpy as np

from models import OptimizerConfig, OptimizerKind
from utils.errors import ContractError


class SGD:
    def __init__(self, parameters: Sequence[np.ndarray], lr: float = 1e-3, momentum: float = 0.0):
        """
        parameters: arrays updated in place on every step
        lr: learning rate
        """
        self.parameters = list(parameters)
        self.lr = lr
        self.momentum = momentum
        self.velocity = [np.zeros_like(p) for p in self.parameters]

    def _check(self, grads: Sequence[np.ndarray]):
        if len(grads) != len(self.parameters):
            raise ContractError(f"{len(grads)} gradients for {len(self.parameters)} parameters")

    def step(self, grads: Sequence[np.ndarray]):
        self._check(grads)
        for i, (p, g) in enumerate(zip(self.parameters, grads)):
            self.velocity[i] = self.momentum * self.velocity[i] + g
            p -= self.lr * self.velocity[i]


class Adam:
    def __init__(self, parameters: Sequence[np.ndarray], lr: float = 1e-3,
                 betas=(0.9, 0.999), eps: float = 1e-8):
        self.parameters = list(parameters)
        self.lr = lr
        self.betas = betas
        self.eps = eps
        self.t = 0  # timestep
        # Moment estimates for each parameter
        self.m = [np.zeros_like(p) for p in self.parameters]
        self.v = [np.zeros_like(p) for p in self.parameters]

    def step(self, grads: Sequence[np.ndarray]):
        if len(grads) != len(self.parameters):
            raise ContractError(f"{len(grads)} gradients for {len(self.parameters)} parameters")
        self.t += 1
        beta1, beta2 = self.betas

        for i, (p, g) in enumerate(zip(self.parameters, grads)):
            self.m[i] = beta1 * self.m[i] + (1 - beta1) * g
            self.v[i] = beta2 * self.v[i] + (1 - beta2) * (g * g)

            # Bias correction
            m_hat = self.m[i] / (1 - beta1 ** self.t)
            v_hat = self.v[i] / (1 - beta2 ** self.t)

            p -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def make_optimizer(parameters: List[np.ndarray], lr: float, config: OptimizerConfig):
    if config.kind is OptimizerKind.ADAM:
        return Adam(parameters, lr, (config.beta1, config.beta2), config.eps)
    return SGD(parameters, lr, config.momentum)
