"""Adam with bias correction and a linear learning-rate warmup."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError, NumericalError
from .core import Parameter


class Adam:
    """Standard Adam. With warmup W > 0, step k uses lr * min(1, k/W)."""

    def __init__(self, params: list[Parameter], lr: float, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8, warmup: int = 0):
        if lr <= 0:
            raise ConfigError(f"learning rate must be > 0, got {lr}")
        if not (0 <= beta1 < 1 and 0 <= beta2 < 1):
            raise ConfigError("Adam betas must be in [0, 1)")
        self.params = list(params)
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.warmup = int(warmup)
        self.t = 0

    def effective_lr(self, step: int) -> float:
        if self.warmup > 0 and step <= self.warmup:
            return self.lr * step / self.warmup
        return self.lr

    def step(self, check_finite: bool = False):
        self.t += 1
        lr = self.effective_lr(self.t)
        b1, b2, eps = self.beta1, self.beta2, self.eps
        c1 = 1.0 - b1 ** self.t
        c2 = 1.0 - b2 ** self.t
        for p in self.params:
            g = p.grad
            if check_finite and not np.all(np.isfinite(g)):
                raise NumericalError("non-finite gradient in Adam step")
            p.m[...] = b1 * p.m + (1.0 - b1) * g
            p.v[...] = b2 * p.v + (1.0 - b2) * g * g
            mhat = p.m / c1
            vhat = p.v / c2
            p.value -= (lr * mhat / (np.sqrt(vhat) + eps)).astype(p.value.dtype)
