"""Parameter containers and the module base class.

There is no autodiff tape. Every layer implements a paired
forward/backward: ``forward`` caches whatever the analytic gradient
needs, ``backward(dy)`` consumes the cache, accumulates parameter
gradients in place and returns the input gradient. A cache is good for
exactly one backward; batched inputs replace repeated calls.
"""

from __future__ import annotations

import numpy as np

from ..errors import ContractError, NumericalError, StateError

# Flipped on by tests that want every op checked for NaN/Inf.
DEBUG_FINITE = False


def assert_finite(x: np.ndarray, what: str = "tensor") -> np.ndarray:
    if not np.all(np.isfinite(x)):
        raise NumericalError(f"non-finite values in {what}")
    return x


def check_shape(x: np.ndarray, expected: tuple, what: str) -> None:
    """Match x.shape against expected; -1 entries are wildcards."""
    if x.ndim != len(expected) or any(
        e != -1 and s != e for s, e in zip(x.shape, expected)
    ):
        raise ContractError(f"{what}: expected shape {expected}, got {x.shape}")


class Parameter:
    """A trainable array plus its gradient and Adam moments."""

    __slots__ = ("value", "grad", "m", "v")

    def __init__(self, value: np.ndarray):
        self.value = value
        self.grad = np.zeros_like(value)
        self.m = np.zeros_like(value)
        self.v = np.zeros_like(value)

    @property
    def shape(self):
        return self.value.shape

    @property
    def size(self):
        return self.value.size


class Module:
    """Base class: explicit child/param registration, single-slot cache."""

    def __init__(self):
        self._params: dict[str, Parameter] = {}
        self._children: dict[str, Module] = {}
        self._cache = None

    # -- registration ----------------------------------------------------

    def add_param(self, name: str, value: np.ndarray) -> Parameter:
        p = Parameter(value)
        self._params[name] = p
        return p

    def add_child(self, name: str, module: "Module") -> "Module":
        self._children[name] = module
        return module

    # -- traversal ---------------------------------------------------------

    def parameters(self) -> list[Parameter]:
        out = list(self._params.values())
        for child in self._children.values():
            out.extend(child.parameters())
        return out

    def named_parameters(self, prefix: str = "") -> dict[str, Parameter]:
        out = {}
        for name, p in self._params.items():
            out[prefix + name] = p
        for cname, child in self._children.items():
            out.update(child.named_parameters(prefix + cname + "."))
        return out

    def zero_grad(self):
        for p in self.parameters():
            p.grad[...] = 0.0

    def param_count(self) -> int:
        return sum(p.size for p in self.parameters())

    @property
    def dtype(self):
        for p in self.parameters():
            return p.value.dtype
        return np.float32

    # -- cache plumbing ----------------------------------------------------

    def _save(self, *items):
        self._cache = items

    def _load(self):
        if self._cache is None:
            raise StateError(
                f"{type(self).__name__}.backward called without a cached forward"
            )
        cache = self._cache
        self._cache = None
        return cache

    def forward(self, x):
        raise NotImplementedError

    def backward(self, dy):
        raise NotImplementedError

    def __call__(self, *args, **kwargs):
        out = self.forward(*args, **kwargs)
        if DEBUG_FINITE:
            assert_finite(out, type(self).__name__ + " output")
        return out
