"""Trainable layers with explicit analytic gradients.

Shape conventions use N for batch, C for channels, and trailing spatial
axes. Convolutions are im2col + matmul; padding is zeros.
"""

from __future__ import annotations

import numpy as np
from scipy.special import erf

from ..errors import ConfigError, ContractError
from ..rng import RngStream
from .core import Module

_INV_SQRT2 = 1.0 / np.sqrt(2.0)
_INV_SQRT2PI = 1.0 / np.sqrt(2.0 * np.pi)


class Linear(Module):
    """y = x @ w + b.  x (..., nin) -> y (..., nout)."""

    def __init__(self, nin: int, nout: int, rng: RngStream, dtype=np.float32,
                 bias: bool = True):
        super().__init__()
        self.nin, self.nout = nin, nout
        scale = (1.0 / nin) ** 0.5
        self.w = self.add_param("w", rng.normal((nin, nout), dtype) * dtype(scale))
        self.b = self.add_param("b", np.zeros(nout, dtype)) if bias else None

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.shape[-1] != self.nin:
            raise ContractError(f"Linear: got {x.shape[-1]} features, want {self.nin}")
        self._save(x)
        y = x @ self.w.value
        if self.b is not None:
            y = y + self.b.value
        return y

    def backward(self, dy: np.ndarray) -> np.ndarray:
        (x,) = self._load()
        x2 = x.reshape(-1, self.nin)
        dy2 = dy.reshape(-1, self.nout)
        self.w.grad += x2.T @ dy2
        if self.b is not None:
            self.b.grad += dy2.sum(axis=0)
        return (dy2 @ self.w.value.T).reshape(x.shape)


class Conv2D(Module):
    """x (N, Cin, H, W) -> y (N, Cout, H', W'), zero padding."""

    def __init__(self, cin: int, cout: int, k: int = 3, stride: int = 1,
                 pad: int = 1, rng: RngStream = None, dtype=np.float32):
        super().__init__()
        self.cin, self.cout, self.k, self.stride, self.pad = cin, cout, k, stride, pad
        scale = (1.0 / (cin * k * k)) ** 0.5
        self.w = self.add_param("w", rng.normal((cout, cin, k, k), dtype) * dtype(scale))
        self.b = self.add_param("b", np.zeros(cout, dtype))

    def _out_hw(self, H, W):
        k, s, p = self.k, self.stride, self.pad
        return (H + 2 * p - k) // s + 1, (W + 2 * p - k) // s + 1

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.ndim != 4 or x.shape[1] != self.cin:
            raise ContractError(f"Conv2D: expected (N,{self.cin},H,W), got {x.shape}")
        N, _, H, W = x.shape
        k, s, p = self.k, self.stride, self.pad
        Ho, Wo = self._out_hw(H, W)
        if Ho < 1 or Wo < 1:
            raise ContractError(f"Conv2D: input {H}x{W} too small for k={k}")
        xp = np.pad(x, ((0, 0), (0, 0), (p, p), (p, p))) if p else x
        cols = np.empty((N, self.cin, k, k, Ho, Wo), dtype=x.dtype)
        for i in range(k):
            for j in range(k):
                cols[:, :, i, j] = xp[:, :, i:i + s * Ho:s, j:j + s * Wo:s]
        colmat = cols.reshape(N, self.cin * k * k, Ho * Wo)
        wmat = self.w.value.reshape(self.cout, -1)
        y = np.matmul(wmat, colmat).reshape(N, self.cout, Ho, Wo)
        self._save(colmat, x.shape)
        return y + self.b.value[None, :, None, None]

    def backward(self, dy: np.ndarray) -> np.ndarray:
        colmat, xshape = self._load()
        N, _, H, W = xshape
        k, s, p = self.k, self.stride, self.pad
        Ho, Wo = self._out_hw(H, W)
        dymat = dy.reshape(N, self.cout, Ho * Wo)
        self.b.grad += dy.sum(axis=(0, 2, 3))
        dw = np.tensordot(dymat, colmat, axes=([0, 2], [0, 2]))
        self.w.grad += dw.reshape(self.w.value.shape)
        wmat = self.w.value.reshape(self.cout, -1)
        dcols = np.matmul(wmat.T, dymat).reshape(N, self.cin, k, k, Ho, Wo)
        dxp = np.zeros((N, self.cin, H + 2 * p, W + 2 * p), dtype=dy.dtype)
        for i in range(k):
            for j in range(k):
                dxp[:, :, i:i + s * Ho:s, j:j + s * Wo:s] += dcols[:, :, i, j]
        return dxp[:, :, p:p + H, p:p + W] if p else dxp


class Conv1D(Module):
    """x (N, Cin, L) -> y (N, Cout, L'), zero padding."""

    def __init__(self, cin: int, cout: int, k: int = 3, stride: int = 1,
                 pad: int = 1, rng: RngStream = None, dtype=np.float32):
        super().__init__()
        self.cin, self.cout, self.k, self.stride, self.pad = cin, cout, k, stride, pad
        scale = (1.0 / (cin * k)) ** 0.5
        self.w = self.add_param("w", rng.normal((cout, cin, k), dtype) * dtype(scale))
        self.b = self.add_param("b", np.zeros(cout, dtype))

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.ndim != 3 or x.shape[1] != self.cin:
            raise ContractError(f"Conv1D: expected (N,{self.cin},L), got {x.shape}")
        N, _, L = x.shape
        k, s, p = self.k, self.stride, self.pad
        Lo = (L + 2 * p - k) // s + 1
        if Lo < 1:
            raise ContractError(f"Conv1D: input length {L} too small for k={k}")
        xp = np.pad(x, ((0, 0), (0, 0), (p, p))) if p else x
        cols = np.empty((N, self.cin, k, Lo), dtype=x.dtype)
        for i in range(k):
            cols[:, :, i] = xp[:, :, i:i + s * Lo:s]
        colmat = cols.reshape(N, self.cin * k, Lo)
        wmat = self.w.value.reshape(self.cout, -1)
        y = np.matmul(wmat, colmat)
        self._save(colmat, x.shape)
        return y + self.b.value[None, :, None]

    def backward(self, dy: np.ndarray) -> np.ndarray:
        colmat, xshape = self._load()
        N, _, L = xshape
        k, s, p = self.k, self.stride, self.pad
        Lo = (L + 2 * p - k) // s + 1
        self.b.grad += dy.sum(axis=(0, 2))
        dw = np.tensordot(dy, colmat, axes=([0, 2], [0, 2]))
        self.w.grad += dw.reshape(self.w.value.shape)
        wmat = self.w.value.reshape(self.cout, -1)
        dcols = np.matmul(wmat.T, dy).reshape(N, self.cin, k, Lo)
        dxp = np.zeros((N, self.cin, L + 2 * p), dtype=dy.dtype)
        for i in range(k):
            dxp[:, :, i:i + s * Lo:s] += dcols[:, :, i]
        return dxp[:, :, p:p + L] if p else dxp


class LayerNorm(Module):
    """Normalize over the last axis, learnable gain/bias."""

    def __init__(self, dim: int, dtype=np.float32, eps: float = 1e-5):
        super().__init__()
        self.dim, self.eps = dim, eps
        self.g = self.add_param("g", np.ones(dim, dtype))
        self.b = self.add_param("b", np.zeros(dim, dtype))

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.shape[-1] != self.dim:
            raise ContractError(f"LayerNorm: last dim {x.shape[-1]} != {self.dim}")
        mu = x.mean(axis=-1, keepdims=True)
        var = x.var(axis=-1, keepdims=True)
        inv = 1.0 / np.sqrt(var + self.eps)
        xhat = (x - mu) * inv
        self._save(xhat, inv)
        return xhat * self.g.value + self.b.value

    def backward(self, dy: np.ndarray) -> np.ndarray:
        xhat, inv = self._load()
        flat = (-1, self.dim)
        self.g.grad += (dy * xhat).reshape(flat).sum(axis=0)
        self.b.grad += dy.reshape(flat).sum(axis=0)
        dxhat = dy * self.g.value
        m1 = dxhat.mean(axis=-1, keepdims=True)
        m2 = (dxhat * xhat).mean(axis=-1, keepdims=True)
        return inv * (dxhat - m1 - xhat * m2)


class GELU(Module):
    """Exact gaussian-error-linear unit, x * Phi(x)."""

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._save(x)
        return 0.5 * x * (1.0 + erf(x * x.dtype.type(_INV_SQRT2)))

    def backward(self, dy: np.ndarray) -> np.ndarray:
        (x,) = self._load()
        cdf = 0.5 * (1.0 + erf(x * x.dtype.type(_INV_SQRT2)))
        pdf = np.exp(-0.5 * x * x) * x.dtype.type(_INV_SQRT2PI)
        return dy * (cdf + x * pdf)


class ReLU(Module):
    def forward(self, x: np.ndarray) -> np.ndarray:
        mask = x > 0
        self._save(mask)
        return x * mask

    def backward(self, dy: np.ndarray) -> np.ndarray:
        (mask,) = self._load()
        return dy * mask


class Embedding(Module):
    """Token-id lookup. ids (N, L) int -> (N, L, C)."""

    def __init__(self, vocab: int, dim: int, rng: RngStream, dtype=np.float32):
        super().__init__()
        self.vocab, self.dim = vocab, dim
        self.table = self.add_param("table", rng.normal((vocab, dim), dtype) * dtype(0.1))

    def forward(self, ids: np.ndarray) -> np.ndarray:
        ids = np.asarray(ids)
        if ids.size and (ids.min() < 0 or ids.max() >= self.vocab):
            raise ContractError(f"Embedding: token id out of range [0,{self.vocab})")
        self._save(ids)
        return self.table.value[ids]

    def backward(self, dy: np.ndarray) -> None:
        (ids,) = self._load()
        np.add.at(self.table.grad, ids, dy)
        return None  # token ids carry no gradient


class Upsample2D(Module):
    """Nearest-neighbour upsampling by an integer factor."""

    def __init__(self, factor: int = 2):
        super().__init__()
        self.factor = factor

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._save(x.shape)
        return x.repeat(self.factor, axis=2).repeat(self.factor, axis=3)

    def backward(self, dy: np.ndarray) -> np.ndarray:
        (shape,) = self._load()
        N, C, H, W = shape
        f = self.factor
        return dy.reshape(N, C, H, f, W, f).sum(axis=(3, 5))


class SinusoidalTimeEmbedding(Module):
    """Fixed sin/cos embedding of integer timesteps. t (N,) -> (N, dim)."""

    def __init__(self, dim: int, max_period: float = 10000.0):
        super().__init__()
        if dim % 2:
            raise ConfigError("time embedding dim must be even")
        self.dim = dim
        half = dim // 2
        self.freqs = np.exp(-np.log(max_period) * np.arange(half) / half)

    def forward(self, t: np.ndarray, dtype=np.float32) -> np.ndarray:
        args = np.asarray(t, dtype=np.float64)[:, None] * self.freqs[None, :]
        return np.concatenate([np.sin(args), np.cos(args)], axis=-1).astype(dtype)

    def backward(self, dy):
        return None  # timestep indices carry no gradient


class Sequential(Module):
    """Chain of layers; backward runs in reverse."""

    def __init__(self, *layers: Module):
        super().__init__()
        self.layers = list(layers)
        for i, layer in enumerate(self.layers):
            self.add_child(str(i), layer)

    def forward(self, x):
        for layer in self.layers:
            x = layer(x)
        return x

    def backward(self, dy):
        for layer in reversed(self.layers):
            dy = layer.backward(dy)
        return dy
