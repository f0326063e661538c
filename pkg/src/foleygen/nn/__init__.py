from .core import DEBUG_FINITE, Module, Parameter, assert_finite
from .layers import (
    Conv1D,
    Conv2D,
    Embedding,
    GELU,
    LayerNorm,
    Linear,
    ReLU,
    Sequential,
    SinusoidalTimeEmbedding,
    Upsample2D,
)
from .optim import Adam
from .checkpoint import load_arrays, load_into_module, save_arrays, save_module

__all__ = [
    "Adam", "Conv1D", "Conv2D", "DEBUG_FINITE", "Embedding", "GELU",
    "LayerNorm", "Linear", "Module", "Parameter", "ReLU", "Sequential",
    "SinusoidalTimeEmbedding", "Upsample2D", "assert_finite",
    "load_arrays", "load_into_module", "save_arrays", "save_module",
]
