"""Small binary file formats: WAV (PCM16 mono) and float matrix dumps.

The float matrix format is 4 magic bytes ``FMAT``, a u32 rank, u32 dims,
then row-major little-endian f32 data.
"""

from __future__ import annotations

import struct
import wave
from pathlib import Path

import numpy as np

from .errors import ContractError

_FMAT_MAGIC = b"FMAT"


def write_wav(path, samples: np.ndarray, sample_rate: int):
    """16-bit PCM mono RIFF/WAVE. Samples are clipped to [-1, 1]."""
    pcm = np.clip(np.asarray(samples, dtype=np.float64), -1.0, 1.0)
    pcm = np.round(pcm * 32767.0).astype("<i2")
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with wave.open(str(path), "wb") as f:
        f.setnchannels(1)
        f.setsampwidth(2)
        f.setframerate(sample_rate)
        f.writeframes(pcm.tobytes())


def read_wav(path) -> tuple[np.ndarray, int]:
    with wave.open(str(path), "rb") as f:
        if f.getnchannels() != 1 or f.getsampwidth() != 2:
            raise ContractError(f"{path}: expected 16-bit mono WAV")
        sr = f.getframerate()
        raw = f.readframes(f.getnframes())
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float32) / 32767.0
    return samples, sr


def write_fmat(path, array: np.ndarray):
    arr = np.ascontiguousarray(array, dtype="<f4")
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(_FMAT_MAGIC)
        f.write(struct.pack("<I", arr.ndim))
        f.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
        f.write(arr.tobytes())


def read_fmat(path) -> np.ndarray:
    blob = Path(path).read_bytes()
    if blob[:4] != _FMAT_MAGIC:
        raise ContractError(f"{path}: not a float matrix file")
    (ndim,) = struct.unpack_from("<I", blob, 4)
    dims = struct.unpack_from(f"<{ndim}I", blob, 8)
    data = np.frombuffer(blob, dtype="<f4", offset=8 + 4 * ndim)
    if data.size != int(np.prod(dims)):
        raise ContractError(f"{path}: size mismatch, dims {dims} vs {data.size} values")
    return data.reshape(dims).astype(np.float32)
