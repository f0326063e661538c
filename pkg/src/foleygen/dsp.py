"""Waveform <-> log-mel spectrogram DSP.

STFT with a periodic Hann window and no padding (frame count is
1 + floor((len - n_fft) / hop)), a triangular mel filterbank whose
corner frequencies are snapped to FFT bins (which makes every
triangle's bin-sum equal its analytic area exactly), and Griffin-Lim
phase retrieval over an NNLS mel inversion. All functions are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import nnls as _scipy_nnls

from .errors import ConfigError, ContractError

LOG_FLOOR = 1e-5


@dataclass
class Waveform:
    samples: np.ndarray  # f32 in [-1, 1]
    sample_rate: int

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ConfigError(f"sample_rate must be > 0, got {self.sample_rate}")
        self.samples = np.asarray(self.samples, dtype=np.float32)

    def __len__(self):
        return len(self.samples)


@dataclass
class MelSpec:
    frames: np.ndarray  # (T_a, M) log-magnitude mel energies
    hop: int
    n_fft: int
    n_mels: int
    sample_rate: int
    fmin: float
    fmax: float

    @property
    def n_frames(self):
        return self.frames.shape[0]


def _check_fft_params(n_fft: int, hop: int):
    if n_fft < 2 or (n_fft & (n_fft - 1)) != 0:
        raise ConfigError(f"n_fft must be a power of two, got {n_fft}")
    if hop < 1:
        raise ConfigError(f"hop must be >= 1, got {hop}")


def hann(n_fft: int) -> np.ndarray:
    """Periodic Hann window (COLA-safe at hop = n_fft/4)."""
    return (0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n_fft) / n_fft)).astype(np.float64)


def frame_count(n_samples: int, n_fft: int, hop: int) -> int:
    return 1 + (n_samples - n_fft) // hop


def stft(w: Waveform, n_fft: int = 1024, hop: int = 256) -> np.ndarray:
    """One-sided complex spectrogram, shape (T_a, n_fft//2 + 1)."""
    _check_fft_params(n_fft, hop)
    x = np.asarray(w.samples, dtype=np.float64)
    if len(x) < n_fft:
        raise ContractError(f"signal length {len(x)} < n_fft {n_fft}")
    T = frame_count(len(x), n_fft, hop)
    idx = np.arange(n_fft)[None, :] + hop * np.arange(T)[:, None]
    frames = x[idx] * hann(n_fft)[None, :]
    return np.fft.rfft(frames, axis=1)


def istft(spec: np.ndarray, n_fft: int, hop: int) -> np.ndarray:
    """Weighted overlap-add inverse of ``stft``; exact up to edge taper."""
    _check_fft_params(n_fft, hop)
    T = spec.shape[0]
    win = hann(n_fft)
    frames = np.fft.irfft(spec, n=n_fft, axis=1) * win[None, :]
    n_out = (T - 1) * hop + n_fft
    out = np.zeros(n_out)
    norm = np.zeros(n_out)
    for t in range(T):
        lo = t * hop
        out[lo:lo + n_fft] += frames[t]
        norm[lo:lo + n_fft] += win * win
    return out / np.maximum(norm, 1e-8)


@lru_cache(maxsize=8)
def mel_filterbank(n_mels: int, n_fft: int, sample_rate: int,
                   fmin: float, fmax: float) -> np.ndarray:
    """Triangular filterbank (n_mels, n_fft//2 + 1), corners on FFT bins.

    Adjacent triangles share half their support (50% overlap); peak
    height is 1. Corner bins are strictly increasing, so each row sums
    to exactly (right corner - left corner) / 2 bins.
    """
    if not (0 <= fmin < fmax <= sample_rate / 2):
        raise ConfigError(f"need 0 <= fmin < fmax <= sr/2, got {fmin}, {fmax}")
    if n_mels > n_fft // 2:
        raise ConfigError(f"n_mels {n_mels} > n_fft/2 {n_fft // 2}")

    def to_mel(f):
        return 2595.0 * np.log10(1.0 + f / 700.0)

    def to_hz(m):
        return 700.0 * (10.0 ** (m / 2595.0) - 1.0)

    mels = np.linspace(to_mel(fmin), to_mel(fmax), n_mels + 2)
    hz = to_hz(mels)
    bins = np.round(hz * n_fft / sample_rate).astype(int)
    for i in range(1, len(bins)):  # enforce strictly increasing corners
        bins[i] = max(bins[i], bins[i - 1] + 1)
    if bins[-1] > n_fft // 2:
        raise ConfigError(f"n_mels {n_mels} too large for n_fft {n_fft} "
                          f"in [{fmin}, {fmax}] Hz")
    fb = np.zeros((n_mels, n_fft // 2 + 1))
    k = np.arange(n_fft // 2 + 1)
    for m in range(n_mels):
        lo, mid, hi = bins[m], bins[m + 1], bins[m + 2]
        up = (k - lo) / (mid - lo)
        down = (hi - k) / (hi - mid)
        fb[m] = np.clip(np.minimum(up, down), 0.0, None)
    return fb


def mel_spectrogram(w: Waveform, n_mels: int = 64, n_fft: int = 1024,
                    hop: int = 256, fmin: float = 0.0,
                    fmax: float | None = None) -> MelSpec:
    """log(1e-5 + mel-filtered STFT magnitude)."""
    if fmax is None:
        fmax = w.sample_rate / 2
    fb = mel_filterbank(n_mels, n_fft, w.sample_rate, fmin, fmax)
    mag = np.abs(stft(w, n_fft, hop))
    frames = np.log(LOG_FLOOR + mag @ fb.T).astype(np.float32)
    return MelSpec(frames, hop, n_fft, n_mels, w.sample_rate, fmin, fmax)


def _nnls_columns(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Solve min ||A x - b||, x >= 0 for every column b of B."""
    out = np.empty((A.shape[1], B.shape[1]))
    for j in range(B.shape[1]):
        out[:, j] = _scipy_nnls(A, B[:, j])[0]
    return out


def mel_to_linear(mel: MelSpec) -> np.ndarray:
    """Recover the linear magnitude spectrogram (T_a, n_fft//2+1) by NNLS."""
    fb = mel_filterbank(mel.n_mels, mel.n_fft, mel.sample_rate, mel.fmin, mel.fmax)
    target = np.maximum(np.exp(mel.frames.astype(np.float64)) - LOG_FLOOR, 0.0)
    return _nnls_columns(fb, target.T).T


def spectral_convergence(mag: np.ndarray, target: np.ndarray) -> float:
    denom = np.linalg.norm(target)
    if denom == 0:
        return float(np.linalg.norm(mag))
    return float(np.linalg.norm(mag - target) / denom)


def griffin_lim(mel: MelSpec, iterations: int = 64) -> Waveform:
    """Phase retrieval from a log-mel spectrogram.

    Zero-phase init keeps the result deterministic; each iteration
    re-analyzes the current signal and keeps only its phase.
    """
    if iterations < 1:
        raise ConfigError(f"griffin_lim iterations must be >= 1, got {iterations}")
    target = mel_to_linear(mel)
    phase = np.zeros_like(target)
    x = None
    for _ in range(iterations):
        x = istft(target * np.exp(1j * phase), mel.n_fft, mel.hop)
        spec = stft(Waveform(x.astype(np.float32), mel.sample_rate),
                    mel.n_fft, mel.hop)
        phase = np.angle(spec)
    x = istft(target * np.exp(1j * phase), mel.n_fft, mel.hop)
    peak = np.max(np.abs(x))
    if peak > 1.0:
        x = x / peak
    return Waveform(x.astype(np.float32), mel.sample_rate)
