"""Minimal deterministic WAV PCM writer/reader (16- or 24-bit).

Channel convention throughout the project: channel 0 carries the audio
signal, channel 1 the tactile actuator drive.
"""

from __future__ import annotations

import wave
from pathlib import Path

import numpy as np

__all__ = ["write_wav", "read_wav"]


def _full_scale(bit_depth: int) -> int:
    if bit_depth not in (16, 24):
        raise ValueError(f"bit_depth must be 16 or 24, got {bit_depth}")
    return (1 << (bit_depth - 1)) - 1


def write_wav(samples: np.ndarray, sample_rate_hz: int, path: str | Path,
              bit_depth: int = 16) -> None:
    """Write float samples in [-1, 1] as interleaved PCM.

    `samples` is (n,) or (n, channels). Values are clipped to [-1, 1] and
    rounded to the nearest code, so a read-back differs from the source
    by at most one quantization step per sample.
    """
    scale = _full_scale(bit_depth)
    x = np.asarray(samples, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise ValueError(f"samples must be 1- or 2-dimensional, got shape {x.shape}")
    codes = np.round(np.clip(x, -1.0, 1.0) * scale).astype(np.int32)

    if bit_depth == 16:
        raw = codes.astype("<i2").tobytes()
    else:
        flat = codes.reshape(-1)
        b = np.empty((len(flat), 3), dtype=np.uint8)
        b[:, 0] = flat & 0xFF
        b[:, 1] = (flat >> 8) & 0xFF
        b[:, 2] = (flat >> 16) & 0xFF
        raw = b.tobytes()

    try:
        with open(path, "wb") as fh:
            with wave.open(fh, "wb") as w:
                w.setnchannels(x.shape[1])
                w.setsampwidth(bit_depth // 8)
                w.setframerate(int(sample_rate_hz))
                w.writeframes(raw)
    except OSError as e:
        raise OSError(f"cannot write WAV to {path}: {e}") from e


def read_wav(path: str | Path) -> tuple[np.ndarray, int]:
    """Read a PCM WAV written by write_wav back to float (n, channels)."""
    try:
        with wave.open(str(path), "rb") as w:
            channels = w.getnchannels()
            width = w.getsampwidth()
            fs = w.getframerate()
            raw = w.readframes(w.getnframes())
    except OSError as e:
        raise OSError(f"cannot read WAV from {path}: {e}") from e

    if width == 2:
        codes = np.frombuffer(raw, dtype="<i2").astype(np.int32)
    elif width == 3:
        b = np.frombuffer(raw, dtype=np.uint8).reshape(-1, 3).astype(np.int32)
        codes = b[:, 0] | (b[:, 1] << 8) | (b[:, 2] << 16)
        codes = np.where(codes >= 1 << 23, codes - (1 << 24), codes)
    else:
        raise ValueError(f"{path}: unsupported sample width {width} bytes")

    scale = _full_scale(width * 8)
    return codes.reshape(-1, channels) / scale, fs
