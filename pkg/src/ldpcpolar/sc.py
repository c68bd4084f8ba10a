"""Successive cancellation decoding (min-sum f, exact g)."""

from __future__ import annotations

import numpy as np

from .polar import PolarCodeSpec


def _f(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    mag = np.minimum(np.abs(a), np.abs(b))
    np.negative(mag, out=mag, where=(a < 0) != (b < 0))
    return mag


def _g(a: np.ndarray, b: np.ndarray, u: np.ndarray) -> np.ndarray:
    return np.where(u.astype(bool), b - a, b + a)


def _decode(llr: np.ndarray, info: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return (u_hat, re-encoded partial sums) for one sub-block."""
    size = llr.shape[1]
    if not info.any():
        zeros = np.zeros(llr.shape, dtype=np.uint8)
        return zeros, zeros
    if size == 1:
        u = (llr < 0).astype(np.uint8)
        return u, u
    half = size // 2
    a, b = llr[:, :half], llr[:, half:]
    u1, c1 = _decode(_f(a, b), info[:half])
    u2, c2 = _decode(_g(a, b, c1), info[half:])
    return np.concatenate([u1, u2], axis=1), np.concatenate([c1 ^ c2, c2], axis=1)


def scd_decode(channel_llr, spec: PolarCodeSpec) -> np.ndarray:
    """Decode ``u`` bit by bit in index order; frozen positions are always 0.

    Takes a frame of shape ``(n,)`` or a batch ``(batch, n)``.
    """
    llr = np.asarray(channel_llr, dtype=float)
    single = llr.ndim == 1
    if single:
        llr = llr[None, :]
    if llr.ndim != 2 or llr.shape[1] != spec.n:
        raise ValueError(f"channel LLR must have length {spec.n}, got shape {np.shape(channel_llr)}")
    u_hat, _ = _decode(llr, spec.info_mask)
    return u_hat[0] if single else u_hat
