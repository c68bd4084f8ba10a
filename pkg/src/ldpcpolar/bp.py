"""Scaled min-sum belief propagation over the polar factor graph.

Message lattice layout: ``L`` and ``R`` have shape ``(m + 1, batch, n)``.
Column 0 is the code-bit side, column ``m`` the message (u) side.
``L`` carries channel evidence towards the u side (``L[0]`` is the channel
LLR) and ``R`` carries priors towards the code-bit side (``R[m]`` holds the
frozen/outer-code priors).
"""

from __future__ import annotations

from typing import NamedTuple, Protocol

import numba
import numpy as np

from .polar import PolarCodeSpec, check_length

SAT = 64.0
DEFAULT_ALPHA = 0.9375


def minsum_f(a, b, alpha: float = DEFAULT_ALPHA):
    """``alpha * sign(a) * sign(b) * min(|a|, |b|)`` with sign(0) taken as +."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = np.where((a < 0) != (b < 0), -alpha, alpha)
    out = scale * np.minimum(np.abs(a), np.abs(b))
    return out + 0.0 if out.ndim else float(out) + 0.0


def _f(a: np.ndarray, b: np.ndarray, alpha: float) -> np.ndarray:
    mag = alpha * np.minimum(np.abs(a), np.abs(b))
    return np.where((a < 0) != (b < 0), -mag, mag)


def pe_update(l_in1, l_in2, r_in1, r_in2, alpha: float = DEFAULT_ALPHA, sat: float = SAT):
    """One processing element: four min-sum outputs, clamped to ``[-sat, sat]``.

    ``l_in1``/``l_in2`` are the L messages on the code-bit side of the upper and
    lower node, ``r_in1``/``r_in2`` the R messages on the u side.
    """
    l1, l2, r1, r2 = (np.clip(np.asarray(v, dtype=float), -sat, sat) for v in (l_in1, l_in2, r_in1, r_in2))
    l_out1 = _f(l1, l2 + r2, alpha)
    l_out2 = _f(l1, r1, alpha) + l2
    r_out1 = _f(r1, r2 + l2, alpha)
    r_out2 = _f(r1, l1, alpha) + r2
    return tuple(np.clip(v, -sat, sat) for v in (l_out1, l_out2, r_out1, r_out2))


class PriorHook(Protocol):
    """Outer-graph exchange performed at the u side once per round trip.

    ``positions`` are the u-side indices the hook owns. ``reset`` is called once
    per decode with the batch size; ``exchange`` receives the intrinsic L values
    at ``positions`` (shape ``(batch, len(positions))``) and returns the
    extrinsic values to install as R priors there. ``last_additions`` is the
    per-frame operation count of the latest exchange.
    """

    positions: np.ndarray
    last_additions: int

    def reset(self, batch: int) -> None: ...

    def exchange(self, intrinsic: np.ndarray) -> np.ndarray: ...


class BPResult(NamedTuple):
    u_hat: np.ndarray
    x_hat: np.ndarray
    iterations: int
    additions: list[int]


@numba.njit(cache=True, inline="always")
def _f_scalar(a, b, alpha):
    ma = abs(a)
    mb = abs(b)
    mag = (ma if ma < mb else mb) * alpha
    if (a < 0) != (b < 0):
        return -mag
    return mag


@numba.njit(cache=True, inline="always")
def _clip(v, sat):
    return min(max(v, -sat), sat)


@numba.njit(cache=True)
def _sweep_to_u(L, R, m, alpha, sat):
    batch, n = L.shape[1], L.shape[2]
    ops = 0
    for fr in range(batch):
        for j in range(m):
            s = 1 << (m - 1 - j)
            for blk in range(0, n, 2 * s):
                for t in range(s):
                    a = blk + t
                    b = a + s
                    la = L[j, fr, a]
                    lb = L[j, fr, b]
                    ra = R[j + 1, fr, a]
                    rb = R[j + 1, fr, b]
                    L[j + 1, fr, a] = _clip(_f_scalar(la, lb + rb, alpha), sat)
                    L[j + 1, fr, b] = _clip(_f_scalar(ra, la, alpha) + lb, sat)
                    # two mins, two additions
                    ops += 4
    return ops


@numba.njit(cache=True)
def _sweep_to_code(L, R, m, alpha, sat):
    batch, n = L.shape[1], L.shape[2]
    ops = 0
    for fr in range(batch):
        for j in range(m - 1, -1, -1):
            s = 1 << (m - 1 - j)
            for blk in range(0, n, 2 * s):
                for t in range(s):
                    a = blk + t
                    b = a + s
                    la = L[j, fr, a]
                    lb = L[j, fr, b]
                    ra = R[j + 1, fr, a]
                    rb = R[j + 1, fr, b]
                    R[j, fr, a] = _clip(_f_scalar(ra, lb + rb, alpha), sat)
                    R[j, fr, b] = _clip(_f_scalar(ra, la, alpha) + rb, sat)
                    ops += 4
    return ops


class FactorGraphState:
    """L/R message lattice for a batch of frames."""

    def __init__(self, channel_llr: np.ndarray, spec: PolarCodeSpec, sat: float = SAT):
        batch, n = channel_llr.shape
        m = spec.m
        self.n, self.m, self.batch, self.sat = n, m, batch, sat
        self.L = np.zeros((m + 1, batch, n))
        self.R = np.zeros((m + 1, batch, n))
        self.L[0] = np.clip(channel_llr, -sat, sat)
        self.R[m][:, spec.frozen_set] = sat
        self.iteration = 0
        # per-frame operation count of the current round trip
        self.additions = 0

    def sweep_to_u(self, alpha: float) -> None:
        """Propagate L from the code-bit side to the u side, one stage at a time."""
        ops = _sweep_to_u(self.L, self.R, self.m, float(alpha), float(self.sat))
        self.additions += ops // self.batch

    def sweep_to_code(self, alpha: float) -> None:
        """Propagate R from the u side back to the code-bit side."""
        ops = _sweep_to_code(self.L, self.R, self.m, float(alpha), float(self.sat))
        self.additions += ops // self.batch

    def u_total(self) -> np.ndarray:
        return self.L[self.m] + self.R[self.m]

    def x_total(self) -> np.ndarray:
        return self.L[0] + self.R[0]


def bpd_decode(
    channel_llr,
    spec: PolarCodeSpec,
    max_iters: int = 60,
    alpha: float = DEFAULT_ALPHA,
    prior_hook: PriorHook | None = None,
    sat: float = SAT,
) -> BPResult:
    """Round-trip scheduled min-sum BP decoding.

    Every iteration sweeps channel evidence to the u side, runs the optional
    outer-graph exchange, then sweeps back to the code-bit side with frozen
    priors held at ``+sat``. Exactly ``max_iters`` iterations are run.

    Accepts one frame ``(n,)`` or a batch ``(batch, n)``; outputs follow the
    input shape. ``additions`` lists the per-frame operation count of each
    iteration (one min counts as one addition).
    """
    llr = np.asarray(channel_llr, dtype=float)
    single = llr.ndim == 1
    if single:
        llr = llr[None, :]
    if llr.ndim != 2 or llr.shape[1] != spec.n:
        raise ValueError(f"channel LLR must have length {spec.n}, got shape {np.shape(channel_llr)}")
    check_length(spec.n)
    if max_iters < 1:
        raise ValueError(f"max_iters must be >= 1, got {max_iters}")
    if not np.all(np.isfinite(llr)):
        raise ValueError("channel LLR contains non-finite values")

    state = FactorGraphState(llr, spec, sat)
    m = spec.m
    if prior_hook is not None:
        prior_hook.reset(llr.shape[0])
        hook_pos = np.asarray(prior_hook.positions)
    counts = []
    for _ in range(max_iters):
        state.additions = 0
        state.sweep_to_u(alpha)
        if prior_hook is not None and hook_pos.size:
            ext = prior_hook.exchange(state.L[m][:, hook_pos])
            state.R[m][:, hook_pos] = np.clip(ext, -sat, sat)
            state.additions += prior_hook.last_additions
        state.sweep_to_code(alpha)
        state.iteration += 1
        counts.append(state.additions)

    u_hat = (state.u_total() < 0).astype(np.uint8)
    u_hat[:, spec.frozen_set] = 0
    x_hat = (state.x_total() < 0).astype(np.uint8)
    if single:
        u_hat, x_hat = u_hat[0], x_hat[0]
    return BPResult(u_hat, x_hat, state.iteration, counts)
