"""Concatenated LDPC-polar codes: outer-bit selection, encoding and joint decoding."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .bp import DEFAULT_ALPHA, SAT, bpd_decode
from .ldpc import LdpcCodeSpec, TannerMessages, construct_regular_ldpc, ldpc_encode, tanner_bp_round
from .polar import PolarCodeSpec, construct_polar, encode

SELECTIONS = ("proposed", "ic")


def _check_count(info_set, dn: int) -> None:
    if not 0 <= dn <= len(info_set):
        raise ValueError(f"dn must lie in [0, {len(info_set)}], got {dn}")


def select_ldpc_bits_proposed(info_set, reliability, row_weight, dn: int) -> np.ndarray:
    """Pick the ``dn`` information bits protected by the outer code.

    Information bits are grouped by generator-row weight (leafset size),
    lightest group first; inside a group the least reliable (largest Z) bit
    comes first, ties to the lower index. The first ``dn`` bits of that
    ordering are returned in selection order.
    """
    info = np.asarray(info_set, dtype=np.int64)
    _check_count(info, dn)
    z = np.asarray(reliability, dtype=float)[info]
    w = np.asarray(row_weight)[info]
    # primary: weight ascending, secondary: Z descending, tertiary: index ascending
    order = np.lexsort((info, -z, w))
    return info[order[:dn]]


def select_ldpc_bits_ic(info_set, reliability, dn: int) -> np.ndarray:
    """The ``dn`` information bits with the largest Z (intermediate channels)."""
    info = np.asarray(info_set, dtype=np.int64)
    _check_count(info, dn)
    z = np.asarray(reliability, dtype=float)[info]
    order = np.lexsort((info, -z))
    return info[order[:dn]]


@dataclass(frozen=True, eq=False)
class ConcatSpec:
    """Outer LDPC code mounted on ``u_ldpc`` positions of an inner polar code."""

    polar: PolarCodeSpec
    ldpc: LdpcCodeSpec | None
    u_ldpc: np.ndarray  # ascending polar indices carrying the outer codeword
    selection: str = "proposed"
    ldpc_seed: int | None = None

    def __post_init__(self) -> None:
        dn = len(self.u_ldpc)
        if not np.isin(self.u_ldpc, self.polar.info_set).all():
            raise ValueError("u_ldpc must be a subset of the information set")
        if len(np.unique(self.u_ldpc)) != dn:
            raise ValueError("u_ldpc contains duplicates")
        lb = 0 if self.ldpc is None else self.ldpc.lb
        if lb != dn:
            raise ValueError(f"outer code length {lb} does not match dn = {dn}")

    @property
    def n(self) -> int:
        return self.polar.n

    @property
    def dn(self) -> int:
        return len(self.u_ldpc)

    @property
    def ng(self) -> int:
        return self.polar.k - self.dn

    @property
    def good_positions(self) -> np.ndarray:
        return np.setdiff1d(self.polar.info_set, self.u_ldpc)

    @property
    def outer_info_bits(self) -> int:
        return 0 if self.ldpc is None else self.ldpc.k

    @property
    def payload_bits(self) -> int:
        return self.ng + self.outer_info_bits

    @property
    def ldpc_rate(self) -> float:
        return 1.0 if self.ldpc is None else self.ldpc.rate

    @property
    def polar_rate(self) -> float:
        return (self.ng + self.dn) / self.n

    @property
    def rate(self) -> float:
        return (self.ng + self.dn * self.ldpc_rate) / self.n

    def describe(self) -> dict:
        weights = self.polar.row_weight
        return {
            "n": self.n,
            "ng": self.ng,
            "dn": self.dn,
            "selection": self.selection,
            "z0": self.polar.z0,
            "ldpc_seed": self.ldpc_seed,
            "ldpc_drawn_seed": None if self.ldpc is None else self.ldpc.seed,
            "ldpc_lb": 0 if self.ldpc is None else self.ldpc.lb,
            "ldpc_lc": 0 if self.ldpc is None else self.ldpc.lc,
            "ldpc_edges": 0 if self.ldpc is None else self.ldpc.tanner.e,
            "rate_polar": self.polar_rate,
            "rate": self.rate,
            "payload_bits": self.payload_bits,
            "u_ldpc": self.u_ldpc.tolist(),
            "u_ldpc_weights": weights[self.u_ldpc].tolist(),
            "u_ldpc_z": self.polar.reliability[self.u_ldpc].tolist(),
            "info_set": self.polar.info_set.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.describe(), indent=2)


def build_concat_spec(
    n: int = 1024,
    ng: int = 480,
    dn: int = 64,
    selection: str = "proposed",
    z0: float = 0.5,
    ldpc_seed: int = 0,
    ldpc: LdpcCodeSpec | None = None,
) -> ConcatSpec:
    """Polar code with ``ng + dn`` best channels and an outer code on ``dn`` of them.

    Without an explicit ``ldpc`` a (3,6)-regular code of length ``dn`` is drawn
    with ``ldpc_seed``.
    """
    if selection not in SELECTIONS:
        raise ValueError(f"selection must be one of {SELECTIONS}, got {selection!r}")
    if ng < 0 or dn < 0 or ng + dn > n:
        raise ValueError(f"need ng, dn >= 0 and ng + dn <= n, got ng={ng}, dn={dn}, n={n}")
    polar = construct_polar(n, ng + dn, z0)
    if selection == "proposed":
        chosen = select_ldpc_bits_proposed(polar.info_set, polar.reliability, polar.row_weight, dn)
    else:
        chosen = select_ldpc_bits_ic(polar.info_set, polar.reliability, dn)
    if dn and ldpc is None:
        if dn % 2:
            raise ValueError(f"dn must be even for a (3,6)-regular outer code, got {dn}")
        ldpc = construct_regular_ldpc(dn, dn // 2, seed=ldpc_seed)
    return ConcatSpec(polar, ldpc if dn else None, np.sort(chosen), selection, ldpc_seed)


def concat_encode(payload, spec: ConcatSpec) -> np.ndarray:
    """Payload layout: ``[outer info bits | ng good-channel bits]``; returns ``x``."""
    payload = np.asarray(payload, dtype=np.uint8)
    if payload.shape[-1] != spec.payload_bits:
        raise ValueError(f"expected {spec.payload_bits} payload bits, got {payload.shape[-1]}")
    k_outer = spec.outer_info_bits
    u = np.zeros(payload.shape[:-1] + (spec.n,), dtype=np.uint8)
    if spec.ldpc is not None:
        u[..., spec.u_ldpc] = ldpc_encode(payload[..., :k_outer], spec.ldpc)
    u[..., spec.good_positions] = payload[..., k_outer:]
    return encode(u)


class OuterCodeHook:
    """Round-trip exchange with the outer Tanner graph at the u side."""

    def __init__(self, spec: ConcatSpec, alpha: float):
        self.positions = spec.u_ldpc
        self.graph = spec.ldpc.tanner
        self.alpha = alpha
        self.messages: TannerMessages | None = None
        self.last_additions = 0

    def reset(self, batch: int) -> None:
        self.messages = TannerMessages(self.graph, batch)

    def exchange(self, intrinsic: np.ndarray) -> np.ndarray:
        ext = tanner_bp_round(intrinsic, self.graph, self.alpha, self.messages)
        self.last_additions = self.messages.additions
        return ext


def concat_decode_full(channel_llr, spec: ConcatSpec, max_iters: int = 60, alpha: float = DEFAULT_ALPHA, sat: float = SAT):
    """Joint decode; returns ``(payload_hat, BPResult)``."""
    hook = OuterCodeHook(spec, alpha) if spec.ldpc is not None else None
    result = bpd_decode(channel_llr, spec.polar, max_iters, alpha, hook, sat)
    u_hat = result.u_hat
    k_outer = spec.outer_info_bits
    # systematic outer code: its info bits are the first k_outer codeword positions
    outer = u_hat[..., spec.u_ldpc[:k_outer]]
    payload = np.concatenate([outer, u_hat[..., spec.good_positions]], axis=-1)
    return payload, result


def concat_decode(channel_llr, spec: ConcatSpec, max_iters: int = 60, alpha: float = DEFAULT_ALPHA) -> np.ndarray:
    """Decode a frame ``(n,)`` or batch ``(batch, n)`` to payload bits."""
    return concat_decode_full(channel_llr, spec, max_iters, alpha)[0]
