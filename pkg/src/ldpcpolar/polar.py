"""Polar code construction and encoding.

Indices are in natural order throughout (no bit-reversal permutation), so the
generator is exactly ``F^{(x)m}`` with ``F = [[1, 0], [1, 1]]`` and row ``i``
has ones at every column ``j`` whose set bits are a subset of those of ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def check_length(n: int) -> int:
    """Return ``log2(n)``, raising ``ValueError`` unless n is a power of two >= 2."""
    if not isinstance(n, (int, np.integer)) or n < 2 or (n & (n - 1)) != 0:
        raise ValueError(f"code length must be a power of two >= 2, got {n!r}")
    return int(n).bit_length() - 1


def compute_bhattacharyya(n: int, z0: float = 0.5) -> np.ndarray:
    """Bhattacharyya parameters of the ``n`` bit channels under the BEC recursion.

    Each stage maps a parameter ``z`` to the pair ``(2z - z**2, z**2)`` placed
    at indices ``(2i, 2i + 1)``, so the most significant index bit selects the
    first transform applied.

    Parameters
    ----------
    n : int
        Code length, a power of two (``n = 1`` returns ``[z0]``).
    z0 : float
        Design parameter of the underlying erasure channel, in (0, 1).

    Returns
    -------
    ndarray of shape (n,)
        ``Z(u_i)`` for every index; smaller means more reliable.
    """
    if n != 1:
        check_length(n)
    if not 0.0 < z0 < 1.0:
        raise ValueError(f"z0 must lie in (0, 1), got {z0!r}")
    z = np.array([float(z0)])
    while z.size < n:
        nxt = np.empty(2 * z.size)
        nxt[0::2] = 2.0 * z - z * z
        nxt[1::2] = z * z
        z = nxt
    return z


def select_frozen_set(reliability, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Split indices into (info_set, frozen_set) keeping the ``k`` smallest Z.

    Ties are broken towards the lower index. Both sets are returned sorted.
    """
    z = np.asarray(reliability, dtype=float)
    n = z.size
    if not 0 <= k <= n:
        raise ValueError(f"k must lie in [0, {n}], got {k}")
    # lexsort: last key is primary
    order = np.lexsort((np.arange(n), z))
    info = np.sort(order[:k])
    frozen = np.sort(order[k:])
    return info, frozen


def row_weights(n: int) -> np.ndarray:
    """Hamming weight of every row of ``F^{(x)m}``, i.e. ``2**popcount(i)``."""
    check_length(n)
    idx = np.arange(n)
    pop = np.zeros(n, dtype=np.int64)
    while idx.any():
        pop += idx & 1
        idx = idx >> 1
    return (1 << pop).astype(np.int64)


def stage_span(m: int, stage: int) -> int:
    """Index distance of the butterfly pairs between node columns ``stage`` and ``stage + 1``.

    Column 0 is the code-bit (channel) side and column ``m`` the message side.
    """
    return 1 << (m - 1 - stage)


def encode(u) -> np.ndarray:
    """Multiply ``u`` by ``F^{(x)m}`` over GF(2) with the butterfly network.

    Works on a single block of shape ``(n,)`` or a batch ``(..., n)``. Frozen
    positions are not touched; the caller is expected to have zeroed them.
    """
    x = np.array(u, dtype=np.uint8, copy=True)
    if x.ndim == 0:
        raise ValueError("encode expects at least one dimension")
    n = x.shape[-1]
    m = check_length(n)
    if np.any(x > 1):
        raise ValueError("input bits must be 0 or 1")
    lead = x.shape[:-1]
    for stage in range(m - 1, -1, -1):
        s = stage_span(m, stage)
        v = x.reshape(*lead, n // (2 * s), 2, s)
        v[..., 0, :] ^= v[..., 1, :]
    return x


def generator_matrix(n: int) -> np.ndarray:
    """Dense ``F^{(x)m}`` built by repeated Kronecker products (small n only)."""
    m = check_length(n)
    kernel = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    g = np.ones((1, 1), dtype=np.uint8)
    for _ in range(m):
        g = np.kron(g, kernel)
    return g


@dataclass(frozen=True, eq=False)
class PolarCodeSpec:
    """An (n, k) polar code in natural index order."""

    n: int
    info_set: np.ndarray
    frozen_set: np.ndarray
    reliability: np.ndarray
    row_weight: np.ndarray
    z0: float = 0.5

    @property
    def m(self) -> int:
        return self.n.bit_length() - 1

    @property
    def k(self) -> int:
        return int(self.info_set.size)

    @property
    def info_mask(self) -> np.ndarray:
        mask = np.zeros(self.n, dtype=bool)
        mask[self.info_set] = True
        return mask

    def place(self, info_bits) -> np.ndarray:
        """Scatter information bits onto ``info_set`` (frozen positions stay 0)."""
        info_bits = np.asarray(info_bits, dtype=np.uint8)
        if info_bits.shape[-1] != self.k:
            raise ValueError(f"expected {self.k} information bits, got {info_bits.shape[-1]}")
        u = np.zeros(info_bits.shape[:-1] + (self.n,), dtype=np.uint8)
        u[..., self.info_set] = info_bits
        return u

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "z0": self.z0,
            "info_set": self.info_set.tolist(),
            "frozen_set": self.frozen_set.tolist(),
            "reliability": self.reliability.tolist(),
            "row_weight": self.row_weight.tolist(),
        }


def construct_polar(n: int, k: int, z0: float = 0.5) -> PolarCodeSpec:
    """Build the (n, k) polar code whose information set has the k smallest Z."""
    check_length(n)
    z = compute_bhattacharyya(n, z0)
    info, frozen = select_frozen_set(z, k)
    return PolarCodeSpec(
        n=n,
        info_set=info,
        frozen_set=frozen,
        reliability=z,
        row_weight=row_weights(n),
        z0=float(z0),
    )
