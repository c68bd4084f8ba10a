"""Brute-force reference implementations used only by the tests."""

from __future__ import annotations

from itertools import product

import numpy as np


def dense_generator(n: int) -> np.ndarray:
    """F^{(x)m} from its entry formula: G[i, j] = 1 iff bits(j) are a subset of bits(i)."""
    g = np.zeros((n, n), dtype=np.uint8)
    for i in range(n):
        for j in range(n):
            g[i, j] = 1 if (i & j) == j else 0
    return g


def bhattacharyya_direct(n: int, z0: float) -> list[float]:
    """Walk the index bits MSB first applying z -> 2z - z^2 (bit 0) or z^2 (bit 1)."""
    m = n.bit_length() - 1
    out = []
    for i in range(n):
        z = z0
        for s in range(m - 1, -1, -1):
            z = z * z if (i >> s) & 1 else 2 * z - z * z
        out.append(z)
    return out


def factor_graph(n: int):
    """Explicit factor graph: variable nodes (i, j), XOR checks and equality links.

    Between columns j and j+1 the pair (a, b = a + span) is joined by an XOR check
    over {(a, j), (a, j+1), (b, j+1)} and an equality link (b, j) -- (b, j+1).
    Column 0 holds code bits, column m the u bits.
    """
    m = n.bit_length() - 1
    checks = []
    for j in range(m):
        span = 1 << (m - 1 - j)
        for a in range(n):
            if a & span:
                continue
            b = a + span
            checks.append({"left": [(a, j)], "right": [(a, j + 1), (b, j + 1)]})
            checks.append({"left": [(b, j)], "right": [(b, j + 1)]})
    return checks


def stopping_tree_leaves(n: int, index: int) -> set[tuple[int, int]]:
    """Stage-0 leaves of the stopping tree rooted at u-node (index, m).

    Every check touched from its right side must pull in its left neighbour;
    the tree grows leftwards until it reaches column 0.
    """
    m = n.bit_length() - 1
    checks = factor_graph(n)
    tree = {(index, m)}
    frontier = [(index, m)]
    while frontier:
        node = frontier.pop()
        for chk in checks:
            if node in chk["right"]:
                for left in chk["left"]:
                    if left not in tree:
                        tree.add(left)
                        frontier.append(left)
    return {node for node in tree if node[1] == 0}


def sc_reference(llr, frozen_mask) -> np.ndarray:
    """Non-recursive SC: for every bit, rebuild its decision LLR from the channel.

    Each decision walks down from the full channel vector, halving it with the
    min-sum f (target in the first half) or with g driven by the dense-matrix
    re-encoding of the already decided first half. Nothing is cached between bits.
    """
    llr = np.asarray(llr, dtype=float)
    n = llr.size
    u = np.zeros(n, dtype=np.uint8)

    def partial(bits: np.ndarray) -> np.ndarray:
        g = dense_generator(bits.size)
        return (bits.astype(np.int64) @ g.astype(np.int64)) % 2

    for i in range(n):
        vec = llr.copy()
        pos = i
        prefix_start = 0
        size = n
        while size > 1:
            half = size // 2
            a, b = vec[:half], vec[half:]
            if pos < half:
                mag = np.minimum(np.abs(a), np.abs(b))
                vec = np.where((a < 0) != (b < 0), -mag, mag)
            else:
                c = partial(u[prefix_start:prefix_start + half])
                vec = np.where(c == 1, b - a, b + a)
                prefix_start += half
                pos -= half
            size = half
        decision = vec[0]
        u[i] = 0 if frozen_mask[i] else (1 if decision < 0 else 0)
    return u


def all_words(length: int):
    for bits in product((0, 1), repeat=length):
        yield np.array(bits, dtype=np.uint8)
