"""Regular LDPC codes: PEG construction, systematic encoding, min-sum Tanner rounds."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bp import DEFAULT_ALPHA, SAT


class ConstructionError(RuntimeError):
    pass


def gf2_rref(h: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2); returns (matrix, pivot columns)."""
    a = np.array(h, dtype=np.uint8) & 1
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hits = np.nonzero(a[r:, c])[0]
        if hits.size == 0:
            continue
        p = r + hits[0]
        if p != r:
            a[[r, p]] = a[[p, r]]
        others = np.nonzero(a[:, c])[0]
        others = others[others != r]
        a[others] ^= a[r]
        pivots.append(c)
        r += 1
    return a, pivots


def gf2_rank(h: np.ndarray) -> int:
    return len(gf2_rref(h)[1])


@dataclass(frozen=True, eq=False)
class TannerGraph:
    """Bipartite check/bit structure of a parity-check matrix.

    Edges are ordered by (check, bit). ``check_edges`` and ``bit_edges`` are
    padded adjacency tables of edge indices; padding uses the index ``e``.
    """

    lb: int
    lc: int
    edges: np.ndarray  # (e, 2) rows of (check, bit)
    check_edges: np.ndarray
    bit_edges: np.ndarray

    @classmethod
    def from_parity_check(cls, h) -> "TannerGraph":
        h = np.asarray(h)
        if h.ndim != 2 or not np.isin(h, (0, 1)).all():
            raise ValueError("parity-check matrix must be a 2-D 0/1 array")
        lc, lb = h.shape
        checks, bits = np.nonzero(h)
        edges = np.stack([checks, bits], axis=1).astype(np.int64)
        e = len(edges)
        return cls(lb, lc, edges, _table(checks, lc, e), _table(bits, lb, e))

    @property
    def e(self) -> int:
        return len(self.edges)

    @property
    def parity_check(self) -> np.ndarray:
        h = np.zeros((self.lc, self.lb), dtype=np.uint8)
        h[self.edges[:, 0], self.edges[:, 1]] = 1
        return h

    def bit_degrees(self) -> np.ndarray:
        return np.bincount(self.edges[:, 1], minlength=self.lb)

    def check_degrees(self) -> np.ndarray:
        return np.bincount(self.edges[:, 0], minlength=self.lc)

    def has_four_cycle(self) -> bool:
        h = self.parity_check.astype(np.int64)
        overlap = h.T @ h
        np.fill_diagonal(overlap, 0)
        return bool((overlap > 1).any())

    def syndrome(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        return (x @ self.parity_check.T.astype(np.int64)) % 2

    def to_alist(self) -> str:
        """MacKay alist text (1-based indices, zero padding)."""
        h = self.parity_check
        col_deg = h.sum(axis=0)
        row_deg = h.sum(axis=1)
        lines = [
            f"{self.lb} {self.lc}",
            f"{col_deg.max(initial=0)} {row_deg.max(initial=0)}",
            " ".join(map(str, col_deg)),
            " ".join(map(str, row_deg)),
        ]
        for col in h.T:
            idx = list(np.nonzero(col)[0] + 1)
            idx += [0] * (col_deg.max() - len(idx))
            lines.append(" ".join(map(str, idx)))
        for row in h:
            idx = list(np.nonzero(row)[0] + 1)
            idx += [0] * (row_deg.max() - len(idx))
            lines.append(" ".join(map(str, idx)))
        return "\n".join(lines) + "\n"


def _table(owner: np.ndarray, count: int, pad: int) -> np.ndarray:
    deg = np.bincount(owner, minlength=count)
    width = int(deg.max(initial=0))
    table = np.full((count, width), pad, dtype=np.int64)
    fill = np.zeros(count, dtype=np.int64)
    for edge, node in enumerate(owner):
        table[node, fill[node]] = edge
        fill[node] += 1
    return table


@dataclass(frozen=True, eq=False)
class LdpcCodeSpec:
    """LDPC code in systematic column order: info bits occupy the first ``k`` positions.

    ``column_order[i]`` is the column of the originally drawn matrix that became
    column ``i``; ``parity_map`` gives parity bits as GF(2) combinations of info bits.
    """

    tanner: TannerGraph
    column_order: np.ndarray
    parity_map: np.ndarray  # (lc, k)
    seed: int | None = None

    @property
    def lb(self) -> int:
        return self.tanner.lb

    @property
    def lc(self) -> int:
        return self.tanner.lc

    @property
    def k(self) -> int:
        return self.lb - self.lc

    @property
    def rate(self) -> float:
        return self.k / self.lb

    @classmethod
    def from_parity_check(cls, h, seed: int | None = None) -> "LdpcCodeSpec":
        h = np.asarray(h, dtype=np.uint8)
        lc, lb = h.shape
        reduced, pivots = gf2_rref(h)
        if len(pivots) != lc:
            raise ValueError(f"parity-check matrix has rank {len(pivots)} < {lc} rows")
        info_cols = [c for c in range(lb) if c not in set(pivots)]
        order = np.array(info_cols + pivots, dtype=np.int64)
        parity_map = reduced[:, info_cols]
        return cls(TannerGraph.from_parity_check(h[:, order]), order, parity_map, seed)


def _peg(lb: int, lc: int, dv: int, dc: int, rng: np.random.Generator) -> np.ndarray:
    """Progressive edge growth with a hard check-degree cap.

    Each new edge of bit ``b`` goes to an open check as far from ``b`` as the
    current graph allows, lowest degree first, remaining ties broken by ``rng``.
    """
    bit_adj: list[list[int]] = [[] for _ in range(lb)]
    chk_adj: list[list[int]] = [[] for _ in range(lc)]
    deg = np.zeros(lc, dtype=np.int64)

    for b in range(lb):
        for _ in range(dv):
            avail = {c for c in range(lc) if deg[c] < dc and c not in bit_adj[b]}
            if not avail:
                raise ConstructionError("no check node with spare degree")
            reached = set(bit_adj[b])
            seen_bits = {b}
            while True:
                bits = {v for c in reached for v in chk_adj[c]} - seen_bits
                seen_bits |= bits
                grown = reached | {c for v in bits for c in bit_adj[v]}
                if grown == reached or not (avail - grown):
                    break
                reached = grown
            cand = np.array(sorted(avail - reached), dtype=np.int64)
            if cand.size == 0:
                cand = np.array(sorted(avail), dtype=np.int64)
            low = cand[deg[cand] == deg[cand].min()]
            c = int(rng.choice(low))
            bit_adj[b].append(c)
            chk_adj[c].append(b)
            deg[c] += 1
    h = np.zeros((lc, lb), dtype=np.uint8)
    for b, checks in enumerate(bit_adj):
        h[checks, b] = 1
    return h


def construct_regular_ldpc(lb: int = 64, lc: int = 32, seed: int = 0, dv: int = 3, max_tries: int = 200) -> LdpcCodeSpec:
    """Seeded PEG construction of a (dv, dv*lb/lc)-regular code without 4-cycles.

    Draws are repeated with seed, seed + 1, ... until the matrix is regular,
    4-cycle free and full rank.
    """
    if lb <= 0 or lc <= 0 or lc >= lb:
        raise ValueError(f"need 0 < lc < lb, got lb={lb}, lc={lc}")
    if (dv * lb) % lc:
        raise ValueError(f"dv*lb = {dv * lb} is not divisible by lc = {lc}")
    dc = dv * lb // lc
    if dc > lb or dv > lc:
        raise ValueError("degree profile does not fit the requested size")
    for attempt in range(max_tries):
        rng = np.random.default_rng(seed + attempt)
        try:
            h = _peg(lb, lc, dv, dc, rng)
        except ConstructionError:
            continue
        graph = TannerGraph.from_parity_check(h)
        if (graph.bit_degrees() != dv).any() or (graph.check_degrees() != dc).any():
            continue
        if graph.has_four_cycle() or gf2_rank(h) != lc:
            continue
        return LdpcCodeSpec.from_parity_check(h, seed=seed + attempt)
    raise ConstructionError(f"no valid ({dv},{dc}) code of length {lb} after {max_tries} draws from seed {seed}")


def ldpc_encode(info, spec: LdpcCodeSpec) -> np.ndarray:
    """Systematic encoding: ``[info | parity]`` in the code's column order."""
    info = np.asarray(info, dtype=np.uint8)
    if info.shape[-1] != spec.k:
        raise ValueError(f"expected {spec.k} information bits, got {info.shape[-1]}")
    parity = (info.astype(np.int64) @ spec.parity_map.T.astype(np.int64)) % 2
    return np.concatenate([info, parity.astype(np.uint8)], axis=-1)


@dataclass
class TannerMessages:
    """Per-frame edge memory for a batch; zero at frame start."""

    graph: TannerGraph
    batch: int
    c2b: np.ndarray = field(init=False)
    extrinsic: np.ndarray = field(init=False)
    additions: int = 0

    def __post_init__(self) -> None:
        self.c2b = np.zeros((self.batch, self.graph.e))
        self.extrinsic = np.zeros((self.batch, self.graph.lb))


def tanner_bp_round(intrinsic, graph: TannerGraph, alpha: float = DEFAULT_ALPHA, messages: TannerMessages | None = None, sat: float = SAT) -> np.ndarray:
    """One bit-to-check then check-to-bit min-sum exchange.

    ``intrinsic`` is ``(lb,)`` or ``(batch, lb)``. Returns the extrinsic LLR of
    every bit (sum of incoming check messages, intrinsic excluded). Pass a
    ``TannerMessages`` to carry edge state across rounds; its ``additions``
    field receives the per-frame operation count of this round.
    """
    llr = np.asarray(intrinsic, dtype=float)
    single = llr.ndim == 1
    if single:
        llr = llr[None, :]
    if llr.shape[1] != graph.lb:
        raise ValueError(f"intrinsic must have length {graph.lb}, got {llr.shape[1]}")
    if messages is None:
        messages = TannerMessages(graph, llr.shape[0])
    e = graph.e
    bits = graph.edges[:, 1]
    ops = 0

    # bit -> check: (deg - 1) adds for the extrinsic sum, 1 for the total, 1 per edge
    total = llr + messages.extrinsic
    b2c = total[:, bits] - messages.c2b
    np.clip(b2c, -sat, sat, out=b2c)
    ops += (e - graph.lb) + graph.lb + e

    # check -> bit: sign product and two smallest magnitudes, 2 comparisons per edge
    padded = np.concatenate([b2c, np.full((b2c.shape[0], 1), np.inf)], axis=1)
    v = padded[:, graph.check_edges]
    neg = v < 0
    mag = np.abs(v)
    idx1 = np.argmin(mag, axis=2)
    min1 = np.take_along_axis(mag, idx1[..., None], axis=2)
    np.put_along_axis(mag, idx1[..., None], np.inf, axis=2)
    min2 = mag.min(axis=2, keepdims=True)
    sign_odd = (neg.sum(axis=2, keepdims=True) % 2).astype(bool)
    width = v.shape[2]
    pos = np.arange(width)[None, None, :]
    out = np.where(pos == idx1[..., None], min2, min1) * alpha
    flip = neg ^ sign_odd
    out = np.where(flip, -out, out)
    np.clip(out, -sat, sat, out=out)
    ops += 2 * e

    c2b = np.zeros((v.shape[0], e + 1))
    valid = graph.check_edges < e
    c2b[:, graph.check_edges[valid]] = out[:, valid]
    messages.c2b = c2b[:, :e]
    messages.extrinsic = c2b[:, graph.bit_edges].sum(axis=2)
    messages.additions = ops
    ext = messages.extrinsic
    return ext[0].copy() if single else ext.copy()
