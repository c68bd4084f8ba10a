"""AWGN/BPSK Monte-Carlo harness with exact complexity bookkeeping."""

from __future__ import annotations

import csv
import io
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binomtest

from .bp import DEFAULT_ALPHA, bpd_decode
from .concat import ConcatSpec, build_concat_spec, concat_decode_full, concat_encode
from .polar import PolarCodeSpec, check_length, construct_polar, encode
from .sc import scd_decode

log = logging.getLogger(__name__)

DECODERS = ("scd", "bpd", "ic-ldpc", "proposed")
CSV_FIELDS = (
    "decoder", "n", "k", "rate", "snr_db", "frames", "bit_errors", "frame_errors",
    "ber", "fer", "avg_iters", "adds_per_iter", "seed",
)
NOISE_STREAM = 0
PAYLOAD_STREAM = 1


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class ChannelConfig:
    ebn0_db: float
    code_rate: float
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.code_rate <= 1.0:
            raise ValueError(f"code_rate must lie in (0, 1], got {self.code_rate}")
        if not math.isfinite(self.ebn0_db):
            raise ValueError("ebn0_db must be finite")

    @property
    def sigma(self) -> float:
        return math.sqrt(1.0 / (2.0 * self.code_rate * 10.0 ** (self.ebn0_db / 10.0)))


def frame_rng(seed: int, frame: int, stream: int) -> np.random.Generator:
    """Independent generator for one (seed, frame, stream) triple."""
    return np.random.default_rng([seed, frame, stream])


def bpsk_awgn(x, cfg: ChannelConfig, rng: np.random.Generator) -> np.ndarray:
    """Map 0 -> +1, 1 -> -1, add white Gaussian noise, return ``2y / sigma**2``."""
    x = np.asarray(x)
    sigma = cfg.sigma
    y = 1.0 - 2.0 * x + sigma * rng.standard_normal(x.shape)
    return 2.0 * y / (sigma * sigma)


def count_additions(decoder_kind: str, n: int, ldpc_edges: int = 0) -> int:
    """Additions (a min counts as one) per round-trip BP iteration."""
    m = check_length(n)
    base = 4 * n * m
    if decoder_kind in ("bpd", "baseline"):
        return base
    if decoder_kind in ("proposed", "ic-ldpc", "concat"):
        return base + 2 * ldpc_edges + 2 * ldpc_edges
    raise ValueError(f"no round-trip complexity model for decoder {decoder_kind!r}")


def wilson_interval(errors: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    ci = binomtest(errors, trials).proportion_ci(confidence_level=confidence, method="wilson")
    return float(ci.low), float(ci.high)


@dataclass(frozen=True, eq=False)
class Scheme:
    """A code plus its decoder, as compared in the sweeps."""

    decoder: str
    polar: PolarCodeSpec
    concat: ConcatSpec | None = None
    max_iters: int = 60
    alpha: float = DEFAULT_ALPHA

    @property
    def n(self) -> int:
        return self.polar.n

    @property
    def payload_bits(self) -> int:
        return self.concat.payload_bits if self.concat is not None else self.polar.k

    @property
    def rate(self) -> float:
        return self.concat.rate if self.concat is not None else self.polar.k / self.polar.n

    @property
    def ldpc_edges(self) -> int:
        if self.concat is None or self.concat.ldpc is None:
            return 0
        return self.concat.ldpc.tanner.e

    @property
    def iterative(self) -> bool:
        return self.decoder != "scd"

    def adds_per_iter(self) -> int:
        if not self.iterative:
            return 0
        kind = "bpd" if self.concat is None else self.decoder
        return count_additions(kind, self.n, self.ldpc_edges)

    def encode(self, payload: np.ndarray) -> np.ndarray:
        if self.concat is not None:
            return concat_encode(payload, self.concat)
        return encode(self.polar.place(payload))

    def decode(self, llr: np.ndarray) -> tuple[np.ndarray, list[int]]:
        """Payload estimate and per-iteration instrumented addition counts."""
        if self.decoder == "scd":
            return scd_decode(llr, self.polar)[..., self.polar.info_set], []
        if self.concat is not None:
            payload, result = concat_decode_full(llr, self.concat, self.max_iters, self.alpha)
            return payload, result.additions
        result = bpd_decode(llr, self.polar, self.max_iters, self.alpha)
        return result.u_hat[..., self.polar.info_set], result.additions


def make_scheme(
    decoder: str,
    n: int = 1024,
    k: int = 512,
    ng: int = 480,
    dn: int = 64,
    z0: float = 0.5,
    ldpc_seed: int = 0,
    max_iters: int = 60,
    alpha: float = DEFAULT_ALPHA,
) -> Scheme:
    """Build one of the compared schemes; ``k`` is ignored by concatenated ones."""
    if decoder not in DECODERS:
        raise ValueError(f"decoder must be one of {DECODERS}, got {decoder!r}")
    if max_iters < 1:
        raise ValueError(f"max_iters must be >= 1, got {max_iters}")
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    if decoder in ("scd", "bpd"):
        polar = construct_polar(n, k, z0)
        if polar.k == 0:
            raise ValueError("k must be positive")
        return Scheme(decoder, polar, None, max_iters, alpha)
    selection = "proposed" if decoder == "proposed" else "ic"
    spec = build_concat_spec(n, ng, dn, selection, z0, ldpc_seed)
    if spec.payload_bits == 0:
        raise ValueError("payload must contain at least one bit")
    return Scheme(decoder, spec.polar, spec, max_iters, alpha)


@dataclass
class SnrRecord:
    snr_db: float
    payload_bits: int
    frames: int = 0
    bit_errors: int = 0
    frame_errors: int = 0
    iterations: int = 0
    adds_per_iter: int = 0

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.frames * self.payload_bits) if self.frames else 0.0

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else 0.0

    @property
    def avg_iters(self) -> float:
        return self.iterations / self.frames if self.frames else 0.0

    def fer_interval(self, confidence: float = 0.95) -> tuple[float, float]:
        return wilson_interval(self.frame_errors, self.frames, confidence)


@dataclass
class SimReport:
    decoder: str
    n: int
    k: int
    rate: float
    seed: int
    records: list[SnrRecord] = field(default_factory=list)
    wall_clock: float = 0.0

    def rows(self) -> list[dict]:
        return [
            {
                "decoder": self.decoder,
                "n": self.n,
                "k": self.k,
                "rate": self.rate,
                "snr_db": r.snr_db,
                "frames": r.frames,
                "bit_errors": r.bit_errors,
                "frame_errors": r.frame_errors,
                "ber": r.ber,
                "fer": r.fer,
                "avg_iters": r.avg_iters,
                "adds_per_iter": r.adds_per_iter,
                "seed": self.seed,
            }
            for r in self.records
        ]


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.6e}"
    return str(value)


def format_csv(reports: list[SimReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for report in reports:
        for row in report.rows():
            writer.writerow([_fmt(row[name]) for name in CSV_FIELDS])
    return buf.getvalue()


def simulate_frames(scheme: Scheme, cfg: ChannelConfig, start: int, stop: int) -> dict:
    """Run frames ``start..stop-1``; per-frame bit errors plus iteration totals.

    Noise and payload of frame ``i`` come from private streams keyed by
    ``(seed, i)``, so the outcome of a frame never depends on how frames are
    grouped.
    """
    count = stop - start
    payload = np.empty((count, scheme.payload_bits), dtype=np.uint8)
    noise = np.empty((count, scheme.n))
    for row, frame in enumerate(range(start, stop)):
        payload[row] = frame_rng(cfg.seed, frame, PAYLOAD_STREAM).integers(0, 2, scheme.payload_bits, dtype=np.uint8)
        noise[row] = frame_rng(cfg.seed, frame, NOISE_STREAM).standard_normal(scheme.n)
    x = scheme.encode(payload)
    sigma = cfg.sigma
    llr = 2.0 * (1.0 - 2.0 * x + sigma * noise) / (sigma * sigma)
    decoded, additions = scheme.decode(llr)
    expected = scheme.adds_per_iter()
    if any(a != expected for a in additions):
        raise SimulationError(f"instrumented additions {sorted(set(additions))} differ from the analytic {expected}")
    bit_errors = (decoded != payload).sum(axis=1)
    iters = len(additions) if scheme.iterative else 1
    return {"bit_errors": bit_errors, "iterations": iters}


def _chunks(max_frames: int, batch_size: int):
    for start in range(0, max_frames, batch_size):
        yield start, min(start + batch_size, max_frames)


def run_point(
    scheme: Scheme,
    cfg: ChannelConfig,
    max_frames: int,
    target_frame_errors: int,
    batch_size: int = 256,
    pool: ProcessPoolExecutor | None = None,
    workers: int = 1,
) -> SnrRecord:
    """Simulate one SNR until ``target_frame_errors`` frame errors or ``max_frames``.

    The run stops exactly at the frame carrying the target-th error, so counts
    do not depend on batch size or worker count. A target of 0 disables the
    error-based stop.
    """
    record = SnrRecord(cfg.ebn0_db, scheme.payload_bits, adds_per_iter=scheme.adds_per_iter())
    chunks = list(_chunks(max_frames, batch_size))
    wave = max(1, workers) if pool is not None else 1
    for w in range(0, len(chunks), wave):
        batch = chunks[w:w + wave]
        if pool is not None:
            results = list(pool.map(simulate_frames, [scheme] * len(batch), [cfg] * len(batch), *zip(*batch)))
        else:
            results = [simulate_frames(scheme, cfg, a, b) for a, b in batch]
        for (start, stop), res in zip(batch, results):
            errs = res["bit_errors"]
            frames = stop - start
            failed = errs > 0
            if target_frame_errors > 0:
                need = target_frame_errors - record.frame_errors
                hits = np.flatnonzero(failed)
                if hits.size >= need:
                    frames = int(hits[need - 1]) + 1
            record.frames += frames
            record.bit_errors += int(errs[:frames].sum())
            record.frame_errors += int(failed[:frames].sum())
            record.iterations += res["iterations"] * frames
            if target_frame_errors > 0 and record.frame_errors >= target_frame_errors:
                return record
    return record


def run_sweep(
    scheme: Scheme,
    snrs,
    max_frames: int = 1_000_000,
    target_frame_errors: int = 100,
    seed: int = 0,
    batch_size: int = 256,
    workers: int = 1,
    progress=None,
) -> SimReport:
    """Per-SNR Monte-Carlo estimates for one scheme.

    Eb/N0 is converted with the scheme's overall rate. ``progress`` is called
    as ``progress(report, record)`` after each SNR point.
    """
    snrs = [float(s) for s in snrs]
    if not snrs:
        raise ValueError("at least one SNR point is required")
    if max_frames < 1:
        raise ValueError(f"max_frames must be >= 1, got {max_frames}")
    if target_frame_errors < 0:
        raise ValueError("target_frame_errors must be >= 0")
    if batch_size < 1 or workers < 1:
        raise ValueError("batch_size and workers must be >= 1")
    configs = [ChannelConfig(s, scheme.rate, seed) for s in snrs]

    report = SimReport(scheme.decoder, scheme.n, scheme.payload_bits, scheme.rate, seed)
    t0 = time.perf_counter()
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        for cfg in configs:
            record = run_point(scheme, cfg, max_frames, target_frame_errors, batch_size, pool, workers)
            log.info("%s %.3f dB: %d/%d frame errors", scheme.decoder, cfg.ebn0_db, record.frame_errors, record.frames)
            report.records.append(record)
            if progress is not None:
                progress(report, record)
    finally:
        if pool is not None:
            pool.shutdown()
    report.wall_clock = time.perf_counter() - t0
    return report
