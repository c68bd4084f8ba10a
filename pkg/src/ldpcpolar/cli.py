"""Command-line front end.

    ldpcpolar construct --decoder proposed --n 1024 --ng 480 --dn 64
    ldpcpolar simulate --decoder bpd,proposed --snr 1.5,2.0 --output fer.csv

Options may also come from a JSON file given with ``--config``; explicit flags
win over file values. Exit status: 0 success, 1 usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from .bp import DEFAULT_ALPHA
from .simulator import DECODERS, format_csv, make_scheme, run_sweep

EXIT_USAGE = 1
EXIT_RUNTIME = 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    decoders: tuple[str, ...] = DECODERS
    n: int = 1024
    k: int = 512
    ng: int = 480
    dn: int = 64
    max_iters: int = 60
    alpha: float = DEFAULT_ALPHA
    z0: float = 0.5
    ldpc_seed: int = 0
    seed: int = 0
    snrs: tuple[float, ...] = (1.0, 1.5, 2.0, 2.5, 3.0)
    max_frames: int = 1_000_000
    target_errors: int = 100
    batch_size: int = 256
    workers: int = 1
    output: str | None = None
    alist: str | None = None

    def validate(self) -> None:
        if not self.decoders:
            raise UsageError("at least one decoder is required")
        for d in self.decoders:
            if d not in DECODERS:
                raise UsageError(f"unknown decoder {d!r} (choose from {', '.join(DECODERS)})")
        if self.n < 2 or self.n & (self.n - 1):
            raise UsageError(f"n must be a power of two >= 2, got {self.n}")
        if any(d in ("scd", "bpd") for d in self.decoders) and not 0 < self.k <= self.n:
            raise UsageError(f"k must satisfy 0 < k <= n = {self.n}, got {self.k}")
        if any(d in ("ic-ldpc", "proposed") for d in self.decoders):
            if self.ng < 0 or self.dn < 0 or self.ng + self.dn > self.n:
                raise UsageError(f"ng + dn must not exceed n = {self.n} (ng={self.ng}, dn={self.dn})")
            if self.dn % 2:
                raise UsageError(f"dn must be even for the (3,6) outer code, got {self.dn}")
            if self.ng + self.dn // 2 == 0:
                raise UsageError("concatenated payload would be empty")
        if self.max_iters < 1:
            raise UsageError("max-iters must be >= 1")
        if not 0.0 < self.alpha <= 1.0:
            raise UsageError("alpha must lie in (0, 1]")
        if not 0.0 < self.z0 < 1.0:
            raise UsageError("z0 must lie in (0, 1)")
        if not self.snrs:
            raise UsageError("at least one SNR point is required")
        if self.max_frames < 1 or self.target_errors < 0 or self.batch_size < 1 or self.workers < 1:
            raise UsageError("frame budget, batch size and workers must be positive (target-errors >= 0)")

    def scheme(self, decoder: str):
        """Build the code/decoder pair; raises ``ValueError`` on bad combinations."""
        return make_scheme(decoder, self.n, self.k, self.ng, self.dn, self.z0, self.ldpc_seed, self.max_iters, self.alpha)


def _parse_list(text: str, kind=str) -> tuple:
    return tuple(kind(v.strip()) for v in str(text).split(",") if v.strip())


def parse_snrs(text: str) -> tuple[float, ...]:
    """``"1.5,2,2.5"`` or an inclusive ``start:stop:step`` range."""
    text = str(text)
    if ":" in text:
        try:
            start, stop, step = (float(v) for v in text.split(":"))
        except ValueError:
            raise UsageError(f"bad SNR range {text!r}, expected start:stop:step") from None
        if step <= 0 or stop < start:
            raise UsageError(f"bad SNR range {text!r}")
        count = int(round((stop - start) / step)) + 1
        return tuple(round(start + i * step, 10) for i in range(count))
    try:
        return _parse_list(text, float)
    except ValueError:
        raise UsageError(f"bad SNR list {text!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ldpcpolar", description="Polar, LDPC and concatenated LDPC-polar codes over AWGN.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON file with option values (flags override it)")
    common.add_argument("--decoder", help=f"comma-separated subset of {','.join(DECODERS)} (default: all)")
    common.add_argument("--n", type=int, help="polar code length (default 1024)")
    common.add_argument("--k", type=int, help="information bits for scd/bpd (default 512)")
    common.add_argument("--ng", type=int, help="unprotected good channels for concatenated codes (default 480)")
    common.add_argument("--dn", type=int, help="channels carrying the outer LDPC codeword (default 64)")
    common.add_argument("--z0", type=float, help="BEC design parameter for Z (default 0.5)")
    common.add_argument("--ldpc-seed", type=int, dest="ldpc_seed", help="seed of the outer-code construction (default 0)")
    common.add_argument("--output", "-o", help="output file (default: standard output)")

    con = sub.add_parser("construct", parents=[common], help="dump a code construction as JSON")
    con.add_argument("--alist", help="also write the outer LDPC matrix in alist format")

    sim = sub.add_parser("simulate", parents=[common], help="run a Monte-Carlo sweep and write CSV")
    sim.add_argument("--snr", help="Eb/N0 points in dB: list '1.5,2.0' or range '1:3:0.5' (default 1:3:0.5)")
    sim.add_argument("--max-iters", type=int, dest="max_iters", help="BP round-trip iterations (default 60)")
    sim.add_argument("--alpha", type=float, help="min-sum scaling (default 0.9375)")
    sim.add_argument("--seed", type=int, help="simulation seed (default 0)")
    sim.add_argument("--max-frames", type=int, dest="max_frames", help="frame budget per point (default 1000000)")
    sim.add_argument("--target-errors", type=int, dest="target_errors", help="stop after this many frame errors, 0 = never (default 100)")
    sim.add_argument("--batch-size", type=int, dest="batch_size", help="frames decoded together (default 256)")
    sim.add_argument("--workers", type=int, help="worker processes (default 1)")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if args.config:
        try:
            values.update(json.loads(Path(args.config).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
    for name, value in vars(args).items():
        if value is not None and name not in ("config", "command", "verbose"):
            values[name] = value
    if "decoder" in values:
        dec = values.pop("decoder")
        values["decoders"] = tuple(dec) if isinstance(dec, list) else _parse_list(dec)
    if "snr" in values:
        snr = values.pop("snr")
        values["snrs"] = tuple(float(v) for v in snr) if isinstance(snr, list) else parse_snrs(snr)
    known = {f.name for f in fields(RunConfig)}
    unknown = set(values) - known
    if unknown:
        raise UsageError(f"unknown option(s): {', '.join(sorted(unknown))}")
    try:
        cfg = RunConfig(**values)
    except TypeError as exc:
        raise UsageError(str(exc)) from None
    cfg.validate()
    return cfg


def cmd_construct(cfg: RunConfig, schemes) -> str:
    dumps = []
    for decoder, scheme in zip(cfg.decoders, schemes):
        if scheme.concat is not None:
            body = scheme.concat.describe()
        else:
            polar = scheme.polar
            body = polar.to_dict()
            body["rate"] = polar.k / polar.n
        dumps.append({"decoder": decoder, **body})
    if cfg.alist:
        concat = [s.concat for s in schemes if s.concat is not None]
        if concat[0].ldpc is None:
            raise ValueError("--alist needs dn > 0")
        Path(cfg.alist).write_text(concat[0].ldpc.tanner.to_alist())
    return json.dumps(dumps[0] if len(dumps) == 1 else dumps, indent=2) + "\n"


def cmd_simulate(cfg: RunConfig, schemes, summary) -> str:
    reports = []

    def progress(report, rec):
        lo, hi = rec.fer_interval()
        summary(
            f"{report.decoder:>9} {rec.snr_db:6.3f} dB  frames={rec.frames:<8d} "
            f"fer={rec.fer:.4e} [{lo:.3e}, {hi:.3e}]  ber={rec.ber:.4e}"
        )

    for scheme in schemes:
        reports.append(run_sweep(
            scheme, cfg.snrs, cfg.max_frames, cfg.target_errors, cfg.seed,
            cfg.batch_size, cfg.workers, progress,
        ))
    return format_csv(reports)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(args)
        if args.command == "construct" and cfg.alist and not any(d in ("ic-ldpc", "proposed") for d in cfg.decoders):
            raise UsageError("--alist needs a concatenated decoder (ic-ldpc or proposed)")
        schemes = [cfg.scheme(d) for d in cfg.decoders]
    except (UsageError, ValueError) as exc:
        print(f"ldpcpolar: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"ldpcpolar: runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    try:
        if args.command == "construct":
            text = cmd_construct(cfg, schemes)
        else:
            to_file = cfg.output is not None
            text = cmd_simulate(cfg, schemes, lambda line: print(line, file=sys.stdout if to_file else sys.stderr, flush=True))
    except Exception as exc:  # noqa: BLE001
        print(f"ldpcpolar: runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    try:
        if cfg.output:
            Path(cfg.output).write_text(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"ldpcpolar: runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
