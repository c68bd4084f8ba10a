"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

The lines are echoed live and collected into a summary section at the end of
the pytest run.
"""

import contextlib
import subprocess
import sys

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from ldpcpolar.bp import SAT, bpd_decode
from ldpcpolar.concat import build_concat_spec, concat_decode, concat_decode_full, concat_encode
from ldpcpolar.ldpc import LdpcCodeSpec, construct_regular_ldpc, ldpc_encode
from ldpcpolar.polar import construct_polar, encode, row_weights
from ldpcpolar.sc import scd_decode
from ldpcpolar.simulator import count_additions, make_scheme, run_sweep

from oracles import all_words, stopping_tree_leaves
from test_ldpc import TOY_H


@contextlib.contextmanager
def criterion(number, title):
    detail = {}
    try:
        yield detail
    except BaseException as exc:
        line = f"criterion {number} FAIL  {title}: {detail.get('msg', '')} ({type(exc).__name__}: {exc})"
        ACCEPTANCE_LINES.append(line)
        print(line)
        raise
    line = f"criterion {number} PASS  {title}: {detail.get('msg', '')}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def saturated(x):
    return np.where(x == 0, SAT, -SAT)


def test_criterion_1_complexity_exactness():
    with criterion(1, "complexity exactness") as d:
        assert count_additions("bpd", 1024) == 40960
        assert count_additions("proposed", 1024, 192) == 41728
        rng = np.random.default_rng(1)
        llr = rng.normal(1.0, 2.0, (4, 1024))
        base = bpd_decode(llr, construct_polar(1024, 512), 60)
        assert base.additions == [40960] * 60
        for selection in ("proposed", "ic"):
            _, res = concat_decode_full(llr, build_concat_spec(selection=selection), 60)
            assert res.additions == [41728] * 60
        d["msg"] = "40960 / 41728 analytic, instrumented counters equal on all 60 iterations"


def test_criterion_2_leafset_equivalence():
    with criterion(2, "leafset equivalence") as d:
        checked = 0
        for n in (2, 4, 8, 16, 32, 64):
            w = row_weights(n)
            for i in range(n):
                assert len(stopping_tree_leaves(n, i)) == w[i]
                checked += 1
        assert len(stopping_tree_leaves(8, 5)) == 4
        d["msg"] = f"{checked} (n, index) pairs, anchor n=8 index 5 -> 4"


def test_criterion_3_selection_structure():
    with criterion(3, "selection structure") as d:
        spec = build_concat_spec(1024, 480, 64, "proposed", z0=0.5)
        w = row_weights(1024)
        z = spec.polar.reliability
        info = spec.polar.info_set
        chosen = spec.u_ldpc
        weights, counts = np.unique(w[info], return_counts=True)
        sizes = dict(zip(weights.tolist(), counts.tolist()))
        boundary = w[chosen].max()
        lighter = info[w[info] < boundary]
        assert np.isin(lighter, chosen).all()
        assert (w[np.setdiff1d(info, chosen)] >= boundary).all()
        at_boundary = info[w[info] == boundary]
        taken = np.intersect1d(at_boundary, chosen)
        want = at_boundary[np.lexsort((at_boundary, -z[at_boundary]))][: taken.size]
        assert sorted(want.tolist()) == taken.tolist()
        light16 = info[w[info] == 16]
        assert np.isin(light16, chosen).all()
        d["msg"] = (
            f"weight sizes {sizes}; all {lighter.size} bits of weight < {boundary} taken, "
            f"{taken.size} of {at_boundary.size} weight-{boundary} bits by descending Z"
        )


def test_criterion_4_encode_decode_identity():
    with criterion(4, "encode/decode identity") as d:
        rng = np.random.default_rng(4)
        frames = 1000
        polar = construct_polar(1024, 512)
        u = np.zeros((frames, 1024), dtype=np.uint8)
        u[:, polar.info_set] = rng.integers(0, 2, (frames, 512))
        llr = saturated(encode(u))
        assert (scd_decode(llr, polar) == u).all()
        assert (bpd_decode(llr, polar, 1).u_hat == u).all()
        for selection in ("proposed", "ic"):
            spec = build_concat_spec(selection=selection)
            payload = rng.integers(0, 2, (frames, spec.payload_bits), dtype=np.uint8)
            assert (concat_decode(saturated(concat_encode(payload, spec)), spec, 1) == payload).all()
        small = 0
        for n in (2, 4, 8, 16):
            for k in range(1, n + 1) if n <= 8 else (4, 8, 12):
                spec = construct_polar(n, k)
                words = np.array(list(all_words(k)), dtype=np.uint8)
                u = np.zeros((len(words), n), dtype=np.uint8)
                u[:, spec.info_set] = words
                llr = saturated(encode(u))
                assert (scd_decode(llr, spec) == u).all()
                assert (bpd_decode(llr, spec, 1).u_hat == u).all()
                small += len(words)
        cspec = build_concat_spec(16, 2, 8, "proposed", ldpc=LdpcCodeSpec.from_parity_check(TOY_H))
        words = np.array(list(all_words(cspec.payload_bits)), dtype=np.uint8)
        assert (concat_decode(saturated(concat_encode(words, cspec)), cspec, 1) == words).all()
        d["msg"] = f"{frames} frames x (SCD, BPD, proposed, IC-LDPC) at n=1024; {small + len(words)} exhaustive words at n<=16"


def test_criterion_5_ldpc_validity():
    with criterion(5, "LDPC validity") as d:
        rng = np.random.default_rng(5)
        seeds = range(10)
        for seed in seeds:
            code = construct_regular_ldpc(64, 32, seed=seed)
            g = code.tanner
            assert g.e == 192
            assert (g.bit_degrees() == 3).all() and (g.check_degrees() == 6).all()
            assert not g.has_four_cycle()
            words = ldpc_encode(rng.integers(0, 2, (200, 32), dtype=np.uint8), code)
            assert not g.syndrome(words).any()
        d["msg"] = f"seeds 0-{seeds[-1]}: (3,6)-regular, girth >= 6, e = 192, 200 codewords each satisfy H x = 0"


def test_criterion_6_degeneracy():
    with criterion(6, "degeneracy equivalence") as d:
        spec = build_concat_spec(1024, 512, 0)
        base = construct_polar(1024, 512)
        rng = np.random.default_rng(6)
        u = np.zeros((1000, 1024), dtype=np.uint8)
        u[:, base.info_set] = rng.integers(0, 2, (1000, 512))
        sigma = 0.85
        llr = 2 * (1 - 2.0 * encode(u) + sigma * rng.standard_normal(u.shape)) / sigma**2
        got = concat_decode(llr, spec, 60)
        ref = bpd_decode(llr, base, 60).u_hat[:, base.info_set]
        assert (got == ref).all()
        d["msg"] = f"1000 noisy frames bit-identical ({int((ref != u[:, base.info_set]).any(1).sum())} of them decoded wrongly by both)"


FRAMES_C7 = 10_000


@pytest.mark.slow
def test_criterion_7_curve_ordering():
    with criterion(7, "curve ordering at 2.0 dB") as d:
        recs = {}
        for decoder in ("proposed", "ic-ldpc", "bpd"):
            scheme = make_scheme(decoder, max_iters=60)
            assert scheme.rate == 0.5 and scheme.n == 1024
            recs[decoder] = run_sweep(scheme, [2.0], max_frames=FRAMES_C7, target_frame_errors=0, seed=7).records[0]
        ci = {k: r.fer_interval() for k, r in recs.items()}
        d["msg"] = "; ".join(
            f"{k} {r.frame_errors}/{r.frames} fer={r.fer:.4f} [{ci[k][0]:.4f}, {ci[k][1]:.4f}]" for k, r in recs.items()
        )
        assert all(r.frame_errors >= 100 for r in recs.values())
        assert ci["proposed"][1] < ci["bpd"][0], "proposed vs BPD"
        assert ci["proposed"][1] < ci["ic-ldpc"][0], "proposed vs IC-LDPC"


def test_criterion_8_cli_determinism(tmp_path):
    with criterion(8, "CLI determinism") as d:
        argv = ["simulate", "--snr", "2.5,3.0", "--max-frames", "48", "--target-errors", "5", "--batch-size", "16",
                "--seed", "8", "--max-iters", "20"]
        outputs = []
        for name in ("a.csv", "b.csv"):
            path = tmp_path / name
            subprocess.run([sys.executable, "-m", "ldpcpolar", *argv, "-o", str(path)], check=True, capture_output=True)
            outputs.append(path.read_bytes())
        assert outputs[0] == outputs[1]
        rows = outputs[0].decode().splitlines()
        assert len(rows) == 1 + 4 * 2
        d["msg"] = f"two runs of all four decoders, {len(rows) - 1} rows, byte-identical"
