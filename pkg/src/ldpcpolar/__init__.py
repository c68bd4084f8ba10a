"""Polar codes with belief-propagation decoding and LDPC-protected low-weight rows."""

from .bp import BPResult, bpd_decode, minsum_f, pe_update
from .concat import ConcatSpec, build_concat_spec, concat_decode, concat_encode
from .ldpc import LdpcCodeSpec, TannerGraph, construct_regular_ldpc, ldpc_encode, tanner_bp_round
from .polar import PolarCodeSpec, compute_bhattacharyya, construct_polar, encode, row_weights, select_frozen_set
from .sc import scd_decode
from .simulator import ChannelConfig, count_additions, make_scheme, run_sweep

__version__ = "0.1.0"

__all__ = [
    "BPResult", "ChannelConfig", "ConcatSpec", "LdpcCodeSpec", "PolarCodeSpec", "TannerGraph",
    "bpd_decode", "build_concat_spec", "compute_bhattacharyya", "concat_decode", "concat_encode",
    "construct_polar", "construct_regular_ldpc", "count_additions", "encode", "ldpc_encode",
    "make_scheme", "minsum_f", "pe_update", "row_weights", "run_sweep", "scd_decode",
    "select_frozen_set", "tanner_bp_round",
]
