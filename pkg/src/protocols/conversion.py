"""
Share conversion and transpose

Server i re-shares its payload with the target parameters and sends piece j
to server j. Server j runs an IDFT over the senders: coefficient e of the
result is a target-side share of coefficient e of the source polynomial, so
picking the source's data positions and joining them along the source's
partition axis yields a target share of the whole matrix.
"""

import logging
from typing import Dict, List, Optional, Sequence

from ..algebra.finite_field import idft
from ..algebra.matrix import MatrixFq, stack_rows
from ..models.network import NodeId
from ..models.share import Share, ShareParams, Side
from ..sharing.encoding import (check_complete, data_positions, join_blocks, make_shares,
                                split_blocks)
from ..simulation.engine import SimNet
from ..utils.errors import IllegalConversionError, ParameterError

logger = logging.getLogger(__name__)

UNIVARIATE_SIDES = (Side.LEFT, Side.RIGHT, Side.RIGHT_OWN_DATA)


def _distribute(net: SimNet, payloads: Dict[int, MatrixFq], target: ShareParams, normalizer: int,
                tag: str) -> Dict[int, List[MatrixFq]]:
    """Re-share every payload and return, per receiver, the IDFT over senders"""
    def share_out(i: int) -> List[Share]:
        out, _ = make_shares(payloads[i], target, net.rng(NodeId.server(i)), tag)
        return out

    outgoing = dict(zip(net.servers, net.map_servers(share_out)))
    incoming = net.exchange(outgoing, normalizer, tag)

    def interpolate(j: int) -> List[MatrixFq]:
        coeffs = idft(net.field, [s.payload.values for s in incoming[j]])
        return [MatrixFq(c, net.field) for c in coeffs]

    return dict(zip(net.servers, net.map_servers(interpolate)))


def is_legal_conversion(source: Side, target: Side, k1: int) -> bool:
    """Opposite sides always convert; same side only from K = 1"""
    return source.is_left != target.is_left or k1 == 1


def convert_shares(net: SimNet, shares: Sequence[Share], k2: int, t2: int, side: Side,
                   tag: Optional[str] = None) -> List[Share]:
    """(N, K1, T1) shares of one side into (N, K2, T2) shares of `side`"""
    ordered = check_complete(shares)
    source = ordered[0].params
    if source.side not in UNIVARIATE_SIDES or side not in UNIVARIATE_SIDES:
        raise ParameterError(f"cannot convert {source.side.value} -> {side.value}")
    if not is_legal_conversion(source.side, side, source.k):
        raise IllegalConversionError(
            f"illegal-conversion: {source.side.value} -> {side.value} with K1={source.k} >= 2")
    target = ShareParams(net.n, k2, t2, side)
    split_blocks(ordered[0].payload, k2, side)
    tag = tag or ordered[0].object_tag
    logger.debug("Converting %s (K=%d, T=%d) -> %s (K=%d, T=%d)", source.side.value, source.k,
                 source.t, side.value, k2, t2)

    payloads = {s.server_index: s.payload for s in ordered}
    normalizer = ordered[0].payload.size * source.k
    coeffs = _distribute(net, payloads, target, normalizer, tag)
    positions = data_positions(source.n, source.k, source.side)
    return [Share(target, j, join_blocks([coeffs[j][p] for p in positions], source.side), tag)
            for j in net.servers]


def transpose_shares(net: SimNet, shares: Sequence[Share], k2: int, t2: int,
                     tag: Optional[str] = None) -> List[Share]:
    """Left shares of A into (N, K2, T2) left shares of A^tr"""
    ordered = check_complete(shares)
    source = ordered[0].params
    if source.side != Side.LEFT:
        raise ParameterError(f"transpose needs left shares, got {source.side.value}")
    target = ShareParams(net.n, k2, t2, Side.LEFT)
    payloads = {s.server_index: s.payload.T for s in ordered}
    split_blocks(payloads[1], k2, Side.LEFT)
    tag = tag or f'{ordered[0].object_tag}^T'

    normalizer = ordered[0].payload.size * source.k
    coeffs = _distribute(net, payloads, target, normalizer, tag)
    return [Share(target, j, stack_rows(coeffs[j][:source.k]), tag) for j in net.servers]


def to_elementwise(net: SimNet, shares: Sequence[Share], t: Optional[int] = None) -> List[Share]:
    """(N, 1, T) shares, the entry format of elementwise protocols such as secure GE"""
    ordered = check_complete(shares)
    source = ordered[0].params
    if source.k == 1 and (t is None or t == source.t):
        return list(ordered)
    side = Side.RIGHT if source.side.is_left else Side.LEFT
    return convert_shares(net, ordered, 1, source.t if t is None else t, side)
