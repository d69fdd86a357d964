"""
Building blocks shared by the protocols: uploads, local products,
resharing of product shares, and user-side reconstruction
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple, Union

from ..algebra.matrix import MatrixFq
from ..models.network import NodeId
from ..models.share import SecretKeyBundle, Share, ShareParams, Side
from ..sharing.encoding import (decode_shares, make_shares, reconstruct_constant, share_mul,
                                split_blocks)
from ..simulation.engine import SimNet
from ..utils.errors import DimensionError, ParameterError, ShareError

logger = logging.getLogger(__name__)


def standard_k(n: int, t: int) -> int:
    """K = N - 2T, the largest partition count for left x right products"""
    if n <= 2 * t:
        raise ParameterError(f"need N > 2T, got N={n}, T={t}")
    return n - 2 * t


def own_data_k(n: int, t: int) -> int:
    if n <= t:
        raise ParameterError(f"need N > T, got N={n}, T={t}")
    return n - t


def require_divisible(value: int, k: int, what: str):
    if value % k:
        raise DimensionError(f"indivisible-dimension: {what} = {value} is not divisible by K={k}")


def require_conformal(a: MatrixFq, b: MatrixFq, what: str = 'product'):
    if a.field.q != b.field.q:
        raise DimensionError(f"field mismatch in {what}: F_{a.q} vs F_{b.q}")
    if a.cols != b.rows:
        raise DimensionError(f"dimension mismatch in {what}: {a.rows}x{a.cols} @ {b.rows}x{b.cols}")


def upload_matrix(net: SimNet, sender: Union[int, NodeId], m: MatrixFq, params: ShareParams,
                  tag: str) -> Tuple[List[Share], SecretKeyBundle]:
    """Share m with the sender's RNG stream and deliver share i to server i"""
    node = sender if isinstance(sender, NodeId) else net.source(sender)
    shares, keys = make_shares(m, params, net.rng(node), tag)
    net.upload(node, shares)
    return shares, keys


def multiply_local(net: SimNet, left: Sequence[Share], right: Sequence[Share],
                   tag: Optional[str] = None) -> List[Share]:
    """Computation phase: every server multiplies its left and right share"""
    by_server_left = {s.server_index: s for s in left}
    by_server_right = {s.server_index: s for s in right}
    products = net.map_servers(lambda i: share_mul(by_server_left[i], by_server_right[i], tag))
    net.computation_round()
    return products


def reshare(net: SimNet, shares: Sequence[Share], target: ShareParams, normalizer: int,
            tag: str) -> List[Share]:
    """Each server shares its payload with `target`; server j averages what it receives.

    Applied to product shares this yields shares of the product's constant
    term, i.e. of the product matrix itself.
    """
    if target.n != net.n:
        raise ParameterError(f"target N={target.n} differs from network N={net.n}")
    by_server = {s.server_index: s for s in shares}
    if sorted(by_server) != net.servers:
        raise ShareError(f"missing-share: resharing needs all {net.n} servers")

    def share_out(i: int) -> List[Share]:
        out, _ = make_shares(by_server[i].payload, target, net.rng(NodeId.server(i)), tag)
        return out

    outgoing: Dict[int, List[Share]] = dict(zip(net.servers, net.map_servers(share_out)))
    incoming = net.exchange(outgoing, normalizer, tag)
    n_inv = net.field.inv(net.n)
    result = []
    for j in net.servers:
        total = sum(s.payload.values for s in incoming[j]) % net.field.q
        result.append(Share(target, j, MatrixFq(total * n_inv % net.field.q, net.field), tag))
    return result


def reshare_product(net: SimNet, products: Sequence[Share], target: ShareParams,
                    tag: str) -> List[Share]:
    """Communication phase after a multiplication; cost normalized by the product size"""
    size = products[0].payload.size
    split_blocks(products[0].payload, target.k, target.side)
    return reshare(net, products, target, size, tag)


def average_at_user(net: SimNet, products: Sequence[Share], tag: str = '') -> MatrixFq:
    """Reconstruction phase: user averages the N product shares"""
    delivered = net.download(products, tag)
    if len(delivered) < net.n:
        missing = sorted(set(net.servers) - {s.server_index for s in delivered})
        raise ShareError(f"missing-share: no response from servers {missing}")
    return reconstruct_constant(delivered)


def decode_at_user(net: SimNet, shares: Sequence[Share], tag: str = '') -> MatrixFq:
    """Reconstruction phase: user IDFTs left or right shares and joins the data blocks"""
    delivered = net.download(shares, tag)
    if len(delivered) < net.n:
        missing = sorted(set(net.servers) - {s.server_index for s in delivered})
        raise ShareError(f"missing-share: no response from servers {missing}")
    return decode_shares(delivered)


def left_params(net: SimNet, k: int, t: int) -> ShareParams:
    return ShareParams(net.n, k, t, Side.LEFT)


def right_params(net: SimNet, k: int, t: int) -> ShareParams:
    return ShareParams(net.n, k, t, Side.RIGHT)
