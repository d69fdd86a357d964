"""
Secure multiplication of two matrices

sdmm2          sources upload left shares of A and right shares of B with
               K = N - 2T; the user averages the N product shares.
sdmm2_own_data the user owns A and B, uses K = N - T, keeps the keys and
               subtracts sum_l R_l S_l from the average.
usersecure_round  servers re-share their product shares as (N, N-T, T)
               left shares so the user learns nothing beyond AB.
"""

import logging
from typing import List, Sequence

from ..algebra.matrix import MatrixFq
from ..models.network import NodeId
from ..models.share import Share, ShareParams, Side
from ..simulation.engine import SimNet
from .primitives import (average_at_user, decode_at_user, multiply_local, own_data_k,
                         require_conformal, require_divisible, reshare_product, standard_k,
                         upload_matrix)

logger = logging.getLogger(__name__)


def _second_source(net: SimNet) -> int:
    return 2 if net.n_sources >= 2 else 1


def share_operands(net: SimNet, a: MatrixFq, b: MatrixFq, t: int):
    """Sharing phase of sdmm2; returns (left shares of A, right shares of B)"""
    k = standard_k(net.n, t)
    require_conformal(a, b, 'sdmm2')
    require_divisible(a.cols, k, 'inner dimension')
    net.register_inputs(a, b)
    left, _ = upload_matrix(net, 1, a, ShareParams(net.n, k, t, Side.LEFT), 'A')
    right, _ = upload_matrix(net, _second_source(net), b, ShareParams(net.n, k, t, Side.RIGHT), 'B')
    return left, right


def sdmm2(net: SimNet, a: MatrixFq, b: MatrixFq, t: int, user_secure: bool = False) -> MatrixFq:
    """AB with upload cost N/(N-2T)"""
    left, right = share_operands(net, a, b, t)
    logger.info("sdmm2: N=%d, K=%d, T=%d, %dx%d @ %dx%d", net.n, net.n - 2 * t, t,
                a.rows, a.cols, b.rows, b.cols)
    products = multiply_local(net, left, right, 'C')
    if user_secure:
        shares = usersecure_round(net, products, t)
        result = decode_at_user(net, shares, 'C')
    else:
        result = average_at_user(net, products, 'C')
    net.register_output(result)
    return result


def usersecure_round(net: SimNet, products: Sequence[Share], t: int) -> List[Share]:
    """Turn product shares of C into (N, N-T, T) left shares of C at the servers"""
    k = own_data_k(net.n, t)
    require_divisible(products[0].payload.cols, k, 'result columns')
    logger.debug("User-security round: re-sharing with K=%d", k)
    return reshare_product(net, products, ShareParams(net.n, k, t, Side.LEFT), 'C')


def sdmm2_own_data(net: SimNet, a: MatrixFq, b: MatrixFq, t: int) -> MatrixFq:
    """AB with the optimal upload cost N/(N-T); the user is the data owner"""
    k = own_data_k(net.n, t)
    require_conformal(a, b, 'sdmm2_own_data')
    require_divisible(a.cols, k, 'inner dimension')
    net.register_inputs(a, b)
    user = NodeId.user()
    left, keys_a = upload_matrix(net, user, a, ShareParams(net.n, k, t, Side.LEFT), 'A')
    right, keys_b = upload_matrix(net, user, b, ShareParams(net.n, k, t, Side.RIGHT_OWN_DATA), 'B')

    # offline and uncosted: the owner keeps its keys and their product
    correction = None
    for r, s in zip(keys_a.keys, keys_b.keys):
        correction = r @ s if correction is None else correction + r @ s
    net.user_state['keys'] = (keys_a, keys_b)
    net.user_state['key_product'] = correction

    logger.info("sdmm2_own_data: N=%d, K=%d, T=%d", net.n, k, t)
    products = multiply_local(net, left, right, 'C')
    result = average_at_user(net, products, 'C')
    if correction is not None:
        result = result - correction
    net.register_output(result)
    return result
