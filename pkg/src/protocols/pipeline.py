"""
Multiplication with upload and download cost both N/(N-T)

Sources upload (N, N-T, T) shares, servers convert them to (N, N-2T, T)
shares of the opposite side, multiply, and hand the user (N, N-T, T) left
shares of the product.
"""

import logging

from ..algebra.matrix import MatrixFq
from ..models.share import ShareParams, Side
from ..simulation.engine import SimNet
from .conversion import convert_shares
from .primitives import (decode_at_user, multiply_local, own_data_k, require_conformal,
                         require_divisible, standard_k, upload_matrix)
from .sdmm import usersecure_round

logger = logging.getLogger(__name__)


def optimal_cost_pipeline(net: SimNet, a: MatrixFq, b: MatrixFq, t: int) -> MatrixFq:
    k_wide = own_data_k(net.n, t)
    k = standard_k(net.n, t)
    require_conformal(a, b, 'optimal_cost_pipeline')
    require_divisible(a.rows, k_wide, 'rows of A')
    require_divisible(b.cols, k_wide, 'columns of B')
    require_divisible(a.cols, k, 'inner dimension')
    net.register_inputs(a, b)

    # A is row-partitioned so its conversion lands on the left side
    a_up, _ = upload_matrix(net, 1, a, ShareParams(net.n, k_wide, t, Side.RIGHT_OWN_DATA), 'A')
    b_up, _ = upload_matrix(net, 2 if net.n_sources >= 2 else 1, b,
                            ShareParams(net.n, k_wide, t, Side.LEFT), 'B')
    logger.info("optimal_cost_pipeline: upload K=%d, compute K=%d, T=%d", k_wide, k, t)

    a_left = convert_shares(net, a_up, k, t, Side.LEFT)
    b_right = convert_shares(net, b_up, k, t, Side.RIGHT)
    products = multiply_local(net, a_left, b_right, 'C')
    shares = usersecure_round(net, products, t)
    result = decode_at_user(net, shares, 'C')
    net.register_output(result)
    return result
