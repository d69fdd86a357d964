"""
Secure chain multiplication A^(1) A^(2) ... A^(Gamma)

Source 1 uploads left shares of A^(1); every other source uploads right
shares of its matrix. Each round multiplies the running left share with the
next right share; the product is re-shared into left shares of the running
product, except in the last round where the user averages directly.
"""

import logging
from typing import Sequence

from ..algebra.matrix import MatrixFq
from ..models.share import ShareParams, Side
from ..simulation.engine import SimNet
from ..utils.errors import DimensionError, ParameterError
from .primitives import (average_at_user, multiply_local, require_conformal, reshare_product,
                         standard_k, upload_matrix)

logger = logging.getLogger(__name__)


def check_chain(matrices: Sequence[MatrixFq], k: int):
    """Conformal chain; every inner dimension divisible by K"""
    if len(matrices) < 2:
        raise ParameterError(f"a chain needs at least 2 matrices, got {len(matrices)}")
    for gamma in range(1, len(matrices)):
        require_conformal(matrices[gamma - 1], matrices[gamma], f'round {gamma}')
        inner = matrices[gamma - 1].cols
        if inner % k:
            raise DimensionError(
                f"indivisible-dimension in round {gamma}: inner dimension {inner} not divisible by K={k}")


def chain_multiply(net: SimNet, matrices: Sequence[MatrixFq], t: int) -> MatrixFq:
    k = standard_k(net.n, t)
    check_chain(matrices, k)
    gamma_total = len(matrices)
    if net.n_sources < gamma_total:
        raise ParameterError(f"chain of {gamma_total} matrices needs {gamma_total} sources, "
                             f"network has {net.n_sources}")
    net.register_inputs(*matrices)
    left_params = ShareParams(net.n, k, t, Side.LEFT)
    right_params = ShareParams(net.n, k, t, Side.RIGHT)

    current, _ = upload_matrix(net, 1, matrices[0], left_params, 'A1')
    rights = [upload_matrix(net, gamma, matrices[gamma - 1], right_params, f'A{gamma}')[0]
              for gamma in range(2, gamma_total + 1)]
    logger.info("chain_multiply: Gamma=%d, N=%d, K=%d, T=%d", gamma_total, net.n, k, t)

    for gamma, right in enumerate(rights, start=2):
        products = multiply_local(net, current, right, f'H{gamma}')
        if gamma == gamma_total:
            result = average_at_user(net, products, f'C{gamma}')
            net.register_output(result)
            return result
        current = reshare_product(net, products, left_params, f'C{gamma}')
        logger.debug("Round %d complete: left shares of C%d at all servers", gamma - 1, gamma)
