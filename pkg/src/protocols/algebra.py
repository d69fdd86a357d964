"""
Secure matrix algebra on top of share multiplication: powers, masked
inversion, Newton iteration and linear systems
"""

import logging
from typing import List, Optional, Sequence

from ..algebra.matrix import MatrixFq, identity, plaintext_solve, random_matrix
from ..models.network import NodeId
from ..models.share import Share, ShareParams, Side
from ..sharing.encoding import (add_public_matrix, check_complete, make_shares,
                                reconstruct_constant, share_scale)
from ..simulation.engine import SimNet
from ..utils.config import get_settings
from ..utils.errors import DimensionError, ParameterError, ShareError, SingularMatrixError
from .conversion import convert_shares
from .primitives import (average_at_user, decode_at_user, multiply_local, require_divisible,
                         reshare_product, standard_k, upload_matrix)

logger = logging.getLogger(__name__)


def multiply_rounds(r: int) -> int:
    """floor(log2 r) + hamming(r) - 1"""
    return r.bit_length() - 1 + bin(r).count('1') - 1


def _require_square(m: MatrixFq, what: str):
    if m.rows != m.cols:
        raise DimensionError(f"{what} must be square, got {m.rows}x{m.cols}")


def exponentiate(net: SimNet, a: MatrixFq, r: int, t: int) -> MatrixFq:
    """A^r by square-and-multiply on shares"""
    if r < 1:
        raise ParameterError(f"exponent must be >= 1, got r={r}")
    _require_square(a, 'A')
    k = standard_k(net.n, t)
    require_divisible(a.rows, k, 'dimension of A')
    net.register_inputs(a)
    lp = ShareParams(net.n, k, t, Side.LEFT)

    left, _ = upload_matrix(net, 1, a, lp, 'A')
    logger.info("exponentiate: r=%d, %d multiplication rounds", r, multiply_rounds(r))
    if r == 1:
        result = decode_at_user(net, left, 'A')
    else:
        result = power_of_shares(net, left, r, t, deliver=True)
    net.register_output(result)
    return result


def power_of_shares(net: SimNet, left: List[Share], r: int, t: int, deliver: bool = False):
    """Left shares of A into A^r: to the user when deliver, else as left shares"""
    if r < 1:
        raise ParameterError(f"exponent must be >= 1, got r={r}")
    if r == 1:
        return left
    lp = left[0].params
    k = lp.k
    bits = bin(r)[2:][::-1]
    top = len(bits) - 1
    total = multiply_rounds(r)
    done = 0

    def multiply(lft: List[Share], rgt: List[Share], name: str):
        nonlocal done
        products = multiply_local(net, lft, rgt, f'H[{name}]')
        done += 1
        if done == total and deliver:
            return average_at_user(net, products, name)
        return reshare_product(net, products, lp, name)

    power_left, power_right = left, None
    acc = None
    for j in range(top + 1):
        if bits[j] == '1':
            if acc is None:
                acc = power_left
            else:
                if power_right is None:
                    power_right = convert_shares(net, power_left, k, t, Side.RIGHT)
                acc = multiply(acc, power_right, f'A^{r & ((2 << j) - 1)}')
        if j < top:
            if power_right is None:
                power_right = convert_shares(net, power_left, k, t, Side.RIGHT)
            power_left = multiply(power_left, power_right, f'A^{2 ** (j + 1)}')
            power_right = None
    return acc


def masked_inverse(net: SimNet, right_shares: Sequence[Share], t: int,
                   retries: Optional[int] = None) -> List[Share]:
    """Right shares of A into left shares of A^-1 via the public product P = Phi A"""
    ordered = check_complete(right_shares)
    params = ordered[0].params
    if not params.side.is_right:
        raise ShareError(f"param-mismatch: masked inversion needs right shares, got {params.side.value}")
    dim = ordered[0].payload.cols
    lp = ShareParams(net.n, params.k, t, Side.LEFT)
    f = net.field
    if retries is None:
        retries = get_settings().phi_retries
    if retries < 1:
        raise ParameterError(f"retries must be >= 1, got {retries}")

    for attempt in range(1, retries + 1):
        # every server contributes a random Phi^(i); Phi is their sum
        def share_phi(i: int) -> List[Share]:
            rng = net.rng(NodeId.server(i))
            phi_i = random_matrix(f, dim, dim, rng)
            out, _ = make_shares(phi_i, lp, rng, 'Phi')
            return out

        outgoing = dict(zip(net.servers, net.map_servers(share_phi)))
        incoming = net.exchange(outgoing, dim * dim, 'Phi')
        phi_left = [Share(lp, j, MatrixFq(sum(s.payload.values for s in incoming[j]) % f.q, f), 'Phi')
                    for j in net.servers]

        products = multiply_local(net, phi_left, ordered, 'P')
        broadcast = net.exchange({p.server_index: [p] * net.n for p in products}, dim * dim, 'P')
        public = net.map_servers(lambda j: reconstruct_constant(broadcast[j]))

        try:
            p_inv = plaintext_solve(public[0], identity(f, dim))
        except SingularMatrixError:
            logger.warning("Masked product singular (attempt %d/%d), drawing fresh Phi", attempt, retries)
            continue
        return net.map_servers(
            lambda j: Share(lp, j, p_inv @ phi_left[j - 1].payload, 'A^-1'))

    raise SingularMatrixError(
        f"singular-matrix: masked product singular in all {retries} attempts; A is not invertible")


def invert(net: SimNet, a: MatrixFq, t: int) -> MatrixFq:
    """A^-1 delivered to the user"""
    _require_square(a, 'A')
    k = standard_k(net.n, t)
    require_divisible(a.rows, k, 'dimension of A')
    net.register_inputs(a)
    right, _ = upload_matrix(net, 1, a, ShareParams(net.n, k, t, Side.RIGHT), 'A')
    logger.info("masked inversion: %dx%d, N=%d, T=%d", a.rows, a.cols, net.n, t)
    shares = masked_inverse(net, right, t)
    result = decode_at_user(net, shares, 'A^-1')
    net.register_output(result)
    return result


def solve_linear(net: SimNet, a: MatrixFq, b: MatrixFq, t: int) -> MatrixFq:
    """X = A^-1 B: masked inversion then one share multiplication"""
    _require_square(a, 'A')
    if b.rows != a.rows:
        raise DimensionError(f"dimension mismatch: A is {a.rows}x{a.cols}, B has {b.rows} rows")
    k = standard_k(net.n, t)
    require_divisible(a.rows, k, 'dimension of A')
    net.register_inputs(a, b)
    rp = ShareParams(net.n, k, t, Side.RIGHT)
    a_right, _ = upload_matrix(net, 1, a, rp, 'A')
    b_right, _ = upload_matrix(net, 2 if net.n_sources >= 2 else 1, b, rp, 'B')
    inverse = masked_inverse(net, a_right, t)
    products = multiply_local(net, inverse, b_right, 'X')
    result = average_at_user(net, products, 'X')
    net.register_output(result)
    return result


def newton_inverse_rounds(net: SimNet, a: MatrixFq, x0: MatrixFq, k_iter: int, t: int) -> MatrixFq:
    """X_k of X_{i+1} = X_i (2I - A X_i), every step on shares"""
    if k_iter < 0:
        raise ParameterError(f"iteration count must be >= 0, got {k_iter}")
    _require_square(a, 'A')
    if x0.shape != a.shape:
        raise DimensionError(f"dimension mismatch: A is {a.rows}x{a.cols}, X0 is {x0.rows}x{x0.cols}")
    k = standard_k(net.n, t)
    require_divisible(a.rows, k, 'dimension of A')
    net.register_inputs(a, x0)
    lp = ShareParams(net.n, k, t, Side.LEFT)
    rp = ShareParams(net.n, k, t, Side.RIGHT)
    second = 2 if net.n_sources >= 2 else 1

    a_left, _ = upload_matrix(net, 1, a, lp, 'A')
    x_left, _ = upload_matrix(net, second, x0, lp, 'X0')
    if k_iter == 0:
        result = decode_at_user(net, x_left, 'X0')
        net.register_output(result)
        return result
    x_right, _ = upload_matrix(net, second, x0, rp, 'X0')
    two_identity = identity(net.field, a.rows).scale(2)

    for it in range(1, k_iter + 1):
        ax = multiply_local(net, a_left, x_right, f'AX{it - 1}')
        ax_right = reshare_product(net, ax, rp, f'AX{it - 1}')
        residual = add_public_matrix([share_scale(-1, s, f'Y{it}') for s in ax_right], two_identity)
        step = multiply_local(net, x_left, residual, f'X{it}')
        if it == k_iter:
            result = average_at_user(net, step, f'X{it}')
            net.register_output(result)
            return result
        x_left = reshare_product(net, step, lp, f'X{it}')
        x_right = reshare_product(net, step, rp, f'X{it}')
        logger.debug("Newton iteration %d complete", it)
