"""
Bivariate shares for straggler-tolerant multiplication

A is tiled K2 x K1 (A_ij), B is tiled K1 x K3 (B_jk). With x1 = alpha_N1^(r-1)
and x2 = beta_s, server (s-1)*N1 + r receives

    A(x1, x2) = sum_ij A_ij x2^(i-1) x1^(j-1) + sum_it R_it x2^(i-1) x1^(K1+t-1)
    B(x1, x2) = sum_jk B_jk x1^-(j-1) x2^(K2(k-1)) + sum_tk S_tk x1^-(K1+T+t-1) x2^(K2(k-1))

(own-data keys sit at x1^-(K1+t-1)). For a fixed beta_s each side is an
ordinary univariate share over N1 points of the x2-weighted band sum.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..algebra.finite_field import FieldSpec
from ..algebra.matrix import MatrixFq, grid_partition, random_matrix
from ..models.share import SecretKeyBundle, Share, ShareParams, Side
from ..utils.errors import DimensionError, ParameterError
from .encoding import encode_with_keys


def default_betas(field: FieldSpec, n2: int) -> List[int]:
    """The n2 smallest nonzero field elements"""
    if n2 >= field.q:
        raise ParameterError(f"need {n2} distinct nonzero evaluation points, F_{field.q} has {field.q - 1}")
    return list(range(1, n2 + 1))


def server_id(s: int, r: int, n1: int) -> int:
    """1-based server id for group s (1..N2) and position r (1..N1)"""
    return (s - 1) * n1 + r


def group_of(server: int, n1: int) -> int:
    return (server - 1) // n1 + 1


@dataclass
class BivariateKeys:
    """R_it (A side) or S_tk (B side), indexed [band][t]"""
    side: Side
    keys: List[List[MatrixFq]] = field(default_factory=list)


def _check_betas(field: FieldSpec, betas: Sequence[int], n2: int) -> List[int]:
    betas = [b % field.q for b in betas]
    if len(betas) != n2:
        raise ParameterError(f"expected {n2} evaluation points, got {len(betas)}")
    if len(set(betas)) != n2:
        raise ParameterError(f"evaluation points must be distinct: {betas}")
    return betas


def _weighted_sum(field: FieldSpec, blocks: Sequence[MatrixFq], weights: Sequence[int]) -> MatrixFq:
    total = sum(b.values * w for b, w in zip(blocks, weights)) % field.q
    return MatrixFq(total, field)


def make_bivariate_shares_A(a: MatrixFq, k1: int, k2: int, t: int, n1: int, n2: int,
                            betas: Sequence[int], rng: np.random.Generator,
                            tag: str = 'A') -> Tuple[List[Share], BivariateKeys]:
    f = a.field
    betas = _check_betas(f, betas, n2)
    grid = grid_partition(a, k2, k1)
    bands = [MatrixFq(np.concatenate([grid.block(i, j).values for j in range(k1)], axis=1), f)
             for i in range(k2)]
    rows, cols = grid.block_shape
    keys = [[random_matrix(f, rows, cols, rng) for _ in range(t)] for _ in range(k2)]
    params = ShareParams(n1, k1, t, Side.LEFT)

    shares: List[Share] = []
    for s, beta in enumerate(betas, start=1):
        weights = [pow(beta, i, f.q) for i in range(k2)]
        band = _weighted_sum(f, bands, weights)
        band_keys = [_weighted_sum(f, [keys[i][u] for i in range(k2)], weights) for u in range(t)]
        for r, payload in enumerate(encode_with_keys(band, params, band_keys), start=1):
            shares.append(Share(params.with_side(Side.BIVARIATE_A), server_id(s, r, n1), payload, tag))
    return shares, BivariateKeys(Side.BIVARIATE_A, keys)


def make_bivariate_shares_B(b: MatrixFq, k1: int, k2: int, k3: int, t: int, n1: int, n2: int,
                            betas: Sequence[int], rng: np.random.Generator, own_data: bool = False,
                            tag: str = 'B') -> Tuple[List[Share], BivariateKeys]:
    f = b.field
    betas = _check_betas(f, betas, n2)
    grid = grid_partition(b, k1, k3)
    bands = [MatrixFq(np.concatenate([grid.block(j, k).values for j in range(k1)], axis=0), f)
             for k in range(k3)]
    rows, cols = grid.block_shape
    keys = [[random_matrix(f, rows, cols, rng) for _ in range(t)] for _ in range(k3)]
    side = Side.RIGHT_OWN_DATA if own_data else Side.RIGHT
    params = ShareParams(n1, k1, t, side)

    shares: List[Share] = []
    for s, beta in enumerate(betas, start=1):
        weights = [pow(beta, k2 * k, f.q) for k in range(k3)]
        band = _weighted_sum(f, bands, weights)
        band_keys = [_weighted_sum(f, [keys[k][u] for k in range(k3)], weights) for u in range(t)]
        for r, payload in enumerate(encode_with_keys(band, params, band_keys), start=1):
            shares.append(Share(params.with_side(Side.BIVARIATE_B), server_id(s, r, n1), payload, tag))
    return shares, BivariateKeys(Side.BIVARIATE_B, keys)


def key_correction(a_keys: BivariateKeys, b_keys: BivariateKeys, i: int, k: int) -> Optional[MatrixFq]:
    """sum_t R_it S_tk for block (i, k); None without keys"""
    r_row = a_keys.keys[i]
    s_col = b_keys.keys[k]
    if not r_row:
        return None
    if len(r_row) != len(s_col):
        raise DimensionError("key bundles have different T")
    total = r_row[0] @ s_col[0]
    for r, s in zip(r_row[1:], s_col[1:]):
        total = total + r @ s
    return total
