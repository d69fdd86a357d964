"""
Univariate DFT-based shares

A matrix is split into K blocks which, together with T random key blocks,
become coefficients of a polynomial mod (x^N - 1). Share i is the evaluation at
alpha_N^(i-1), i.e. the DFT of the length-N coefficient sequence.

Exponent placement per side (x^-e is position (-e) mod N):
    LEFT            A_l at l-1,         R_t at K+t-1
    RIGHT           B_l at -(l-1),      S_t at -(K+T+t-1)
    RIGHT_OWN_DATA  B_l at -(l-1),      S_t at -(K+t-1)
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..algebra.finite_field import FieldSpec, dft, idft
from ..algebra.matrix import (MatrixFq, concat_cols, partition_cols, partition_rows,
                              random_matrix, stack_rows)
from ..models.share import SecretKeyBundle, Share, ShareParams, Side
from ..utils.errors import DimensionError, ParameterError, ShareError

logger = logging.getLogger(__name__)


def data_positions(n: int, k: int, side: Side) -> List[int]:
    """Coefficient position of data block l (0-based)"""
    if side == Side.LEFT:
        return [l for l in range(k)]
    if side in (Side.RIGHT, Side.RIGHT_OWN_DATA):
        return [(-l) % n for l in range(k)]
    raise ParameterError(f"no univariate data placement for side {side.value}")


def key_positions(n: int, k: int, t: int, side: Side) -> List[int]:
    """Coefficient position of key block t (0-based)"""
    if side == Side.LEFT:
        return [k + s for s in range(t)]
    if side == Side.RIGHT:
        return [(-(k + t + s)) % n for s in range(t)]
    if side == Side.RIGHT_OWN_DATA:
        return [(-(k + s)) % n for s in range(t)]
    raise ParameterError(f"no univariate key placement for side {side.value}")


def split_blocks(m: MatrixFq, k: int, side: Side) -> List[MatrixFq]:
    """Left shares split columns, right shares split rows"""
    if side.is_left:
        return partition_cols(m, k)
    return partition_rows(m, k)


def join_blocks(blocks: Sequence[MatrixFq], side: Side) -> MatrixFq:
    if side.is_left:
        return concat_cols(blocks)
    return stack_rows(blocks)


def place_coefficients(field: FieldSpec, n: int, placed: Dict[int, MatrixFq],
                       shape: Tuple[int, int]) -> List[np.ndarray]:
    """Length-N coefficient sequence with zero blocks at free positions"""
    coeffs = [np.zeros(shape, dtype=object) for _ in range(n)]
    for pos, block in placed.items():
        coeffs[pos] = (coeffs[pos] + block.values) % field.q
    return coeffs


def encode_with_keys(m: MatrixFq, params: ShareParams, keys: Sequence[MatrixFq]) -> List[MatrixFq]:
    """Payloads of all N servers for explicit key blocks"""
    if len(keys) != params.t:
        raise ShareError(f"param-mismatch: expected {params.t} key blocks, got {len(keys)}")
    blocks = split_blocks(m, params.k, params.side)
    shape = blocks[0].shape
    for key in keys:
        if key.shape != shape:
            raise DimensionError(f"key block shape {key.shape} does not match data block {shape}")
    placed: Dict[int, MatrixFq] = {}
    for pos, block in zip(data_positions(params.n, params.k, params.side), blocks):
        placed[pos] = block
    for pos, key in zip(key_positions(params.n, params.k, params.t, params.side), keys):
        placed[pos] = key
    coeffs = place_coefficients(m.field, params.n, placed, shape)
    return [MatrixFq(v, m.field) for v in dft(m.field, coeffs)]


def draw_keys(m: MatrixFq, params: ShareParams, rng: np.random.Generator) -> SecretKeyBundle:
    rows, cols = m.shape
    if params.side.is_left:
        shape = (rows, cols // params.k)
    else:
        shape = (rows // params.k, cols)
    keys = tuple(random_matrix(m.field, shape[0], shape[1], rng) for _ in range(params.t))
    return SecretKeyBundle(params.side, keys)


def make_shares(m: MatrixFq, params: ShareParams, rng: np.random.Generator,
                tag: str = '') -> Tuple[List[Share], SecretKeyBundle]:
    """Shares for servers 1..N and the key bundle that produced them"""
    # validate divisibility before drawing randomness
    split_blocks(m, params.k, params.side)
    bundle = draw_keys(m, params, rng)
    payloads = encode_with_keys(m, params, bundle.keys)
    shares = [Share(params, i + 1, payload, tag) for i, payload in enumerate(payloads)]
    return shares, bundle


def make_left_shares(a: MatrixFq, n: int, k: int, t: int, rng: np.random.Generator,
                     tag: str = '') -> Tuple[List[Share], SecretKeyBundle]:
    return make_shares(a, ShareParams(n, k, t, Side.LEFT), rng, tag)


def make_right_shares(b: MatrixFq, n: int, k: int, t: int, rng: np.random.Generator,
                      tag: str = '') -> Tuple[List[Share], SecretKeyBundle]:
    return make_shares(b, ShareParams(n, k, t, Side.RIGHT), rng, tag)


def make_right_shares_own(b: MatrixFq, n: int, k: int, t: int, rng: np.random.Generator,
                          tag: str = '') -> Tuple[List[Share], SecretKeyBundle]:
    return make_shares(b, ShareParams(n, k, t, Side.RIGHT_OWN_DATA), rng, tag)


def public_encoding(d: MatrixFq, params: ShareParams) -> List[MatrixFq]:
    """Keyless encoding of a public matrix, one payload per server"""
    return encode_with_keys(d, ShareParams(params.n, params.k, 0, params.side), [])


def check_complete(shares: Sequence[Share]) -> List[Share]:
    """Sorted by server index; all N present, one tag, one parameter set"""
    if not shares:
        raise ShareError("missing-share: no shares supplied")
    params = shares[0].params
    tag = shares[0].object_tag
    for share in shares:
        if share.object_tag != tag:
            raise ShareError(f"tag-mismatch: {share.object_tag!r} vs {tag!r}")
        if share.params != params:
            raise ShareError(f"param-mismatch: {share.params} vs {params}")
    ordered = sorted(shares, key=lambda s: s.server_index)
    indices = [s.server_index for s in ordered]
    if indices != list(range(1, params.n + 1)):
        missing = sorted(set(range(1, params.n + 1)) - set(indices))
        raise ShareError(f"missing-share: servers {missing} absent (got {indices})")
    return ordered


def reconstruct_constant(shares: Sequence[Share]) -> MatrixFq:
    """N^-1 * sum of payloads: the constant coefficient"""
    ordered = check_complete(shares)
    field = ordered[0].payload.field
    n = len(ordered)
    total = sum(s.payload.values for s in ordered) % field.q
    return MatrixFq(total * field.inv(n) % field.q, field)


def reconstruct_all_coeffs(shares: Sequence[Share]) -> List[MatrixFq]:
    """Entrywise IDFT over the servers"""
    ordered = check_complete(shares)
    field = ordered[0].payload.field
    coeffs = idft(field, [s.payload.values for s in ordered])
    return [MatrixFq(c, field) for c in coeffs]


def decode_shares(shares: Sequence[Share]) -> MatrixFq:
    """Recover the shared matrix from all N left or right shares"""
    ordered = check_complete(shares)
    params = ordered[0].params
    coeffs = reconstruct_all_coeffs(ordered)
    positions = data_positions(params.n, params.k, params.side)
    return join_blocks([coeffs[p] for p in positions], params.side)


def _check_pair(a: Share, b: Share):
    if a.params != b.params or a.server_index != b.server_index:
        raise ShareError(
            f"param-mismatch: {a.params}@{a.server_index} vs {b.params}@{b.server_index}")
    if a.payload.shape != b.payload.shape:
        raise ShareError(f"param-mismatch: payload shapes {a.payload.shape} vs {b.payload.shape}")


def share_add(a: Share, b: Share, tag: Optional[str] = None) -> Share:
    _check_pair(a, b)
    return a.with_payload(a.payload + b.payload, tag if tag is not None else f'({a.object_tag}+{b.object_tag})')


def share_scale(c: int, a: Share, tag: Optional[str] = None) -> Share:
    return a.with_payload(a.payload.scale(c), tag if tag is not None else f'{c}*{a.object_tag}')


def share_add_public(a: Share, public_payload: MatrixFq, tag: Optional[str] = None) -> Share:
    """Add server i's slice of a public matrix's keyless encoding"""
    if a.payload.shape != public_payload.shape:
        raise ShareError(f"param-mismatch: payload {a.payload.shape} vs public {public_payload.shape}")
    return a.with_payload(a.payload + public_payload, tag if tag is not None else a.object_tag)


def add_public_matrix(shares: Sequence[Share], d: MatrixFq, tag: Optional[str] = None) -> List[Share]:
    """[[A + D]] from [[A]] and public D"""
    ordered = check_complete(shares)
    encoded = public_encoding(d, ordered[0].params)
    return [share_add_public(s, e, tag) for s, e in zip(ordered, encoded)]


def share_mul(left: Share, right: Share, tag: Optional[str] = None) -> Share:
    """Server-local product [[A]]_i^L [[B]]_i^R"""
    if not left.params.side.is_left or not right.params.side.is_right:
        raise ShareError(
            f"param-mismatch: product needs left x right, got {left.params.side.value} x {right.params.side.value}")
    if left.server_index != right.server_index or left.params.n != right.params.n:
        raise ShareError("param-mismatch: shares belong to different servers or networks")
    if left.params.k != right.params.k:
        raise ShareError(f"param-mismatch: K={left.params.k} on the left, K={right.params.k} on the right")
    params = ShareParams(left.params.n, 1, 0, Side.PRODUCT)
    payload = left.payload @ right.payload
    return Share(params, left.server_index, payload,
                 tag if tag is not None else f'{left.object_tag}@{right.object_tag}')
