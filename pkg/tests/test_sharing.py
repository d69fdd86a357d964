import pytest

from src.algebra.matrix import MatrixFq, mat_mul, partition_cols, partition_rows, random_matrix, zeros
from src.models.share import Share, ShareParams, Side
from src.sharing.encoding import (add_public_matrix, check_complete, data_positions, decode_shares,
                                  key_positions, make_left_shares, make_right_shares,
                                  make_right_shares_own, reconstruct_all_coeffs,
                                  reconstruct_constant, share_add, share_mul, share_scale)
from src.utils.errors import DimensionError, ParameterError, ShareError


def test_positions():
    assert data_positions(7, 3, Side.LEFT) == [0, 1, 2]
    assert key_positions(7, 3, 2, Side.LEFT) == [3, 4]
    assert data_positions(7, 3, Side.RIGHT) == [0, 6, 5]
    assert key_positions(7, 3, 2, Side.RIGHT) == [2, 1]
    assert data_positions(7, 5, Side.RIGHT_OWN_DATA) == [0, 6, 5, 4, 3]
    assert key_positions(7, 5, 2, Side.RIGHT_OWN_DATA) == [2, 1]


def test_params_validation():
    with pytest.raises(ParameterError):
        ShareParams(7, 6, 2, Side.LEFT)
    with pytest.raises(ParameterError):
        ShareParams(7, 4, 2, Side.RIGHT)
    ShareParams(7, 5, 2, Side.RIGHT_OWN_DATA)


def test_left_share_coefficients(f29, rng):
    a = random_matrix(f29, 2, 6, rng)
    shares, bundle = make_left_shares(a, 7, 3, 2, rng, 'A')
    assert [s.server_index for s in shares] == list(range(1, 8))
    coeffs = reconstruct_all_coeffs(shares)
    blocks = partition_cols(a, 3)
    assert coeffs[:3] == blocks
    assert coeffs[3:5] == list(bundle.keys)
    assert coeffs[5] == zeros(f29, 2, 2)
    assert coeffs[6] == zeros(f29, 2, 2)
    assert decode_shares(shares) == a


def test_right_share_coefficients(f29, rng):
    b = random_matrix(f29, 6, 2, rng)
    shares, bundle = make_right_shares(b, 7, 3, 2, rng, 'B')
    coeffs = reconstruct_all_coeffs(shares)
    blocks = partition_rows(b, 3)
    exponents = {'B1': 0, 'B2': 6, 'B3': 5, 'S1': 2, 'S2': 1}
    expected = dict(zip(['B1', 'B2', 'B3'], blocks))
    expected.update(zip(['S1', 'S2'], bundle.keys))
    for name, pos in exponents.items():
        assert coeffs[pos] == expected[name], name
    assert coeffs[3] == zeros(f29, 2, 2)
    assert coeffs[4] == zeros(f29, 2, 2)
    assert decode_shares(shares) == b


def test_product_constant_term(f29, rng):
    a = random_matrix(f29, 4, 6, rng)
    b = random_matrix(f29, 6, 4, rng)
    left, _ = make_left_shares(a, 7, 3, 2, rng, 'A')
    right, _ = make_right_shares(b, 7, 3, 2, rng, 'B')
    products = [share_mul(x, y) for x, y in zip(left, right)]
    assert reconstruct_constant(products) == mat_mul(a, b)


def test_own_data_product_carries_key_term(f29, rng):
    a = random_matrix(f29, 2, 5, rng)
    b = random_matrix(f29, 5, 2, rng)
    left, keys_a = make_left_shares(a, 7, 5, 2, rng, 'A')
    right, keys_b = make_right_shares_own(b, 7, 5, 2, rng, 'B')
    products = [share_mul(x, y) for x, y in zip(left, right)]
    correction = keys_a.keys[0] @ keys_b.keys[0] + keys_a.keys[1] @ keys_b.keys[1]
    assert reconstruct_constant(products) - correction == mat_mul(a, b)


def test_no_keys_is_plain_coding(f29, rng):
    a = random_matrix(f29, 3, 7, rng)
    shares, bundle = make_left_shares(a, 7, 7, 0, rng)
    assert len(bundle) == 0
    assert decode_shares(shares) == a


def test_linear_operations(f29, rng):
    a = random_matrix(f29, 2, 6, rng)
    b = random_matrix(f29, 2, 6, rng)
    sa, _ = make_left_shares(a, 7, 3, 2, rng, 'A')
    sb, _ = make_left_shares(b, 7, 3, 2, rng, 'B')
    summed = [share_add(x, y) for x, y in zip(sa, sb)]
    assert decode_shares(summed) == a + b
    scaled = [share_scale(5, x) for x in sa]
    assert decode_shares(scaled) == a.scale(5)
    d = random_matrix(f29, 2, 6, rng)
    assert decode_shares(add_public_matrix(sa, d)) == a + d


def test_indivisible_dimension(f29, rng):
    a = random_matrix(f29, 2, 5, rng)
    with pytest.raises(DimensionError, match='indivisible-dimension'):
        make_left_shares(a, 7, 3, 2, rng)


def test_check_complete_errors(f29, rng):
    a = random_matrix(f29, 1, 3, rng)
    shares, _ = make_left_shares(a, 7, 3, 2, rng, 'A')
    with pytest.raises(ShareError, match='missing-share'):
        check_complete(shares[:-1])
    other, _ = make_left_shares(a, 7, 3, 2, rng, 'X')
    with pytest.raises(ShareError, match='tag-mismatch'):
        check_complete(shares[:-1] + other[-1:])
    shuffled = list(reversed(shares))
    assert [s.server_index for s in check_complete(shuffled)] == list(range(1, 8))


def test_share_mul_requires_left_times_right(f29, rng):
    a = random_matrix(f29, 3, 3, rng)
    left, _ = make_left_shares(a, 7, 3, 2, rng)
    with pytest.raises(ShareError):
        share_mul(left[0], left[0])
    right, _ = make_right_shares(a, 7, 3, 2, rng)
    with pytest.raises(ShareError):
        share_mul(left[0], right[1])


def test_share_to_dict(f5):
    share = Share(ShareParams(4, 1, 1), 2, MatrixFq.from_rows(f5, [[1, 2]]), 'A')
    d = share.to_dict()
    assert d['server_index'] == 2
    assert d['params'] == {'n': 4, 'k': 1, 't': 1, 'side': 'left'}
    assert d['payload']['data'] == [1, 2]
