from fractions import Fraction

import pytest

from src.algebra.matrix import (MatrixFq, identity, mat_mul, matrix_power, plaintext_inverse,
                                plaintext_solve, random_matrix, zeros)
from src.models.share import ShareParams, Side
from src.protocols import (exponentiate, invert, masked_inverse, newton_inverse_rounds,
                           solve_linear)
from src.protocols.algebra import multiply_rounds
from src.protocols.primitives import decode_at_user, upload_matrix
from src.simulation.engine import build_network
from src.utils.errors import DimensionError, ParameterError, SingularMatrixError
from tests.helpers import invertible_matrix


@pytest.mark.parametrize('r, rounds', [(1, 0), (2, 1), (3, 2), (5, 3), (6, 3), (7, 4), (64, 6)])
def test_multiply_rounds(r, rounds):
    assert multiply_rounds(r) == rounds


def test_power_one_is_identity_operation(f29, rng):
    a = random_matrix(f29, 3, 3, rng)
    net = build_network(1, 7, f29)
    assert exponentiate(net, a, 1, 2) == a
    assert net.cost_report().rounds == 0


def test_power_five(f29, rng):
    a = random_matrix(f29, 3, 3, rng)
    net = build_network(1, 7, f29)
    assert exponentiate(net, a, 5, 2) == matrix_power(a, 5)
    report = net.cost_report()
    assert report.rounds == 3
    assert report.chi_ul == Fraction(7, 3)


def test_powers_up_to_64(f29, rng):
    a = random_matrix(f29, 3, 3, rng)
    for r in range(1, 65):
        net = build_network(1, 7, f29, seed=r)
        assert exponentiate(net, a, r, 2) == matrix_power(a, r), r
        assert net.cost_report().rounds == multiply_rounds(r), r


def test_power_checks(f29, rng):
    with pytest.raises(ParameterError):
        exponentiate(build_network(1, 7, f29), random_matrix(f29, 3, 3, rng), 0, 2)
    with pytest.raises(DimensionError):
        exponentiate(build_network(1, 7, f29), random_matrix(f29, 3, 6, rng), 2, 2)


def test_masked_inverse_shares(f29, rng):
    for seed in range(20):
        a = invertible_matrix(f29, 3, rng)
        net = build_network(1, 7, f29, seed=seed)
        right, _ = upload_matrix(net, 1, a, ShareParams(7, 3, 2, Side.RIGHT), 'A')
        left = masked_inverse(net, right, 2)
        assert {s.params.side for s in left} == {Side.LEFT}
        assert mat_mul(decode_at_user(net, left), a) == identity(f29, 3)


def test_masked_inverse_rejects_zero_retries(f29, rng):
    net = build_network(1, 7, f29)
    a = invertible_matrix(f29, 3, rng)
    right, _ = upload_matrix(net, 1, a, ShareParams(7, 3, 2, Side.RIGHT), 'A')
    with pytest.raises(ParameterError, match='retries'):
        masked_inverse(net, right, 2, retries=0)


def test_invert(f29, rng):
    a = invertible_matrix(f29, 3, rng)
    net = build_network(1, 7, f29)
    assert invert(net, a, 2) == plaintext_inverse(a)
    assert net.cost_report().chi_ul == Fraction(7, 3)


def test_invert_identity(f29):
    assert invert(build_network(1, 7, f29), identity(f29, 3), 2) == identity(f29, 3)


def test_invert_four_by_four(f29, rng):
    for seed in range(20):
        a = invertible_matrix(f29, 4, rng)
        net = build_network(1, 4, f29, seed=seed)
        assert mat_mul(a, invert(net, a, 1)) == identity(f29, 4)
        assert net.cost_report().chi_ul == 2


def test_invert_singular(f29, monkeypatch):
    monkeypatch.setenv('SDMC_PHI_RETRIES', '4')
    from src.utils.config import get_settings
    get_settings.cache_clear()
    a = MatrixFq.from_rows(f29, [[1, 2, 3], [2, 4, 6], [0, 1, 1]])
    with pytest.raises(SingularMatrixError, match='singular-matrix'):
        invert(build_network(1, 7, f29), a, 2)


def test_solve_identity_gives_inverse(f29, rng):
    a = invertible_matrix(f29, 3, rng)
    assert solve_linear(build_network(2, 7, f29), a, identity(f29, 3), 2) == plaintext_inverse(a)


def test_solve(f29, rng):
    a = invertible_matrix(f29, 3, rng)
    b = random_matrix(f29, 3, 2, rng)
    assert solve_linear(build_network(2, 7, f29), a, b, 2) == plaintext_solve(a, b)


def test_solve_singular(f29, rng, monkeypatch):
    monkeypatch.setenv('SDMC_PHI_RETRIES', '4')
    from src.utils.config import get_settings
    get_settings.cache_clear()
    a = MatrixFq.from_rows(f29, [[1, 2, 3], [2, 4, 6], [0, 1, 1]])
    b = random_matrix(f29, 3, 2, rng)
    with pytest.raises(SingularMatrixError):
        plaintext_solve(a, b)
    with pytest.raises(SingularMatrixError):
        solve_linear(build_network(2, 7, f29), a, b, 2)


def test_newton_fixed_point(f29, rng):
    a = invertible_matrix(f29, 3, rng)
    inverse = plaintext_inverse(a)
    for k in (1, 2):
        assert newton_inverse_rounds(build_network(2, 7, f29), a, inverse, k, 2) == inverse


def test_newton_zero_iterations(f29, rng):
    a = invertible_matrix(f29, 3, rng)
    x0 = random_matrix(f29, 3, 3, rng)
    assert newton_inverse_rounds(build_network(2, 7, f29), a, x0, 0, 2) == x0


def test_newton_residual_squares(f29, rng):
    eye = identity(f29, 3)
    for _ in range(20):
        a = random_matrix(f29, 3, 3, rng)
        x0 = random_matrix(f29, 3, 3, rng)
        residual = eye - a @ x0
        for k in range(1, 5):
            xk = newton_inverse_rounds(build_network(2, 7, f29), a, x0, k, 2)
            assert eye - a @ xk == matrix_power(residual, 2 ** k), k


def test_newton_nilpotent_residual(f29, rng):
    a = invertible_matrix(f29, 3, rng)
    e = zeros(f29, 3, 3) + MatrixFq.from_rows(f29, [[0, 0, 5], [0, 0, 0], [0, 0, 0]])
    assert e @ e == zeros(f29, 3, 3)
    x0 = plaintext_inverse(a) @ (identity(f29, 3) - e)
    assert newton_inverse_rounds(build_network(2, 7, f29), a, x0, 1, 2) == plaintext_inverse(a)
