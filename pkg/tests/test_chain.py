from fractions import Fraction

import pytest

from src.algebra.matrix import mat_mul, random_matrix
from src.protocols import chain_multiply, sdmm2
from src.simulation.engine import build_network
from src.utils.errors import DimensionError, ParameterError


def test_triple_product(f29, rng):
    mats = [random_matrix(f29, 3, 3, rng) for _ in range(3)]
    net = build_network(3, 7, f29)
    assert chain_multiply(net, mats, 2) == mats[0] @ mats[1] @ mats[2]
    report = net.cost_report()
    assert report.chi_ul == Fraction(7, 3)
    assert report.interserver_per_server == [Fraction(6, 3)]
    assert report.rounds == 2
    assert report.communication_rounds == 1


def test_rectangular_chain(f29, rng):
    shapes = [(2, 3), (3, 6), (6, 3), (3, 1)]
    mats = [random_matrix(f29, r, c, rng) for r, c in shapes]
    net = build_network(4, 7, f29, seed=8)
    expected = mats[0]
    for m in mats[1:]:
        expected = mat_mul(expected, m)
    assert chain_multiply(net, mats, 2) == expected
    assert net.cost_report().interserver_per_server == [Fraction(2)] * 2


def test_two_matrices_agree_with_sdmm2(f29, rng):
    a = random_matrix(f29, 2, 6, rng)
    b = random_matrix(f29, 6, 2, rng)
    net = build_network(2, 7, f29)
    assert chain_multiply(net, [a, b], 2) == sdmm2(build_network(2, 7, f29), a, b, 2)
    assert net.cost_report().interserver_symbols == 0


def test_small_field_example(rng):
    from src.algebra.finite_field import FieldSpec

    f = FieldSpec(29)
    mats = [random_matrix(f, 2, 2, rng) for _ in range(3)]
    net = build_network(3, 4, f)
    assert chain_multiply(net, mats, 1) == mats[0] @ mats[1] @ mats[2]
    report = net.cost_report()
    assert report.chi_ul == 2
    assert report.interserver_per_server == [Fraction(3, 2)]


def test_chain_checks(f29, rng):
    mats = [random_matrix(f29, 3, 3, rng) for _ in range(3)]
    with pytest.raises(ParameterError):
        chain_multiply(build_network(2, 7, f29), mats, 2)
    with pytest.raises(ParameterError):
        chain_multiply(build_network(3, 7, f29), mats[:1], 2)
    bad = [random_matrix(f29, 3, 3, rng), random_matrix(f29, 3, 2, rng), random_matrix(f29, 2, 3, rng)]
    with pytest.raises(DimensionError, match='indivisible-dimension'):
        chain_multiply(build_network(3, 7, f29), bad, 2)


@pytest.mark.parametrize('gamma', [3, 4])
def test_square_chains(f29, rng, gamma):
    mats = [random_matrix(f29, 4, 4, rng) for _ in range(gamma)]
    net = build_network(gamma, 4, f29, seed=gamma)
    expected = mats[0]
    for m in mats[1:]:
        expected = expected @ m
    assert chain_multiply(net, mats, 1) == expected
    report = net.cost_report()
    assert report.chi_ul == 2
    assert report.interserver_per_server == [Fraction(3, 2)] * (gamma - 2)
