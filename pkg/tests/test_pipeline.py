from fractions import Fraction

from src.algebra.finite_field import find_field
from src.algebra.matrix import mat_mul, random_matrix
from src.protocols import optimal_cost_pipeline
from src.simulation.engine import build_network


def test_costs_are_both_optimal(f29, rng):
    a = random_matrix(f29, 5, 3, rng)
    b = random_matrix(f29, 3, 5, rng)
    net = build_network(2, 7, f29)
    assert optimal_cost_pipeline(net, a, b, 2) == mat_mul(a, b)
    report = net.cost_report()
    assert report.chi_ul == Fraction(7, 5)
    assert report.chi_dl == Fraction(7, 5)


def test_larger_inputs(f29, rng):
    a = random_matrix(f29, 10, 6, rng)
    b = random_matrix(f29, 6, 5, rng)
    assert optimal_cost_pipeline(build_network(2, 7, f29, seed=4), a, b, 2) == mat_mul(a, b)


def test_without_keys(rng):
    f = find_field(3, 7)
    a = random_matrix(f, 3, 3, rng)
    b = random_matrix(f, 3, 3, rng)
    net = build_network(2, 3, f)
    assert optimal_cost_pipeline(net, a, b, 0) == mat_mul(a, b)
    report = net.cost_report()
    assert report.chi_ul == 1
    assert report.chi_dl == 1
