from fractions import Fraction

import pytest

from src.algebra.finite_field import FieldSpec
from src.algebra.matrix import mat_mul, random_matrix
from src.audit.costs import straggler_upload
from src.protocols import StragglerConfig, sdmm2, straggler_sdmm
from src.simulation.engine import build_network
from src.utils.errors import ParameterError, StragglerUnrecoverableError


@pytest.fixture
def cfg():
    return StragglerConfig(k1=2, k2=2, k3=2, t=1, n2=5)


def test_thresholds(cfg):
    assert cfg.n1 == 4
    assert cfg.servers_needed == 20
    assert cfg.group_threshold() == 16
    assert cfg.worst_case_threshold(20) == 19


def test_config_validation():
    with pytest.raises(ParameterError):
        StragglerConfig(k1=2, k2=2, k3=2, t=1, n2=3)
    with pytest.raises(ParameterError):
        StragglerConfig(k1=0, k2=1, k3=1, t=1, n2=1)


def test_no_failures(cfg, f29, rng):
    a = random_matrix(f29, 4, 4, rng)
    b = random_matrix(f29, 4, 4, rng)
    net = build_network(2, 20, f29)
    assert straggler_sdmm(net, a, b, cfg) == mat_mul(a, b)
    report = net.cost_report()
    assert report.chi_ul == straggler_upload(20, 2, 2, 2, (4, 4, 4)) == 5
    assert report.straggler.groups_used == [1, 2, 3, 4]


def test_whole_group_failed(cfg, f29, rng):
    a = random_matrix(f29, 4, 4, rng)
    b = random_matrix(f29, 4, 4, rng)
    net = build_network(2, 20, f29, seed=3)
    assert straggler_sdmm(net, a, b, cfg, failed={9, 10, 11, 12}) == mat_mul(a, b)
    info = net.cost_report().straggler
    assert info.groups_used == [1, 2, 4, 5]
    assert info.failed == [9, 10, 11, 12]


def test_scattered_failures_within_one_group(cfg, f29, rng):
    a = random_matrix(f29, 4, 4, rng)
    b = random_matrix(f29, 4, 4, rng)
    net = build_network(2, 20, f29)
    assert straggler_sdmm(net, a, b, cfg, failed={17, 19}) == mat_mul(a, b)


def test_failure_in_every_group_is_unrecoverable(f29, rng):
    cfg = StragglerConfig(k1=2, k2=2, k3=2, t=1, n2=4)
    a = random_matrix(f29, 4, 4, rng)
    b = random_matrix(f29, 4, 4, rng)
    with pytest.raises(StragglerUnrecoverableError, match='insufficient-groups'):
        straggler_sdmm(build_network(2, 16, f29), a, b, cfg, failed={1, 5, 9, 13})


def test_two_partial_groups_are_unrecoverable(cfg, f29, rng):
    a = random_matrix(f29, 4, 4, rng)
    b = random_matrix(f29, 4, 4, rng)
    with pytest.raises(StragglerUnrecoverableError):
        straggler_sdmm(build_network(2, 20, f29), a, b, cfg, failed={2, 6})


def test_degenerates_to_sdmm2(f29, rng):
    cfg = StragglerConfig(k1=3, k2=1, k3=1, t=2, n2=1)
    a = random_matrix(f29, 2, 6, rng)
    b = random_matrix(f29, 6, 2, rng)
    net = build_network(2, 7, f29)
    result = straggler_sdmm(net, a, b, cfg)
    assert result == sdmm2(build_network(2, 7, f29), a, b, 2) == mat_mul(a, b)
    assert net.cost_report().chi_ul == Fraction(7, 3)


def test_own_data(rng):
    f = FieldSpec(7)
    cfg = StragglerConfig(k1=2, k2=2, k3=2, t=1, n2=4, own_data=True)
    assert cfg.n1 == 3
    a = random_matrix(f, 4, 4, rng)
    b = random_matrix(f, 4, 4, rng)
    assert straggler_sdmm(build_network(1, 12, f), a, b, cfg) == mat_mul(a, b)


def test_network_too_small(cfg, f29, rng):
    a = random_matrix(f29, 4, 4, rng)
    with pytest.raises(ParameterError):
        straggler_sdmm(build_network(2, 16, f29), a, a, cfg)
