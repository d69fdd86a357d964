import pytest

from src.models.share import Side
from src.audit.secrecy import (aliasing_leaks, constant_term_pairs, secrecy_exhaustive,
                               secrecy_statistical, secrecy_user_exhaustive)
from src.utils.errors import DimensionError, ParameterError, StateSpaceTooLargeError


@pytest.mark.parametrize('n, k, t, q, dims', [
    (3, 1, 1, 7, (1, 1)),
    (5, 1, 2, 11, (1, 1)),
    (4, 2, 1, 5, (1, 2)),
    (4, 1, 1, 5, (2, 1)),
])
def test_left_shares_are_secret(n, k, t, q, dims):
    verdict = secrecy_exhaustive(n, k, t, q, dims)
    assert verdict.passed
    assert verdict.evidence['failure_count'] == 0
    assert verdict.evidence['coalition_size'] == t


def test_right_shares_are_secret():
    assert secrecy_exhaustive(5, 1, 2, 11, (1, 1), side=Side.RIGHT).passed
    assert secrecy_exhaustive(4, 2, 1, 5, (2, 1), side=Side.RIGHT).passed


def test_one_more_colluder_breaks_secrecy():
    verdict = secrecy_exhaustive(5, 1, 2, 11, (1, 1), colluders=3)
    assert not verdict.passed
    assert verdict.evidence['failure_count'] == 10
    failure = verdict.evidence['failures'][0]
    assert not failure['uniform']
    assert failure['distinct_views'] == 11 ** 2


def test_explicit_colluding_sets():
    verdict = secrecy_exhaustive(5, 1, 2, 11, (1, 1), colluders=[[1, 3], [2, 5]])
    assert verdict.passed
    assert verdict.evidence['colluding_sets'] == 2


def test_no_keys_is_vacuous():
    verdict = secrecy_exhaustive(3, 1, 0, 7, (1, 1))
    assert verdict.passed
    assert verdict.evidence['vacuous']


def test_explicit_inputs():
    verdict = secrecy_exhaustive(3, 1, 1, 7, (1, 1), inputs=[[[0]], [[6]]])
    assert verdict.passed
    assert verdict.evidence['inputs'] == 2
    with pytest.raises(ParameterError):
        secrecy_exhaustive(3, 1, 1, 7, (1, 1), inputs=[[[0]]])


def test_state_space_limit():
    with pytest.raises(StateSpaceTooLargeError, match='state-space-too-large'):
        secrecy_exhaustive(7, 1, 2, 29, (2, 2), limit=1000)


def test_indivisible_audit_dims():
    with pytest.raises(DimensionError):
        secrecy_exhaustive(4, 2, 1, 5, (1, 3))


def test_statistical_agrees_with_exhaustive():
    assert secrecy_statistical(5, 1, 2, 11, (1, 1), samples=20_000, seed=1).passed
    verdict = secrecy_statistical(5, 1, 2, 11, (1, 1), colluders=3, samples=20_000, seed=1)
    assert not verdict.passed
    assert verdict.evidence['corrected_alpha'] < verdict.evidence['alpha']


def test_statistical_larger_field():
    verdict = secrecy_statistical(7, 3, 2, 29, (1, 3), samples=20_000, seed=2)
    assert verdict.passed
    assert verdict.evidence['colluding_sets'] == 21


def test_user_learns_only_the_product():
    verdict = secrecy_user_exhaustive(5, 1, 11)
    assert verdict.passed
    groups = {g['product']: g for g in verdict.evidence['groups']}
    assert set(groups) == {6, 0}
    assert groups[0]['mutual_information_bits'] == pytest.approx(0.0, abs=1e-9)


def test_raw_products_leak_to_the_user():
    verdict = secrecy_user_exhaustive(5, 1, 11, usersecure=False)
    assert not verdict.passed
    groups = {g['product']: g for g in verdict.evidence['groups']}
    assert not groups[0]['identical']
    assert groups[0]['mutual_information_bits'] > 0


def test_constant_term_pairs():
    assert constant_term_pairs(7, 3, 2) == [('A1', 'B1'), ('A2', 'B2'), ('A3', 'B3')]
    own = constant_term_pairs(7, 5, 2, Side.RIGHT_OWN_DATA)
    assert ('R1', 'S1') in own and ('R2', 'S2') in own


def test_aliasing():
    assert aliasing_leaks(7, 3, 2) == []
    assert aliasing_leaks(7, 5, 2, Side.RIGHT_OWN_DATA) == []
    leaks = aliasing_leaks(7, 5, 2)
    assert ('A1', 'S1') in leaks
    with pytest.raises(ParameterError):
        aliasing_leaks(7, 3, 2, Side.LEFT)


@pytest.mark.parametrize('k', range(1, 7))
@pytest.mark.parametrize('t', range(0, 7))
def test_no_aliasing_at_full_rate(k, t):
    assert aliasing_leaks(k + 2 * t, k, t) == []
    assert aliasing_leaks(k + t, k, t, Side.RIGHT_OWN_DATA) == []
    pairs = constant_term_pairs(k + 2 * t, k, t)
    assert pairs == [(f'A{l}', f'B{l}') for l in range(1, k + 1)]
