import pytest

from src.algebra.matrix import mat_mul, plaintext_inverse, random_matrix, stack_rows, transpose
from src.protocols import eval_matrix_polynomial, parse_expression
from src.protocols.expression import (Add, Input, Inverse, MatMul, Power, Scale, Transpose,
                                      compile_plan, evaluate_plain, infer_shapes, input_names)
from src.simulation.engine import build_network
from src.utils.errors import DimensionError, ParameterError
from tests.helpers import invertible_matrix


def test_parse_tree():
    expr = parse_expression('A1 ** 2 @ A2 + 2 * inv(A3)')
    assert expr == Add(MatMul(Power(Input('A1'), 2), Input('A2')), Scale(2, Inverse(Input('A3'))))
    assert input_names(expr) == ['A1', 'A2', 'A3']
    assert parse_expression('A - T(B)') == Add(Input('A'), Scale(-1, Transpose(Input('B'))))
    assert parse_expression('-3 * A') == Scale(-3, Input('A'))


def test_operator_overloads():
    a, b = Input('A'), Input('B')
    assert a @ b + 3 * a == Add(MatMul(a, b), Scale(3, a))
    assert a ** 4 == Power(a, 4)


def test_parse_errors():
    with pytest.raises(ParameterError):
        parse_expression('A * B')
    with pytest.raises(ParameterError):
        parse_expression('A @')
    with pytest.raises(ParameterError):
        parse_expression('det(A)')


def test_plan_shares_common_subtrees():
    plan = compile_plan(parse_expression('(A @ B) + (A @ B)'))
    assert len(plan) == 4
    assert plan[-1].args == (2, 2)
    assert plan[0].describe() == '0: Input(A) []'


def test_shape_inference():
    plan = compile_plan(parse_expression('T(X) @ Y'))
    assert infer_shapes(plan, {'X': (6, 3), 'Y': (6, 2)})[-1] == (3, 2)
    with pytest.raises(DimensionError):
        infer_shapes(plan, {'X': (6, 3), 'Y': (5, 2)})
    with pytest.raises(DimensionError):
        infer_shapes(compile_plan(parse_expression('inv(X)')), {'X': (6, 3)})


def test_polynomial_on_shares(f29, rng):
    a1 = random_matrix(f29, 3, 3, rng)
    a2 = random_matrix(f29, 3, 3, rng)
    a3 = invertible_matrix(f29, 3, rng)
    expr = 'A1 ** 2 @ A2 + 2 * inv(A3)'
    bindings = {'A1': a1, 'A2': a2, 'A3': a3}
    oracle = mat_mul(mat_mul(a1, a1), a2) + plaintext_inverse(a3).scale(2)
    assert evaluate_plain(parse_expression(expr), bindings) == oracle
    assert eval_matrix_polynomial(build_network(3, 7, f29), expr, bindings, 2) == oracle


def test_identity_expression(f29, rng):
    a = random_matrix(f29, 3, 6, rng)
    assert eval_matrix_polynomial(build_network(1, 7, f29), 'A', {'A': a}, 2) == a


def test_transpose_and_difference(f29, rng):
    a = random_matrix(f29, 3, 6, rng)
    b = random_matrix(f29, 6, 3, rng)
    result = eval_matrix_polynomial(build_network(2, 7, f29), 'A - T(B)', {'A': a, 'B': b}, 2)
    assert result == a - transpose(b)


def test_regression_from_per_source_parts(f29, rng):
    while True:
        parts = [random_matrix(f29, 3, 3, rng) for _ in range(2)]
        x = stack_rows(parts)
        try:
            plaintext_inverse(mat_mul(transpose(x), x))
        except ArithmeticError:
            continue
        break
    y = random_matrix(f29, 6, 3, rng)
    expr = 'inv(T(X) @ X) @ T(X) @ Y'
    oracle = evaluate_plain(parse_expression(expr), {'X': x, 'Y': y})
    assert oracle == mat_mul(mat_mul(plaintext_inverse(mat_mul(x.T, x)), x.T), y)
    net = build_network(3, 7, f29)
    assert eval_matrix_polynomial(net, expr, {'X': parts, 'Y': y}, 2) == oracle


def test_expression_checks(f29, rng):
    a = random_matrix(f29, 3, 3, rng)
    with pytest.raises(ParameterError):
        eval_matrix_polynomial(build_network(2, 7, f29), 'A @ B', {'A': a}, 2)
    with pytest.raises(ParameterError):
        eval_matrix_polynomial(build_network(1, 7, f29), 'A @ B', {'A': a, 'B': a}, 2)
    with pytest.raises(DimensionError, match='indivisible-dimension'):
        eval_matrix_polynomial(build_network(1, 7, f29), 'A', {'A': random_matrix(f29, 2, 2, rng)}, 2)
