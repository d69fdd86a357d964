"""
Matrix polynomials over shared inputs

Expressions such as ``A1 @ A1 @ A2 + 2 * inv(A3)`` or
``inv(T(X) @ X) @ T(X) @ Y`` are parsed into a small tree, compiled into a
post-order plan and executed on left shares with K = N - 2T.
"""

import ast
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple, Union

from ..algebra.matrix import (MatrixFq, concat_cols, mat_mul, matrix_power, plaintext_inverse,
                              stack_rows, transpose)
from ..models.share import Share, ShareParams, Side
from ..sharing.encoding import share_add, share_scale
from ..simulation.engine import SimNet
from ..utils.errors import DimensionError, ParameterError
from .algebra import masked_inverse, power_of_shares
from .conversion import convert_shares, transpose_shares
from .primitives import (decode_at_user, multiply_local, require_divisible, reshare_product,
                         standard_k, upload_matrix)

logger = logging.getLogger(__name__)

# An input is either one matrix (one source) or row blocks held by separate sources
Binding = Union[MatrixFq, Sequence[MatrixFq]]


class Expr:
    """Expression tree node"""

    def __add__(self, other: 'Expr') -> 'Expr':
        return Add(self, other)

    def __sub__(self, other: 'Expr') -> 'Expr':
        return Add(self, Scale(-1, other))

    def __matmul__(self, other: 'Expr') -> 'Expr':
        return MatMul(self, other)

    def __rmul__(self, c: int) -> 'Expr':
        return Scale(c, self)

    def __pow__(self, r: int) -> 'Expr':
        return Power(self, r)


@dataclass(frozen=True)
class Input(Expr):
    name: str


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Scale(Expr):
    c: int
    operand: Expr


@dataclass(frozen=True)
class MatMul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Transpose(Expr):
    operand: Expr


@dataclass(frozen=True)
class Power(Expr):
    operand: Expr
    r: int


@dataclass(frozen=True)
class Inverse(Expr):
    operand: Expr


def _constant(node: ast.AST) -> int:
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return node.value
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        return -_constant(node.operand)
    raise ParameterError(f"expected an integer constant, got {ast.dump(node)}")


def _convert(node: ast.AST) -> Expr:
    if isinstance(node, ast.Name):
        return Input(node.id)
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Add):
            return Add(_convert(node.left), _convert(node.right))
        if isinstance(node.op, ast.Sub):
            return Add(_convert(node.left), Scale(-1, _convert(node.right)))
        if isinstance(node.op, ast.MatMult):
            return MatMul(_convert(node.left), _convert(node.right))
        if isinstance(node.op, ast.Pow):
            return Power(_convert(node.left), _constant(node.right))
        if isinstance(node.op, ast.Mult):
            if isinstance(node.left, (ast.Constant, ast.UnaryOp)):
                return Scale(_constant(node.left), _convert(node.right))
            if isinstance(node.right, (ast.Constant, ast.UnaryOp)):
                return Scale(_constant(node.right), _convert(node.left))
            raise ParameterError("'*' is scalar multiplication only; use '@' for matrix products")
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        return Scale(-1, _convert(node.operand))
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and len(node.args) == 1:
        name = node.func.id
        if name == 'inv':
            return Inverse(_convert(node.args[0]))
        if name in ('T', 'tr'):
            return Transpose(_convert(node.args[0]))
    raise ParameterError(f"unsupported expression element: {ast.dump(node)}")


def parse_expression(text: str) -> Expr:
    """Parse +, -, c*X, @, X**r, inv(X), T(X) over named inputs"""
    try:
        tree = ast.parse(text, mode='eval')
    except SyntaxError as exc:
        raise ParameterError(f"cannot parse expression {text!r}: {exc.msg}") from exc
    return _convert(tree.body)


def input_names(expr: Expr) -> List[str]:
    """Input names in first-appearance order"""
    names: List[str] = []
    for step in compile_plan(expr):
        if isinstance(step.node, Input) and step.node.name not in names:
            names.append(step.node.name)
    return names


def _assemble(binding: Binding) -> MatrixFq:
    if isinstance(binding, MatrixFq):
        return binding
    return stack_rows(list(binding))


def evaluate_plain(expr: Expr, bindings: Dict[str, Binding]) -> MatrixFq:
    """Plaintext oracle"""
    if isinstance(expr, Input):
        if expr.name not in bindings:
            raise ParameterError(f"unbound input {expr.name!r}")
        return _assemble(bindings[expr.name])
    if isinstance(expr, Add):
        return evaluate_plain(expr.left, bindings) + evaluate_plain(expr.right, bindings)
    if isinstance(expr, Scale):
        return evaluate_plain(expr.operand, bindings).scale(expr.c)
    if isinstance(expr, MatMul):
        return mat_mul(evaluate_plain(expr.left, bindings), evaluate_plain(expr.right, bindings))
    if isinstance(expr, Transpose):
        return transpose(evaluate_plain(expr.operand, bindings))
    if isinstance(expr, Power):
        return matrix_power(evaluate_plain(expr.operand, bindings), expr.r)
    if isinstance(expr, Inverse):
        return plaintext_inverse(evaluate_plain(expr.operand, bindings))
    raise ParameterError(f"unknown node {expr!r}")


@dataclass
class PlanStep:
    index: int
    node: Expr
    args: Tuple[int, ...] = field(default_factory=tuple)

    def describe(self) -> str:
        label = type(self.node).__name__
        if isinstance(self.node, Input):
            label = f'Input({self.node.name})'
        elif isinstance(self.node, Scale):
            label = f'Scale({self.node.c})'
        elif isinstance(self.node, Power):
            label = f'Power({self.node.r})'
        return f'{self.index}: {label} {list(self.args)}'


def compile_plan(expr: Expr) -> List[PlanStep]:
    """Post-order steps; identical subtrees are computed once"""
    steps: List[PlanStep] = []
    seen: Dict[Expr, int] = {}

    def visit(node: Expr) -> int:
        if node in seen:
            return seen[node]
        if isinstance(node, Input):
            args: Tuple[int, ...] = ()
        elif isinstance(node, (Add, MatMul)):
            args = (visit(node.left), visit(node.right))
        elif isinstance(node, (Scale, Transpose, Power, Inverse)):
            args = (visit(node.operand),)
        else:
            raise ParameterError(f"unknown node {node!r}")
        steps.append(PlanStep(len(steps), node, args))
        seen[node] = len(steps) - 1
        return seen[node]

    visit(expr)
    return steps


def infer_shapes(plan: Sequence[PlanStep], shapes: Dict[str, Tuple[int, int]]) -> List[Tuple[int, int]]:
    """Shape of every step; raises on a non-conformal tree"""
    out: List[Tuple[int, int]] = []
    for step in plan:
        node = step.node
        if isinstance(node, Input):
            shape = shapes[node.name]
        elif isinstance(node, Add):
            a, b = out[step.args[0]], out[step.args[1]]
            if a != b:
                raise DimensionError(f"non-conformal sum at step {step.index}: {a} + {b}")
            shape = a
        elif isinstance(node, MatMul):
            a, b = out[step.args[0]], out[step.args[1]]
            if a[1] != b[0]:
                raise DimensionError(f"non-conformal product at step {step.index}: {a} @ {b}")
            shape = (a[0], b[1])
        elif isinstance(node, Transpose):
            a = out[step.args[0]]
            shape = (a[1], a[0])
        elif isinstance(node, (Power, Inverse)):
            a = out[step.args[0]]
            if a[0] != a[1]:
                raise DimensionError(f"{type(node).__name__.lower()} of non-square {a} at step {step.index}")
            if isinstance(node, Power) and node.r < 1:
                raise ParameterError(f"exponent must be >= 1 at step {step.index}, got {node.r}")
            shape = a
        else:
            shape = out[step.args[0]]
        out.append(shape)
    return out


def _upload_parts(net: SimNet, parts: Sequence[MatrixFq], first_source: int, k: int, t: int,
                  name: str) -> List[Share]:
    """Each source uploads right shares of its block transposed; servers
    concatenate into right shares of X^tr, convert to left and transpose."""
    rp = ShareParams(net.n, k, t, Side.RIGHT)
    per_source = [upload_matrix(net, first_source + g, transpose(part), rp, f'{name}{g + 1}^T')[0]
                  for g, part in enumerate(parts)]
    joined = [Share(rp, j, concat_cols([shares[j - 1].payload for shares in per_source]), f'{name}^T')
              for j in net.servers]
    left_tr = convert_shares(net, joined, k, t, Side.LEFT)
    return transpose_shares(net, left_tr, k, t, name)


def eval_matrix_polynomial(net: SimNet, expr: Union[Expr, str], bindings: Dict[str, Binding],
                           t: int) -> MatrixFq:
    """Evaluate the expression on shares and deliver the result to the user"""
    if isinstance(expr, str):
        expr = parse_expression(expr)
    k = standard_k(net.n, t)
    plan = compile_plan(expr)
    names = input_names(expr)
    missing = [name for name in names if name not in bindings]
    if missing:
        raise ParameterError(f"unbound inputs {missing}")

    assembled = {name: _assemble(bindings[name]) for name in names}
    shapes = infer_shapes(plan, {name: m.shape for name, m in assembled.items()})
    for step, shape in zip(plan, shapes):
        for dim in shape:
            require_divisible(dim, k, f'dimension at step {step.index}')
    sources_needed = sum(1 if isinstance(bindings[n], MatrixFq) else len(bindings[n]) for n in names)
    if net.n_sources < sources_needed:
        raise ParameterError(f"expression needs {sources_needed} sources, network has {net.n_sources}")

    net.register_inputs(*assembled.values())
    lp = ShareParams(net.n, k, t, Side.LEFT)
    logger.info("Evaluating %d-step plan with N=%d, K=%d, T=%d", len(plan), net.n, k, t)

    values: Dict[int, List[Share]] = {}
    next_source = 1
    for step in plan:
        node = step.node
        args = [values[i] for i in step.args]
        tag = f's{step.index}'
        if isinstance(node, Input):
            binding = bindings[node.name]
            if isinstance(binding, MatrixFq):
                values[step.index], _ = upload_matrix(net, next_source, binding, lp, node.name)
                next_source += 1
            else:
                values[step.index] = _upload_parts(net, binding, next_source, k, t, node.name)
                next_source += len(binding)
        elif isinstance(node, Add):
            values[step.index] = [share_add(x, y, tag) for x, y in zip(*args)]
        elif isinstance(node, Scale):
            values[step.index] = [share_scale(node.c, x, tag) for x in args[0]]
        elif isinstance(node, MatMul):
            right = convert_shares(net, args[1], k, t, Side.RIGHT)
            products = multiply_local(net, args[0], right, f'H{step.index}')
            values[step.index] = reshare_product(net, products, lp, tag)
        elif isinstance(node, Transpose):
            values[step.index] = transpose_shares(net, args[0], k, t, tag)
        elif isinstance(node, Power):
            values[step.index] = power_of_shares(net, args[0], node.r, t)
        elif isinstance(node, Inverse):
            right = convert_shares(net, args[0], k, t, Side.RIGHT)
            values[step.index] = masked_inverse(net, right, t)
        logger.debug("Step %s done", step.describe())

    result = decode_at_user(net, values[plan[-1].index], 'G')
    net.register_output(result)
    return result
