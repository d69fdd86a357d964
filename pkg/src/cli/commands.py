"""
Command-line front end

Each subcommand builds a RunSpec, runs one protocol on a fresh SimNet, checks
the result against the plaintext oracle and writes result.json / report.json
under --out.
"""

import argparse
import logging
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

from ..algebra.finite_field import FieldSpec, find_field, primitive_nth_root
from ..algebra.matrix import (MatrixFq, identity, load_matrix, mat_mul, matrix_power, pad_matrix,
                              plaintext_solve, random_matrix, round_up, truncate)
from ..audit.costs import cost_table, expected_costs, measured_vs_formula
from ..audit.secrecy import aliasing_leaks, secrecy_exhaustive, secrecy_statistical, \
    secrecy_user_exhaustive
from ..models.run_spec import RunSpec
from ..models.share import Side
from ..protocols import (StragglerConfig, chain_multiply, eval_matrix_polynomial, exponentiate,
                         invert, optimal_cost_pipeline, parse_expression, sdmm2, sdmm2_own_data,
                         solve_linear, straggler_sdmm)
from ..protocols.expression import evaluate_plain, input_names
from ..simulation.engine import SimNet, build_network
from ..utils.config import get_settings
from ..utils.errors import (DimensionError, FieldConditionError, ParameterError, SDMCError,
                            SingularMatrixError, StateSpaceTooLargeError,
                            StragglerUnrecoverableError)
from . import output

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PROTOCOL = 3
EXIT_STRAGGLER = 4
EXIT_SINGULAR = 5

USAGE_ERRORS = (ParameterError, DimensionError, FieldConditionError, StateSpaceTooLargeError,
                ValidationError, OSError)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='sdmc',
        description='Secure distributed matrix computation over F_q on a simulated network.',
        epilog='When --q is omitted the field is the smallest prime q >= 2*SDMC_ENTRY_BOUND '
               '(default 2^32) with N | q-1. Exit codes: 0 ok, 2 usage, 3 protocol, '
               '4 straggler-unrecoverable, 5 singular matrix.')
    sub = parser.add_subparsers(dest='command', required=True)

    def common(p: argparse.ArgumentParser):
        p.add_argument('--n', type=int, help='number of servers N')
        p.add_argument('--t', type=int, default=1, help='colluding servers tolerated (default 1)')
        p.add_argument('--q', type=int, help='field modulus (auto when omitted)')
        p.add_argument('--seed', type=int, help='run seed (default SDMC_SEED)')
        p.add_argument('--out', help='directory for JSON artifacts')

    def matrices(p: argparse.ArgumentParser):
        p.add_argument('--gen', help='generate random inputs of shapes RxC,RxC,...')
        p.add_argument('--in', dest='inputs', nargs='+', default=[], metavar='FILE',
                       help='input matrix JSON files')
        p.add_argument('--pad', action='store_true', help='pad dimensions up to multiples of K')
        p.add_argument('--save-log', action='store_true', help='also write messages.json')

    p = sub.add_parser('sdmm', help='multiply two matrices')
    common(p)
    matrices(p)
    p.add_argument('--own-data', action='store_true', help='user owns the inputs (K = N - T)')
    p.add_argument('--user-secure', action='store_true', help='re-share the product before download')

    p = sub.add_parser('chain', help='multiply a chain of matrices')
    common(p)
    matrices(p)

    p = sub.add_parser('straggler', help='straggler-tolerant multiplication')
    common(p)
    matrices(p)
    for name in ('k1', 'k2', 'k3', 'n2'):
        p.add_argument(f'--{name}', type=int)
    p.add_argument('--own-data', action='store_true')
    p.add_argument('--fail', type=lambda s: [int(v) for v in s.split(',') if v], default=[],
                   metavar='SERVERS', help='comma-separated straggling servers')
    p.add_argument('--fail-group', type=int, action='append', default=[], metavar='G',
                   help='fail every server of group G (repeatable)')

    for name, text in (('invert', 'invert a square matrix'), ('solve', 'solve AX = B'),
                       ('pipeline', 'multiply with upload and download cost N/(N-T)')):
        p = sub.add_parser(name, help=text)
        common(p)
        matrices(p)

    p = sub.add_parser('power', help='raise a square matrix to the r-th power')
    common(p)
    matrices(p)
    p.add_argument('--r', type=int, required=True)

    p = sub.add_parser('polyeval', help="evaluate an expression such as 'A1 @ A1 + 2 * inv(A2)'")
    common(p)
    matrices(p)
    p.add_argument('--expr', required=True)

    p = sub.add_parser('audit', help='secrecy and aliasing audits')
    common(p)
    p.add_argument('--mode', default='suite',
                   choices=['suite', 'exhaustive', 'statistical', 'user', 'aliasing'])
    p.add_argument('--k1', type=int, help='partition count K')
    p.add_argument('--dims', help='input shape RxC')
    p.add_argument('--colluders', type=int, help='coalition size (default T)')
    p.add_argument('--own-data', action='store_true', help='aliasing check for own-data right shares')
    p.add_argument('--raw', action='store_true', help='user audit without the re-sharing round')

    p = sub.add_parser('costs', help='upload cost comparison table')
    p.add_argument('--n', type=int, default=20)
    p.add_argument('--t-max', type=int, default=9)
    p.add_argument('--out', help='directory for costs.csv and costs.json')
    return parser


def spec_from_args(args: argparse.Namespace) -> RunSpec:
    values = {key: value for key, value in vars(args).items() if value is not None}
    if 'seed' not in values:
        values['seed'] = get_settings().seed
    return RunSpec.model_validate(values)


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, StragglerUnrecoverableError):
        return EXIT_STRAGGLER
    if isinstance(exc, SingularMatrixError):
        return EXIT_SINGULAR
    if isinstance(exc, USAGE_ERRORS):
        return EXIT_USAGE
    if isinstance(exc, SDMCError):
        return EXIT_PROTOCOL
    raise exc


# ---------------------------------------------------------------- inputs

def _field_for(spec: RunSpec, order: int, min_q: int = 2) -> FieldSpec:
    if spec.q is not None:
        field = FieldSpec(spec.q)
    elif spec.inputs:
        field = FieldSpec(load_matrix(spec.inputs[0]).q)
    else:
        field = find_field(order, max(2 * get_settings().entry_bound, min_q))
    primitive_nth_root(field, order)
    if field.q < min_q:
        raise FieldConditionError(f"need q >= {min_q}, got q={field.q}")
    logger.info("Working over F_%d", field.q)
    return field


def _generator(seed: int) -> np.random.Generator:
    # spawn key 0 is not used by any network node
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(0,))))


def _inputs(spec: RunSpec, field: FieldSpec, default: Sequence[Tuple[int, int]],
            count: Optional[int] = None) -> List[MatrixFq]:
    if spec.inputs:
        mats = [load_matrix(path, field) for path in spec.inputs]
    else:
        rng = _generator(spec.seed)
        mats = [random_matrix(field, r, c, rng) for r, c in (spec.gen or default)]
    if count is not None and len(mats) != count:
        raise ParameterError(f"{spec.command} takes {count} input matrices, got {len(mats)}")
    return mats


def _pad(m: MatrixFq, rows: int, cols: int, identity_fill: bool = False) -> MatrixFq:
    if (rows, cols) == m.shape:
        return m
    logger.info("Padding %dx%d to %dx%d", m.rows, m.cols, rows, cols)
    return pad_matrix(m, rows, cols, identity_fill)


def _square_pad(spec: RunSpec, m: MatrixFq, k: int) -> MatrixFq:
    if not spec.pad or m.rows != m.cols:
        return m
    size = round_up(m.rows, k)
    return _pad(m, size, size, identity_fill=True)


# ---------------------------------------------------------------- reporting

def _finish(spec: RunSpec, net: SimNet, protocol: str, result: MatrixFq, ok: bool,
            parameters: Dict[str, Any], **formula_args) -> int:
    report = net.cost_report()
    comparison = measured_vs_formula(report, expected_costs(protocol, net.n, spec.t, **formula_args))
    document = {
        'command': spec.command,
        'protocol': protocol,
        'parameters': {'n': net.n, 't': spec.t, 'q': net.field.q, 'seed': spec.seed, **parameters},
        'matches_oracle': ok,
        'cost': report.to_dict(),
        'formula': comparison.to_dict(),
    }
    extra = {'messages.json': net.log.to_dict()} if spec.save_log else None
    output.write_artifacts(spec.out, result, document, extra)

    items: Dict[str, Any] = {'result': f'{result.rows}x{result.cols} over F_{net.field.q}',
                             'matches oracle': ok,
                             'chi_UL': report.chi_ul, 'chi_DL': report.chi_dl,
                             'computation rounds': report.rounds,
                             'communication rounds': report.communication_rounds}
    if report.straggler:
        items['failed servers'] = report.straggler.failed or '-'
        items['groups used'] = report.straggler.groups_used
        items['group threshold'] = report.straggler.group_threshold
    print(output.summary(f'{spec.command} ({protocol})', items))
    print(f'  formula check  {output.status(comparison.passed)}')
    return EXIT_OK if ok else EXIT_PROTOCOL


# ---------------------------------------------------------------- multiplication commands

def cmd_sdmm(spec: RunSpec) -> int:
    n, t = spec.n, spec.t
    k = n - t if spec.own_data else n - 2 * t
    field = _field_for(spec, n)
    a, b = _inputs(spec, field, [(k, 2 * k), (2 * k, k)], count=2)
    if a.cols != b.rows:
        raise DimensionError(f"dimension mismatch: {a.rows}x{a.cols} @ {b.rows}x{b.cols}")
    a_run, b_run = a, b
    if spec.pad:
        inner = round_up(a.cols, k)
        cols = round_up(b.cols, n - t) if spec.user_secure else b.cols
        a_run, b_run = _pad(a, a.rows, inner), _pad(b, inner, cols)

    net = build_network(2, n, field, spec.seed)
    if spec.own_data:
        protocol = 'sdmm2_own_data'
        result = sdmm2_own_data(net, a_run, b_run, t)
    else:
        protocol = 'sdmm2'
        result = sdmm2(net, a_run, b_run, t, user_secure=spec.user_secure)
    result = truncate(result, a.rows, b.cols)
    return _finish(spec, net, protocol, result, result == mat_mul(a, b),
                   {'k': k, 'own_data': spec.own_data, 'user_secure': spec.user_secure},
                   user_secure=spec.user_secure)


def cmd_chain(spec: RunSpec) -> int:
    n, t = spec.n, spec.t
    k = n - 2 * t
    field = _field_for(spec, n)
    mats = _inputs(spec, field, [(k, k)] * 3)
    if len(mats) < 2:
        raise ParameterError(f"chain needs at least 2 matrices, got {len(mats)}")
    run = mats
    if spec.pad:
        last = len(mats) - 1
        run = [_pad(m, m.rows if i == 0 else round_up(m.rows, k),
                    m.cols if i == last else round_up(m.cols, k))
               for i, m in enumerate(mats)]

    net = build_network(len(mats), n, field, spec.seed)
    result = chain_multiply(net, run, t)
    result = truncate(result, mats[0].rows, mats[-1].cols)
    oracle = mats[0]
    for m in mats[1:]:
        oracle = mat_mul(oracle, m)
    return _finish(spec, net, 'chain_multiply', result, result == oracle,
                   {'k': k, 'gamma': len(mats)}, gamma=len(mats))


def cmd_straggler(spec: RunSpec) -> int:
    cfg = StragglerConfig(spec.k1, spec.k2, spec.k3, spec.t, spec.n2, own_data=spec.own_data)
    n = spec.n or cfg.servers_needed
    field = _field_for(spec, cfg.n1, min_q=cfg.degree_bound + 1)
    a, b = _inputs(spec, field, [(2 * cfg.k2, 2 * cfg.k1), (2 * cfg.k1, 2 * cfg.k3)], count=2)
    if a.cols != b.rows:
        raise DimensionError(f"dimension mismatch: {a.rows}x{a.cols} @ {b.rows}x{b.cols}")
    a_run, b_run = a, b
    if spec.pad:
        inner = round_up(a.cols, cfg.k1)
        a_run = _pad(a, round_up(a.rows, cfg.k2), inner)
        b_run = _pad(b, inner, round_up(b.cols, cfg.k3))

    net = build_network(2, n, field, spec.seed)
    result = straggler_sdmm(net, a_run, b_run, cfg, failed=spec.failed_servers(cfg.n1))
    result = truncate(result, a.rows, b.cols)
    dims = (a_run.rows, a_run.cols, b_run.cols)
    return _finish(spec, net, 'straggler_sdmm', result, result == mat_mul(a, b),
                   {'straggler': cfg.to_dict(), 'group_threshold': cfg.group_threshold(),
                    'worst_case_threshold': cfg.worst_case_threshold(n)},
                   cfg=cfg, dims=dims)


def cmd_invert(spec: RunSpec) -> int:
    n, t = spec.n, spec.t
    k = n - 2 * t
    field = _field_for(spec, n)
    (a,) = _inputs(spec, field, [(k, k)], count=1)
    net = build_network(1, n, field, spec.seed)
    result = truncate(invert(net, _square_pad(spec, a, k), t), a.rows, a.cols)
    ok = a.rows == a.cols and mat_mul(a, result) == identity(field, a.rows)
    return _finish(spec, net, 'invert', result, ok, {'k': k})


def cmd_power(spec: RunSpec) -> int:
    n, t = spec.n, spec.t
    k = n - 2 * t
    field = _field_for(spec, n)
    (a,) = _inputs(spec, field, [(k, k)], count=1)
    net = build_network(1, n, field, spec.seed)
    result = truncate(exponentiate(net, _square_pad(spec, a, k), spec.r, t), a.rows, a.cols)
    return _finish(spec, net, 'exponentiate', result, result == matrix_power(a, spec.r),
                   {'k': k, 'r': spec.r})


def cmd_solve(spec: RunSpec) -> int:
    n, t = spec.n, spec.t
    k = n - 2 * t
    field = _field_for(spec, n)
    a, b = _inputs(spec, field, [(k, k), (k, k)], count=2)
    a_run, b_run = a, b
    if spec.pad:
        a_run = _square_pad(spec, a, k)
        b_run = _pad(b, a_run.rows, b.cols)
    net = build_network(2, n, field, spec.seed)
    result = truncate(solve_linear(net, a_run, b_run, t), a.cols, b.cols)
    return _finish(spec, net, 'solve_linear', result, result == plaintext_solve(a, b), {'k': k})


def cmd_polyeval(spec: RunSpec) -> int:
    n, t = spec.n, spec.t
    k = n - 2 * t
    expr = parse_expression(spec.expr)
    names = input_names(expr)
    field = _field_for(spec, n)
    mats = _inputs(spec, field, [(k, k)] * len(names), count=len(names))
    bindings = dict(zip(names, mats))
    run = {name: _square_pad(spec, m, k) for name, m in bindings.items()}
    oracle = evaluate_plain(expr, bindings)

    net = build_network(len(names), n, field, spec.seed)
    result = truncate(eval_matrix_polynomial(net, expr, run, t), oracle.rows, oracle.cols)
    report = net.cost_report()
    document = {
        'command': spec.command,
        'parameters': {'n': n, 't': t, 'q': field.q, 'seed': spec.seed, 'expr': spec.expr,
                       'inputs': names},
        'matches_oracle': result == oracle,
        'cost': report.to_dict(),
    }
    output.write_artifacts(spec.out, result, document,
                           {'messages.json': net.log.to_dict()} if spec.save_log else None)
    print(output.summary(f'polyeval {spec.expr}', {
        'result': f'{result.rows}x{result.cols} over F_{field.q}',
        'matches oracle': result == oracle, 'chi_UL': report.chi_ul,
        'computation rounds': report.rounds, 'communication rounds': report.communication_rounds}))
    return EXIT_OK if result == oracle else EXIT_PROTOCOL


def cmd_pipeline(spec: RunSpec) -> int:
    n, t = spec.n, spec.t
    wide, k = n - t, n - 2 * t
    field = _field_for(spec, n)
    a, b = _inputs(spec, field, [(wide, k), (k, wide)], count=2)
    if a.cols != b.rows:
        raise DimensionError(f"dimension mismatch: {a.rows}x{a.cols} @ {b.rows}x{b.cols}")
    a_run, b_run = a, b
    if spec.pad:
        inner = round_up(a.cols, k)
        a_run = _pad(a, round_up(a.rows, wide), inner)
        b_run = _pad(b, inner, round_up(b.cols, wide))
    net = build_network(2, n, field, spec.seed)
    result = truncate(optimal_cost_pipeline(net, a_run, b_run, t), a.rows, b.cols)
    return _finish(spec, net, 'optimal_cost_pipeline', result, result == mat_mul(a, b),
                   {'upload_k': wide, 'k': k})


# ---------------------------------------------------------------- audit and costs

AuditCheck = Tuple[str, str, bool, Callable[[], Dict[str, Any]]]


def _aliasing(n: int, k: int, t: int, side: Side) -> Dict[str, Any]:
    leaks = aliasing_leaks(n, k, t, side)
    return {'check': 'aliasing', 'parameters': {'n': n, 'k': k, 't': t, 'side': side.value},
            'pass': not leaks, 'leaks': [list(p) for p in leaks]}


def audit_suite() -> List[AuditCheck]:
    """(name, parameters, expected pass, check)"""
    return [
        ('exhaustive', 'N=3 K=1 T=1 q=7 1x1', True,
         lambda: secrecy_exhaustive(3, 1, 1, 7, (1, 1)).to_dict()),
        ('exhaustive', 'N=5 K=1 T=2 q=11 1x1', True,
         lambda: secrecy_exhaustive(5, 1, 2, 11, (1, 1)).to_dict()),
        ('exhaustive', 'N=4 K=2 T=1 q=5 1x2', True,
         lambda: secrecy_exhaustive(4, 2, 1, 5, (1, 2)).to_dict()),
        ('exhaustive right', 'N=5 K=1 T=2 q=11 1x1', True,
         lambda: secrecy_exhaustive(5, 1, 2, 11, (1, 1), side=Side.RIGHT).to_dict()),
        ('T+1 colluders', 'N=5 K=1 T=2 q=11 1x1', False,
         lambda: secrecy_exhaustive(5, 1, 2, 11, (1, 1), colluders=3).to_dict()),
        ('statistical', 'N=7 K=3 T=2 q=29 1x3', True,
         lambda: secrecy_statistical(7, 3, 2, 29, (1, 3), samples=20_000).to_dict()),
        ('user (re-shared)', 'N=5 T=1 q=11', True,
         lambda: secrecy_user_exhaustive(5, 1, 11).to_dict()),
        ('user (raw products)', 'N=5 T=1 q=11', False,
         lambda: secrecy_user_exhaustive(5, 1, 11, usersecure=False).to_dict()),
        ('aliasing', 'N=7 K=3 T=2 right', True, lambda: _aliasing(7, 3, 2, Side.RIGHT)),
        ('aliasing', 'N=7 K=5 T=2 own-data', True,
         lambda: _aliasing(7, 5, 2, Side.RIGHT_OWN_DATA)),
        ('aliasing', 'N=7 K=5 T=2 right', False, lambda: _aliasing(7, 5, 2, Side.RIGHT)),
    ]


def _single_audit(spec: RunSpec) -> AuditCheck:
    if spec.n is None:
        raise ParameterError(f"audit --mode {spec.mode} needs --n")
    n, t = spec.n, spec.t
    k = spec.k1 or 1
    dims = spec.dims or (1, k)
    if spec.mode == 'aliasing':
        side = Side.RIGHT_OWN_DATA if spec.own_data else Side.RIGHT
        return ('aliasing', f'N={n} K={k} T={t} {side.value}', True, lambda: _aliasing(n, k, t, side))
    q = spec.q or find_field(n, n + 1).q
    label = f'N={n} K={k} T={t} q={q} {dims[0]}x{dims[1]}'
    if spec.mode == 'exhaustive':
        return ('exhaustive', label, True, lambda: secrecy_exhaustive(
            n, k, t, q, dims, colluders=spec.colluders).to_dict())
    if spec.mode == 'statistical':
        return ('statistical', label, True, lambda: secrecy_statistical(
            n, k, t, q, dims, colluders=spec.colluders, seed=spec.seed).to_dict())
    return ('user', f'N={n} T={t} q={q}', True,
            lambda: secrecy_user_exhaustive(n, t, q, usersecure=not spec.raw).to_dict())


def cmd_audit(spec: RunSpec) -> int:
    checks = audit_suite() if spec.mode == 'suite' else [_single_audit(spec)]
    rows, verdicts = [], []
    all_expected = True
    for name, label, expected, check in checks:
        verdict = check()
        as_expected = verdict['pass'] == expected
        all_expected &= as_expected
        verdicts.append({'check': name, 'label': label, 'expected_pass': expected, **verdict})
        rows.append([name, label, 'pass' if expected else 'fail',
                     'pass' if verdict['pass'] else 'fail', output.status(as_expected)])
    print(output.table(['check', 'parameters', 'expected', 'verdict', 'status'], rows))
    if spec.out is not None:
        output.write_json(spec.out / 'verdicts.json', verdicts)
    return EXIT_OK if all_expected else EXIT_PROTOCOL


def cmd_costs(spec: RunSpec) -> int:
    n = spec.n or 20
    t_values = [t for t in range(spec.t_max + 1) if n > 2 * t]
    rows = cost_table(n, t_values)
    schemes = [key for key in rows[0] if key not in ('n', 't')] if rows else []
    print(output.table(['T'] + schemes,
                       [[str(r['t'])] + [output.format_value(r[s]) for s in schemes] for r in rows]))
    if spec.out is not None:
        output.write_cost_csv(spec.out / 'costs.csv', rows)
        output.write_json(spec.out / 'costs.json', rows)
    return EXIT_OK


HANDLERS: Dict[str, Callable[[RunSpec], int]] = {
    'sdmm': cmd_sdmm,
    'chain': cmd_chain,
    'straggler': cmd_straggler,
    'invert': cmd_invert,
    'power': cmd_power,
    'solve': cmd_solve,
    'polyeval': cmd_polyeval,
    'pipeline': cmd_pipeline,
    'audit': cmd_audit,
    'costs': cmd_costs,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse argv and run one subcommand; returns the exit code"""
    args = build_parser().parse_args(argv)
    try:
        spec = spec_from_args(args)
        logger.info("Running %s", spec.command)
        return HANDLERS[spec.command](spec)
    except (SDMCError, ValidationError, OSError) as exc:
        code = exit_code_for(exc)
        logger.error("%s failed (exit %d): %s", args.command, code, exc)
        print(f'error: {exc}', file=sys.stderr)
        return code
