"""
Closed-form communication costs and their comparison with measured runs
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from ..models.report import CostReport, fraction_dict
from ..utils.errors import ParameterError

logger = logging.getLogger(__name__)

Dims = Tuple[int, int, int]


@dataclass(frozen=True)
class CostRow:
    scheme: str
    chi_ul: Optional[Fraction]
    chi_dl: Optional[Fraction]
    encoding: str = ''
    decoding: str = ''
    note: str = ''

    def to_dict(self) -> Dict[str, Any]:
        return {
            'scheme': self.scheme,
            'chi_ul': fraction_dict(self.chi_ul),
            'chi_dl': fraction_dict(self.chi_dl),
            'encoding': self.encoding,
            'decoding': self.decoding,
            'note': self.note,
        }


def _check(n: int, t: int):
    if t < 0 or n <= 2 * t:
        raise ParameterError(f"need N > 2T and T >= 0, got N={n}, T={t}")


def proposed_upload(n: int, t: int) -> Fraction:
    _check(n, t)
    return Fraction(n, n - 2 * t)


def own_data_upload(n: int, t: int) -> Fraction:
    if t < 0 or n <= t:
        raise ParameterError(f"need N > T and T >= 0, got N={n}, T={t}")
    return Fraction(n, n - t)


def proposed_download(n: int, k: int, dims: Dims) -> Tuple[Fraction, str]:
    """Download cost for A (m x n) times B (n x p), and which case applied"""
    m, inner, p = dims
    if min(m, inner, p) < 1 or k < 1:
        raise ParameterError(f"dimensions and K must be positive, got dims={dims}, K={k}")
    smaller = min(m, p)
    if inner >= k * smaller:
        return Fraction(n), 'n >= K*min(m,p)'
    if inner >= smaller:
        return Fraction(n * inner) * (m + p - Fraction(inner, k)) / (k * m * p), 'min(m,p) <= n < K*min(m,p)'
    return Fraction(n) * (m + p - Fraction(inner, k)) / (k * (m + p - inner)), 'n < min(m,p)'


def secure_matdot_upload(n: int, t: int) -> Fraction:
    return Fraction(2 * n, n - 2 * t + 1)


def row_by_column_partition(n: int, t: int) -> Optional[Tuple[int, int]]:
    """Largest K whose server requirement min(2K^2+2T-3, K^2+KT+T-2) fits in N, with that requirement"""
    best = None
    k = 1
    while True:
        need = min(2 * k * k + 2 * t - 3, k * k + k * t + t - 2)
        if need > n:
            break
        best = (k, need)
        k += 1
    return best


def row_by_column_upload(n: int, t: int) -> Optional[Fraction]:
    partition = row_by_column_partition(n, t)
    if partition is None:
        return None
    k, need = partition
    return Fraction(need, k)


def straggler_upload(n: int, k1: int, k2: int, k3: int, dims: Dims) -> Fraction:
    """N (K3 mn + K2 np) / (K1 K2 K3 (mn + np))"""
    m, inner, p = dims
    return Fraction(n * (k3 * m * inner + k2 * inner * p), k1 * k2 * k3 * (m * inner + inner * p))


def cost_formulas(n: int, t: int, k: Optional[int] = None,
                  dims: Optional[Dims] = None) -> List[CostRow]:
    """Upload and download costs of the proposed scheme and the schemes it is compared to"""
    _check(n, t)
    k = k if k is not None else n - 2 * t
    if k < 1 or k + 2 * t > n:
        raise ParameterError(f"need 1 <= K <= N - 2T, got K={k} for N={n}, T={t}")
    dl, case = (proposed_download(n, k, dims) if dims else (None, 'dimensions not given'))
    rows = [
        CostRow('proposed', Fraction(n, k), dl, 'O(mnN/(N-2T) log N)', 'O(1)', case),
        CostRow('proposed + 1 inter-server round', Fraction(n, k), own_data_upload(n, t),
                'O(mnN/(N-2T) log N)', 'O(mpN/(N-T) log N)'),
        CostRow('own data', own_data_upload(n, t), None, '', '', 'user holds the keys'),
        CostRow('secure MatDot', secure_matdot_upload(n, t), Fraction(n),
                'O(mn/K N log^2 N loglog N)', 'O(mp/K N log^2 N loglog N)', 'N = 2(K+T) - 1'),
    ]
    partition = row_by_column_partition(n, t)
    note = f'K = {partition[0]}, needs {partition[1]} servers' if partition else 'no K fits in N'
    rows.append(CostRow('row-by-column (Nodehi et al.)', row_by_column_upload(n, t), None,
                        'O(mn/sqrt(N) N log^2 N loglog N)', 'O(mp/sqrt(N) N log^2 N loglog N)', note))
    return rows


def cost_table(n: int, t_values: Sequence[int]) -> List[Dict[str, Any]]:
    """Upload cost of every scheme for each T (costs subcommand)"""
    table = []
    for t in t_values:
        row: Dict[str, Any] = {'n': n, 't': t}
        for r in cost_formulas(n, t):
            row[r.scheme] = r.chi_ul
        table.append(row)
    return table


def expected_costs(protocol: str, n: int, t: int, **kwargs) -> Dict[str, Any]:
    """Closed-form values a measured CostReport of `protocol` must equal"""
    if protocol in ('sdmm2', 'chain_multiply', 'solve_linear'):
        expected: Dict[str, Any] = {'chi_ul': proposed_upload(n, t), 'chi_dl': Fraction(n)}
        if kwargs.get('user_secure'):
            expected['chi_dl'] = own_data_upload(n, t)
        if protocol == 'chain_multiply' and kwargs.get('gamma', 3) > 2:
            expected['interserver_per_server'] = Fraction(n - 1, n - 2 * t)
        return expected
    if protocol == 'sdmm2_own_data':
        return {'chi_ul': own_data_upload(n, t), 'chi_dl': Fraction(n)}
    if protocol == 'optimal_cost_pipeline':
        return {'chi_ul': own_data_upload(n, t), 'chi_dl': own_data_upload(n, t)}
    if protocol in ('invert', 'exponentiate'):
        return {'chi_ul': proposed_upload(n, t)}
    if protocol == 'straggler_sdmm':
        cfg = kwargs['cfg']
        return {'chi_ul': straggler_upload(cfg.servers_needed, cfg.k1, cfg.k2, cfg.k3, kwargs['dims'])}
    raise ParameterError(f"no closed-form costs for protocol {protocol!r}")


@dataclass
class Comparison:
    passed: bool
    rows: List[Dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {'pass': self.passed, 'rows': self.rows}


def _measured(report: CostReport, metric: str):
    if metric == 'interserver_per_server':
        return list(report.interserver_per_server)
    if not hasattr(report, metric):
        raise ParameterError(f"unknown cost metric {metric!r}")
    value = getattr(report, metric)
    return Fraction(value) if isinstance(value, int) else value


def measured_vs_formula(report: CostReport, expected: Dict[str, Any]) -> Comparison:
    """Exact comparison; per-server inter-server costs must all equal the expected value"""
    rows = []
    for metric, want in expected.items():
        got = _measured(report, metric)
        if isinstance(got, list):
            deltas = [g - want for g in got]
            ok = bool(got) and all(d == 0 for d in deltas)
            rows.append({'metric': metric, 'measured': [fraction_dict(g) for g in got],
                         'expected': fraction_dict(Fraction(want)), 'match': ok,
                         'delta': [fraction_dict(d) for d in deltas]})
            continue
        want = Fraction(want)
        delta = None if got is None else got - want
        ok = delta == 0
        rows.append({'metric': metric, 'measured': fraction_dict(got), 'expected': fraction_dict(want),
                     'match': ok, 'delta': fraction_dict(delta)})
    result = Comparison(all(r['match'] for r in rows), rows)
    if not result.passed:
        logger.warning("Measured costs differ from the closed form: %s",
                       [r['metric'] for r in rows if not r['match']])
    return result
