"""
Cost, round and verdict reports
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional


def fraction_dict(value: Optional[Fraction]) -> Optional[Dict]:
    """Exact "p/q" string plus a decimal"""
    if value is None:
        return None
    return {'exact': f'{value.numerator}/{value.denominator}', 'decimal': float(value)}


@dataclass
class RoundCounter:
    """Computation (multiplication) and communication rounds of a run"""
    computation: int = 0
    communication: int = 0

    def tick_computation(self, count: int = 1):
        self.computation += count

    def tick_communication(self, count: int = 1):
        self.communication += count


@dataclass
class StragglerInfo:
    failed: List[int] = field(default_factory=list)
    groups_used: List[int] = field(default_factory=list)
    group_threshold: int = 0
    worst_case_threshold: int = 0

    def to_dict(self) -> Dict:
        return {
            'failed': sorted(self.failed),
            'groups_used': self.groups_used,
            'group_threshold': self.group_threshold,
            'worst_case_threshold': self.worst_case_threshold,
        }


@dataclass
class CostReport:
    """Measured symbol counts and the normalized costs derived from them"""
    upload_symbols: int = 0
    download_symbols: int = 0
    interserver_symbols: int = 0
    input_symbols: int = 0
    output_symbols: int = 0
    rounds: int = 0
    communication_rounds: int = 0
    interserver_per_server: List[Fraction] = field(default_factory=list)
    straggler: Optional[StragglerInfo] = None

    @property
    def chi_ul(self) -> Optional[Fraction]:
        if not self.input_symbols:
            return None
        return Fraction(self.upload_symbols, self.input_symbols)

    @property
    def chi_dl(self) -> Optional[Fraction]:
        if not self.output_symbols:
            return None
        return Fraction(self.download_symbols, self.output_symbols)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'upload_symbols': self.upload_symbols,
            'download_symbols': self.download_symbols,
            'interserver_symbols': self.interserver_symbols,
            'input_symbols': self.input_symbols,
            'output_symbols': self.output_symbols,
            'chi_ul': fraction_dict(self.chi_ul),
            'chi_dl': fraction_dict(self.chi_dl),
            'rounds': self.rounds,
            'communication_rounds': self.communication_rounds,
            'interserver_per_server': [fraction_dict(v) for v in self.interserver_per_server],
            'straggler': self.straggler.to_dict() if self.straggler else None,
        }


@dataclass
class SecrecyVerdict:
    """Outcome of a secrecy audit"""
    n: int
    k: int
    t: int
    q: int
    dims: tuple
    mode: str
    passed: bool
    evidence: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'parameters': {'n': self.n, 'k': self.k, 't': self.t, 'q': self.q, 'dims': list(self.dims)},
            'mode': self.mode,
            'pass': self.passed,
            'evidence': self.evidence,
        }
