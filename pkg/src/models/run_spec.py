"""
Validated CLI run description
"""

from pathlib import Path
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator

Command = Literal['sdmm', 'chain', 'straggler', 'invert', 'power', 'solve', 'polyeval',
                  'pipeline', 'audit', 'costs']

MULTIPLICATION_COMMANDS = ('sdmm', 'chain', 'straggler', 'invert', 'power', 'solve', 'polyeval',
                           'pipeline')


def parse_dims(text: str) -> List[Tuple[int, int]]:
    """'2x6,6x2' -> [(2, 6), (6, 2)]"""
    dims = []
    for part in text.split(','):
        part = part.strip().lower()
        if not part:
            continue
        rows, sep, cols = part.partition('x')
        if not sep or not rows.isdigit() or not cols.isdigit():
            raise ValueError(f"expected RxC, got {part!r}")
        dims.append((int(rows), int(cols)))
    return dims


class RunSpec(BaseModel):
    """One CLI invocation after flag parsing"""
    command: Command
    n: Optional[int] = None
    t: int = 1
    k1: Optional[int] = None
    k2: Optional[int] = None
    k3: Optional[int] = None
    n2: Optional[int] = None
    q: Optional[int] = None
    seed: int = 0
    gen: List[Tuple[int, int]] = Field(default_factory=list)
    inputs: List[Path] = Field(default_factory=list)
    out: Optional[Path] = None
    own_data: bool = False
    pad: bool = False
    user_secure: bool = False
    fail: List[int] = Field(default_factory=list)
    fail_group: List[int] = Field(default_factory=list)
    r: Optional[int] = None
    expr: Optional[str] = None
    dims: Optional[Tuple[int, int]] = None
    mode: Literal['suite', 'exhaustive', 'statistical', 'user', 'aliasing'] = 'suite'
    colluders: Optional[int] = None
    raw: bool = False
    t_max: int = 9
    save_log: bool = False

    @field_validator('gen', mode='before')
    @classmethod
    def split_gen(cls, value):
        if isinstance(value, str):
            return parse_dims(value)
        return value or []

    @field_validator('dims', mode='before')
    @classmethod
    def split_dims(cls, value):
        if isinstance(value, str):
            parsed = parse_dims(value)
            if len(parsed) != 1:
                raise ValueError(f"expected one RxC, got {value!r}")
            return parsed[0]
        return value

    @model_validator(mode='after')
    def check_consistency(self) -> 'RunSpec':
        if self.t < 0:
            raise ValueError(f"T must be >= 0, got {self.t}")
        if self.own_data and self.user_secure:
            raise ValueError("--own-data and --user-secure are mutually exclusive")
        if self.own_data and self.command not in ('sdmm', 'straggler', 'audit'):
            raise ValueError(f"--own-data applies to sdmm, straggler and audit, not {self.command}")
        if (self.fail or self.fail_group) and self.command != 'straggler':
            raise ValueError("--fail and --fail-group apply to the straggler command only")
        if self.gen and self.inputs:
            raise ValueError("use either --gen or --in, not both")
        if self.command == 'straggler':
            missing = [name for name in ('k1', 'k2', 'k3', 'n2') if getattr(self, name) is None]
            if missing:
                raise ValueError(f"straggler needs {', '.join('--' + m for m in missing)}")
        elif self.command in MULTIPLICATION_COMMANDS:
            if self.n is None:
                raise ValueError(f"{self.command} needs --n")
            floor = self.t if self.own_data else 2 * self.t
            if self.n <= floor:
                bound = 'T' if self.own_data else '2T'
                raise ValueError(f"need N > {bound}, got N={self.n}, T={self.t}")
        if self.command == 'power' and (self.r is None or self.r < 1):
            raise ValueError("power needs --r >= 1")
        if self.command == 'polyeval' and not self.expr:
            raise ValueError("polyeval needs --expr")
        if self.command == 'costs' and self.t_max < 0:
            raise ValueError(f"--t-max must be >= 0, got {self.t_max}")
        return self

    def failed_servers(self, n1: int) -> List[int]:
        """--fail servers plus every server of each --fail-group"""
        failed = set(self.fail)
        for g in self.fail_group:
            failed.update(range((g - 1) * n1 + 1, g * n1 + 1))
        return sorted(failed)
