"""
Share data models
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Tuple

from ..algebra.matrix import MatrixFile, MatrixFq
from ..utils.errors import ParameterError


class Side(str, Enum):
    """Which encoding polynomial produced a share"""
    LEFT = 'left'
    RIGHT = 'right'
    RIGHT_OWN_DATA = 'right_own_data'
    BIVARIATE_A = 'bivariate_a'
    BIVARIATE_B = 'bivariate_b'
    PRODUCT = 'product'  # server-local product of a left and a right share

    @property
    def is_left(self) -> bool:
        return self in (Side.LEFT, Side.BIVARIATE_A)

    @property
    def is_right(self) -> bool:
        return self in (Side.RIGHT, Side.RIGHT_OWN_DATA, Side.BIVARIATE_B)


@dataclass(frozen=True)
class ShareParams:
    """(N, K, T) plus the encoding side"""
    n: int
    k: int
    t: int
    side: Side = Side.LEFT

    def __post_init__(self):
        if self.n < 1 or self.k < 1 or self.t < 0:
            raise ParameterError(f"need N >= 1, K >= 1, T >= 0; got N={self.n}, K={self.k}, T={self.t}")
        if self.side in (Side.LEFT, Side.RIGHT_OWN_DATA) and self.k + self.t > self.n:
            raise ParameterError(
                f"{self.side.value} shares need K + T <= N; got K={self.k}, T={self.t}, N={self.n}")
        if self.side == Side.RIGHT and self.k + 2 * self.t > self.n:
            raise ParameterError(
                f"right shares need K + 2T <= N; got K={self.k}, T={self.t}, N={self.n}")

    def with_side(self, side: Side) -> 'ShareParams':
        return ShareParams(self.n, self.k, self.t, side)

    def to_dict(self) -> Dict:
        return {'n': self.n, 'k': self.k, 't': self.t, 'side': self.side.value}


@dataclass(frozen=True)
class Share:
    """Payload [[M]]_i held by server i"""
    params: ShareParams
    server_index: int
    payload: MatrixFq
    object_tag: str = ''

    @property
    def size(self) -> int:
        return self.payload.size

    def with_payload(self, payload: MatrixFq, tag: str = None) -> 'Share':
        return Share(self.params, self.server_index, payload, self.object_tag if tag is None else tag)

    def to_dict(self) -> Dict:
        return {
            'params': self.params.to_dict(),
            'server_index': self.server_index,
            'object_tag': self.object_tag,
            'payload': MatrixFile.from_matrix(self.payload).model_dump(),
        }


@dataclass(frozen=True)
class SecretKeyBundle:
    """Key matrices R_1..R_T (left) or S_1..S_T (right)"""
    side: Side
    keys: Tuple[MatrixFq, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.keys)
