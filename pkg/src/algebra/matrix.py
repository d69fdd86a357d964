"""
Dense matrices over F_q

Entries are held in numpy object arrays of Python ints so that products of
64-bit residues never overflow. Also houses the partitioning views used by
the sharing schemes and the plaintext oracles (product, Gaussian elimination).
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence, Union

import numpy as np
from pydantic import BaseModel, model_validator

from .finite_field import FieldSpec
from ..utils.errors import DimensionError, ParameterError, SingularMatrixError


class MatrixFq:
    """Immutable dense matrix over a prime field"""

    __slots__ = ('values', 'field')

    def __init__(self, values, field: FieldSpec):
        array = np.asarray(values, dtype=object)
        if array.ndim != 2:
            raise DimensionError(f"matrix must be 2-D, got shape {array.shape}")
        array.setflags(write=False)
        self.values = array
        self.field = field

    @classmethod
    def from_rows(cls, field: FieldSpec, rows: Sequence[Sequence[int]]) -> 'MatrixFq':
        """Build from nested ints, reducing every entry mod q"""
        array = np.array([[int(v) % field.q for v in row] for row in rows], dtype=object)
        if array.ndim != 2:
            raise DimensionError("rows must all have the same length")
        return cls(array, field)

    @classmethod
    def from_flat(cls, field: FieldSpec, rows: int, cols: int, data: Sequence[int]) -> 'MatrixFq':
        if len(data) != rows * cols:
            raise DimensionError(f"expected {rows * cols} entries for {rows}x{cols}, got {len(data)}")
        array = np.array([int(v) % field.q for v in data], dtype=object).reshape(rows, cols)
        return cls(array, field)

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self):
        return self.values.shape

    @property
    def size(self) -> int:
        """Number of symbols (field elements)"""
        return self.rows * self.cols

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def data(self) -> List[int]:
        """Row-major entries"""
        return [int(v) for v in self.values.reshape(-1)]

    def tolist(self) -> List[List[int]]:
        return [[int(v) for v in row] for row in self.values]

    def _check_same_field(self, other: 'MatrixFq'):
        if self.field.q != other.field.q:
            raise DimensionError(f"field mismatch: F_{self.field.q} vs F_{other.field.q}")

    def __add__(self, other: 'MatrixFq') -> 'MatrixFq':
        self._check_same_field(other)
        if self.shape != other.shape:
            raise DimensionError(f"dimension mismatch: {self.shape} + {other.shape}")
        return MatrixFq((self.values + other.values) % self.q, self.field)

    def __sub__(self, other: 'MatrixFq') -> 'MatrixFq':
        self._check_same_field(other)
        if self.shape != other.shape:
            raise DimensionError(f"dimension mismatch: {self.shape} - {other.shape}")
        return MatrixFq((self.values - other.values) % self.q, self.field)

    def __neg__(self) -> 'MatrixFq':
        return MatrixFq((-self.values) % self.q, self.field)

    def __matmul__(self, other: 'MatrixFq') -> 'MatrixFq':
        return mat_mul(self, other)

    def scale(self, c: int) -> 'MatrixFq':
        return MatrixFq((self.values * (c % self.q)) % self.q, self.field)

    @property
    def T(self) -> 'MatrixFq':
        return transpose(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatrixFq):
            return NotImplemented
        return (self.field.q == other.field.q and self.shape == other.shape
                and bool(np.array_equal(self.values, other.values)))

    __hash__ = None

    def __repr__(self) -> str:
        return f"MatrixFq({self.rows}x{self.cols} over F_{self.q}, {self.tolist()})"


@dataclass(frozen=True)
class BlockGrid:
    """r x c array of equally shaped tiles"""
    blocks: tuple

    def __post_init__(self):
        if not self.blocks or not self.blocks[0]:
            raise DimensionError("block grid must contain at least one block")
        width = len(self.blocks[0])
        shape = self.blocks[0][0].shape
        for row in self.blocks:
            if len(row) != width:
                raise DimensionError("ragged block grid")
            for block in row:
                if block.shape != shape:
                    raise DimensionError(f"non-uniform block shapes {block.shape} vs {shape}")

    @property
    def grid_shape(self):
        return len(self.blocks), len(self.blocks[0])

    @property
    def block_shape(self):
        return self.blocks[0][0].shape

    def block(self, i: int, j: int) -> MatrixFq:
        """0-based tile (i, j)"""
        return self.blocks[i][j]

    def assemble(self) -> MatrixFq:
        return stack_rows([concat_cols(list(row)) for row in self.blocks])


def mat_mul(a: MatrixFq, b: MatrixFq) -> MatrixFq:
    """Exact product over F_q"""
    a._check_same_field(b)
    if a.cols != b.rows:
        raise DimensionError(f"dimension mismatch: {a.rows}x{a.cols} @ {b.rows}x{b.cols}")
    return MatrixFq(np.dot(a.values, b.values) % a.q, a.field)


def zeros(field: FieldSpec, rows: int, cols: int) -> MatrixFq:
    return MatrixFq(np.zeros((rows, cols), dtype=object), field)


def identity(field: FieldSpec, n: int) -> MatrixFq:
    array = np.zeros((n, n), dtype=object)
    for i in range(n):
        array[i, i] = 1
    return MatrixFq(array, field)


def transpose(a: MatrixFq) -> MatrixFq:
    return MatrixFq(a.values.T.copy(), a.field)


def partition_cols(a: MatrixFq, k: int) -> List[MatrixFq]:
    """[A_1 ... A_K], left to right"""
    if k < 1 or a.cols % k:
        raise DimensionError(f"indivisible-dimension: {a.cols} columns into K={k} parts")
    width = a.cols // k
    return [MatrixFq(a.values[:, l * width:(l + 1) * width].copy(), a.field) for l in range(k)]


def partition_rows(b: MatrixFq, k: int) -> List[MatrixFq]:
    """[B_1; ...; B_K], top to bottom"""
    if k < 1 or b.rows % k:
        raise DimensionError(f"indivisible-dimension: {b.rows} rows into K={k} parts")
    height = b.rows // k
    return [MatrixFq(b.values[l * height:(l + 1) * height, :].copy(), b.field) for l in range(k)]


def concat_cols(blocks: Sequence[MatrixFq]) -> MatrixFq:
    if not blocks:
        raise DimensionError("nothing to concatenate")
    return MatrixFq(np.concatenate([blk.values for blk in blocks], axis=1), blocks[0].field)


def stack_rows(blocks: Sequence[MatrixFq]) -> MatrixFq:
    if not blocks:
        raise DimensionError("nothing to stack")
    return MatrixFq(np.concatenate([blk.values for blk in blocks], axis=0), blocks[0].field)


def grid_partition(a: MatrixFq, r: int, c: int) -> BlockGrid:
    """Tile (i, j) is the i-th row band of the j-th column band"""
    bands = partition_rows(a, r)
    return BlockGrid(tuple(tuple(partition_cols(band, c)) for band in bands))


def random_matrix(field: FieldSpec, rows: int, cols: int, rng: np.random.Generator) -> MatrixFq:
    """Uniform i.i.d. entries in [0, q)"""
    draws = rng.integers(0, field.q, size=(rows, cols), dtype=np.uint64)
    return MatrixFq(draws.astype(object), field)


def plaintext_solve(a: MatrixFq, b: MatrixFq) -> MatrixFq:
    """X with AX = B by Gauss-Jordan elimination over F_q"""
    a._check_same_field(b)
    if a.rows != a.cols:
        raise DimensionError(f"coefficient matrix must be square, got {a.rows}x{a.cols}")
    if b.rows != a.rows:
        raise DimensionError(f"dimension mismatch: A is {a.rows}x{a.cols}, B has {b.rows} rows")
    q = a.q
    n = a.rows
    work = [list(map(int, ra)) + list(map(int, rb)) for ra, rb in zip(a.values, b.values)]

    for col in range(n):
        # first nonzero pivot; every nonzero element is a unit
        pivot = next((r for r in range(col, n) if work[r][col] % q), None)
        if pivot is None:
            raise SingularMatrixError(f"singular-matrix: no pivot in column {col}")
        work[col], work[pivot] = work[pivot], work[col]
        inv = pow(work[col][col], -1, q)
        work[col] = [v * inv % q for v in work[col]]
        for r in range(n):
            factor = work[r][col]
            if r != col and factor:
                work[r] = [(x - factor * y) % q for x, y in zip(work[r], work[col])]

    return MatrixFq([row[n:] for row in work], a.field)


def plaintext_inverse(a: MatrixFq) -> MatrixFq:
    return plaintext_solve(a, identity(a.field, a.rows))


def matrix_power(a: MatrixFq, r: int) -> MatrixFq:
    """Square-and-multiply oracle for A^r"""
    if a.rows != a.cols:
        raise DimensionError(f"power of a non-square {a.rows}x{a.cols} matrix")
    if r < 0:
        raise ParameterError(f"exponent must be non-negative, got {r}")
    result = identity(a.field, a.rows)
    base = a
    while r:
        if r & 1:
            result = result @ base
        base = base @ base
        r >>= 1
    return result


def pad_matrix(a: MatrixFq, rows: int, cols: int, identity_fill: bool = False) -> MatrixFq:
    """Zero-pad to rows x cols; identity_fill puts ones on the new diagonal"""
    if rows < a.rows or cols < a.cols:
        raise DimensionError(f"cannot pad {a.rows}x{a.cols} down to {rows}x{cols}")
    array = np.zeros((rows, cols), dtype=object)
    array[:a.rows, :a.cols] = a.values
    if identity_fill:
        for i in range(min(a.rows, a.cols), min(rows, cols)):
            array[i, i] = 1
    return MatrixFq(array, a.field)


def truncate(a: MatrixFq, rows: int, cols: int) -> MatrixFq:
    return MatrixFq(a.values[:rows, :cols].copy(), a.field)


def round_up(value: int, multiple: int) -> int:
    return -(-value // multiple) * multiple


class MatrixFile(BaseModel):
    """On-disk matrix: {"q", "rows", "cols", "data"} with row-major data"""
    q: int
    rows: int
    cols: int
    data: List[int]

    @model_validator(mode='after')
    def check_entries(self) -> 'MatrixFile':
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"invalid shape {self.rows}x{self.cols}")
        if len(self.data) != self.rows * self.cols:
            raise ValueError(f"expected {self.rows * self.cols} entries, got {len(self.data)}")
        bad = [v for v in self.data if not 0 <= v < self.q]
        if bad:
            raise ValueError(f"entries outside [0, {self.q}): {bad[:5]}")
        return self

    @classmethod
    def from_matrix(cls, m: MatrixFq) -> 'MatrixFile':
        return cls(q=m.q, rows=m.rows, cols=m.cols, data=m.data)

    def to_matrix(self, field: Union[FieldSpec, None] = None) -> MatrixFq:
        field = field or FieldSpec(self.q)
        if field.q != self.q:
            raise DimensionError(f"field mismatch: file over F_{self.q}, expected F_{field.q}")
        return MatrixFq.from_flat(field, self.rows, self.cols, self.data)


def save_matrix(m: MatrixFq, path: Union[str, Path]):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(MatrixFile.from_matrix(m).model_dump_json(indent=2))


def load_matrix(path: Union[str, Path], field: Union[FieldSpec, None] = None) -> MatrixFq:
    raw = json.loads(Path(path).read_text())
    return MatrixFile.model_validate(raw).to_matrix(field)
