"""
Prime field arithmetic over F_q

Roots of unity, the finite-field DFT used to evaluate share polynomials at the
N-th roots of unity, and Lagrange interpolation at arbitrary points.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple, TypeVar

from sympy import factorint, isprime
from sympy.ntheory import primitive_root

from ..utils.config import get_settings
from ..utils.errors import DimensionError, FieldConditionError, InterpolationError

logger = logging.getLogger(__name__)

# Field elements are canonical Python ints in [0, q)
Fe = int

# dft/idft/interpolation accept scalars or numpy object arrays (entrywise transforms)
V = TypeVar('V')


@dataclass(frozen=True)
class FieldSpec:
    """Prime field F_q with cached primitive roots of unity"""
    q: int
    factors: Optional[Tuple[int, ...]] = None
    root_cache: Dict[int, int] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.q, int) or self.q < 2:
            raise FieldConditionError(f"modulus must be an integer >= 2, got {self.q!r}")
        if self.q >= 2 ** 64:
            raise FieldConditionError(f"modulus {self.q} does not fit in 64 bits")
        if not isprime(self.q):
            raise FieldConditionError(f"modulus {self.q} is not prime")
        if self.factors is None:
            object.__setattr__(self, 'factors', tuple(sorted(factorint(self.q - 1))))

    @cached_property
    def generator(self) -> Fe:
        """Smallest primitive root of q"""
        return int(primitive_root(self.q)) if self.q > 2 else 1

    def element(self, value: int) -> Fe:
        return value % self.q

    def add(self, a: Fe, b: Fe) -> Fe:
        return (a + b) % self.q

    def sub(self, a: Fe, b: Fe) -> Fe:
        return (a - b) % self.q

    def mul(self, a: Fe, b: Fe) -> Fe:
        return (a * b) % self.q

    def neg(self, a: Fe) -> Fe:
        return (-a) % self.q

    def pow(self, a: Fe, e: int) -> Fe:
        return pow(a % self.q, e, self.q)

    def inv(self, a: Fe) -> Fe:
        """Multiplicative inverse (extended Euclid via pow)"""
        if a % self.q == 0:
            raise ZeroDivisionError(f"0 has no inverse in F_{self.q}")
        return pow(a, -1, self.q)

    def divides_order(self, n: int) -> bool:
        """True when F_q contains all n-th roots of unity"""
        return n >= 1 and (self.q - 1) % n == 0


def find_field(n: int, min_q: int, ceiling: Optional[int] = None) -> FieldSpec:
    """Smallest prime q >= max(min_q, n+1) with n | (q-1); caches alpha_n"""
    if n < 1:
        raise FieldConditionError(f"N must be positive, got {n}")
    ceiling = ceiling or get_settings().search_ceiling
    start = max(min_q, n + 1, 2)
    candidate = start + ((1 - start) % n)
    while candidate < ceiling:
        if isprime(candidate):
            spec = FieldSpec(candidate)
            primitive_nth_root(spec, n)
            logger.debug("find_field(N=%d, min_q=%d) -> q=%d", n, min_q, candidate)
            return spec
        candidate += n
    raise FieldConditionError(
        f"search-bound-exceeded: no prime q >= {start} with {n} | q-1 below {ceiling}"
    )


def primitive_nth_root(f: FieldSpec, n: int) -> Fe:
    """alpha_n = g^((q-1)/n) for the smallest primitive root g"""
    cached = f.root_cache.get(n)
    if cached is not None:
        return cached
    if not f.divides_order(n):
        raise FieldConditionError(f"order-not-dividing: {n} does not divide q-1 = {f.q - 1}")
    alpha = pow(f.generator, (f.q - 1) // n, f.q)
    for p in factorint(n):
        if pow(alpha, n // p, f.q) == 1:
            raise FieldConditionError(f"root {alpha} has order below {n} in F_{f.q}")
    f.root_cache[n] = alpha
    return alpha


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def _naive_transform(values: Sequence[V], root: int, q: int) -> List[V]:
    n = len(values)
    powers = [pow(root, k, q) for k in range(n)]
    return [sum(values[l] * powers[(i * l) % n] for l in range(n)) % q for i in range(n)]


def _radix2_transform(values: Sequence[V], root: int, q: int) -> List[V]:
    n = len(values)
    if n == 1:
        return [values[0] % q]
    half = n // 2
    square = root * root % q
    even = _radix2_transform(values[0::2], square, q)
    odd = _radix2_transform(values[1::2], square, q)
    out: List[V] = [None] * n
    w = 1
    for k in range(half):
        t = odd[k] * w % q
        out[k] = (even[k] + t) % q
        out[k + half] = (even[k] - t) % q
        w = w * root % q
    return out


def transform(values: Sequence[V], root: int, q: int, fast: bool = True) -> List[V]:
    """Evaluate sum_l values[l] * root^(i*l) for every i"""
    values = list(values)
    if fast and _is_power_of_two(len(values)):
        return _radix2_transform(values, root, q)
    return _naive_transform(values, root, q)


def _check_length(values: Sequence, size: Optional[int]) -> int:
    n = len(values)
    if n == 0:
        raise DimensionError("length mismatch: empty sequence")
    if size is not None and n != size:
        raise DimensionError(f"length mismatch: expected {size} values, got {n}")
    return n


def dft(f: FieldSpec, coeffs: Sequence[V], size: Optional[int] = None, fast: bool = True) -> List[V]:
    """output[i] = sum_l coeffs[l] * alpha_N^(i*l), i.e. evaluation at alpha_N^i"""
    n = _check_length(coeffs, size)
    return transform(coeffs, primitive_nth_root(f, n), f.q, fast)


def idft(f: FieldSpec, evals: Sequence[V], size: Optional[int] = None, fast: bool = True) -> List[V]:
    """Inverse of dft: coefficients of the polynomial mod (x^N - 1)"""
    n = _check_length(evals, size)
    inverse_root = f.inv(primitive_nth_root(f, n))
    n_inv = f.inv(n)
    return [value * n_inv % f.q for value in transform(evals, inverse_root, f.q, fast)]


def annihilation_sum(f: FieldSpec, n: int, s: int) -> Fe:
    """sum_{i<n} alpha_n^(i*s); zero unless n | s"""
    alpha = primitive_nth_root(f, n)
    return sum(pow(alpha, i * s, f.q) for i in range(n)) % f.q


def evaluate_polynomial(f: FieldSpec, coeffs: Sequence[V], x: Fe) -> V:
    """Horner evaluation of sum_j coeffs[j] x^j"""
    acc = 0
    for c in reversed(list(coeffs)):
        acc = (acc * x + c) % f.q
    return acc


def interpolation_matrix(f: FieldSpec, xs: Sequence[Fe]) -> List[List[Fe]]:
    """M with coeffs = M @ ys for the unique polynomial of degree < len(xs)"""
    xs = [x % f.q for x in xs]
    if len(set(xs)) != len(xs):
        raise InterpolationError(f"duplicate-abscissa in {xs}")
    d = len(xs)
    matrix = [[0] * d for _ in range(d)]
    for i, xi in enumerate(xs):
        numerator = [1]
        denominator = 1
        for m, xm in enumerate(xs):
            if m == i:
                continue
            shifted = [0] * (len(numerator) + 1)
            for k, a in enumerate(numerator):
                shifted[k] = (shifted[k] - xm * a) % f.q
                shifted[k + 1] = (shifted[k + 1] + a) % f.q
            numerator = shifted
            denominator = denominator * (xi - xm) % f.q
        scale = f.inv(denominator)
        for j in range(d):
            matrix[j][i] = numerator[j] * scale % f.q
    return matrix


def lagrange_interpolate(f: FieldSpec, points: Sequence[Tuple[Fe, V]], degree_bound: int) -> List[V]:
    """Coefficients c_0..c_{d-1} through the first d points"""
    if degree_bound < 1:
        raise InterpolationError(f"degree bound must be positive, got {degree_bound}")
    xs = [x % f.q for x, _ in points]
    if len(set(xs)) != len(xs):
        raise InterpolationError(f"duplicate-abscissa in {xs}")
    if len(points) < degree_bound:
        raise InterpolationError(
            f"insufficient-points: {len(points)} points for degree bound {degree_bound}"
        )
    used = list(points)[:degree_bound]
    matrix = interpolation_matrix(f, [x for x, _ in used])
    ys = [y for _, y in used]
    return [sum(row[i] * ys[i] for i in range(degree_bound)) % f.q for row in matrix]
