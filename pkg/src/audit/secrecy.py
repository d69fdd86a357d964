"""
Secrecy audits

Exhaustive mode enumerates every key assignment and compares the multiset of
colluder views across inputs; statistical mode samples keys and runs chi-square
tests on the view histograms. Views are computed on int64 tensors, so these
audits are limited to q < 2^24.
"""

import itertools
import logging
from collections import Counter
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.stats import chi2_contingency, chisquare, entropy

from ..algebra.finite_field import FieldSpec, primitive_nth_root
from ..algebra.matrix import MatrixFq, random_matrix
from ..models.report import SecrecyVerdict
from ..models.share import ShareParams, Side
from ..sharing.encoding import encode_with_keys, key_positions
from ..utils.concurrency import map_ordered
from ..utils.config import get_settings
from ..utils.errors import DimensionError, ParameterError, StateSpaceTooLargeError

logger = logging.getLogger(__name__)

Colluders = Union[None, int, Sequence[Sequence[int]]]

MAX_REPORTED_FAILURES = 5


def _field(q: int, n: int) -> FieldSpec:
    f = FieldSpec(q)
    if q >= 2 ** 24:
        raise ParameterError(f"secrecy audits need q < 2^24, got q={q}")
    primitive_nth_root(f, n)
    return f


def _colluder_sets(n: int, t: int, colluders: Colluders) -> List[Tuple[int, ...]]:
    if colluders is None:
        colluders = t
    if isinstance(colluders, int):
        if colluders < 0 or colluders > n:
            raise ParameterError(f"colluder count must be in [0, {n}], got {colluders}")
        if colluders == 0:
            return []
        return list(itertools.combinations(range(1, n + 1), colluders))
    sets = [tuple(sorted(set(s))) for s in colluders]
    for s in sets:
        if not s or s[0] < 1 or s[-1] > n:
            raise ParameterError(f"colluding set {s} is not a non-empty subset of 1..{n}")
    return sets


def _block_elements(dims: Tuple[int, int], k: int, side: Side) -> int:
    rows, cols = dims
    split = cols if side.is_left else rows
    if split % k:
        raise DimensionError(f"indivisible-dimension: {split} is not divisible by K={k}")
    return rows * cols // k


def _enumerate_inputs(f: FieldSpec, dims: Tuple[int, int], limit: int,
                      rng: np.random.Generator) -> List[MatrixFq]:
    """Every matrix of the given shape when there are at most `limit`, else a sample with zero first"""
    rows, cols = dims
    count = f.q ** (rows * cols)
    if count <= limit:
        return [MatrixFq.from_flat(f, rows, cols, list(entries))
                for entries in itertools.product(range(f.q), repeat=rows * cols)]
    sample = [MatrixFq(np.zeros((rows, cols), dtype=object), f)]
    sample += [random_matrix(f, rows, cols, rng) for _ in range(limit - 1)]
    return sample


def _parse_inputs(f: FieldSpec, dims: Tuple[int, int], inputs) -> List[MatrixFq]:
    out = []
    for m in inputs:
        if not isinstance(m, MatrixFq):
            m = MatrixFq.from_rows(f, m)
        if m.shape != tuple(dims):
            raise ParameterError(f"input shape {m.shape} does not match dims {tuple(dims)}")
        out.append(m)
    if len(out) < 2:
        raise ParameterError("secrecy audits compare at least two inputs")
    return out


class _ViewModel:
    """Colluder views as an affine function of the key vector: data part + G . keys"""

    def __init__(self, f: FieldSpec, params: ShareParams, servers: Sequence[int]):
        self.f = f
        self.params = params
        self.servers = list(servers)
        alpha = primitive_nth_root(f, params.n)
        kpos = key_positions(params.n, params.k, params.t, params.side)
        self.key_gen = np.array([[pow(alpha, (i - 1) * p, f.q) for p in kpos] for i in self.servers],
                                dtype=np.int64).reshape(len(self.servers), params.t)

    def data_part(self, m: MatrixFq, block: Tuple[int, int]) -> np.ndarray:
        """(|L|, b) int64 data contribution of every colluder"""
        zeros = [MatrixFq(np.zeros(block, dtype=object), self.f) for _ in range(self.params.t)]
        payloads = encode_with_keys(m, self.params, zeros)
        return np.array([[int(v) for v in payloads[i - 1].values.ravel()] for i in self.servers],
                        dtype=np.int64)

    def views(self, data: np.ndarray, keys: np.ndarray) -> np.ndarray:
        """keys (S, T, b) -> flattened views (S, |L| * b)"""
        q = self.f.q
        mixed = np.einsum('lt,stb->slb', self.key_gen, keys) % q
        return ((mixed + data[None, :, :]) % q).reshape(keys.shape[0], -1)


def _all_keys(q: int, t: int, b: int) -> np.ndarray:
    if t == 0:
        return np.zeros((1, 0, b), dtype=np.int64)
    grid = np.indices((q,) * (t * b), dtype=np.int64).reshape(t * b, -1).T
    return grid.reshape(-1, t, b)


def _block_shape(dims: Tuple[int, int], k: int, side: Side) -> Tuple[int, int]:
    rows, cols = dims
    return (rows, cols // k) if side.is_left else (rows // k, cols)


def secrecy_exhaustive(n: int, k: int, t: int, q: int, dims: Tuple[int, int],
                       side: Side = Side.LEFT, colluders: Colluders = None,
                       inputs: Optional[Iterable] = None,
                       limit: Optional[int] = None) -> SecrecyVerdict:
    """Enumerate all key assignments; views must be uniform and input-independent

    `colluders` is the coalition size (default T) or an explicit list of
    server sets. Passing T + 1 is the negative control.
    """
    settings = get_settings()
    limit = limit or settings.state_space_limit
    f = _field(q, n)
    params = ShareParams(n, k, t, side)
    dims = tuple(dims)
    b = _block_elements(dims, k, side)
    space = q ** (t * b)
    if space > limit:
        raise StateSpaceTooLargeError(
            f"state-space-too-large: q^(T*b) = {q}^{t * b} = {space} key assignments exceeds {limit}")

    rng = np.random.default_rng(settings.seed)
    matrices = _parse_inputs(f, dims, inputs) if inputs is not None else \
        _enumerate_inputs(f, dims, 64, rng)
    sets = _colluder_sets(n, t, colluders)
    keys = _all_keys(q, t, b)
    block = _block_shape(dims, k, side)
    logger.info("Exhaustive secrecy: N=%d K=%d T=%d q=%d, %d key assignments, %d inputs, %d colluding sets",
                n, k, t, q, space, len(matrices), len(sets))

    def audit_set(servers: Tuple[int, ...]) -> Dict:
        model = _ViewModel(f, params, servers)
        view_space = q ** (len(servers) * b)
        reference = None
        uniform = True
        independent = True
        distinct = 0
        for m in matrices:
            uniq, counts = np.unique(model.views(model.data_part(m, block), keys),
                                     axis=0, return_counts=True)
            distinct = len(uniq)
            if len(uniq) != view_space or counts.min() != counts.max():
                uniform = False
            if reference is None:
                reference = (uniq, counts)
            elif not (np.array_equal(reference[0], uniq) and np.array_equal(reference[1], counts)):
                independent = False
        return {'servers': list(servers), 'uniform': uniform, 'input_independent': independent,
                'distinct_views': distinct, 'view_space': view_space}

    results = map_ordered(audit_set, sets, settings.max_workers)
    failures = [r for r in results if not (r['uniform'] and r['input_independent'])]
    passed = not failures
    if passed:
        logger.info("Exhaustive secrecy passed on %d colluding sets", len(sets))
    else:
        logger.info("Exhaustive secrecy failed on %d of %d colluding sets", len(failures), len(sets))
    evidence = {
        'side': side.value,
        'key_assignments': space,
        'inputs': len(matrices),
        'colluding_sets': len(sets),
        'coalition_size': len(sets[0]) if sets else 0,
        'vacuous': not sets,
        'failures': failures[:MAX_REPORTED_FAILURES],
        'failure_count': len(failures),
    }
    return SecrecyVerdict(n, k, t, q, dims, 'exhaustive', passed, evidence)


def secrecy_statistical(n: int, k: int, t: int, q: int, dims: Tuple[int, int],
                        side: Side = Side.LEFT, colluders: Colluders = None,
                        inputs: Optional[Iterable] = None, samples: Optional[int] = None,
                        alpha: Optional[float] = None, seed: Optional[int] = None) -> SecrecyVerdict:
    """Sampled keys; chi-square uniformity per input and a contingency test across inputs

    The significance level is Bonferroni-corrected over all tests run.
    """
    settings = get_settings()
    samples = samples or settings.statistical_samples
    alpha = alpha if alpha is not None else settings.chi2_alpha
    seed = settings.seed if seed is None else seed
    f = _field(q, n)
    params = ShareParams(n, k, t, side)
    dims = tuple(dims)
    b = _block_elements(dims, k, side)
    block = _block_shape(dims, k, side)
    rng = np.random.default_rng(seed)
    matrices = _parse_inputs(f, dims, inputs) if inputs is not None else \
        [MatrixFq(np.zeros(dims, dtype=object), f), random_matrix(f, dims[0], dims[1], rng)]
    sets = _colluder_sets(n, t, colluders)

    tests = max(1, len(sets) * (len(matrices) + 1))
    level = alpha / tests
    logger.info("Statistical secrecy: N=%d K=%d T=%d q=%d, %d samples per input, %d colluding sets",
                n, k, t, q, samples, len(sets))

    results = []
    for servers in sets:
        model = _ViewModel(f, params, servers)
        view_space = q ** (len(servers) * b)
        if view_space > settings.state_space_limit:
            raise StateSpaceTooLargeError(
                f"state-space-too-large: {view_space} view categories for coalition {servers}")
        radix = q ** np.arange(len(servers) * b, dtype=np.int64)
        histograms = []
        for m in matrices:
            keys = rng.integers(0, q, size=(samples, t, b), dtype=np.int64)
            codes = model.views(model.data_part(m, block), keys) @ radix
            histograms.append(np.bincount(codes, minlength=view_space))
        p_uniform = [float(chisquare(h).pvalue) for h in histograms]
        table = np.array(histograms)
        table = table[:, table.sum(axis=0) > 0]
        p_independent = float(chi2_contingency(table).pvalue) if table.shape[1] > 1 else 1.0
        results.append({'servers': list(servers), 'p_uniform': p_uniform,
                        'p_independent': p_independent,
                        'pass': min(p_uniform) > level and p_independent > level})

    failures = [r for r in results if not r['pass']]
    evidence = {
        'side': side.value,
        'samples_per_input': samples,
        'inputs': len(matrices),
        'colluding_sets': len(sets),
        'alpha': alpha,
        'corrected_alpha': level,
        'vacuous': not sets,
        'min_p_uniform': min((min(r['p_uniform']) for r in results), default=None),
        'min_p_independent': min((r['p_independent'] for r in results), default=None),
        'failures': failures[:MAX_REPORTED_FAILURES],
        'failure_count': len(failures),
    }
    return SecrecyVerdict(n, k, t, q, dims, 'statistical', not failures, evidence)


def _uniform_sum_distribution(q: int, terms: int) -> np.ndarray:
    """Counts of sum of `terms` independent uniform elements of F_q"""
    dist = np.zeros(q, dtype=object)
    dist[0] = 1
    for _ in range(terms):
        nxt = np.zeros(q, dtype=object)
        for shift in range(q):
            nxt += np.roll(dist, shift)
        dist = nxt
    return dist


def _mutual_information(distributions: Sequence[Counter]) -> float:
    """I(input; view) in bits for a uniform prior over the inputs"""
    support = sorted(set().union(*distributions))
    joint = np.array([[float(Fraction(d.get(v, 0), sum(d.values()))) for v in support]
                      for d in distributions])
    marginal = joint.mean(axis=0)
    conditional = float(np.mean([entropy(row, base=2) for row in joint]))
    return max(0.0, float(entropy(marginal, base=2)) - conditional)


DEFAULT_USER_INPUTS = ((2, 3), (3, 2), (0, 3), (3, 0), (1, 0))


def secrecy_user_exhaustive(n: int, t: int, q: int,
                            inputs: Optional[Sequence[Tuple[int, int]]] = None,
                            usersecure: bool = True,
                            limit: Optional[int] = None) -> SecrecyVerdict:
    """User's view of 1x1 products, grouped by C = ab

    Input keys are enumerated exactly. The re-sharing keys enter only through
    their N^-1-scaled sums, whose distribution is computed in closed form.
    """
    settings = get_settings()
    limit = limit or settings.state_space_limit
    f = _field(q, n)
    lp = ShareParams(n, 1, t, Side.LEFT)
    rp = ShareParams(n, 1, t, Side.RIGHT)
    space = q ** (2 * t) * (q ** t if usersecure else 1)
    if space > limit:
        raise StateSpaceTooLargeError(f"state-space-too-large: {space} assignments exceeds {limit}")
    inputs = list(inputs) if inputs is not None else list(DEFAULT_USER_INPUTS)

    alpha = primitive_nth_root(f, n)
    n_inv = f.inv(n)
    rekey_pos = key_positions(n, 1, t, Side.LEFT)
    rekey_dist = _uniform_sum_distribution(q, n)
    scaled = np.zeros(q, dtype=object)
    for v in range(q):
        scaled[v * n_inv % q] = rekey_dist[v]

    def scalar(v: int) -> MatrixFq:
        return MatrixFq.from_rows(f, [[v]])

    def view_distribution(a: int, b: int) -> Counter:
        dist: Counter = Counter()
        for r_keys in itertools.product(range(q), repeat=t):
            left = encode_with_keys(scalar(a), lp, [scalar(r) for r in r_keys])
            for s_keys in itertools.product(range(q), repeat=t):
                right = encode_with_keys(scalar(b), rp, [scalar(s) for s in s_keys])
                products = [int((x @ y).values[0, 0]) for x, y in zip(left, right)]
                if not usersecure:
                    dist[tuple(products)] += 1
                    continue
                constant = sum(products) * n_inv % q
                for rho in itertools.product(range(q), repeat=t):
                    weight = 1
                    for r in rho:
                        weight *= scaled[r]
                    if not weight:
                        continue
                    view = tuple((constant + sum(r * pow(alpha, (j - 1) * p, q)
                                                 for r, p in zip(rho, rekey_pos))) % q
                                 for j in range(1, n + 1))
                    dist[view] += weight
        return dist

    groups: Dict[int, List[Tuple[int, int]]] = {}
    for a, b in inputs:
        groups.setdefault(a * b % q, []).append((a % q, b % q))

    logger.info("User secrecy: N=%d T=%d q=%d, %s, %d product groups",
                n, t, q, 'with re-sharing' if usersecure else 'raw products', len(groups))
    report = []
    for c, pairs in sorted(groups.items()):
        dists = [view_distribution(a, b) for a, b in pairs]
        identical = all(d == dists[0] for d in dists[1:])
        mi = _mutual_information(dists) if len(dists) > 1 else 0.0
        report.append({'product': c, 'inputs': [list(p) for p in pairs],
                       'identical': identical, 'mutual_information_bits': mi})

    passed = all(g['identical'] for g in report)
    evidence = {'usersecure': usersecure, 'assignments_per_input': space, 'groups': report}
    return SecrecyVerdict(n, 1, t, q, (1, 1), 'exhaustive', passed, evidence)


def constant_term_pairs(n: int, k: int, t: int, right_side: Side = Side.RIGHT) -> List[Tuple[str, str]]:
    """Left/right coefficient pairs whose exponents sum to 0 mod N

    Works on raw parameters, so placements that ShareParams would reject can
    be inspected.
    """
    if right_side not in (Side.RIGHT, Side.RIGHT_OWN_DATA):
        raise ParameterError(f"right side must be right or right-own-data, got {right_side.value}")
    left = [(f'A{l + 1}', l % n) for l in range(k)] + [(f'R{s + 1}', (k + s) % n) for s in range(t)]
    right = [(f'B{l + 1}', (-l) % n) for l in range(k)]
    offset = k + t if right_side == Side.RIGHT else k
    right += [(f'S{s + 1}', (-(offset + s)) % n) for s in range(t)]
    return [(a, b) for a, x in left for b, y in right if (x + y) % n == 0]


def aliasing_leaks(n: int, k: int, t: int, right_side: Side = Side.RIGHT) -> List[Tuple[str, str]]:
    """Constant-term pairs other than A_l B_l (and R S pairs the data owner subtracts)"""
    leaks = []
    for a, b in constant_term_pairs(n, k, t, right_side):
        if a[0] == 'A' and b[0] == 'B' and a[1:] == b[1:]:
            continue
        if right_side == Side.RIGHT_OWN_DATA and a[0] == 'R' and b[0] == 'S':
            continue
        leaks.append((a, b))
    return leaks
