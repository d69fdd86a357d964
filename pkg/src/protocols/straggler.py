"""
Straggler-tolerant secure multiplication with bivariate shares

Servers form N2 groups of N1 = K1 + 2T (own data: K1 + T). The user averages
each complete group to get f(beta_s), a polynomial of degree < K2*K3 whose
coefficient K2*(k-1) + i - 1 is block (i, k) of AB, and interpolates it from
any K2*K3 complete groups.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional

from ..algebra.finite_field import interpolation_matrix, primitive_nth_root
from ..algebra.matrix import BlockGrid, MatrixFq
from ..models.network import NodeId
from ..models.report import StragglerInfo
from ..sharing.bivariate import (default_betas, group_of, key_correction,
                                 make_bivariate_shares_A, make_bivariate_shares_B)
from ..sharing.encoding import share_mul
from ..simulation.engine import SimNet
from ..utils.errors import ParameterError, StragglerUnrecoverableError
from .primitives import require_conformal, require_divisible

logger = logging.getLogger(__name__)


@dataclass
class StragglerConfig:
    k1: int
    k2: int
    k3: int
    t: int
    n2: int
    betas: Optional[List[int]] = None
    own_data: bool = False

    def __post_init__(self):
        if min(self.k1, self.k2, self.k3) < 1 or self.t < 0:
            raise ParameterError(f"invalid partition counts or T: {self}")
        if self.n2 < self.k2 * self.k3:
            raise ParameterError(f"need N2 >= K2*K3 = {self.k2 * self.k3}, got N2={self.n2}")
        if self.betas is not None and len(self.betas) != self.n2:
            raise ParameterError(f"expected {self.n2} evaluation points, got {len(self.betas)}")

    @property
    def n1(self) -> int:
        return self.k1 + (self.t if self.own_data else 2 * self.t)

    @property
    def servers_needed(self) -> int:
        return self.n1 * self.n2

    @property
    def degree_bound(self) -> int:
        return self.k2 * self.k3

    def group_threshold(self) -> int:
        """Responsive servers needed when whole groups are lost"""
        return self.degree_bound * self.n1

    def worst_case_threshold(self, n: Optional[int] = None) -> int:
        """Responsive servers guaranteeing K2*K3 complete groups"""
        n = n or self.servers_needed
        return n - (math.ceil(n / self.n1) - self.degree_bound)

    def to_dict(self) -> Dict:
        return {'k1': self.k1, 'k2': self.k2, 'k3': self.k3, 't': self.t, 'n1': self.n1,
                'n2': self.n2, 'betas': self.betas, 'own_data': self.own_data}


def straggler_sdmm(net: SimNet, a: MatrixFq, b: MatrixFq, cfg: StragglerConfig,
                   failed: Iterable[int] = ()) -> MatrixFq:
    """AB tolerating any failures that leave K2*K3 complete groups"""
    f = net.field
    require_conformal(a, b, 'straggler_sdmm')
    require_divisible(a.rows, cfg.k2, 'rows of A (K2)')
    require_divisible(a.cols, cfg.k1, 'inner dimension (K1)')
    require_divisible(b.cols, cfg.k3, 'columns of B (K3)')
    if net.n < cfg.servers_needed:
        raise ParameterError(f"need N >= N1*N2 = {cfg.servers_needed} servers, network has {net.n}")
    primitive_nth_root(f, cfg.n1)
    if f.q <= cfg.degree_bound:
        raise ParameterError(f"need q > K2*K3 = {cfg.degree_bound}, got q={f.q}")
    betas = cfg.betas if cfg.betas is not None else default_betas(f, cfg.n2)

    failed = set(failed)
    if failed:
        net.inject_stragglers(failed)
    net.register_inputs(a, b)
    owner = NodeId.user() if cfg.own_data else None
    a_shares, a_keys = make_bivariate_shares_A(a, cfg.k1, cfg.k2, cfg.t, cfg.n1, cfg.n2, betas,
                                               net.rng(owner or net.source(1)))
    second = net.source(2 if net.n_sources >= 2 else 1)
    b_shares, b_keys = make_bivariate_shares_B(b, cfg.k1, cfg.k2, cfg.k3, cfg.t, cfg.n1, cfg.n2,
                                               betas, net.rng(owner or second), cfg.own_data)
    net.upload(owner or 1, a_shares)
    net.upload(owner or second, b_shares)
    logger.info("straggler_sdmm: N1=%d, N2=%d, K=(%d,%d,%d), T=%d, failed=%s",
                cfg.n1, cfg.n2, cfg.k1, cfg.k2, cfg.k3, cfg.t, sorted(net.failed))

    # servers beyond N1*N2 stay idle
    active = list(range(1, cfg.servers_needed + 1))
    a_by = {s.server_index: s for s in a_shares}
    b_by = {s.server_index: s for s in b_shares}
    products = net.map_servers(lambda i: share_mul(a_by[i], b_by[i], 'C'), active)
    net.computation_round()
    delivered = net.download(products, 'C')

    received: Dict[int, List] = {}
    for share in delivered:
        received.setdefault(group_of(share.server_index, cfg.n1), []).append(share)
    complete = sorted(s for s, members in received.items() if len(members) == cfg.n1)
    if len(complete) < cfg.degree_bound:
        raise StragglerUnrecoverableError(
            f"insufficient-groups: {len(complete)} complete groups, need K2*K3 = {cfg.degree_bound}")
    used = complete[:cfg.degree_bound]

    n1_inv = f.inv(cfg.n1)
    evaluations = [sum(s.payload.values for s in received[g]) % f.q * n1_inv % f.q for g in used]
    matrix = interpolation_matrix(f, [betas[g - 1] for g in used])
    coeffs = [sum(row[u] * evaluations[u] for u in range(len(used))) % f.q for row in matrix]

    blocks = []
    for i in range(cfg.k2):
        row = []
        for k in range(cfg.k3):
            block = MatrixFq(coeffs[cfg.k2 * k + i], f)
            if cfg.own_data:
                correction = key_correction(a_keys, b_keys, i, k)
                if correction is not None:
                    block = block - correction
            row.append(block)
        blocks.append(tuple(row))
    result = BlockGrid(tuple(blocks)).assemble()

    net.straggler = StragglerInfo(
        failed=sorted(net.failed),
        groups_used=used,
        group_threshold=cfg.group_threshold(),
        worst_case_threshold=cfg.worst_case_threshold(),
    )
    net.register_output(result)
    return result
