"""
Simulated Network Engine
Runs sources, servers and the user in synchronous rounds with symbol accounting
"""

import logging
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Set, Union

import numpy as np

from ..algebra.finite_field import FieldSpec
from ..algebra.matrix import MatrixFq
from ..models.network import (KIND_CODES, AdversaryView, Message, MessageLog, NodeId,
                              Phase)
from ..models.report import CostReport, RoundCounter, StragglerInfo
from ..models.share import Share
from ..utils.concurrency import map_ordered
from ..utils.config import get_settings
from ..utils.errors import ParameterError

logger = logging.getLogger(__name__)


class SimNet:
    """Gamma sources, N servers and one user connected by reliable links"""

    def __init__(self, field: FieldSpec, n_servers: int, n_sources: int = 1, seed: int = 0,
                 max_workers: Optional[int] = None):
        if n_servers < 2:
            raise ParameterError(f"need at least 2 servers, got N={n_servers}")
        if n_sources < 1:
            raise ParameterError(f"need at least 1 source, got {n_sources}")
        self.field = field
        self.n = n_servers
        self.n_sources = n_sources
        self.seed = seed
        self.max_workers = max_workers or get_settings().max_workers
        self.reset()

    def reset(self):
        """Reset transcript, counters and RNG streams"""
        self.log = MessageLog()
        self.counter = RoundCounter()
        self.round = 0
        self.failed: Set[int] = set()
        self.input_symbols = 0
        self.output_symbols = 0
        self.interserver_per_server: List[Fraction] = []
        self.straggler: Optional[StragglerInfo] = None
        self.user_state: Dict[str, object] = {}
        self._streams: Dict[NodeId, np.random.Generator] = {}

    @property
    def servers(self) -> List[int]:
        return list(range(1, self.n + 1))

    def rng(self, node: NodeId) -> np.random.Generator:
        """Counter-based stream owned by one node, derived from the run seed"""
        stream = self._streams.get(node)
        if stream is None:
            seq = np.random.SeedSequence(self.seed, spawn_key=(KIND_CODES[node.kind], node.index))
            stream = np.random.Generator(np.random.Philox(seq))
            self._streams[node] = stream
        return stream

    def inject_stragglers(self, failed: Iterable[int]):
        failed = set(failed)
        unknown = failed - set(self.servers)
        if unknown:
            raise ParameterError(f"unknown servers {sorted(unknown)} (N={self.n})")
        self.failed = failed
        if failed:
            logger.info("Stragglers injected: %s", sorted(failed))

    def register_inputs(self, *matrices: MatrixFq):
        self.input_symbols += sum(m.size for m in matrices)

    def register_output(self, matrix: MatrixFq):
        self.output_symbols += matrix.size

    def send(self, frm: NodeId, to: NodeId, payload: MatrixFq, phase: Phase,
             tag: str = '') -> Optional[MatrixFq]:
        """Deliver and log one payload; None when dropped by a straggler"""
        if frm == to:
            # local hand-off, never on a link
            return payload
        if phase == Phase.RECONSTRUCTION and frm.is_server and frm.index in self.failed:
            return None
        self.log.append(Message(frm, to, self.round, phase, payload.size, payload, tag))
        return payload

    def source(self, gamma: int) -> NodeId:
        if not 1 <= gamma <= self.n_sources:
            raise ParameterError(f"source {gamma} does not exist (Gamma={self.n_sources})")
        return NodeId.source(gamma)

    def upload(self, sender: Union[int, NodeId], shares: Sequence[Share]) -> Dict[int, Share]:
        """Sharing phase: a source (or the data-owning user) sends share i to server i"""
        source = sender if isinstance(sender, NodeId) else self.source(sender)
        delivered = {}
        for share in sorted(shares, key=lambda s: s.server_index):
            self.send(source, NodeId.server(share.server_index), share.payload, Phase.SHARING,
                      share.object_tag)
            delivered[share.server_index] = share
        logger.debug("%s uploaded %d shares of %s", source, len(delivered),
                     shares[0].object_tag if shares else '-')
        return delivered

    def computation_round(self):
        self.counter.tick_computation()
        self.round += 1

    def exchange(self, outgoing: Dict[int, Sequence[Share]], normalizer: int = 1,
                 tag: str = '') -> Dict[int, List[Share]]:
        """Communication phase: outgoing[i][j-1] goes from server i to server j.

        Returns incoming[j], ordered by sender. The per-server cost of the
        round is recorded as symbols sent by the busiest server / normalizer.
        """
        self.round += 1
        self.counter.tick_communication()
        incoming: Dict[int, List[Share]] = {j: [] for j in self.servers}
        sent: Dict[int, int] = {}
        for i in sorted(outgoing):
            for j, share in enumerate(outgoing[i], start=1):
                self.send(NodeId.server(i), NodeId.server(j), share.payload, Phase.COMMUNICATION,
                          tag or share.object_tag)
                if i != j:
                    sent[i] = sent.get(i, 0) + share.size
                incoming[j].append(share)
        busiest = max(sent.values()) if sent else 0
        self.interserver_per_server.append(Fraction(busiest, normalizer))
        logger.debug("Exchange round %d: %d symbols per server", self.round, busiest)
        return incoming

    def download(self, shares: Sequence[Share], tag: str = '') -> List[Share]:
        """Reconstruction phase: servers send to the user; stragglers drop out"""
        self.round += 1
        user = NodeId.user()
        delivered = []
        for share in sorted(shares, key=lambda s: s.server_index):
            if self.send(NodeId.server(share.server_index), user, share.payload,
                         Phase.RECONSTRUCTION, tag or share.object_tag) is not None:
                delivered.append(share)
        return delivered

    def map_servers(self, fn: Callable[[int], object], servers: Optional[Sequence[int]] = None) -> List:
        """Run a per-server computation; results in server order"""
        return map_ordered(fn, servers if servers is not None else self.servers, self.max_workers)

    def cost_report(self) -> CostReport:
        return CostReport(
            upload_symbols=self.log.total_symbols(Phase.SHARING),
            download_symbols=self.log.total_symbols(Phase.RECONSTRUCTION),
            interserver_symbols=self.log.total_symbols(Phase.COMMUNICATION),
            input_symbols=self.input_symbols,
            output_symbols=self.output_symbols,
            rounds=self.counter.computation,
            communication_rounds=self.counter.communication,
            interserver_per_server=list(self.interserver_per_server),
            straggler=self.straggler,
        )


def build_network(gamma: int, n: int, field: FieldSpec, seed: int = 0,
                  max_workers: Optional[int] = None) -> SimNet:
    net = SimNet(field, n, gamma, seed, max_workers)
    logger.debug("Network built: %d sources, %d servers over F_%d (seed=%d)", gamma, n, field.q, seed)
    return net


def inject_stragglers(net: SimNet, failed: Iterable[int]):
    net.inject_stragglers(failed)


def extract_adversary_view(log: MessageLog, colluders: Iterable[int]) -> AdversaryView:
    """Shares and inter-server messages received by L, sent from outside L"""
    colluders = frozenset(colluders)
    shares = tuple(m for m in log
                   if m.phase == Phase.SHARING and m.to.is_server and m.to.index in colluders)
    messages = tuple(m for m in log
                     if m.phase == Phase.COMMUNICATION and m.to.index in colluders
                     and m.to.is_server and m.frm.index not in colluders)
    return AdversaryView(colluders, shares, messages)
