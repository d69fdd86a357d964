"""
Network data models: node identities, phases, messages and the message log
"""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Iterator, List, Optional


class NodeKind(str, Enum):
    SOURCE = 'source'
    SERVER = 'server'
    USER = 'user'


# Stream codes for RNG derivation; stable across releases
KIND_CODES = {NodeKind.SOURCE: 1, NodeKind.SERVER: 2, NodeKind.USER: 3}


@dataclass(frozen=True, order=True)
class NodeId:
    """A source (1..Gamma), a server (1..N) or the user (index 0)"""
    kind: NodeKind
    index: int = 0

    @classmethod
    def source(cls, gamma: int) -> 'NodeId':
        return cls(NodeKind.SOURCE, gamma)

    @classmethod
    def server(cls, i: int) -> 'NodeId':
        return cls(NodeKind.SERVER, i)

    @classmethod
    def user(cls) -> 'NodeId':
        return cls(NodeKind.USER, 0)

    @property
    def is_server(self) -> bool:
        return self.kind == NodeKind.SERVER

    def __str__(self) -> str:
        return 'user' if self.kind == NodeKind.USER else f'{self.kind.value}{self.index}'


class Phase(str, Enum):
    SHARING = 'sharing'
    COMPUTATION = 'computation'
    COMMUNICATION = 'communication'
    RECONSTRUCTION = 'reconstruction'


@dataclass(frozen=True)
class Message:
    """One logged transmission; size counts field elements"""
    frm: NodeId
    to: NodeId
    round: int
    phase: Phase
    size: int
    payload: Any = None
    tag: str = ''

    def to_dict(self) -> Dict:
        return {
            'from': str(self.frm),
            'to': str(self.to),
            'round': self.round,
            'phase': self.phase.value,
            'size': self.size,
            'tag': self.tag,
        }


class MessageLog:
    """Append-only transcript of every delivered message"""

    def __init__(self):
        self._entries: List[Message] = []

    def append(self, message: Message):
        self._entries.append(message)

    @property
    def entries(self) -> List[Message]:
        return list(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[Message]:
        return iter(self._entries)

    def filter(self, phase: Optional[Phase] = None, to: Optional[NodeId] = None,
               frm: Optional[NodeId] = None) -> List[Message]:
        return [m for m in self._entries
                if (phase is None or m.phase == phase)
                and (to is None or m.to == to)
                and (frm is None or m.frm == frm)]

    def total_symbols(self, phase: Optional[Phase] = None) -> int:
        return sum(m.size for m in self._entries if phase is None or m.phase == phase)

    def fingerprint(self) -> List[tuple]:
        """Sizes, routing and payload contents, for determinism checks"""
        out = []
        for m in self._entries:
            data = tuple(m.payload.data) if hasattr(m.payload, 'data') else None
            out.append((str(m.frm), str(m.to), m.round, m.phase.value, m.size, m.tag, data))
        return out

    def to_dict(self) -> List[Dict]:
        return [m.to_dict() for m in self._entries]


@dataclass(frozen=True)
class AdversaryView:
    """What a colluding set L received: shares plus inter-server messages from outside L"""
    colluders: frozenset
    shares: tuple
    messages: tuple

    @property
    def is_empty(self) -> bool:
        return not self.shares and not self.messages

    def to_dict(self) -> Dict:
        return {
            'colluders': sorted(self.colluders),
            'shares': [m.to_dict() for m in self.shares],
            'messages': [m.to_dict() for m in self.messages],
        }
