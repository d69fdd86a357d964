"""
Protocol runner: executes a descriptor on a network and collects the artifacts
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, Field

from ..algebra.matrix import MatrixFq, load_matrix
from ..models.network import MessageLog
from ..models.report import CostReport
from ..utils.errors import ParameterError
from .engine import SimNet

logger = logging.getLogger(__name__)


class ProtocolDescriptor(BaseModel):
    """Protocol name, keyword parameters and optional matrix file references"""
    name: str
    params: Dict[str, Any] = Field(default_factory=dict)
    matrices: Dict[str, Union[str, List[str]]] = Field(default_factory=dict)

    @classmethod
    def load(cls, path: Union[str, Path]) -> 'ProtocolDescriptor':
        return cls.model_validate(json.loads(Path(path).read_text()))

    def resolve(self, net: SimNet, base: Optional[Path] = None) -> Dict[str, Any]:
        """Keyword arguments with matrix files loaded over the network's field"""
        kwargs = dict(self.params)
        for key, ref in self.matrices.items():
            paths = [ref] if isinstance(ref, str) else ref
            loaded = [load_matrix((base / p) if base else p, net.field) for p in paths]
            kwargs[key] = loaded[0] if isinstance(ref, str) else loaded
        return kwargs


def run_protocol(net: SimNet, descriptor: Union[ProtocolDescriptor, Dict[str, Any]],
                 **matrices: Any) -> Tuple[Optional[MatrixFq], MessageLog, CostReport]:
    """Run one protocol: returns (result at user, message log, cost report)"""
    from ..protocols import PROTOCOLS

    if isinstance(descriptor, dict):
        descriptor = ProtocolDescriptor.model_validate(descriptor)
    protocol = PROTOCOLS.get(descriptor.name)
    if protocol is None:
        raise ParameterError(f"unknown protocol {descriptor.name!r}; known: {sorted(PROTOCOLS)}")
    kwargs = descriptor.resolve(net)
    kwargs.update(matrices)
    if isinstance(kwargs.get('cfg'), dict):
        from ..protocols.straggler import StragglerConfig
        kwargs['cfg'] = StragglerConfig(**kwargs['cfg'])
    logger.info("Running %s on %d servers", descriptor.name, net.n)
    result = protocol(net, **kwargs)
    return result, net.log, net.cost_report()
