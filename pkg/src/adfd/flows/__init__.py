"""Flows: alternating element/connector sequences between two elements.

Two uniqueness disciplines are supported.  ``"elements"`` (the default)
forbids any element from appearing twice, so a flow never returns to its
start.  ``"connectors"`` only forbids reusing a connector and stops the first
time the target is reached, which admits cycles back to the source.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from ..errors import LookupFault
from ..model import ELEMENT, Diagram
from ._kernels import numba_available, walk_paths

ELEMENT_UNIQUE = "elements"
CONNECTOR_UNIQUE = "connectors"
MODES = (ELEMENT_UNIQUE, CONNECTOR_UNIQUE)


@dataclass(frozen=True, order=True)
class Flow:
    sequence: Tuple[str, ...]

    def __post_init__(self):
        if len(self.sequence) < 3 or len(self.sequence) % 2 == 0:
            raise ValueError(f"not an alternating flow sequence: {self.sequence!r}")

    @property
    def elements(self) -> Tuple[str, ...]:
        return self.sequence[0::2]

    @property
    def connectors(self) -> Tuple[str, ...]:
        return self.sequence[1::2]

    def __iter__(self):
        return iter(self.sequence)

    def __len__(self):
        return len(self.sequence)

    def __str__(self) -> str:
        return "(" + ",".join(self.sequence) + ")"


def p_source(flow: Flow) -> str:
    return flow.sequence[0]


def p_target(flow: Flow) -> str:
    return flow.sequence[-1]


def flow_elements(flow: Flow) -> frozenset:
    return frozenset(flow.elements)


def flow_connectors(flow: Flow) -> frozenset:
    return frozenset(flow.connectors)


class FlowGraph:
    """CSR view of a diagram's connectors, built once and reused per query."""

    def __init__(self, diagram: Diagram):
        self.diagram = diagram
        self.nodes: List[str] = sorted(diagram.elements)
        self.index: Dict[str, int] = {n: i for i, n in enumerate(self.nodes)}
        self.edges: List[str] = sorted(diagram.connectors)
        edge_index = {r: i for i, r in enumerate(self.edges)}
        indptr = np.zeros(len(self.nodes) + 1, dtype=np.int64)
        ids, tgts = [], []
        for i, n in enumerate(self.nodes):
            out = diagram.outgoing.get(n, ())
            for r in out:
                ids.append(edge_index[r])
                tgts.append(self.index[diagram.target[r]])
            indptr[i + 1] = indptr[i] + len(out)
        self.indptr = indptr
        self.edge_ids = np.asarray(ids, dtype=np.int64)
        self.edge_tgt = np.asarray(tgts, dtype=np.int64)

    def _node(self, element_id: str) -> int:
        try:
            return self.index[element_id]
        except KeyError:
            raise LookupFault("UNKNOWN_COMPONENT", f"{element_id!r} is not an element id") from None

    def flows(self, src: str, tgt: str, mode: str = ELEMENT_UNIQUE, use_numba=None) -> List[Flow]:
        if mode not in MODES:
            raise ValueError(f"unknown flow uniqueness mode {mode!r}")
        s, t = self._node(src), self._node(tgt)
        edges, offsets = walk_paths(
            self.indptr, self.edge_ids, self.edge_tgt, len(self.nodes), len(self.edges),
            s, t, mode == ELEMENT_UNIQUE, use_numba,
        )
        target = self.diagram.target
        # plain ints: indexing numpy arrays element-wise is slow
        edges, offsets = edges.tolist(), offsets.tolist()
        result = []
        for i in range(len(offsets) - 1):
            seq = [src]
            for e in edges[offsets[i]:offsets[i + 1]]:
                r = self.edges[e]
                seq.append(r)
                seq.append(target[r])
            result.append(Flow(tuple(seq)))
        result.sort()
        return result


def enumerate_flows(diagram: Diagram, src: str, tgt: str, mode: str = ELEMENT_UNIQUE,
                    use_numba=None) -> List[Flow]:
    """All flows from ``src`` to ``tgt`` under ``mode``, sorted by id sequence."""
    for x in (src, tgt):
        if diagram.kind_of.get(x) != ELEMENT:
            raise LookupFault("UNKNOWN_COMPONENT", f"{x!r} is not an element id")
    return FlowGraph(diagram).flows(src, tgt, mode, use_numba)


__all__ = [
    "Flow", "FlowGraph", "enumerate_flows", "p_source", "p_target", "flow_elements",
    "flow_connectors", "ELEMENT_UNIQUE", "CONNECTOR_UNIQUE", "MODES", "numba_available",
]
