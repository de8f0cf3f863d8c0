"""Tensor network construction from circuits.

A circuit plus an output configuration (which qubits stay open, which
are fixed to a bit) becomes a tensor network whose full contraction is
the amplitude <s1;s2|U|0...0>.  All bond dimensions are 2.  During the
build every single-qubit gate is fused into an adjacent two-qubit gate
(into the next one on its qubit line when there is one, otherwise
backward into the previous), initial states are absorbed as rank-1
pinnings, and fixed output qubits are absorbed as basis projections, so
the surviving nodes are one tensor per two-qubit gate plus one small
tensor per qubit line that never meets a two-qubit gate.

Index ids are globally unique integers assigned in circuit order, which
keeps node ids and index ids reproducible for golden files.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .circuit import Circuit, gate_matrix
from .errors import ConfigMismatch


@dataclass
class TensorNode:
    id: int
    indices: list[int]  # one per axis, creation order
    data: np.ndarray  # shape (2,) * len(indices)
    origin: str = ""

    @property
    def rank(self) -> int:
        return len(self.indices)


@dataclass
class TensorNetwork:
    nodes: dict[int, TensorNode]
    index_endpoints: dict[int, tuple[int, ...]]
    open_output_indices: dict[int, int]  # open qubit id -> dangling index id
    fixed_output_bits: dict[int, int]  # closed qubit id -> bit
    circuit: Circuit | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def n_open(self) -> int:
        return len(self.open_output_indices)

    def node_ids(self) -> list[int]:
        return list(self.nodes)

    def recompute_endpoints(self) -> dict[int, tuple[int, ...]]:
        eps: dict[int, list[int]] = {}
        for node in self.nodes.values():
            for ix in node.indices:
                eps.setdefault(ix, []).append(node.id)
        return {ix: tuple(ids) for ix, ids in eps.items()}

    def repin(self, fixed_bits: dict[int, int]) -> "TensorNetwork":
        """Rebuild with different fixed output bits, same topology.

        The build is deterministic, so node and index ids are identical
        and any contraction tree for this network stays valid.
        """
        if set(fixed_bits) != set(self.fixed_output_bits):
            raise ConfigMismatch("fixed-bit qubit set differs from the network's")
        if dict(fixed_bits) == self.fixed_output_bits:
            return self
        if self.circuit is None:
            raise ConfigMismatch("network has no source circuit to rebuild from")
        return build_network(self.circuit, set(self.open_output_indices), fixed_bits)


class _NodeBuilder:
    """Tensor plus aligned index-id list with axis-level editing."""

    def __init__(self, data: np.ndarray, ids: list):
        self.data = data
        self.ids = ids  # index id, or None while unresolved

    def axis_of(self, pos_id) -> int:
        return self.ids.index(pos_id)

    def apply_input(self, axis: int, m: np.ndarray):
        # contract gate input leg with m's output: new leg is m's input
        out = np.tensordot(self.data, m, axes=([axis], [0]))
        self.data = np.moveaxis(out, -1, axis)

    def apply_output(self, axis: int, m: np.ndarray):
        # multiply m onto an output leg: new leg is m's output
        out = np.tensordot(self.data, m, axes=([axis], [1]))
        self.data = np.moveaxis(out, -1, axis)

    def pin_vector(self, axis: int, v: np.ndarray):
        self.data = np.tensordot(self.data, v, axes=([axis], [0]))
        del self.ids[axis]

    def pin_basis(self, axis: int, bit: int):
        self.data = np.take(self.data, bit, axis=axis)
        del self.ids[axis]


_I2 = np.eye(2, dtype=complex)
_E0 = np.array([1.0, 0.0], dtype=complex)


def build_network(
    c: Circuit,
    open_qubits: set[int],
    fixed_bits: dict[int, int],
) -> TensorNetwork:
    """Build the fused tensor network for one output configuration."""
    layout_ids = set(c.layout.ids)
    open_qubits = set(open_qubits)
    if (open_qubits | set(fixed_bits)) != layout_ids or (open_qubits & set(fixed_bits)):
        raise ConfigMismatch("open set and fixed bits must partition the layout")
    for q, b in fixed_bits.items():
        if b not in (0, 1):
            raise ConfigMismatch(f"fixed bit for qubit {q} must be 0 or 1")

    pending: dict[int, np.ndarray] = {q: _I2 for q in layout_ids}
    # wire per qubit: ("initial",) before the first two-qubit gate,
    # else (index id, node id) for the live output leg
    wires: dict[int, tuple] = {q: ("initial",) for q in layout_ids}
    builders: dict[int, _NodeBuilder] = {}
    origins: dict[int, str] = {}
    next_index = 0
    next_node = 0

    for moment_index, moment in enumerate(c.moments):
        for g in moment:
            if len(g.targets) == 1:
                q = g.targets[0]
                pending[q] = gate_matrix(g) @ pending[q]
                continue
            q0, q1 = g.targets
            nb = _NodeBuilder(gate_matrix(g).reshape(2, 2, 2, 2), ["o0", "o1", "i0", "i1"])
            for slot, q in ((0, q0), (1, q1)):
                m = pending[q]
                if m is not _I2:
                    nb.apply_input(nb.axis_of(f"i{slot}"), m)
                    pending[q] = _I2
            for slot, q in ((0, q0), (1, q1)):
                ax = nb.axis_of(f"i{slot}")
                wire = wires[q]
                if wire[0] == "initial":
                    nb.pin_vector(ax, _E0)
                else:
                    nb.ids[ax] = wire[1]
            for slot, q in ((0, q0), (1, q1)):
                nb.ids[nb.axis_of(f"o{slot}")] = next_index
                wires[q] = ("wire", next_index, next_node)
                next_index += 1
            builders[next_node] = nb
            origins[next_node] = f"moment {moment_index}"
            next_node += 1

    # close out each qubit line: trailing single-qubit fusion, then open
    # legs stay dangling and fixed legs are projected away
    open_output_indices: dict[int, int] = {}
    fixed_output_node: dict[int, int] = {}
    for q in sorted(layout_ids):
        wire = wires[q]
        m = pending[q]
        if wire[0] == "initial":
            # no two-qubit gate ever touched this qubit
            vec = m @ _E0
            if q in open_qubits:
                nb = _NodeBuilder(vec.copy(), [next_index])
                open_output_indices[q] = next_index
                next_index += 1
            else:
                nb = _NodeBuilder(np.array(vec[fixed_bits[q]]), [])
                fixed_output_node[q] = next_node
            builders[next_node] = nb
            origins[next_node] = f"qubit {q} chain"
            next_node += 1
            continue
        _, index_id, node_id = wire
        nb = builders[node_id]
        ax = nb.axis_of(index_id)
        if m is not _I2:
            nb.apply_output(ax, m)
        if q in open_qubits:
            open_output_indices[q] = index_id
        else:
            nb.pin_basis(ax, fixed_bits[q])
            fixed_output_node[q] = node_id

    nodes = {
        # reshape guards the 0-d case: ascontiguousarray promotes () to (1,)
        nid: TensorNode(
            id=nid,
            indices=list(nb.ids),
            data=np.ascontiguousarray(nb.data).reshape(nb.data.shape),
            origin=origins[nid],
        )
        for nid, nb in builders.items()
    }
    tn = TensorNetwork(
        nodes=nodes,
        index_endpoints={},
        open_output_indices=open_output_indices,
        fixed_output_bits=dict(fixed_bits),
        circuit=c,
        metadata={
            "open_qubits": sorted(open_qubits),
            "fixed_output_node": fixed_output_node,
        },
    )
    tn.index_endpoints = tn.recompute_endpoints()
    return tn


def network_graph(tn: TensorNetwork) -> nx.MultiGraph:
    """Connectivity graph: one vertex per node, one edge per shared index.

    Vertex weight is log2 of the tensor size (= rank); dangling indices
    are listed in the ``dangling`` vertex attribute.
    """
    g = nx.MultiGraph()
    for node in tn.nodes.values():
        g.add_node(node.id, weight=node.rank, dangling=[])
    for ix, endpoints in tn.index_endpoints.items():
        if len(endpoints) == 2:
            g.add_edge(endpoints[0], endpoints[1], key=ix)
        else:
            g.nodes[endpoints[0]]["dangling"].append(ix)
    return g


# ---------------------------------------------------------------------------
# Debug serialization (not a stability-guaranteed format)

def network_to_json(tn: TensorNetwork) -> str:
    doc = {
        "nodes": [
            {
                "id": node.id,
                "indices": node.indices,
                "origin": node.origin,
                "shape": list(node.data.shape),
                "data_b64": base64.b64encode(
                    np.ascontiguousarray(node.data, dtype=np.complex128).tobytes()
                ).decode(),
            }
            for node in tn.nodes.values()
        ],
        "open_output_indices": {str(k): v for k, v in tn.open_output_indices.items()},
        "fixed_output_bits": {str(k): v for k, v in tn.fixed_output_bits.items()},
    }
    return json.dumps(doc, sort_keys=True)


def network_from_json(text: str) -> TensorNetwork:
    doc = json.loads(text)
    nodes = {}
    for nd in doc["nodes"]:
        data = np.frombuffer(
            base64.b64decode(nd["data_b64"]), dtype=np.complex128
        ).reshape(nd["shape"])
        nodes[nd["id"]] = TensorNode(
            id=nd["id"], indices=list(nd["indices"]), data=data.copy(), origin=nd["origin"]
        )
    tn = TensorNetwork(
        nodes=nodes,
        index_endpoints={},
        open_output_indices={int(k): v for k, v in doc["open_output_indices"].items()},
        fixed_output_bits={int(k): v for k, v in doc["fixed_output_bits"].items()},
    )
    tn.index_endpoints = tn.recompute_endpoints()
    return tn
