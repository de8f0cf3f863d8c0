"""Shared test helpers."""

from __future__ import annotations

import numpy as np
import pytest

from tncut.circuit import Circuit, QubitLayout
from tncut.network import TensorNetwork, TensorNode
from tncut.statevector import simulate


def oracle_amplitudes(circuit, open_qubits, s1_bits):
    """Expected amplitudes for all open-bit assignments, s2 ascending.

    Independent of the engine: full state-vector evolution plus direct
    index arithmetic (qubit k = k-th most significant bit).
    """
    sv = simulate(circuit)
    n = circuit.n
    opens = sorted(open_qubits)
    closed = sorted(q for q in circuit.layout.ids if q not in set(opens))
    if isinstance(s1_bits, str):
        s1_bits = {q: int(b) for q, b in zip(closed, s1_bits)}
    n2 = len(opens)
    out = np.zeros(1 << n2, dtype=complex)
    for mask in range(1 << n2):
        index = 0
        for q in sorted(circuit.layout.ids):
            if q in s1_bits:
                bit = s1_bits[q]
            else:
                bit = (mask >> (n2 - 1 - opens.index(q))) & 1
            index = (index << 1) | bit
        out[mask] = sv.data[index]
    return out


def hand_network(tensors, open_indices=None, fixed_nodes=None):
    """Build a TensorNetwork from (indices, data) pairs directly.

    ``open_indices``: qubit-id -> dangling index id; ``fixed_nodes``:
    qubit-id -> node id carrying an absorbed projection (for lock
    bookkeeping in cut searches).
    """
    nodes = {}
    for nid, (indices, data) in enumerate(tensors):
        nodes[nid] = TensorNode(
            id=nid, indices=list(indices), data=np.asarray(data, dtype=complex),
            origin="test",
        )
    tn = TensorNetwork(
        nodes=nodes,
        index_endpoints={},
        open_output_indices=dict(open_indices or {}),
        fixed_output_bits={q: 0 for q in (fixed_nodes or {})},
        circuit=None,
        metadata={"fixed_output_node": dict(fixed_nodes or {})},
    )
    tn.index_endpoints = tn.recompute_endpoints()
    return tn


def random_matrix_chain(rng, length):
    """Chain of 2x2 tensors sharing consecutive indices."""
    tensors = []
    for i in range(length):
        indices = [i] if i == 0 else [i - 1, i]
        if i == length - 1:
            indices = [i - 1]
        shape = (2,) * len(indices)
        data = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        tensors.append((indices, data))
    return hand_network(tensors)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
