import networkx as nx
import numpy as np
import pytest

from conftest import oracle_amplitudes
from tncut.circuit import (
    Circuit,
    GateKind,
    GateSpec,
    QubitLayout,
    random_circuit,
)
from tncut.engine import contract_tree
from tncut.errors import ConfigMismatch
from tncut.network import (
    build_network,
    network_from_json,
    network_graph,
    network_to_json,
)
from tncut.ordering import greedy_order


def full_contraction(tn):
    return complex(contract_tree(tn, greedy_order(tn), {}).reshape(()))


def test_empty_circuit_all_fixed_amplitude_one():
    c = Circuit(layout=QubitLayout.linear(3), moments=[])
    tn = build_network(c, set(), {0: 0, 1: 0, 2: 0})
    assert full_contraction(tn) == pytest.approx(1.0)
    # flipping a fixed bit of the identity gives amplitude 0
    tn = build_network(c, set(), {0: 1, 1: 0, 2: 0})
    assert full_contraction(tn) == pytest.approx(0.0)


def test_single_sqrt_x_fixed_zero():
    c = Circuit(layout=QubitLayout.linear(1),
                moments=[[GateSpec(GateKind.SQRT_X, (0,))]])
    tn = build_network(c, set(), {0: 0})
    assert full_contraction(tn) == pytest.approx((1 + 1j) / 2)


def test_config_mismatch():
    c = random_circuit(3, 2, seed=0)
    with pytest.raises(ConfigMismatch):
        build_network(c, {0}, {0: 0, 1: 0, 2: 0})  # overlap
    with pytest.raises(ConfigMismatch):
        build_network(c, {0}, {1: 0})  # q2 unassigned
    with pytest.raises(ConfigMismatch):
        build_network(c, {0}, {1: 0, 2: 2})  # bad bit


def test_node_count_is_two_qubit_gates_plus_chains():
    # qubit 2 gets only single-qubit gates, qubit 3 nothing at all
    moments = [
        [GateSpec(GateKind.SQRT_X, (2,))],
        [GateSpec(GateKind.FSIM, (0, 1), (0.3, 0.4))],
        [GateSpec(GateKind.SQRT_Y, (2,))],
        [GateSpec(GateKind.CZ, (0, 1))],
    ]
    c = Circuit(layout=QubitLayout.linear(4), moments=moments)
    tn = build_network(c, set(), {q: 0 for q in range(4)})
    assert len(tn.nodes) == 2 + 2  # two 2q gates + two chain qubits
    origins = [node.origin for node in tn.nodes.values()]
    assert sum("chain" in o for o in origins) == 2


@pytest.mark.parametrize("seed", range(8))
def test_fusion_preserves_amplitudes(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 7))
    m = int(rng.integers(1, 7))
    c = random_circuit(n, m, seed=seed)
    bits = "".join(str(rng.integers(0, 2)) for _ in range(n))
    tn = build_network(c, set(), {q: int(b) for q, b in zip(range(n), bits)})
    got = full_contraction(tn)
    want = oracle_amplitudes(c, [], bits)[0]
    assert abs(got - want) <= 1e-10 * max(1.0, abs(want))


def test_total_probability_by_enumeration():
    n = 6
    c = random_circuit(n, 5, seed=11)
    total = 0.0
    for mask in range(1 << n):
        bits = {q: (mask >> (n - 1 - q)) & 1 for q in range(n)}
        tn = build_network(c, set(), bits)
        total += abs(full_contraction(tn)) ** 2
    assert total == pytest.approx(1.0, abs=1e-8)


def test_index_endpoints_consistent():
    c = random_circuit(8, 6, seed=5)
    tn = build_network(c, {0, 5}, {q: 0 for q in range(8) if q not in (0, 5)})
    assert tn.index_endpoints == tn.recompute_endpoints()
    # open indices are exactly the dangling ones
    dangling = {ix for ix, eps in tn.index_endpoints.items() if len(eps) == 1}
    assert dangling == set(tn.open_output_indices.values())


def test_repin_same_topology_new_values():
    c = random_circuit(6, 4, seed=9)
    fixed = {q: 0 for q in range(6) if q != 2}
    tn = build_network(c, {2}, fixed)
    other = tn.repin({q: 1 for q in fixed})
    assert [node.indices for node in tn.nodes.values()] == [
        node.indices for node in other.nodes.values()
    ]
    assert tn.repin(dict(fixed)) is tn
    with pytest.raises(ConfigMismatch):
        tn.repin({0: 1})


def test_network_graph_multiedge():
    # two consecutive gates on the same pair share two indices
    moments = [
        [GateSpec(GateKind.FSIM, (0, 1), (0.1, 0.2))],
        [GateSpec(GateKind.CZ, (0, 1))],
    ]
    c = Circuit(layout=QubitLayout.linear(2), moments=moments)
    tn = build_network(c, set(), {0: 0, 1: 0})
    g = network_graph(tn)
    assert g.number_of_nodes() == 2
    assert g.number_of_edges() == 2  # doubled edge


def test_network_graph_disconnected_components():
    moments = [[
        GateSpec(GateKind.FSIM, (0, 1), (0.1, 0.2)),
        GateSpec(GateKind.FSIM, (2, 3), (0.3, 0.4)),
    ]]
    c = Circuit(layout=QubitLayout.linear(4), moments=moments)
    tn = build_network(c, set(), {q: 0 for q in range(4)})
    g = network_graph(tn)
    assert nx.number_connected_components(g) == 2


def test_network_graph_dangling_attribute():
    c = random_circuit(4, 3, seed=2)
    tn = build_network(c, {1}, {0: 0, 2: 0, 3: 0})
    g = network_graph(tn)
    ix = tn.open_output_indices[1]
    owner = tn.index_endpoints[ix][0]
    assert ix in g.nodes[owner]["dangling"]
    assert g.nodes[owner]["weight"] == tn.nodes[owner].rank


def test_json_round_trip():
    c = random_circuit(5, 4, seed=3)
    tn = build_network(c, {0}, {q: 0 for q in range(1, 5)})
    tn2 = network_from_json(network_to_json(tn))
    assert set(tn2.nodes) == set(tn.nodes)
    for nid in tn.nodes:
        assert tn2.nodes[nid].indices == tn.nodes[nid].indices
        assert np.array_equal(tn2.nodes[nid].data, tn.nodes[nid].data)
    assert tn2.open_output_indices == tn.open_output_indices
