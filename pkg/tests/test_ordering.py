import itertools
import json
import random

import numpy as np
import pytest

from conftest import hand_network
from tncut.circuit import random_circuit
from tncut.engine import EngineStats, contract_tree
from tncut.errors import BudgetExhausted, InfeasibleCut, TreeNetworkMismatch
from tncut.network import build_network
from tncut.ordering import (
    ContractionTree,
    PartitionConstraints,
    Step,
    branch_merge,
    complexity_of,
    cut_indices,
    doc_to_tree,
    dumps_order,
    find_first_cut,
    greedy_order,
    hierarchical_partition,
    step_index_sets,
    tree_to_doc,
    validate_tree,
)


def random_valid_tree(tn, seed):
    """Random pair-merge order over the network's nodes."""
    rr = random.Random(seed)
    live = sorted(tn.nodes)
    steps = []
    next_out = max(live) + 1
    while len(live) > 1:
        i, j = sorted(rr.sample(live, 2))
        steps.append(Step(lhs=i, rhs=j, out=next_out))
        live.remove(i)
        live.remove(j)
        live.append(next_out)
        next_out += 1
    return ContractionTree(leaves=sorted(tn.nodes), steps=steps)


def naive_multiplication_count(tn, tree, sliced=frozenset()):
    """Count scalar multiplications of a literal loop-based contraction."""
    sets = {nid: [ix for ix in tn.nodes[nid].indices if ix not in sliced]
            for nid in tree.leaves}
    count = 0
    for s in tree.steps:
        a, b = sets[s.lhs], sets[s.rhs]
        shared = [ix for ix in a if ix in b]
        out = [ix for ix in a if ix not in b] + [ix for ix in b if ix not in a]
        # one multiplication per (output assignment, shared assignment)
        for _ in itertools.product((0, 1), repeat=len(out)):
            for _ in itertools.product((0, 1), repeat=len(shared)):
                count += 1
        sets[s.out] = out
    return count


# ---------------------------------------------------------------------------
# complexity accounting

def test_two_matrices_sharing_one_index():
    tn = hand_network([([0, 1], np.eye(2)), ([1, 2], np.eye(2))])
    tree = ContractionTree(leaves=[0, 1], steps=[Step(0, 1, 2)])
    comp = complexity_of(tn, tree)
    assert comp.per_step == [8]  # n_A = n_B = n_AB = 1
    assert comp.tc == 8
    assert comp.sc_log2 == 2
    ann = tree.annotations[0]
    assert (ann.n_a, ann.n_b, ann.n_ab) == (1, 1, 1)


def test_single_leaf_tree():
    tn = hand_network([([0, 1], np.eye(2))])
    tree = ContractionTree(leaves=[0], steps=[])
    comp = complexity_of(tn, tree)
    assert comp.tc == 0
    assert comp.sc_log2 == 2  # the leaf itself


@pytest.mark.parametrize("seed", range(6))
def test_tc_equals_naive_multiplication_count(seed):
    c = random_circuit(5, 3, seed=seed)
    tn = build_network(c, {0}, {q: 0 for q in range(1, 5)})
    tree = random_valid_tree(tn, seed)
    comp = complexity_of(tn, tree)
    assert comp.tc == naive_multiplication_count(tn, tree)


def test_tc_equals_engine_instrumentation_sliced():
    c = random_circuit(6, 4, seed=2)
    tn = build_network(c, {1}, {q: 0 for q in range(6) if q != 1})
    tree = random_valid_tree(tn, 3)
    sliced = sorted(ix for ix, eps in tn.index_endpoints.items()
                    if len(eps) == 2)[:2]
    comp = complexity_of(tn, tree, frozenset(sliced))
    stats = EngineStats()
    contract_tree(tn, tree, {ix: 0 for ix in sliced}, stats=stats)
    assert stats.multiplications == comp.tc
    assert comp.tc == naive_multiplication_count(tn, tree, frozenset(sliced))


def test_validate_tree_errors():
    tn = hand_network([([0], np.ones(2)), ([0], np.ones(2))])
    with pytest.raises(TreeNetworkMismatch):
        validate_tree(tn, ContractionTree(leaves=[0], steps=[]))
    with pytest.raises(TreeNetworkMismatch):
        validate_tree(
            tn, ContractionTree(leaves=[0, 1], steps=[Step(0, 0, 2)])
        )
    with pytest.raises(TreeNetworkMismatch):
        validate_tree(tn, ContractionTree(leaves=[0, 1], steps=[]))


# ---------------------------------------------------------------------------
# greedy orders

def test_greedy_single_node():
    tn = hand_network([([0], np.ones(2))])
    tree = greedy_order(tn)
    assert tree.steps == []
    assert tree.root_id() == 0


def test_greedy_chain_contracts_end_pair_first():
    # chain a-b-c: an end pair gives a rank-1 result, the middle pair rank-2
    tn = hand_network([
        ([0], np.ones(2)),          # a: one shared index
        ([0, 1], np.eye(2)),        # b
        ([1], np.ones(2)),          # c
    ])
    tree = greedy_order(tn)
    first = tree.steps[0]
    assert {first.lhs, first.rhs} in ({0, 1}, {1, 2})


def exhaustive_best_tc(tn):
    """Optimal total cost over all contraction trees (subset DP)."""
    nodes = sorted(tn.nodes)
    index_sets = {1 << i: frozenset(tn.nodes[nid].indices)
                  for i, nid in enumerate(nodes)}
    best = {mask: 0 for mask in index_sets}
    full = (1 << len(nodes)) - 1
    for mask in range(1, full + 1):
        if mask in best and bin(mask).count("1") == 1:
            continue
        sub = (mask - 1) & mask
        cand = None
        while sub:
            rest = mask ^ sub
            if rest and sub < rest:  # each split once
                a, b = index_sets.get(sub), index_sets.get(rest)
                if a is not None and b is not None and sub in best and rest in best:
                    cost = best[sub] + best[rest] + (1 << len(a | b))
                    if cand is None or cost < cand:
                        cand = cost
                        index_sets[mask] = a ^ b
            sub = (sub - 1) & mask
        if cand is not None:
            best[mask] = cand
    return best[full]


def test_greedy_within_factor_of_optimal():
    c = random_circuit(4, 2, seed=8)
    tn = build_network(c, set(), {q: 0 for q in range(4)})
    assert len(tn.nodes) <= 8
    tree = greedy_order(tn)
    greedy_tc = complexity_of(tn, tree).tc
    best_tc = exhaustive_best_tc(tn)
    assert greedy_tc <= 16 * best_tc


# ---------------------------------------------------------------------------
# first cut

def test_first_cut_path_network():
    # t0 - t1 - ... - t5, open output index on t5
    tensors = []
    for i in range(6):
        ids = [i - 1, i] if i > 0 else [i]
        tensors.append((ids, np.ones((2,) * len(ids))))
    tensors[5] = ([4, 99], np.ones((2, 2)))  # dangling open index 99
    tn = hand_network(tensors, open_indices={0: 99}, fixed_nodes={1: 0})
    cons = PartitionConstraints(rng_seed=0, restarts=4, max_cut=1)
    head, tail, n_c = find_first_cut(tn, cons)
    assert tail == {5}
    assert head == {0, 1, 2, 3, 4}
    assert n_c == 1


def exhaustive_min_cut(tn, locked_tail_nodes):
    nodes = sorted(tn.nodes)
    best = None
    for mask in range(1, 1 << len(nodes)):
        tail = {nodes[i] for i in range(len(nodes)) if (mask >> i) & 1}
        if not locked_tail_nodes <= tail or tail == set(nodes):
            continue
        head = set(nodes) - tail
        n_c = len(cut_indices(tn, head, tail))
        if best is None or n_c < best:
            best = n_c
    return best


def test_first_cut_grid_matches_exhaustive():
    # 3x3 grid of tensors, open output on one corner
    idx = {}
    counter = 0
    for r in range(3):
        for c in range(3):
            if c < 2:
                idx[(r, c, "h")] = counter
                counter += 1
            if r < 2:
                idx[(r, c, "v")] = counter
                counter += 1
    tensors = []
    for r in range(3):
        for c in range(3):
            ids = []
            if c < 2:
                ids.append(idx[(r, c, "h")])
            if c > 0:
                ids.append(idx[(r, c - 1, "h")])
            if r < 2:
                ids.append(idx[(r, c, "v")])
            if r > 0:
                ids.append(idx[(r - 1, c, "v")])
            tensors.append((ids, np.ones((2,) * len(ids))))
    tensors[8] = (tensors[8][0] + [999], np.ones((2,) * (len(tensors[8][0]) + 1)))
    tn = hand_network(tensors, open_indices={0: 999}, fixed_nodes={1: 0})
    cons = PartitionConstraints(rng_seed=1, restarts=8, max_cut=2)
    head, tail, n_c = find_first_cut(tn, cons)
    assert 8 in tail
    assert n_c <= 2
    assert n_c == exhaustive_min_cut(tn, {8})


def test_first_cut_infeasible():
    # two nodes joined by three parallel indices: any cut crosses all three
    tn = hand_network(
        [([0, 1, 2], np.ones((2, 2, 2))), ([0, 1, 2, 9], np.ones((2,) * 4))],
        open_indices={0: 9},
        fixed_nodes={1: 0},
    )
    with pytest.raises(InfeasibleCut) as e:
        find_first_cut(tn, PartitionConstraints(rng_seed=0, restarts=2, max_cut=1))
    assert e.value.best_cut_size == 3


# ---------------------------------------------------------------------------
# hierarchical partitioning

def test_small_network_single_greedy_order():
    c = random_circuit(4, 2, seed=4)
    tn = build_network(c, set(), {q: 0 for q in range(4)})
    cons = PartitionConstraints(rng_seed=0, restarts=2)
    tree = hierarchical_partition(tn, cons)
    reference = greedy_order(tn)
    assert tree.steps == reference.steps
    assert tree.first_cut is None


def test_space_cap_respected():
    c = random_circuit(10, 6, seed=6)
    tn = build_network(c, {0, 9}, {q: 0 for q in range(1, 9)})
    assert len(tn.nodes) >= 25
    cons = PartitionConstraints(rng_seed=0, restarts=8, max_space=14,
                                leaf_limit=8)
    tree = hierarchical_partition(tn, cons)
    comp = complexity_of(tn, tree)
    assert comp.sc_log2 <= 14
    for ann in tree.annotations:
        assert ann.out_rank <= 14


def test_budget_exhausted_carries_best_tree():
    c = random_circuit(10, 8, seed=0)
    tn = build_network(c, {0}, {q: 0 for q in range(1, 10)})
    cons = PartitionConstraints(rng_seed=0, restarts=3, max_space=3,
                                leaf_limit=4)
    with pytest.raises(BudgetExhausted) as e:
        hierarchical_partition(tn, cons)
    best = e.value.best_tree
    assert best is not None
    validate_tree(tn, best)
    assert complexity_of(tn, best).tc > 0


def test_first_cut_property_and_determinism():
    c = random_circuit(9, 7, seed=13)
    opens = {2, 6}
    tn = build_network(c, opens, {q: 0 for q in range(9) if q not in opens})
    cons = PartitionConstraints(rng_seed=5, restarts=4)
    docs = []
    for _ in range(2):
        tree = hierarchical_partition(tn, cons)
        head, tail = tree.head_tail_leaves()
        open_nodes = {tn.index_endpoints[ix][0]
                      for ix in tn.open_output_indices.values()}
        assert open_nodes <= set(tail)
        fixed_nodes = set(tn.metadata["fixed_output_node"].values()) - open_nodes
        assert fixed_nodes <= set(head)
        docs.append(dumps_order(tree_to_doc(tree, circuit_sha256=c.sha256(),
                                            open_qubits=sorted(opens))))
    assert docs[0] == docs[1]


def test_order_doc_round_trip():
    c = random_circuit(7, 5, seed=3)
    tn = build_network(c, {1}, {q: 0 for q in range(7) if q != 1})
    tree = hierarchical_partition(tn, PartitionConstraints(rng_seed=2, restarts=3))
    doc = tree_to_doc(tree, circuit_sha256=c.sha256(), open_qubits=[1])
    doc2 = json.loads(dumps_order(doc))
    tree2 = doc_to_tree(doc2)
    assert tree2.steps == tree.steps
    assert tree2.leaves == tree.leaves
    assert tree2.first_cut == tree.first_cut
    assert tree2.annotations == tree.annotations


# ---------------------------------------------------------------------------
# branch merging

def test_branch_merge_balanced_tree_unchanged():
    tn = hand_network([
        ([0, 1], np.eye(2)), ([0, 1], np.eye(2)),
        ([2, 3], np.eye(2)), ([2, 3], np.eye(2)),
    ])
    tree = ContractionTree(
        leaves=[0, 1, 2, 3],
        steps=[Step(0, 1, 4), Step(2, 3, 5), Step(4, 5, 6)],
    )
    assert branch_merge(tree, tn, 0.5) is tree


def test_branch_merge_rewrites_absorption_chain():
    # one big rank-6 tensor absorbing three rank-1 tensors one by one
    big_ids = [0, 1, 2, 3, 4, 5]
    tensors = [(big_ids, np.ones((2,) * 6))]
    for i in range(3):
        tensors.append(([i], np.asarray([1.0, 0.5])))
    tn = hand_network(tensors)
    tree = ContractionTree(
        leaves=[0, 1, 2, 3],
        steps=[Step(0, 1, 4), Step(4, 2, 5), Step(5, 3, 6)],
    )
    before = contract_tree(tn, tree, {})
    merged = branch_merge(tree, tn, imbalance_threshold=0.3)
    assert merged is not tree
    validate_tree(tn, merged)
    sets = step_index_sets(tn, merged)
    # the three small tensors now combine before touching the big one
    joins_with_big = [s for s in merged.steps if 0 in (s.lhs, s.rhs)]
    assert len(joins_with_big) == 1
    after = contract_tree(tn, merged, {})
    assert np.allclose(before, after, rtol=1e-10)


@pytest.mark.parametrize("seed", range(4))
def test_branch_merge_preserves_results(seed):
    c = random_circuit(8, 5, seed=seed)
    opens = {0, 7}
    tn = build_network(c, opens, {q: 0 for q in range(8) if q not in opens})
    tree = hierarchical_partition(tn, PartitionConstraints(rng_seed=seed,
                                                           restarts=3))
    merged = branch_merge(tree, tn, imbalance_threshold=0.3)
    validate_tree(tn, merged)
    a = contract_tree(tn, tree, {})
    b = contract_tree(tn, merged, {})
    scale = np.max(np.abs(a))
    assert np.max(np.abs(a - b)) <= 1e-10 * max(scale, 1e-30)
    if merged is not tree:
        assert merged.first_cut == len(merged.steps) - 1
