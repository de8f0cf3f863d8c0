"""Contraction-order search with a head/tail first cut.

The returned object is a binary contraction tree over network nodes,
stored as a flat list of pairwise steps in execution order.  When the
network has open output indices, the tree's last step (the *first cut*
found by the top-level partition) joins a head subtree holding every
fixed-output node with a tail subtree holding every open-output node,
which is what lets the engine reuse one head contraction across all
open-bit assignments.

Cost model: contracting results A and B, with n_A and n_B exclusive
boundary indices and n_AB shared ones, costs 2**(n_A + n_B + n_AB)
scalar multiplications and produces a rank n_A + n_B result.  All
costs are exact integers.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import random
from dataclasses import dataclass, field

from .errors import BudgetExhausted, InfeasibleCut, TreeNetworkMismatch
from .network import TensorNetwork
from .partition import Adjacency, bipartition


@dataclass(frozen=True)
class Step:
    lhs: int
    rhs: int
    out: int


@dataclass(frozen=True)
class StepCost:
    n_a: int
    n_b: int
    n_ab: int
    out_rank: int

    @property
    def time_cost(self) -> int:
        return 1 << (self.n_a + self.n_b + self.n_ab)

    @property
    def space_cost(self) -> int:
        return 1 << self.out_rank


@dataclass
class Complexity:
    tc: int  # total multiplications, exact
    sc_log2: int  # max result (or leaf) rank
    per_step: list[int]

    @property
    def tc_log2(self) -> float:
        return math.log2(self.tc) if self.tc > 0 else 0.0

    @property
    def sc(self) -> int:
        return 1 << self.sc_log2


@dataclass(frozen=True)
class PartitionConstraints:
    max_space: int | None = None  # log2 cap on any intermediate tensor
    max_time: int | None = None  # log2 cap on one pairwise contraction
    leaf_limit: int = 60
    tail_open_qubits: frozenset[int] | None = None
    max_cut: int | None = None
    rng_seed: int = 0
    restarts: int = 32
    balance: tuple[float, float] = (0.25, 0.75)

    def __post_init__(self):
        if self.leaf_limit < 1:
            raise ValueError("leaf_limit must be >= 1")
        for cap in (self.max_space, self.max_time, self.max_cut):
            if cap is not None and cap <= 0:
                raise ValueError("caps must be positive")

    def doc(self) -> dict:
        return {
            "max_space": self.max_space,
            "max_time": self.max_time,
            "leaf_limit": self.leaf_limit,
            "max_cut": self.max_cut,
            "rng_seed": self.rng_seed,
            "restarts": self.restarts,
            "balance": list(self.balance),
        }


@dataclass
class ContractionTree:
    leaves: list[int]
    steps: list[Step]
    first_cut: int | None = None  # index into steps; lhs subtree = head
    annotations: list[StepCost] | None = None
    seed: int | None = None
    constraints: dict | None = None

    def root_id(self) -> int:
        if not self.steps:
            return self.leaves[0]
        return self.steps[-1].out

    def subtree_leaves(self) -> dict[int, frozenset[int]]:
        cover = {leaf: frozenset([leaf]) for leaf in self.leaves}
        for s in self.steps:
            cover[s.out] = cover[s.lhs] | cover[s.rhs]
        return cover

    def head_tail_leaves(self) -> tuple[frozenset[int], frozenset[int]]:
        if self.first_cut is None:
            return frozenset(), frozenset(self.leaves)
        cover = self.subtree_leaves()
        cut = self.steps[self.first_cut]
        return cover[cut.lhs], cover[cut.rhs]

    def head_steps(self) -> list[Step]:
        """Steps whose results feed the head side of the first cut."""
        if self.first_cut is None:
            return []
        want = {self.steps[self.first_cut].lhs}
        picked = []
        for s in reversed(self.steps[: self.first_cut]):
            if s.out in want:
                picked.append(s)
                want.update((s.lhs, s.rhs))
        return picked[::-1]

    def tail_steps(self) -> list[Step]:
        if self.first_cut is None:
            return list(self.steps)
        want = {self.steps[self.first_cut].rhs}
        picked = []
        for s in reversed(self.steps[: self.first_cut]):
            if s.out in want:
                picked.append(s)
                want.update((s.lhs, s.rhs))
        return picked[::-1]


def validate_tree(tn: TensorNetwork, tree: ContractionTree) -> None:
    if sorted(tree.leaves) != sorted(tn.nodes):
        raise TreeNetworkMismatch("tree leaves do not match network nodes")
    available = set(tree.leaves)
    for s in tree.steps:
        if s.lhs not in available or s.rhs not in available or s.lhs == s.rhs:
            raise TreeNetworkMismatch(f"step {s} uses an unavailable operand")
        if s.out in available:
            raise TreeNetworkMismatch(f"step {s} reuses id {s.out}")
        available.discard(s.lhs)
        available.discard(s.rhs)
        available.add(s.out)
    if len(available) != 1:
        raise TreeNetworkMismatch("contraction does not end in a single result")
    if tree.first_cut is not None and tree.first_cut != len(tree.steps) - 1:
        raise TreeNetworkMismatch("first cut must be the final (root) step")


# ---------------------------------------------------------------------------
# Cost accounting

def step_index_sets(
    tn: TensorNetwork,
    tree: ContractionTree,
    sliced: frozenset[int] = frozenset(),
) -> dict[int, frozenset[int]]:
    """Boundary index set of every leaf and step result, sliced removed."""
    sets: dict[int, frozenset[int]] = {}
    for leaf in tree.leaves:
        sets[leaf] = frozenset(tn.nodes[leaf].indices) - sliced
    for s in tree.steps:
        a, b = sets[s.lhs], sets[s.rhs]
        sets[s.out] = a ^ b  # shared indices contract away
    return sets


def complexity_of(
    tn: TensorNetwork,
    tree: ContractionTree,
    sliced: frozenset[int] = frozenset(),
) -> Complexity:
    """Exact cost annotations for a tree; also refreshes tree.annotations."""
    validate_tree(tn, tree)
    sets = step_index_sets(tn, tree, sliced)
    per_step: list[int] = []
    annotations: list[StepCost] = []
    sc = max((len(sets[leaf]) for leaf in tree.leaves), default=0)
    for s in tree.steps:
        a, b = sets[s.lhs], sets[s.rhs]
        n_ab = len(a & b)
        n_a = len(a) - n_ab
        n_b = len(b) - n_ab
        cost = StepCost(n_a=n_a, n_b=n_b, n_ab=n_ab, out_rank=n_a + n_b)
        annotations.append(cost)
        per_step.append(cost.time_cost)
        sc = max(sc, cost.out_rank)
    if not sliced:
        tree.annotations = annotations
    return Complexity(tc=sum(per_step), sc_log2=sc, per_step=per_step)


def network_adjacency(tn: TensorNetwork) -> Adjacency:
    adj: Adjacency = {nid: {} for nid in tn.nodes}
    for endpoints in tn.index_endpoints.values():
        if len(endpoints) == 2:
            u, v = endpoints
            adj[u][v] = adj[u].get(v, 0) + 1
            adj[v][u] = adj[v].get(u, 0) + 1
    return adj


def _boundary_rank(node_indices: dict[int, list[int]], endpoints, group: set[int]) -> int:
    seen = set()
    rank = 0
    for nid in group:
        for ix in node_indices[nid]:
            if ix in seen:
                continue
            seen.add(ix)
            eps = endpoints[ix]
            if len(eps) == 1 or any(e not in group for e in eps):
                rank += 1
    return rank


# ---------------------------------------------------------------------------
# Greedy leaf orders

def greedy_order(
    tn: TensorNetwork,
    subset: list[int] | None = None,
    next_out: int | None = None,
) -> ContractionTree:
    """Deterministic greedy pairwise order over a node subset.

    Repeatedly contracts the pair minimizing (result size, time cost,
    lowest id pair).  Intended for subgraphs at or below the leaf
    limit; cost is quadratic in the subset size.
    """
    subset = sorted(tn.nodes) if subset is None else sorted(subset)
    start = (max(tn.nodes) + 1) if next_out is None else next_out
    steps, _ = _greedy_steps(tn, subset, start)
    tree = ContractionTree(leaves=list(subset), steps=steps)
    return tree


def _greedy_steps(tn: TensorNetwork, subset: list[int], next_out: int):
    sets: dict[int, frozenset[int]] = {
        nid: frozenset(tn.nodes[nid].indices) for nid in subset
    }
    live = sorted(sets)
    steps: list[Step] = []

    def key(i: int, j: int):
        a, b = sets[i], sets[j]
        return (len(a ^ b), len(a | b), i, j)  # result rank, time exponent

    pairs = {}
    for x, i in enumerate(live):
        for j in live[x + 1:]:
            pairs[(i, j)] = key(i, j)
    while len(live) > 1:
        (i, j) = min(pairs, key=lambda p: pairs[p])
        out = next_out
        next_out += 1
        sets[out] = sets[i] ^ sets[j]
        steps.append(Step(lhs=i, rhs=j, out=out))
        live.remove(i)
        live.remove(j)
        for p in [p for p in pairs if i in p or j in p]:
            del pairs[p]
        for other in live:
            pair = (other, out) if other < out else (out, other)
            pairs[pair] = key(*pair)
        live.append(out)
    return steps, next_out


# ---------------------------------------------------------------------------
# First cut and hierarchical partitioning

def _locked_sets(tn: TensorNetwork) -> tuple[set[int], set[int]]:
    open_nodes = {tn.index_endpoints[ix][0] for ix in tn.open_output_indices.values()}
    fixed_nodes = set(tn.metadata.get("fixed_output_node", {}).values())
    return fixed_nodes - open_nodes, open_nodes


def _min_stcut(adj: Adjacency, locked_head: set[int], locked_tail: set[int]):
    """Exact minimum cut separating the locked sets, smallest tail side.

    The source-reachable side of a max-flow residual graph is the
    minimal source side among minimum cuts, so the flow runs from the
    tail locks to keep the tail small (big head).
    """
    import networkx as nx

    g = nx.Graph()
    for u, nbrs in adj.items():
        g.add_node(u)
        for v, w in nbrs.items():
            if u < v:
                g.add_edge(u, v, capacity=w)
    source, sink = "__tail__", "__head__"
    for u in locked_tail:
        g.add_edge(source, u, capacity=math.inf)
    for u in locked_head:
        g.add_edge(sink, u, capacity=math.inf)
    value, (reach, non_reach) = nx.minimum_cut(g, source, sink)
    tail = {u for u in reach if u not in (source, sink)}
    head = {u for u in non_reach if u not in (source, sink)}
    # disconnected pieces without an open output belong with the head
    for comp in nx.connected_components(g.subgraph(tail)):
        if not (comp & locked_tail):
            head |= comp
            tail -= comp
    return head, tail, int(value)


def find_first_cut(
    tn: TensorNetwork, cons: PartitionConstraints
) -> tuple[set[int], set[int], int]:
    """Head/tail split: tail gets every open-output node, head every
    purely-fixed-output node, minimizing the crossing-index count.

    Candidates come from an exact max-flow cut between the locked sets
    (smallest tail side among minimum cuts) and from the seeded local
    search; the better one wins.  The fixed/open locks mean the exact
    cut is minimal for the stated constraint, but callers should still
    treat the result as best-found.
    """
    locked_head, locked_tail = _locked_sets(tn)
    if not locked_tail:
        raise InfeasibleCut("network has no open output indices")
    all_nodes = set(tn.nodes)
    movable = all_nodes - locked_head - locked_tail
    if not movable and not locked_head:
        return set(), all_nodes, 0  # every node carries an open output
    adj = network_adjacency(tn)
    candidates = []
    if locked_head:
        candidates.append(_min_stcut(adj, locked_head, locked_tail))
    rng = random.Random(cons.rng_seed)
    candidates.append(
        bipartition(
            sorted(all_nodes),
            adj,
            locked_a=locked_head,
            locked_b=locked_tail,
            rng=rng,
            restarts=cons.restarts,
            balance_window=None,
            grow_b=True,
        )
    )
    head, tail, cut = min(candidates, key=lambda c: (c[2], len(c[1])))
    if cons.max_cut is not None and cut > cons.max_cut:
        raise InfeasibleCut(
            f"best cut {cut} exceeds max_cut {cons.max_cut}", best_cut_size=cut
        )
    return head, tail, cut


def cut_indices(tn: TensorNetwork, head: set[int], tail: set[int]) -> list[int]:
    """Indices crossing the head/tail cut, ascending."""
    crossing = []
    for ix, eps in tn.index_endpoints.items():
        if len(eps) == 2:
            in_head = [e in head for e in eps]
            if any(in_head) and not all(in_head):
                crossing.append(ix)
    return sorted(crossing)


class _CapViolation(Exception):
    def __init__(self, stage: str, detail: str):
        self.stage = stage
        self.detail = detail


def hierarchical_partition(
    tn: TensorNetwork, cons: PartitionConstraints
) -> ContractionTree:
    """Big-head contraction tree by recursive bipartition.

    The top split is the first cut; each side is split recursively
    until subgraphs fit the leaf limit, where greedy orders take over.
    Any step breaking the time/space caps causes the enclosing
    bipartition to be retried with a fresh seed, up to the restart
    budget.  Deterministic for a given rng_seed.
    """
    if cons.tail_open_qubits is not None:
        missing = set(cons.tail_open_qubits) - set(tn.open_output_indices)
        if missing:
            raise TreeNetworkMismatch(f"open qubits {sorted(missing)} not open in network")
    try:
        tree = _build_tree(tn, cons, enforce_caps=True)
    except _CapViolation as v:
        best = _build_tree(tn, cons, enforce_caps=False)
        complexity_of(tn, best)
        raise BudgetExhausted(v.stage, best_tree=best, violation=v.detail)
    complexity_of(tn, tree)  # attach annotations
    tree.seed = cons.rng_seed
    tree.constraints = cons.doc()
    return tree


def _build_tree(tn: TensorNetwork, cons: PartitionConstraints, enforce_caps: bool):
    node_indices = {nid: list(node.indices) for nid, node in tn.nodes.items()}
    endpoints = tn.index_endpoints
    adj = network_adjacency(tn)
    rng = random.Random(cons.rng_seed)
    next_out = max(tn.nodes) + 1 if tn.nodes else 0

    def check_step(sets_a: set[int], sets_b: set[int], stage: str):
        if not enforce_caps:
            return
        ra = _boundary_rank(node_indices, endpoints, sets_a)
        rb = _boundary_rank(node_indices, endpoints, sets_b)
        rout = _boundary_rank(node_indices, endpoints, sets_a | sets_b)
        texp = (ra + rb + rout) // 2  # n_a+n_b+n_ab; shared counted once
        if cons.max_space is not None and max(ra, rb, rout) > cons.max_space:
            raise _CapViolation(stage, f"space 2^{max(ra, rb, rout)} over cap")
        if cons.max_time is not None and texp > cons.max_time:
            raise _CapViolation(stage, f"time 2^{texp} over cap")

    def check_fragment(steps: list[Step], leaf_ids: list[int], stage: str):
        if not enforce_caps or (cons.max_space is None and cons.max_time is None):
            return
        sets = {nid: frozenset(node_indices[nid]) for nid in leaf_ids}
        for s in steps:
            a, b = sets[s.lhs], sets[s.rhs]
            out = a ^ b
            sets[s.out] = out
            texp = len(a | b)
            if cons.max_space is not None and len(out) > cons.max_space:
                raise _CapViolation(stage, f"space 2^{len(out)} over cap")
            if cons.max_time is not None and texp > cons.max_time:
                raise _CapViolation(stage, f"time 2^{texp} over cap")

    def recurse(group: list[int], depth: int) -> tuple[list[Step], int]:
        nonlocal next_out
        group = sorted(group)
        if len(group) == 1:
            return [], group[0]
        if len(group) <= cons.leaf_limit:
            steps, root = _greedy_leaf(group)
            return steps, root
        last: _CapViolation | None = None
        group_set = set(group)
        sub_adj = {
            u: {v: w for v, w in adj[u].items() if v in group_set} for u in group
        }
        inner = max(1, min(4, cons.restarts))
        if len(group) > 4 * cons.leaf_limit:  # the big top splits dominate cost
            inner = max(inner, cons.restarts)
        for attempt in range(max(1, cons.restarts)):
            window = cons.balance if attempt < max(1, cons.restarts // 2) else (0.1, 0.9)
            a, b, _ = bipartition(
                group,
                sub_adj,
                locked_a=set(),
                locked_b=set(),
                rng=rng,
                restarts=inner,
                balance_window=window,
            )
            if not a or not b:
                continue
            saved = next_out
            try:
                check_step(a, b, f"depth-{depth} bipartition")
                steps_a, root_a = recurse(sorted(a), depth + 1)
                steps_b, root_b = recurse(sorted(b), depth + 1)
            except _CapViolation as v:
                last = v
                next_out = saved
                continue
            out = next_out
            next_out += 1
            return steps_a + steps_b + [Step(lhs=root_a, rhs=root_b, out=out)], out
        raise last if last is not None else _CapViolation(
            f"depth-{depth}", "no nontrivial bipartition found"
        )

    def _greedy_leaf(group: list[int]) -> tuple[list[Step], int]:
        nonlocal next_out
        steps, next_out = _greedy_steps(tn, group, next_out)
        check_fragment(steps, group, "greedy leaf")
        return steps, steps[-1].out if steps else group[0]

    nodes = sorted(tn.nodes)
    if len(nodes) == 1:
        return ContractionTree(leaves=nodes, steps=[], first_cut=None)

    if tn.open_output_indices:
        head, tail, _ = find_first_cut(tn, cons)
        if head:
            check_step(head, tail, "first cut")
            steps_h, root_h = recurse(sorted(head), 1)
            steps_t, root_t = recurse(sorted(tail), 1)
            out = next_out
            steps = steps_h + steps_t + [Step(lhs=root_h, rhs=root_t, out=out)]
            return ContractionTree(
                leaves=nodes, steps=steps, first_cut=len(steps) - 1
            )
    steps, _ = recurse(nodes, 0)
    return ContractionTree(leaves=nodes, steps=steps, first_cut=None)


def auto_open_qubits(tn_all_open: TensorNetwork, cons: PartitionConstraints,
                     tail_window: tuple[float, float] = (0.02, 0.2)) -> list[int]:
    """Pick open qubits from the tail side of a low-cut top partition.

    Expects a network built with every output open; returns the output
    qubits whose final node falls on the small side of the best cut.
    """
    adj = network_adjacency(tn_all_open)
    nodes = sorted(tn_all_open.nodes)
    rng = random.Random(cons.rng_seed)
    _, tail, _ = bipartition(
        nodes, adj, locked_a=set(), locked_b=set(), rng=rng,
        restarts=cons.restarts, balance_window=tail_window,
    )
    opens = [
        q
        for q, ix in tn_all_open.open_output_indices.items()
        if tn_all_open.index_endpoints[ix][0] in tail
    ]
    if not opens:
        q = min(tn_all_open.open_output_indices)
        opens = [q]
    return sorted(opens)


# ---------------------------------------------------------------------------
# Branch merging

def branch_merge(
    tree: ContractionTree, tn: TensorNetwork, imbalance_threshold: float = 0.01
) -> ContractionTree:
    """Pre-combine small operands so large tensors see fewer, larger steps.

    Chains where a big accumulator repeatedly absorbs tensors smaller
    than ``imbalance_threshold`` times its size are rewritten to merge
    the small operands first.  Returns the input tree unchanged when
    the rewrite does not improve the step-size balance statistic.
    """
    if not tree.steps:
        return tree
    validate_tree(tn, tree)
    sets = step_index_sets(tn, tree)
    children = {s.out: (s.lhs, s.rhs) for s in tree.steps}
    root = tree.root_id()
    protected = set()
    if tree.first_cut is not None:
        protected.add(tree.steps[tree.first_cut].out)

    def size(i: int) -> int:
        return 1 << len(sets[i])

    consumed: set[int] = set()
    rewrites: list[tuple[int, int, list[int]]] = []  # (chain top, spine bottom, smalls)
    for s in reversed(tree.steps):
        if s.out in consumed or s.out in protected:
            continue
        top = s.out
        smalls: list[int] = []
        cur = top
        while cur in children and cur not in protected:
            l, r = children[cur]
            big, small = (l, r) if size(l) >= size(r) else (r, l)
            if big not in children or size(small) > imbalance_threshold * size(big):
                break
            smalls.append(small)
            cur = big
        if len(smalls) >= 2:
            rewrites.append((top, cur, smalls[::-1]))
            stack = [top]
            while stack:
                x = stack.pop()
                if x in children and x != cur:
                    consumed.add(x)
                    stack.extend(children[x])

    if not rewrites:
        return tree

    next_out = max(max(children), max(tree.leaves)) + 1
    for top, bottom, smalls in rewrites:
        # drop the old chain joins, regrow a small-side subtree
        cur = top
        while cur != bottom:
            l, r = children.pop(cur)
            cur = l if size(l) >= size(r) else r
        roots = list(smalls)
        small_sets = {i: sets[i] for i in roots}
        while len(roots) > 1:
            best = None
            for x in range(len(roots)):
                for y in range(x + 1, len(roots)):
                    i, j = roots[x], roots[y]
                    a, b = small_sets[i], small_sets[j]
                    k = (len(a ^ b), len(a | b), i, j)
                    if best is None or k < best[0]:
                        best = (k, i, j)
            _, i, j = best
            out = next_out
            next_out += 1
            small_sets[out] = small_sets[i] ^ small_sets[j]
            sets[out] = small_sets[out]
            children[out] = (i, j)
            roots.remove(i)
            roots.remove(j)
            roots.append(out)
        children[top] = (bottom, roots[0])
        sets[top] = sets[bottom] ^ sets[roots[0]]

    # re-emit steps in post-order
    new_steps: list[Step] = []
    emitted: set[int] = set(tree.leaves)

    def emit(i: int):
        if i in emitted:
            return
        l, r = children[i]
        emit(l)
        emit(r)
        new_steps.append(Step(lhs=l, rhs=r, out=i))
        emitted.add(i)

    emit(root)
    candidate = ContractionTree(
        leaves=list(tree.leaves),
        steps=new_steps,
        first_cut=(len(new_steps) - 1 if tree.first_cut is not None else None),
        seed=tree.seed,
        constraints=tree.constraints,
    )
    validate_tree(tn, candidate)
    if _balance_stat(tn, candidate) <= _balance_stat(tn, tree):
        return tree
    complexity_of(tn, candidate)
    return candidate


def _balance_stat(tn: TensorNetwork, tree: ContractionTree) -> float:
    sets = step_index_sets(tn, tree)
    ratios = []
    for s in tree.steps:
        a, b = 1 << len(sets[s.lhs]), 1 << len(sets[s.rhs])
        ratios.append(min(a, b) / max(a, b))
    return sum(ratios) / len(ratios) if ratios else 1.0


# ---------------------------------------------------------------------------
# Order-file serialization

ORDER_SCHEMA = "tncut-order/1"


def tree_to_doc(
    tree: ContractionTree,
    tn: TensorNetwork | None = None,
    circuit_sha256: str | None = None,
    open_qubits: list[int] | None = None,
    slices: list[int] | None = None,
    subtask: dict | None = None,
) -> dict:
    doc = {
        "schema": ORDER_SCHEMA,
        "leaves": list(tree.leaves),
        "steps": [{"lhs": s.lhs, "rhs": s.rhs, "out": s.out} for s in tree.steps],
        "first_cut": tree.first_cut,
        "seed": tree.seed,
        "constraints": tree.constraints,
    }
    if tree.annotations is not None:
        doc["annotations"] = [dataclasses.asdict(a) for a in tree.annotations]
        tc = sum(a.time_cost for a in tree.annotations)
        doc["tc"] = tc
        doc["tc_log2"] = math.log2(tc) if tc else 0.0
        doc["sc_log2"] = max(
            (a.out_rank for a in tree.annotations),
            default=0,
        )
    if circuit_sha256 is not None:
        doc["circuit_sha256"] = circuit_sha256
    if open_qubits is not None:
        doc["open_qubits"] = sorted(open_qubits)
    if slices is not None:
        doc["slices"] = list(slices)
    if subtask is not None:
        doc["subtask"] = subtask
    return doc


def doc_to_tree(doc: dict) -> ContractionTree:
    if doc.get("schema") != ORDER_SCHEMA:
        raise TreeNetworkMismatch(f"unknown order schema {doc.get('schema')!r}")
    tree = ContractionTree(
        leaves=list(doc["leaves"]),
        steps=[Step(s["lhs"], s["rhs"], s["out"]) for s in doc["steps"]],
        first_cut=doc.get("first_cut"),
        seed=doc.get("seed"),
        constraints=doc.get("constraints"),
    )
    if "annotations" in doc:
        tree.annotations = [StepCost(**a) for a in doc["annotations"]]
    return tree


def dumps_order(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def order_sha256(doc: dict) -> str:
    return hashlib.sha256(dumps_order(doc).encode()).hexdigest()
