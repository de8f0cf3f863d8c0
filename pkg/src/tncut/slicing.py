"""Index slicing: trade one big contraction for 2**n_e small ones.

Pinning a contracted index to each of its two values and summing the
results reproduces the unsliced contraction exactly, so a set of n_e
sliced indices splits the work into 2**n_e independent subtasks whose
largest intermediate drops below a space target.

When the tree has a head/tail first cut, only indices internal to the
head subtree are eligible: the engine sums head subtasks into one head
vector and contracts the tail separately per open-bit block, so a
sliced tail or cut index would break that reuse.  The per-subtask
complexity in the plan is then scoped to the head task, and the tail
cost is reported per open-bit assignment (open indices pinned).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CannotReachCap
from .network import TensorNetwork
from .ordering import (
    Complexity,
    ContractionTree,
    Step,
    complexity_of,
    step_index_sets,
    validate_tree,
)


@dataclass
class SlicePlan:
    sliced_indices: list[int]
    per_subtask: Complexity
    overhead: float
    target_space: int | None = None
    tail_per_assignment: Complexity | None = None

    @property
    def subtask_count(self) -> int:
        return 1 << len(self.sliced_indices)


def _scope(tree: ContractionTree) -> tuple[list[int], list[Step]]:
    """Leaves and steps the slicer optimizes over (head side if cut)."""
    if tree.first_cut is None:
        return list(tree.leaves), list(tree.steps)
    head_leaves, _ = tree.head_tail_leaves()
    return sorted(head_leaves), tree.head_steps()


def _scoped_complexity(
    tn: TensorNetwork,
    leaves: list[int],
    steps: list[Step],
    removed: frozenset[int],
) -> tuple[int, int, dict[int, frozenset[int]]]:
    """(max rank, total multiplications, result sets) over a step list."""
    sets: dict[int, frozenset[int]] = {
        leaf: frozenset(tn.nodes[leaf].indices) - removed for leaf in leaves
    }
    sc = max((len(sets[leaf]) for leaf in leaves), default=0)
    tc = 0
    for s in steps:
        a, b = sets[s.lhs], sets[s.rhs]
        sets[s.out] = a ^ b
        tc += 1 << len(a | b)
        sc = max(sc, len(a ^ b))
    return sc, tc, sets


def select_slices(
    tn: TensorNetwork,
    tree: ContractionTree,
    target_space: int,
    reconfigure: bool = True,
    leaf_limit: int = 60,
) -> tuple[SlicePlan, ContractionTree]:
    """Greedily pick indices to slice until the space target is met.

    Each accepted index is the one whose removal most reduces the
    scoped space complexity (ties: least time overhead, then lowest
    id); when no single index can lower the current maximum, indices
    covering the most maximal tensors are added until it drops.  With
    ``reconfigure`` the worst subtree is greedily rebuilt after every
    added index and the rebuild is kept when it lowers time cost.
    """
    validate_tree(tn, tree)
    leaves, steps = _scope(tree)
    _, base_tc, _ = _scoped_complexity(tn, leaves, steps, frozenset())
    if tree.first_cut is not None:
        head_set = set(leaves)
        candidates = {
            ix
            for ix, eps in tn.index_endpoints.items()
            if len(eps) == 2 and eps[0] in head_set and eps[1] in head_set
        }
    else:
        candidates = {ix for ix, eps in tn.index_endpoints.items() if len(eps) == 2}

    sliced: list[int] = []
    sc, _, sets = _scoped_complexity(tn, leaves, steps, frozenset())

    while sc > target_space:
        if not candidates:
            raise CannotReachCap(
                f"space 2^{sc} > 2^{target_space} with all eligible indices sliced"
            )
        # exact one-index deltas: removing ix drops a tensor's rank (and a
        # step's time exponent) by exactly its membership
        item_sets = [sets[i] for i in leaves] + [sets[s.out] for s in steps]
        ranks = [len(s) for s in item_sets]
        step_info = [
            (len(sets[s.lhs] | sets[s.rhs]), sets[s.lhs] | sets[s.rhs])
            for s in steps
        ]
        best = None
        for ix in sorted(candidates):
            t_sc = max(
                (r - (1 if ix in s else 0) for r, s in zip(ranks, item_sets)),
                default=0,
            )
            t_tc = sum(1 << (e - (1 if ix in u else 0)) for e, u in step_info)
            key = (t_sc, t_tc, ix)
            if best is None or key < best[0]:
                best = (key, ix)
        (t_sc, _, _), pick = best
        if t_sc >= sc:
            # no single index lowers the max; cover the most maximal tensors
            maxed = [s for r, s in zip(ranks, item_sets) if r == sc]
            cover = None
            for ix in sorted(candidates):
                hits = sum(1 for s in maxed if ix in s)
                if hits == 0:
                    continue
                t_tc2 = sum(1 << (e - (1 if ix in u else 0)) for e, u in step_info)
                key = (-hits, t_tc2, ix)
                if cover is None or key < cover[0]:
                    cover = (key, ix)
            if cover is None:
                raise CannotReachCap(
                    f"no eligible index touches the 2^{sc} bottleneck"
                )
            pick = cover[1]
        sliced.append(pick)
        candidates.discard(pick)
        if reconfigure:
            tree = _reconfigure_once(tn, tree, frozenset(sliced), leaf_limit)
            leaves, steps = _scope(tree)
        sc, _, sets = _scoped_complexity(tn, leaves, steps, frozenset(sliced))

    removed = frozenset(sliced)
    h_sc, h_tc, _ = _scoped_complexity(tn, leaves, steps, removed)
    per_subtask = Complexity(tc=h_tc, sc_log2=h_sc, per_step=[])
    plan = SlicePlan(
        sliced_indices=list(sliced),
        per_subtask=per_subtask,
        overhead=((1 << len(sliced)) * h_tc / base_tc) if base_tc else 1.0,
        target_space=target_space,
    )
    if tree.first_cut is not None:
        open_ixs = frozenset(tn.open_output_indices.values())
        tail_leaves = sorted(tree.head_tail_leaves()[1])
        t_sc, t_tc, _ = _scoped_complexity(
            tn, tail_leaves, tree.tail_steps(), open_ixs
        )
        plan.tail_per_assignment = Complexity(tc=t_tc, sc_log2=t_sc, per_step=[])
    complexity_of(tn, tree)  # refresh annotations on the returned tree
    return plan, tree


def _reconfigure_once(
    tn: TensorNetwork,
    tree: ContractionTree,
    sliced: frozenset[int],
    leaf_limit: int,
) -> ContractionTree:
    """Greedy rebuild of the worst subtree; kept only if tc drops."""
    from .ordering import _greedy_steps  # shared greedy pair selection

    leaves, steps = _scope(tree)
    if not steps:
        return tree
    sc, base_tc, sets = _scoped_complexity(tn, leaves, steps, sliced)
    worst = max(steps, key=lambda s: (len(sets[s.out]), s.out))
    cover = tree.subtree_leaves()
    sub_leaves = sorted(cover[worst.out])
    if len(sub_leaves) < 3 or len(sub_leaves) > 2 * leaf_limit:
        return tree

    sub_ids = {worst.out}
    sub_steps = []
    for s in reversed(steps):
        if s.out in sub_ids:
            sub_steps.append(s)
            for side in (s.lhs, s.rhs):
                if side not in cover or len(cover[side]) > 1:
                    sub_ids.add(side)
    sub_ids.discard(worst.out)
    internal = {s.out for s in sub_steps}

    next_out = max(max(tree.leaves), max(s.out for s in tree.steps)) + 1
    rebuilt, _ = _greedy_steps(tn, sub_leaves, next_out)
    if not rebuilt:
        return tree
    # splice: rebuilt root takes over the old subtree root id
    rename = {rebuilt[-1].out: worst.out}
    rebuilt = [
        Step(
            lhs=rename.get(s.lhs, s.lhs),
            rhs=rename.get(s.rhs, s.rhs),
            out=rename.get(s.out, s.out),
        )
        for s in rebuilt
    ]
    new_steps = []
    inserted = False
    for s in tree.steps:
        if s.out in internal:
            if s.out == worst.out and not inserted:
                new_steps.extend(rebuilt)
                inserted = True
            continue
        new_steps.append(s)
    if not inserted:
        return tree
    candidate = ContractionTree(
        leaves=list(tree.leaves),
        steps=new_steps,
        first_cut=(len(new_steps) - 1 if tree.first_cut is not None else None),
        seed=tree.seed,
        constraints=tree.constraints,
    )
    try:
        validate_tree(tn, candidate)
    except Exception:
        return tree
    c_leaves, c_steps = _scope(candidate)
    _, cand_tc, _ = _scoped_complexity(tn, c_leaves, c_steps, sliced)
    if cand_tc < base_tc:
        return candidate
    return tree


def sliced_equivalence_check(
    tn: TensorNetwork, tree: ContractionTree, plan: SlicePlan
) -> float:
    """Max relative deviation of the summed sliced contraction from the
    unsliced one; test-scale networks only."""
    from .engine import contract_tree

    reference = contract_tree(tn, tree, {})
    total = np.zeros_like(reference)
    n_e = len(plan.sliced_indices)
    for mask in range(1 << n_e):
        assignment = {
            ix: (mask >> (n_e - 1 - pos)) & 1
            for pos, ix in enumerate(plan.sliced_indices)
        }
        total = total + contract_tree(tn, tree, assignment)
    denom = np.abs(reference)
    scale = denom.max() if denom.size else 1.0
    if scale == 0:
        scale = 1.0
    return float(np.max(np.abs(total - reference)) / scale)
