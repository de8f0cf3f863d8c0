"""End-to-end orchestration: build, order, slice, run.

Thin glue over the component modules, shared by the CLI and the test
suite.  ``plan`` produces (network, tree, slice plan) for a circuit and
output configuration; ``run_amplitudes`` executes head and tail to an
amplitude table (or a partial head vector for a sub-range of slices).
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import Circuit
from .engine import (
    AmplitudeTable,
    EngineStats,
    HeadVector,
    compute_head_vector,
    compute_tail_amplitudes,
)
from .network import TensorNetwork, build_network
from .ordering import ContractionTree, PartitionConstraints, hierarchical_partition
from .slicing import SlicePlan, select_slices


@dataclass
class RunResult:
    table: AmplitudeTable | None
    partial: HeadVector | None
    tree: ContractionTree
    plan: SlicePlan | None
    stats: EngineStats


def plan(
    circuit: Circuit,
    open_qubits,
    cons: PartitionConstraints | None = None,
    target_space: int | None = None,
    reconfigure: bool = True,
) -> tuple[TensorNetwork, ContractionTree, SlicePlan | None]:
    cons = cons or PartitionConstraints()
    open_qubits = set(open_qubits)
    fixed = {q: 0 for q in circuit.layout.ids if q not in open_qubits}
    tn = build_network(circuit, open_qubits, fixed)
    tree = hierarchical_partition(tn, cons)
    slice_plan = None
    if target_space is not None:
        slice_plan, tree = select_slices(
            tn, tree, target_space, reconfigure=reconfigure,
            leaf_limit=cons.leaf_limit,
        )
    return tn, tree, slice_plan


def run_amplitudes(
    circuit: Circuit,
    open_qubits,
    s1="",
    cons: PartitionConstraints | None = None,
    target_space: int | None = None,
    precision: str = "double",
    mode: str = "fixed",
    slice_range: tuple[int, int] | None = None,
    reconfigure: bool = True,
    stats: EngineStats | None = None,
) -> RunResult:
    stats = stats if stats is not None else EngineStats()
    tn, tree, slice_plan = plan(
        circuit, open_qubits, cons, target_space, reconfigure
    )
    sliced = slice_plan.sliced_indices if slice_plan else []
    head = compute_head_vector(
        tn, tree, sliced, s1 if s1 != "" else None,
        slice_range=slice_range, precision=precision, mode=mode, stats=stats,
    )
    full = (0, 1 << len(sliced))
    if head.slice_range != full:
        return RunResult(table=None, partial=head, tree=tree, plan=slice_plan,
                         stats=stats)
    table = compute_tail_amplitudes(
        tn, tree, head, space_cap=target_space, precision=precision, stats=stats
    )
    return RunResult(table=table, partial=None, tree=tree, plan=slice_plan,
                     stats=stats)
