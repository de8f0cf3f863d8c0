"""tncut: batch amplitude simulation of quantum circuits.

Contracts the circuit's tensor network along an order whose top split
separates a head (all fixed output qubits) from a tail (all open
ones), so one head contraction serves every open-bit assignment.
"""

__version__ = "0.1.0"

from .circuit import (
    Circuit,
    GateKind,
    GateSpec,
    QubitLayout,
    gate_matrix,
    parse_circuit,
    random_circuit,
    serialize_circuit,
    to_qsim_text,
    validate_circuit,
)
from .network import TensorNetwork, TensorNode, build_network, network_graph
from .ordering import (
    Complexity,
    ContractionTree,
    PartitionConstraints,
    branch_merge,
    complexity_of,
    find_first_cut,
    greedy_order,
    hierarchical_partition,
)
from .slicing import SlicePlan, select_slices, sliced_equivalence_check
from .engine import (
    AmplitudeTable,
    EngineStats,
    HeadVector,
    compute_head_vector,
    compute_tail_amplitudes,
    contract_tree,
    flop_estimate,
    reduce_partials,
)
from .statevector import StateVector, amplitude, simulate
from .analytics import (
    XebReport,
    histogram,
    marginal_and_conditional,
    mixed_xeb,
    porter_thomas_density,
    postselect_curve,
    xeb,
)
from .pipeline import RunResult, run_amplitudes

__all__ = [name for name in dir() if not name.startswith("_")]
