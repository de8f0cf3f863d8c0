"""Brute-force Schrodinger simulator, the desk-scale correctness oracle.

Evolves the full state vector moment by moment.  Optimized for obvious
correctness; the only concession to speed is the swappable gate kernel
backend in :mod:`tncut.kernels`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .circuit import Circuit, gate_matrix
from .errors import LengthMismatch, TooManyQubits

DEFAULT_QUBIT_CAP = 26  # 1 GiB of complex128


@dataclass
class StateVector:
    n: int
    data: np.ndarray  # shape (2**n,)


def simulate(c: Circuit, cap: int = DEFAULT_QUBIT_CAP, dtype=np.complex128) -> StateVector:
    """Evolve |0...0> through all moments of the circuit in order."""
    n = c.n
    if n > cap:
        raise TooManyQubits(f"{n} qubits exceeds cap {cap}")
    pos = {q: i for i, q in enumerate(sorted(c.layout.ids))}
    state = np.zeros(2**n, dtype=dtype)
    state[0] = 1.0
    for moment in c.moments:
        for g in moment:
            u = gate_matrix(g)
            if len(g.targets) == 1:
                kernels.apply_1q(state, u, n, pos[g.targets[0]])
            else:
                kernels.apply_2q(state, u, n, pos[g.targets[0]], pos[g.targets[1]])
    return StateVector(n=n, data=state)


def amplitude(sv: StateVector, s) -> complex:
    """Amplitude of bitstring ``s``.

    ``s`` is a 0/1 string or bit sequence in layout order; the qubit at
    layout position k is the k-th most significant bit of the state
    index, matching the engine's output splicing.
    """
    bits = [int(b) for b in s]
    if len(bits) != sv.n:
        raise LengthMismatch(f"bitstring length {len(bits)} != {sv.n} qubits")
    index = 0
    for b in bits:
        index = (index << 1) | b
    return complex(sv.data[index])


def probabilities(sv: StateVector) -> np.ndarray:
    return np.abs(sv.data) ** 2
