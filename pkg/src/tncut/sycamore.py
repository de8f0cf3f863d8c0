"""The 53-qubit Sycamore device and supremacy-style instances.

Qubits sit on a diamond-shaped patch of a square grid (54 sites, one
inoperable), numbered 0..52 in (row, column) order to match the
released circuit data.  Couplers are the grid-adjacent pairs; the 86 of
them split into four disjoint matchings A-D that the two-qubit layers
activate in the ABCDCDAB sequence.  Single-qubit layers draw from the
three square-root gates, never repeating on a qubit in consecutive
layers, and each coupler keeps one calibrated-looking (theta, phi)
pair for all of its FSIM gates.

The generator reproduces the published instance's structure (gate
counts, layer pattern, layout), not its exact gate values, which are
device calibration data.
"""

from __future__ import annotations

import math

import numpy as np

from .circuit import Circuit, GateKind, GateSpec, QubitLayout

_ROWS = [
    (0, 5, 2),
    (1, 4, 4),
    (2, 3, 6),
    (3, 2, 8),
    (4, 1, 9),
    (5, 0, 9),
    (6, 1, 7),
    (7, 2, 5),
    (8, 3, 3),
    (9, 4, 1),
]
_DEAD = (2, 8)  # the inoperable site of the 54-qubit grid


def qubit_coords() -> list[tuple[int, int]]:
    coords = []
    for row, start, width in _ROWS:
        for col in range(start, start + width):
            if (row, col) != _DEAD:
                coords.append((row, col))
    return sorted(coords)


def couplers() -> list[tuple[int, int]]:
    coords = qubit_coords()
    index = {rc: i for i, rc in enumerate(coords)}
    pairs = []
    for (r, c), i in index.items():
        for nb in ((r + 1, c), (r, c + 1)):
            if nb in index:
                pairs.append((i, index[nb]))
    return sorted(pairs)


def coupler_pattern(a: tuple[int, int], b: tuple[int, int]) -> str:
    """A/B: vertical couplers on even/odd diagonals; C/D: horizontal."""
    (r1, c1), (r2, c2) = sorted((a, b))
    vertical = r2 == r1 + 1
    even = (r1 + c1) % 2 == 0
    if vertical:
        return "A" if even else "B"
    return "D" if even else "C"


def patterns() -> dict[str, list[tuple[int, int]]]:
    coords = qubit_coords()
    out: dict[str, list[tuple[int, int]]] = {"A": [], "B": [], "C": [], "D": []}
    for i, j in couplers():
        out[coupler_pattern(coords[i], coords[j])].append((i, j))
    return out

# Open output qubits used for the published 20-cycle run (the lower-left
# block of the diamond in the 0..52 numbering).
OPEN_QUBITS_M20 = (
    11, 12, 13, 19, 20, 21, 22, 23, 28, 29, 30, 31, 32,
    37, 38, 39, 40, 41, 44, 45, 46,
)

_SQRT_GATES = (GateKind.SQRT_X, GateKind.SQRT_Y, GateKind.SQRT_W)


def sycamore_circuit(cycles: int, seed: int = 0, sequence: str = "ABCDCDAB") -> Circuit:
    """Supremacy-style circuit on the 53-qubit layout.

    Each cycle is a single-qubit layer plus one FSIM layer following
    ``sequence``; a final single-qubit layer precedes measurement.
    """
    coords = qubit_coords()
    n = len(coords)
    pats = patterns()
    rng = np.random.default_rng(seed)
    # per-coupler calibration: theta near pi/2, phi near pi/6
    angles = {
        pair: (
            math.pi / 2 + rng.uniform(-0.1, 0.1),
            math.pi / 6 + rng.uniform(-0.1, 0.1),
        )
        for pair in couplers()
    }
    moments: list[list[GateSpec]] = []
    last = [-1] * n

    def single_layer():
        layer = []
        for q in range(n):
            choices = [k for k in range(3) if k != last[q]]
            pick = choices[rng.integers(len(choices))]
            last[q] = pick
            layer.append(GateSpec(_SQRT_GATES[pick], (q,)))
        return layer

    for cycle in range(cycles):
        moments.append(single_layer())
        pat = sequence[cycle % len(sequence)]
        moments.append(
            [
                GateSpec(GateKind.FSIM, pair, angles[pair])
                for pair in pats[pat]
            ]
        )
    moments.append(single_layer())
    return Circuit(
        layout=QubitLayout.linear(n),
        moments=moments,
        metadata={
            "device": "sycamore53",
            "sequence": sequence,
            "seed": seed,
            "cycles": cycles,
        },
    )
