import numpy as np
import pytest

from tncut import kernels
from tncut.circuit import (
    Circuit,
    GateKind,
    GateSpec,
    QubitLayout,
    gate_matrix,
    random_circuit,
)
from tncut.errors import LengthMismatch, TooManyQubits
from tncut.statevector import amplitude, probabilities, simulate


def test_empty_circuit_unit_vector():
    c = Circuit(layout=QubitLayout.linear(3), moments=[])
    sv = simulate(c)
    expected = np.zeros(8)
    expected[0] = 1
    assert np.array_equal(sv.data, expected)


def test_single_sqrt_x():
    c = Circuit(layout=QubitLayout.linear(1),
                moments=[[GateSpec(GateKind.SQRT_X, (0,))]])
    sv = simulate(c)
    assert np.allclose(sv.data, [(1 + 1j) / 2, (1 - 1j) / 2], atol=1e-15)


def test_norm_preserved_random_circuit():
    c = random_circuit(12, 10, seed=7)
    sv = simulate(c)
    assert abs(np.linalg.norm(sv.data) - 1.0) < 1e-12


def test_norm_preserved_after_every_moment():
    c = random_circuit(6, 5, seed=3)
    partial = Circuit(layout=c.layout, moments=[])
    for moment in c.moments:
        partial.moments.append(moment)
        sv = simulate(partial)
        assert abs(np.linalg.norm(sv.data) - 1.0) < 1e-10


def test_qubit_cap():
    c = Circuit(layout=QubitLayout.linear(8), moments=[])
    with pytest.raises(TooManyQubits):
        simulate(c, cap=6)


def test_amplitude_indexing():
    c = Circuit(layout=QubitLayout.linear(3), moments=[])
    sv = simulate(c)
    assert amplitude(sv, "000") == 1
    assert amplitude(sv, "001") == 0
    with pytest.raises(LengthMismatch):
        amplitude(sv, "00")


@pytest.mark.parametrize("k", range(4))
def test_bit_order_single_x(k):
    # sqrt(X)^2 = X on qubit k flips exactly the k-th most significant bit
    n = 4
    gates = [GateSpec(GateKind.SQRT_X, (k,))]
    c = Circuit(layout=QubitLayout.linear(n), moments=[gates, gates])
    sv = simulate(c)
    bits = ["0"] * n
    bits[k] = "1"
    assert abs(amplitude(sv, "".join(bits))) == pytest.approx(1.0, abs=1e-12)


def test_probabilities_sum_to_one():
    c = random_circuit(8, 6, seed=2)
    assert probabilities(simulate(c)).sum() == pytest.approx(1.0, abs=1e-10)


def _apply_1q_reference(state, gate, n, k):
    psi = state.reshape((2,) * n)
    out = np.tensordot(gate, psi, axes=([1], [k]))
    return np.moveaxis(out, 0, k).reshape(-1)


def _apply_2q_reference(state, gate, n, k0, k1):
    psi = state.reshape((2,) * n)
    g = gate.reshape(2, 2, 2, 2)
    out = np.tensordot(g, psi, axes=([2, 3], [k0, k1]))
    return np.moveaxis(out, [0, 1], [k0, k1]).reshape(-1)


@pytest.mark.parametrize("n,k", [(3, 0), (3, 2), (5, 1)])
def test_kernel_1q_matches_reference(rng, n, k):
    state = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    gate = gate_matrix(GateSpec(GateKind.SQRT_W, (0,)))
    expected = _apply_1q_reference(state.copy(), gate, n, k)
    got = kernels.apply_1q(state.copy(), gate, n, k)
    assert np.allclose(got, expected, atol=1e-13)


@pytest.mark.parametrize("n,k0,k1", [(3, 0, 2), (3, 2, 0), (5, 3, 1), (5, 0, 4)])
def test_kernel_2q_matches_reference(rng, n, k0, k1):
    state = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    gate = gate_matrix(GateSpec(GateKind.FSIM, (0, 1), (0.7, 1.3)))
    expected = _apply_2q_reference(state.copy(), gate, n, k0, k1)
    got = kernels.apply_2q(state.copy(), gate, n, k0, k1)
    assert np.allclose(got, expected, atol=1e-13)


def test_backend_reported():
    assert kernels.backend_name() in ("numba", "numpy")
