import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tncut.circuit import (
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
from tncut.errors import (
    MalformedLine,
    MomentCollision,
    QubitOutOfRange,
    UnknownGate,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)


def test_parse_minimal_file():
    c = parse_circuit("1\n0 x_1_2 0\n")
    assert c.n == 1
    assert len(c.moments) == 1
    assert c.moments[0] == [GateSpec(GateKind.SQRT_X, (0,))]


def test_parse_fsim_params():
    c = parse_circuit("2\n0 fsim 0 1 1.5 0.5\n")
    (g,) = c.moments[0]
    assert g.kind is GateKind.FSIM
    assert g.targets == (0, 1)
    assert g.params == (1.5, 0.5)


def test_parse_comments_blank_lines_crlf():
    text = "# a comment\r\n2\r\n\r\n0 cz 0 1\r\n# trailing\r\n"
    c = parse_circuit(text)
    assert c.n == 2
    assert c.moments[0][0].kind is GateKind.CZ


def test_parse_case_insensitive_and_fs_alias():
    c = parse_circuit("2\n0 FS 0 1 0.25 0.125\n1 HZ_1_2 0\n")
    assert c.moments[0][0].kind is GateKind.FSIM
    assert c.moments[1][0].kind is GateKind.SQRT_W


def test_parse_unknown_gate():
    with pytest.raises(UnknownGate) as e:
        parse_circuit("1\n0 h 0\n")
    assert e.value.line == 2
    assert e.value.name == "h"


def test_parse_qubit_out_of_range():
    with pytest.raises(QubitOutOfRange):
        parse_circuit("2\n0 x_1_2 2\n")


def test_parse_moment_collision():
    with pytest.raises(MomentCollision) as e:
        parse_circuit("2\n0 x_1_2 0\n0 y_1_2 0\n")
    assert e.value.qubit == 0
    assert e.value.moment == 0


def test_parse_malformed_lines():
    with pytest.raises(MalformedLine):
        parse_circuit("2\n0 fsim 0 1\n")  # missing params
    with pytest.raises(MalformedLine):
        parse_circuit("2\nnope x_1_2 0\n")
    with pytest.raises(MalformedLine):
        parse_circuit("")
    with pytest.raises(MalformedLine):
        parse_circuit("2\n1 x_1_2 0\n")  # moment 0 missing


def test_gate_matrix_fsim_zero_is_identity():
    g = GateSpec(GateKind.FSIM, (0, 1), (0.0, 0.0))
    assert np.allclose(gate_matrix(g), np.eye(4), atol=1e-15)


def test_sqrt_x_squares_to_x():
    u = gate_matrix(GateSpec(GateKind.SQRT_X, (0,)))
    assert np.allclose(u @ u, X, atol=1e-12)


def test_sqrt_y_squares_to_y():
    u = gate_matrix(GateSpec(GateKind.SQRT_Y, (0,)))
    assert np.allclose(u @ u, Y, atol=1e-12)


def test_sqrt_w_squares_to_w():
    u = gate_matrix(GateSpec(GateKind.SQRT_W, (0,)))
    w = (X + Y) / math.sqrt(2)
    assert np.max(np.abs(u @ u - w)) < 1e-12


def test_fsim_swap_phase():
    # theta = pi/2, phi = 0: |01> -> -i|10>, |10> -> -i|01>
    u = gate_matrix(GateSpec(GateKind.FSIM, (0, 1), (math.pi / 2, 0.0)))
    e01 = np.zeros(4, dtype=complex)
    e01[1] = 1
    e10 = np.zeros(4, dtype=complex)
    e10[2] = 1
    assert np.allclose(u @ e01, -1j * e10, atol=1e-12)
    assert np.allclose(u @ e10, -1j * e01, atol=1e-12)


@given(
    kind=st.sampled_from(list(GateKind)),
    theta=st.floats(-10, 10, allow_nan=False),
    phi=st.floats(-10, 10, allow_nan=False),
)
@settings(max_examples=100, deadline=None)
def test_gate_matrices_unitary(kind, theta, phi):
    targets = (0,) if kind.arity == 1 else (0, 1)
    params = (theta, phi) if kind is GateKind.FSIM else ()
    u = gate_matrix(GateSpec(kind, targets, params))
    assert np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) < 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_native_json_round_trip(seed):
    c = random_circuit(6, 4, seed=seed)
    text = serialize_circuit(c)
    c2 = parse_circuit(text, format="native_json")
    assert c2.n == c.n
    assert c2.moments == c.moments
    assert serialize_circuit(c2) == text


@pytest.mark.parametrize("seed", range(3))
def test_qsim_text_round_trip(seed):
    c = random_circuit(5, 3, seed=seed)
    c2 = parse_circuit(to_qsim_text(c))
    assert c2.moments == c.moments


def test_validate_clean_circuit():
    c = random_circuit(4, 3, seed=0)
    assert validate_circuit(c) == []


def test_validate_moment_collision_diagnostic():
    c = Circuit(
        layout=QubitLayout.linear(2),
        moments=[[], [], [], [GateSpec(GateKind.SQRT_X, (0,)),
                             GateSpec(GateKind.SQRT_Y, (0,))]],
    )
    diags = validate_circuit(c)
    assert any(d.kind == "MomentCollision" and d.qubit == 0 and d.moment == 3
               for d in diags)


def test_validate_arity_mismatch():
    c = Circuit(
        layout=QubitLayout.linear(2),
        moments=[[GateSpec(GateKind.FSIM, (0,), (0.1, 0.2))]],
    )
    diags = validate_circuit(c)
    assert any(d.kind == "ArityMismatch" for d in diags)


def test_cycles_counts_two_qubit_moments():
    c = random_circuit(4, 5, seed=1)
    assert c.cycles == 5
    assert len(c.moments) == 11  # 5 x (1q + 2q) + final 1q layer
