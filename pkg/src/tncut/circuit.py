"""Circuit intermediate representation.

Two ingestion formats are supported: the plain-text format used by the
released random-circuit files (``qsim_text``) and a canonical JSON form
(``native_json``) used for golden files and round-tripping.  Gate kinds
are restricted to the five used by the supremacy-style circuits; their
unitaries are produced by :func:`gate_matrix`.

qsim_text grammar::

    <qubit count>
    <moment> <gate-name> <qubit> [<qubit>] [<param> <param>]

``#`` starts a comment line; blank lines are skipped; LF and CRLF both
accepted.  Gate names are case-insensitive: ``x_1_2`` / ``y_1_2`` /
``hz_1_2`` are the square roots of X, Y and W=(X+Y)/sqrt(2); ``fsim``
(alias ``fs``) takes two angle parameters in radians; ``cz`` none.

native_json schema (field names are stable)::

    {"n": <int>, "gates": [{"moment": int, "kind": str,
                            "targets": [int, ...], "params": [float, ...]}]}
"""

from __future__ import annotations

import dataclasses
import enum
import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import MalformedLine, MomentCollision, QubitOutOfRange, UnknownGate


class GateKind(enum.Enum):
    SQRT_X = "sqrt_x"
    SQRT_Y = "sqrt_y"
    SQRT_W = "sqrt_w"
    FSIM = "fsim"
    CZ = "cz"

    @property
    def arity(self) -> int:
        return 1 if self in (GateKind.SQRT_X, GateKind.SQRT_Y, GateKind.SQRT_W) else 2

    @property
    def n_params(self) -> int:
        return 2 if self is GateKind.FSIM else 0


_NAME_TO_KIND = {
    "x_1_2": GateKind.SQRT_X,
    "y_1_2": GateKind.SQRT_Y,
    "hz_1_2": GateKind.SQRT_W,
    "fsim": GateKind.FSIM,
    "fs": GateKind.FSIM,
    "cz": GateKind.CZ,
    # native_json kind strings are accepted everywhere a name is
    "sqrt_x": GateKind.SQRT_X,
    "sqrt_y": GateKind.SQRT_Y,
    "sqrt_w": GateKind.SQRT_W,
}


@dataclass(frozen=True)
class GateSpec:
    kind: GateKind
    targets: tuple[int, ...]
    params: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(q) for q in self.targets))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))


@dataclass(frozen=True)
class QubitLayout:
    count: int
    ids: tuple[int, ...]

    @classmethod
    def linear(cls, n: int) -> "QubitLayout":
        return cls(count=n, ids=tuple(range(n)))


@dataclass
class Circuit:
    layout: QubitLayout
    moments: list[list[GateSpec]]
    metadata: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.layout.count

    @property
    def cycles(self) -> int:
        """Number of cycles implied by the moment structure.

        One cycle is a single-qubit layer followed by a two-qubit layer,
        so the cycle count is the number of moments containing at least
        one two-qubit gate.
        """
        return sum(1 for mom in self.moments if any(g.kind.arity == 2 for g in mom))

    def gates(self):
        for moment_index, moment in enumerate(self.moments):
            for g in moment:
                yield moment_index, g

    def gate_count(self) -> int:
        return sum(len(m) for m in self.moments)

    def sha256(self) -> str:
        return hashlib.sha256(serialize_circuit(self).encode()).hexdigest()


# ---------------------------------------------------------------------------
# Gate unitaries

_SQRT_X = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])
_SQRT_Y = 0.5 * np.array([[1 + 1j, -1 - 1j], [1 + 1j, 1 + 1j]])
# W = (X+Y)/sqrt2 squares to the identity, so its principal square root
# is ((1+i)I + (1-i)W)/2, written out entrywise below.
_SQRT_W = np.array(
    [
        [(1 + 1j) / 2, -1j / math.sqrt(2)],
        [1 / math.sqrt(2), (1 + 1j) / 2],
    ]
)
_CZ = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)


def gate_matrix(g: GateSpec) -> np.ndarray:
    """Dense unitary for a gate, complex128.

    Two-qubit matrices are in the basis order |00>, |01>, |10>, |11>
    with the first target as the more significant bit.  FSIM uses the
    -i sin(theta) off-diagonal and exp(-i phi) corner convention.
    """
    if g.kind is GateKind.SQRT_X:
        return _SQRT_X.copy()
    if g.kind is GateKind.SQRT_Y:
        return _SQRT_Y.copy()
    if g.kind is GateKind.SQRT_W:
        return _SQRT_W.copy()
    if g.kind is GateKind.CZ:
        return _CZ.copy()
    if g.kind is GateKind.FSIM:
        theta, phi = g.params
        c, s = math.cos(theta), math.sin(theta)
        return np.array(
            [
                [1, 0, 0, 0],
                [0, c, -1j * s, 0],
                [0, -1j * s, c, 0],
                [0, 0, 0, np.exp(-1j * phi)],
            ]
        )
    raise ValueError(f"unhandled gate kind {g.kind}")


# ---------------------------------------------------------------------------
# Parsing

def parse_circuit(text: str, format: str = "qsim_text") -> Circuit:
    """Parse circuit text in the given format into a validated Circuit."""
    if format == "qsim_text":
        circuit = _parse_qsim_text(text)
    elif format == "native_json":
        circuit = _parse_native_json(text)
    else:
        raise ValueError(f"unknown circuit format {format!r}")
    diags = validate_circuit(circuit)
    for d in diags:
        raise d.as_error()
    return circuit


def _parse_qsim_text(text: str) -> Circuit:
    lines = text.replace("\r\n", "\n").split("\n")
    n = None
    raw = []  # (line_no, moment, GateSpec)
    for line_no, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if n is None:
            try:
                n = int(stripped)
            except ValueError:
                raise MalformedLine(line_no, "expected qubit count on first line")
            if n <= 0:
                raise MalformedLine(line_no, "qubit count must be positive")
            continue
        tokens = stripped.split()
        if len(tokens) < 3:
            raise MalformedLine(line_no, "expected '<moment> <gate> <qubit> ...'")
        try:
            moment = int(tokens[0])
        except ValueError:
            raise MalformedLine(line_no, f"bad moment index {tokens[0]!r}")
        if moment < 0:
            raise MalformedLine(line_no, "moment index must be non-negative")
        name = tokens[1].lower()
        kind = _NAME_TO_KIND.get(name)
        if kind is None:
            raise UnknownGate(tokens[1], line_no)
        want = 3 + kind.arity - 1 + kind.n_params
        if len(tokens) != want:
            raise MalformedLine(
                line_no, f"{tokens[1]} takes {kind.arity} qubit(s) and "
                f"{kind.n_params} param(s)"
            )
        try:
            targets = tuple(int(t) for t in tokens[2:2 + kind.arity])
        except ValueError:
            raise MalformedLine(line_no, "bad qubit index")
        for q in targets:
            if not 0 <= q < n:
                raise QubitOutOfRange(line_no, q)
        try:
            params = tuple(float(t) for t in tokens[2 + kind.arity:])
        except ValueError:
            raise MalformedLine(line_no, "bad gate parameter")
        raw.append((line_no, moment, GateSpec(kind, targets, params)))

    if n is None:
        raise MalformedLine(1, "empty circuit file")
    if raw:
        moments_used = sorted({m for _, m, _ in raw})
        if moments_used != list(range(moments_used[-1] + 1)):
            raise MalformedLine(0, "moment indices are not contiguous from 0")
        n_moments = moments_used[-1] + 1
    else:
        n_moments = 0
    moments: list[list[GateSpec]] = [[] for _ in range(n_moments)]
    for _, m, g in raw:
        moments[m].append(g)
    return Circuit(layout=QubitLayout.linear(n), moments=moments)


def _parse_native_json(text: str) -> Circuit:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise MalformedLine(e.lineno, f"invalid JSON: {e.msg}")
    if not isinstance(doc, dict) or "n" not in doc or "gates" not in doc:
        raise MalformedLine(1, "native_json requires fields 'n' and 'gates'")
    n = int(doc["n"])
    if n <= 0:
        raise MalformedLine(1, "qubit count must be positive")
    entries = []
    for i, g in enumerate(doc["gates"], start=1):
        kind = _NAME_TO_KIND.get(str(g.get("kind", "")).lower())
        if kind is None:
            raise UnknownGate(str(g.get("kind")), i)
        targets = tuple(int(t) for t in g["targets"])
        for q in targets:
            if not 0 <= q < n:
                raise QubitOutOfRange(i, q)
        params = tuple(float(p) for p in g.get("params", []))
        entries.append((int(g["moment"]), GateSpec(kind, targets, params)))
    if entries:
        moments_used = sorted({m for m, _ in entries})
        if moments_used[0] < 0 or moments_used != list(range(moments_used[-1] + 1)):
            raise MalformedLine(0, "moment indices are not contiguous from 0")
        n_moments = moments_used[-1] + 1
    else:
        n_moments = 0
    moments: list[list[GateSpec]] = [[] for _ in range(n_moments)]
    for m, g in entries:
        moments[m].append(g)
    return Circuit(layout=QubitLayout.linear(n), moments=moments)


def serialize_circuit(c: Circuit) -> str:
    """Canonical native_json serialization (stable key order)."""
    gates = [
        {
            "moment": m,
            "kind": g.kind.value,
            "targets": list(g.targets),
            "params": list(g.params),
        }
        for m, g in c.gates()
    ]
    return json.dumps({"n": c.n, "gates": gates}, sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------------------
# Validation

@dataclass(frozen=True)
class Diagnostic:
    kind: str  # ArityMismatch | ParamMismatch | MomentCollision | QubitOutOfRange | LayoutInvalid
    message: str
    moment: int | None = None
    qubit: int | None = None

    def as_error(self):
        if self.kind == "MomentCollision":
            return MomentCollision(self.qubit, self.moment)
        if self.kind == "QubitOutOfRange":
            return QubitOutOfRange(0, self.qubit)
        return MalformedLine(0, self.message)


def validate_circuit(c: Circuit) -> list[Diagnostic]:
    """Structured diagnostics; empty list iff all invariants hold."""
    diags: list[Diagnostic] = []
    if len(set(c.layout.ids)) != len(c.layout.ids) or c.layout.count != len(c.layout.ids):
        diags.append(Diagnostic("LayoutInvalid", "layout ids must be unique and match count"))
    id_set = set(c.layout.ids)
    for moment_index, moment in enumerate(c.moments):
        seen: set[int] = set()
        for g in moment:
            if len(g.targets) != g.kind.arity:
                diags.append(
                    Diagnostic(
                        "ArityMismatch",
                        f"{g.kind.value} takes {g.kind.arity} target(s), got {len(g.targets)}",
                        moment=moment_index,
                    )
                )
            if len(g.params) != g.kind.n_params:
                diags.append(
                    Diagnostic(
                        "ParamMismatch",
                        f"{g.kind.value} takes {g.kind.n_params} param(s), got {len(g.params)}",
                        moment=moment_index,
                    )
                )
            if len(set(g.targets)) != len(g.targets):
                diags.append(
                    Diagnostic(
                        "ArityMismatch",
                        f"{g.kind.value} repeats a target qubit",
                        moment=moment_index,
                    )
                )
            for q in g.targets:
                if q not in id_set:
                    diags.append(
                        Diagnostic(
                            "QubitOutOfRange",
                            f"qubit {q} not in layout",
                            moment=moment_index,
                            qubit=q,
                        )
                    )
                elif q in seen:
                    diags.append(
                        Diagnostic(
                            "MomentCollision",
                            f"qubit {q} used twice in moment {moment_index}",
                            moment=moment_index,
                            qubit=q,
                        )
                    )
                seen.add(q)
    return diags


# ---------------------------------------------------------------------------
# Random circuit generation (test and demo workloads)

_SQRT_GATES = (GateKind.SQRT_X, GateKind.SQRT_Y, GateKind.SQRT_W)


def random_circuit(
    n: int,
    cycles: int,
    seed: int = 0,
    pairing: str = "matching",
    final_single_layer: bool = True,
) -> Circuit:
    """Random supremacy-style circuit on a linear layout.

    Each cycle is a layer of single-qubit gates drawn from the three
    square roots (never repeating on a qubit between consecutive
    cycles) followed by a layer of FSIM gates with random angles.
    ``pairing='matching'`` draws a fresh random perfect matching each
    cycle; ``pairing='ring'`` alternates even/odd nearest-neighbour
    pairs on a ring.
    """
    rng = np.random.default_rng(seed)
    moments: list[list[GateSpec]] = []
    last_single = [-1] * n
    for cycle in range(cycles):
        layer = []
        for q in range(n):
            choices = [k for k in range(3) if k != last_single[q]]
            pick = choices[rng.integers(len(choices))]
            last_single[q] = pick
            layer.append(GateSpec(_SQRT_GATES[pick], (q,)))
        moments.append(layer)

        pairs = []
        if pairing == "ring" and n >= 2:
            offset = cycle % 2
            qubits = list(range(n))
            for i in range(offset, n - 1, 2):
                pairs.append((qubits[i], qubits[i + 1]))
            if offset == 1 and n % 2 == 0 and n > 2:
                pairs.append((qubits[-1], qubits[0]))
        else:
            perm = list(rng.permutation(n))
            for i in range(0, n - 1, 2):
                pairs.append((perm[i], perm[i + 1]))
        twoq = [
            GateSpec(
                GateKind.FSIM,
                pair,
                (rng.uniform(0, 2 * math.pi), rng.uniform(0, 2 * math.pi)),
            )
            for pair in pairs
        ]
        if twoq:
            moments.append(twoq)
    if final_single_layer:
        layer = []
        for q in range(n):
            choices = [k for k in range(3) if k != last_single[q]]
            pick = choices[rng.integers(len(choices))]
            layer.append(GateSpec(_SQRT_GATES[pick], (q,)))
        moments.append(layer)
    return Circuit(layout=QubitLayout.linear(n), moments=moments, metadata={"seed": seed})


def to_qsim_text(c: Circuit) -> str:
    """Render a circuit in the qsim_text grammar."""
    names = {
        GateKind.SQRT_X: "x_1_2",
        GateKind.SQRT_Y: "y_1_2",
        GateKind.SQRT_W: "hz_1_2",
        GateKind.FSIM: "fsim",
        GateKind.CZ: "cz",
    }
    lines = [str(c.n)]
    for m, g in c.gates():
        parts = [str(m), names[g.kind]] + [str(q) for q in g.targets]
        parts += [repr(p) for p in g.params]
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"
