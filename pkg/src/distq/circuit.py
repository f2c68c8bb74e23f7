"""Hardware-agnostic circuit IR, validation, depth and interaction graphs.

A :class:`Circuit` is an immutable, ordered list of :class:`Gate` values over a
single quantum register and a single classical register. Qubit 0 is the
least-significant bit of every amplitude index (see :mod:`distq.simulator`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

UNITARY_TOL = 1e-10

ONE_QUBIT_KINDS = frozenset({"h", "x", "z", "u"})
TWO_QUBIT_KINDS = frozenset({"cx", "swap"})
ALL_KINDS = ONE_QUBIT_KINDS | TWO_QUBIT_KINDS | {"measure", "reset", "if"}


class CircuitError(ValueError):
    """Raised when an operation needs a valid circuit and gets an invalid one."""


@dataclass(frozen=True)
class Gate:
    """One instruction.

    ``kind`` is one of ``h x z u cx swap measure reset if``. For ``if`` the
    ``body`` field holds ``"x"`` or ``"z"`` and ``clbit`` the condition bit.
    ``matrix`` is only set for ``u`` and is stored row-major as a 4-tuple.
    """

    kind: str
    qubits: tuple[int, ...]
    clbit: int | None = None
    body: str | None = None
    matrix: tuple[complex, complex, complex, complex] | None = field(default=None, compare=True)

    @property
    def is_two_qubit(self) -> bool:
        return self.kind in TWO_QUBIT_KINDS

    def unitary(self) -> np.ndarray:
        """2x2 matrix of a single-qubit unitary gate (or the body of an ``if``)."""
        kind = self.body if self.kind == "if" else self.kind
        if kind == "u":
            return np.array(self.matrix, dtype=np.complex128).reshape(2, 2)
        return _FIXED[kind]

    def remap(self, qmap) -> "Gate":
        """Copy of this gate with every qubit ``q`` replaced by ``qmap[q]`` (or ``qmap(q)``)."""
        f = qmap if callable(qmap) else qmap.__getitem__
        return Gate(self.kind, tuple(f(q) for q in self.qubits), self.clbit, self.body, self.matrix)

    def __str__(self) -> str:
        qs = ",".join(f"q{q}" for q in self.qubits)
        if self.kind == "measure":
            return f"measure {qs}->c{self.clbit}"
        if self.kind == "if":
            return f"if(c{self.clbit}) {self.body} {qs}"
        return f"{self.kind} {qs}"


_S = 1 / math.sqrt(2)
_FIXED = {
    "h": np.array([[_S, _S], [_S, -_S]], dtype=np.complex128),
    "x": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


def H(q: int) -> Gate:
    return Gate("h", (q,))


def X(q: int) -> Gate:
    return Gate("x", (q,))


def Z(q: int) -> Gate:
    return Gate("z", (q,))


def U(q: int, matrix) -> Gate:
    """Arbitrary single-qubit gate; raises if ``matrix`` is not unitary."""
    m = np.asarray(matrix, dtype=np.complex128)
    if m.shape != (2, 2):
        raise CircuitError(f"U1q matrix must be 2x2, got shape {m.shape}")
    if not is_unitary(m):
        raise CircuitError("U1q matrix is not unitary")
    return Gate("u", (q,), matrix=tuple(complex(v) for v in m.ravel()))


def CX(control: int, target: int) -> Gate:
    return Gate("cx", (control, target))


def SWAP(a: int, b: int) -> Gate:
    return Gate("swap", (a, b))


def Measure(q: int, c: int) -> Gate:
    return Gate("measure", (q,), clbit=c)


def Reset(q: int) -> Gate:
    return Gate("reset", (q,))


def IfBit(c: int, body: str, q: int) -> Gate:
    """Apply ``body`` (``"x"`` or ``"z"``) to ``q`` iff classical bit ``c`` is 1."""
    return Gate("if", (q,), clbit=c, body=body)


def is_unitary(m: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    return bool(np.allclose(m.conj().T @ m, np.eye(m.shape[0]), atol=tol, rtol=0))


@dataclass(frozen=True)
class Violation:
    gate_index: int
    message: str

    def __str__(self) -> str:
        return f"{self.message} at gate {self.gate_index}"


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    n_clbits: int = 0
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        if not isinstance(self.gates, tuple):
            object.__setattr__(self, "gates", tuple(self.gates))

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def append(self, *gates: Gate) -> "Circuit":
        """Return a new circuit with ``gates`` appended.

        Raises :class:`CircuitError` if any appended gate breaks an invariant.
        """
        new = Circuit(self.n_qubits, self.n_clbits, self.gates + tuple(gates))
        bad = [v for v in validate(new) if v.gate_index >= len(self.gates)]
        if bad:
            raise CircuitError("; ".join(map(str, bad)))
        return new

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        return self.append(*gates)

    def count_ops(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for g in self.gates:
            counts[g.kind] = counts.get(g.kind, 0) + 1
        return dict(sorted(counts.items()))


def _gate_violations(gate: Gate, n_qubits: int, n_clbits: int) -> list[str]:
    out = []
    if gate.kind not in ALL_KINDS:
        return [f"unknown gate kind {gate.kind!r}"]
    arity = 2 if gate.kind in TWO_QUBIT_KINDS else 1
    if len(gate.qubits) != arity:
        out.append(f"{gate.kind} expects {arity} qubit(s), got {len(gate.qubits)}")
    for q in gate.qubits:
        if not (0 <= q < n_qubits):
            out.append(f"qubit {q} out of range")
    if arity == 2 and len(gate.qubits) == 2 and gate.qubits[0] == gate.qubits[1]:
        out.append("identical operands")
    if gate.kind in ("measure", "if"):
        if gate.clbit is None or not (0 <= gate.clbit < n_clbits):
            out.append(f"clbit {gate.clbit} out of range")
    if gate.kind == "if" and gate.body not in ("x", "z"):
        out.append(f"conditional body must be x or z, got {gate.body!r}")
    if gate.kind == "u":
        if gate.matrix is None or not is_unitary(np.array(gate.matrix, dtype=np.complex128).reshape(2, 2)):
            out.append("non-unitary U1q matrix")
    return out


def validate(circuit: Circuit) -> list[Violation]:
    """Every invariant violation in ``circuit``; an empty list means valid."""
    found = []
    written: set[int] = set()
    for i, gate in enumerate(circuit.gates):
        for msg in _gate_violations(gate, circuit.n_qubits, circuit.n_clbits):
            found.append(Violation(i, msg))
        if gate.kind == "measure":
            written.add(gate.clbit)
        elif gate.kind == "if" and gate.clbit not in written:
            found.append(Violation(i, "read-before-write"))
    return found


def require_valid(circuit: Circuit) -> None:
    bad = validate(circuit)
    if bad:
        raise CircuitError("invalid circuit: " + "; ".join(map(str, bad)))


def _resources(gate: Gate) -> list[tuple[str, int]]:
    res = [("q", q) for q in gate.qubits]
    if gate.clbit is not None:
        res.append(("c", gate.clbit))
    return res


def gate_layers(circuit: Circuit) -> list[int]:
    """Layer index (0-based) of every gate under greedy earliest-layer scheduling."""
    ready: dict[tuple[str, int], int] = {}
    layers = []
    for gate in circuit.gates:
        res = _resources(gate)
        layer = max((ready.get(r, 0) for r in res), default=0)
        for r in res:
            ready[r] = layer + 1
        layers.append(layer)
    return layers


def depth(circuit: Circuit) -> int:
    """Number of layers when gates sharing a qubit or clbit never share a layer."""
    require_valid(circuit)
    layers = gate_layers(circuit)
    return max(layers) + 1 if layers else 0


def interaction_graph(circuit: Circuit) -> dict[tuple[int, int], int]:
    """Weighted undirected qubit interaction graph as ``{(a, b): weight}`` with ``a < b``.

    A SWAP contributes weight 3, one per CNOT in its decomposition.
    """
    require_valid(circuit)
    edges: dict[tuple[int, int], int] = {}
    for gate in circuit.gates:
        if gate.is_two_qubit:
            a, b = sorted(gate.qubits)
            edges[(a, b)] = edges.get((a, b), 0) + (3 if gate.kind == "swap" else 1)
    return dict(sorted(edges.items()))


def two_qubit_weight(circuit: Circuit) -> int:
    return sum(3 if g.kind == "swap" else 1 for g in circuit.gates if g.is_two_qubit)


def concat(n_qubits: int, n_clbits: int, parts: Sequence[Iterable[Gate]]) -> Circuit:
    gates: list[Gate] = []
    for p in parts:
        gates.extend(p)
    return Circuit(n_qubits, n_clbits, tuple(gates))
