"""Exact statevector execution with measurement, reset and classical control.

Qubit 0 is the least-significant bit of the amplitude index, so the basis
state ``|q_{n-1} ... q_1 q_0>`` sits at index ``sum(q_k << k)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._kernels import kernels
from .circuit import Circuit, CircuitError, Gate, is_unitary, require_valid

TOL = 1e-10
MAX_QUBITS = 22
MAX_MEASUREMENTS = 20
# branches below this probability are treated as impossible
ZERO_PROB = 1e-12


class SimulationError(ValueError):
    pass


class StateVector:
    """Unit-norm vector of ``2**n_qubits`` complex amplitudes."""

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, amplitudes, n_qubits: int | None = None, *, cap: int = MAX_QUBITS, check: bool = True):
        amps = np.array(amplitudes, dtype=np.complex128).ravel()
        n = amps.size.bit_length() - 1
        if amps.size != 1 << n:
            raise SimulationError(f"amplitude count {amps.size} is not a power of two")
        if n_qubits is not None and n_qubits != n:
            raise SimulationError(f"{amps.size} amplitudes do not describe {n_qubits} qubits")
        if n > cap:
            raise SimulationError(f"{n} qubits exceeds the simulator cap of {cap}")
        if check and abs(np.vdot(amps, amps).real - 1.0) > TOL:
            raise SimulationError("state is not normalised")
        self.n_qubits = n
        self.amplitudes = amps

    @classmethod
    def zero(cls, n_qubits: int, cap: int = MAX_QUBITS) -> "StateVector":
        if n_qubits > cap:
            raise SimulationError(f"{n_qubits} qubits exceeds the simulator cap of {cap}")
        amps = np.zeros(1 << n_qubits, dtype=np.complex128)
        amps[0] = 1.0
        return cls(amps, check=False, cap=cap)

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "StateVector":
        amps = np.zeros(1 << n_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(amps, check=False)

    @classmethod
    def product(cls, qubit_states: Sequence[Sequence[complex]]) -> "StateVector":
        """Tensor product where ``qubit_states[k]`` is the 2-vector of qubit ``k``."""
        amps = np.ones(1, dtype=np.complex128)
        for vec in qubit_states:
            amps = np.kron(np.asarray(vec, dtype=np.complex128), amps)
        return cls(amps)

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy(), check=False, cap=64)

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amplitudes, self.amplitudes).real))

    def probability_one(self, q: int) -> float:
        return kernels.prob_one(self.amplitudes, q)

    def __repr__(self) -> str:
        return f"StateVector(n_qubits={self.n_qubits})"


def random_qubit(rng: np.random.Generator) -> np.ndarray:
    """Haar-random single-qubit state."""
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return v / np.linalg.norm(v)


def random_state(n_qubits: int, rng: np.random.Generator) -> StateVector:
    v = rng.normal(size=1 << n_qubits) + 1j * rng.normal(size=1 << n_qubits)
    return StateVector(v / np.linalg.norm(v))


def _apply_unitary(amps: np.ndarray, gate: Gate) -> None:
    kind = gate.kind
    if kind == "cx":
        kernels.apply_cx(amps, gate.qubits[0], gate.qubits[1])
    elif kind == "swap":
        kernels.apply_swap(amps, gate.qubits[0], gate.qubits[1])
    else:
        m = gate.unitary()
        kernels.apply_1q(amps, gate.qubits[0], m[0, 0], m[0, 1], m[1, 0], m[1, 1])


def _check_gate(gate: Gate, n_qubits: int) -> None:
    for q in gate.qubits:
        if not (0 <= q < n_qubits):
            raise SimulationError(f"qubit {q} out of range for {n_qubits}-qubit state")
    if gate.kind == "u" and not is_unitary(gate.unitary()):
        raise SimulationError("non-unitary U1q gate")


def _outcome_probs(amps: np.ndarray, q: int) -> tuple[float, float, float]:
    """``(p0, p1, norm2)`` with p0/p1 relative to the current squared norm."""
    norm2 = float(np.vdot(amps, amps).real)
    p1 = min(max(kernels.prob_one(amps, q) / norm2, 0.0), 1.0)
    return 1.0 - p1, p1, norm2


def _project(amps: np.ndarray, q: int, bit: int, p_bit: float, norm2: float = 1.0) -> None:
    # rescaling by the actual squared norm also removes accumulated rounding drift
    kernels.collapse(amps, q, bit, 1.0 / np.sqrt(p_bit * norm2))


def apply(state: StateVector, gate: Gate, bits: Sequence[int] = (), outcome: int | None = None):
    """Apply one gate and return ``(new_state, new_bits)``.

    ``Measure`` and a ``Reset`` of a superposed qubit need ``outcome`` (0 or 1)
    to pick the branch; the returned state is renormalised.
    """
    _check_gate(gate, state.n_qubits)
    amps = state.amplitudes.copy()
    bits = list(bits)
    if gate.kind in ("measure", "reset"):
        q = gate.qubits[0]
        p0, p1, norm2 = _outcome_probs(amps, q)
        if outcome is None:
            if p1 < ZERO_PROB:
                outcome = 0
            elif p1 > 1 - ZERO_PROB:
                outcome = 1
            else:
                raise SimulationError(f"{gate.kind} on a superposed qubit needs an outcome")
        p = p1 if outcome else p0
        if p < ZERO_PROB:
            raise SimulationError(f"outcome {outcome} has zero probability")
        _project(amps, q, outcome, p, norm2)
        if gate.kind == "measure":
            while len(bits) <= gate.clbit:
                bits.append(0)
            bits[gate.clbit] = outcome
        elif outcome:
            kernels.flip_to_zero(amps, q)
    elif gate.kind == "if":
        if gate.clbit < len(bits) and bits[gate.clbit]:
            _apply_unitary(amps, Gate(gate.body, gate.qubits))
    else:
        _apply_unitary(amps, gate)
    return StateVector(amps, check=False, cap=64), bits


@dataclass
class Branch:
    classical_bits: tuple[int, ...]
    probability: float
    final_state: StateVector

    def to_dict(self) -> dict:
        return {"bits": "".join(str(b) for b in reversed(self.classical_bits)), "probability": self.probability}


def _check_run(circuit: Circuit, initial: StateVector) -> None:
    require_valid(circuit)
    if initial.n_qubits != circuit.n_qubits:
        raise SimulationError(f"initial state has {initial.n_qubits} qubits, circuit has {circuit.n_qubits}")


def run_sampled(circuit: Circuit, initial: StateVector | None = None, seed: int | None = 0) -> Branch:
    """One trajectory with Born-rule outcomes drawn from ``numpy.random.default_rng(seed)``."""
    initial = initial if initial is not None else StateVector.zero(circuit.n_qubits)
    _check_run(circuit, initial)
    rng = np.random.default_rng(seed)
    amps = initial.amplitudes.copy()
    bits = [0] * circuit.n_clbits
    prob = 1.0
    for gate in circuit.gates:
        kind = gate.kind
        if kind in ("measure", "reset"):
            q = gate.qubits[0]
            p0, p1, norm2 = _outcome_probs(amps, q)
            outcome = int(rng.random() < p1)
            p = p1 if outcome else p0
            prob *= p
            _project(amps, q, outcome, p, norm2)
            if kind == "measure":
                bits[gate.clbit] = outcome
            elif outcome:
                kernels.flip_to_zero(amps, q)
        elif kind == "if":
            if bits[gate.clbit]:
                _apply_unitary(amps, Gate(gate.body, gate.qubits))
        else:
            _apply_unitary(amps, gate)
    return Branch(tuple(bits), prob, StateVector(amps, check=False, cap=64))


def _walk(
    circuit: Circuit,
    initial: StateVector,
    after_gate: Callable[[int, list], list] | None = None,
) -> list[tuple[list[int], float, np.ndarray]]:
    # breadth-first over gates: every live branch advances one gate at a time
    live = [([0] * circuit.n_clbits, 1.0, initial.amplitudes.copy())]
    for gi, gate in enumerate(circuit.gates):
        kind = gate.kind
        if kind in ("measure", "reset"):
            q = gate.qubits[0]
            nxt = []
            for bits, prob, amps in live:
                p0, p1, norm2 = _outcome_probs(amps, q)
                outcomes = [o for o, p in ((0, p0), (1, p1)) if p > ZERO_PROB]
                for k, o in enumerate(outcomes):
                    a = amps if k == len(outcomes) - 1 else amps.copy()
                    p = p1 if o else p0
                    _project(a, q, o, p, norm2)
                    b = bits
                    if kind == "measure":
                        b = list(bits)
                        b[gate.clbit] = o
                    elif o:
                        kernels.flip_to_zero(a, q)
                    nxt.append((b, prob * p, a))
            live = nxt
        elif kind == "if":
            g = Gate(gate.body, gate.qubits)
            for bits, _, amps in live:
                if bits[gate.clbit]:
                    _apply_unitary(amps, g)
        else:
            for _, _, amps in live:
                _apply_unitary(amps, gate)
        if after_gate is not None:
            live = after_gate(gi, live)
    return live


def run_exhaustive(circuit: Circuit, initial: StateVector | None = None) -> list[Branch]:
    """Every measurement outcome with non-zero probability, with its exact post-measurement state.

    A reset of a superposed qubit also splits the run; such siblings share
    classical bits but carry different states.
    """
    initial = initial if initial is not None else StateVector.zero(circuit.n_qubits)
    _check_run(circuit, initial)
    n_meas = sum(1 for g in circuit.gates if g.kind == "measure")
    if n_meas > MAX_MEASUREMENTS:
        raise SimulationError(f"{n_meas} measurements exceeds the exhaustive limit of {MAX_MEASUREMENTS}")
    return [Branch(tuple(b), p, StateVector(a, check=False, cap=64)) for b, p, a in _walk(circuit, initial)]


def fidelity(a: StateVector, b: StateVector) -> float:
    """``|<a|b>|`` for two states of equal dimension."""
    if a.n_qubits != b.n_qubits:
        raise SimulationError(f"dimension mismatch: {a.n_qubits} vs {b.n_qubits} qubits")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)))


def equal_up_to_global_phase(a: StateVector, b: StateVector, tol: float = TOL) -> bool:
    return fidelity(a, b) >= 1.0 - tol


def reduced_qubit(state: StateVector, q: int) -> np.ndarray:
    """Single-qubit density matrix of qubit ``q``."""
    v = state.amplitudes.reshape(-1, 2, 1 << q)
    a0 = v[:, 0, :].ravel()
    a1 = v[:, 1, :].ravel()
    return np.array([[np.vdot(a0, a0), np.vdot(a1, a0)], [np.vdot(a0, a1), np.vdot(a1, a1)]])


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Dense unitary of a measurement-free circuit, column ``k`` = image of basis state ``k``."""
    if any(g.kind in ("measure", "reset", "if") for g in circuit.gates):
        raise CircuitError("circuit_unitary needs a purely unitary circuit")
    dim = 1 << circuit.n_qubits
    out = np.zeros((dim, dim), dtype=np.complex128)
    for k in range(dim):
        amps = np.zeros(dim, dtype=np.complex128)
        amps[k] = 1.0
        for g in circuit.gates:
            _apply_unitary(amps, g)
        out[:, k] = amps
    return out
