import numpy as np
import pytest

from distq import CX, SWAP, Circuit, H, X, Z
from distq.devices import CouplingMap, DeviceSpec, NetworkTopology, QuantumLink

I2 = np.eye(2, dtype=complex)
HM = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
XM = np.array([[0, 1], [1, 0]], dtype=complex)
ZM = np.diag([1, -1]).astype(complex)


def op_on(n, q, m):
    """Dense 2^n matrix of ``m`` on qubit ``q`` (qubit 0 = least significant)."""
    out = np.ones((1, 1), dtype=complex)
    for k in reversed(range(n)):
        out = np.kron(out, m if k == q else I2)
    return out


def cnot_matrix(n, c, t):
    """Permutation matrix of CNOT built from the truth table."""
    dim = 1 << n
    m = np.zeros((dim, dim), dtype=complex)
    for k in range(dim):
        m[k ^ (1 << t) if (k >> c) & 1 else k, k] = 1
    return m


def swap_matrix(n, a, b):
    dim = 1 << n
    m = np.zeros((dim, dim), dtype=complex)
    for k in range(dim):
        ba, bb = (k >> a) & 1, (k >> b) & 1
        j = k & ~((1 << a) | (1 << b)) | (bb << a) | (ba << b)
        m[j, k] = 1
    return m


def dense_unitary(n, gates):
    """Reference matrix product, independent of the simulator kernels."""
    u = np.eye(1 << n, dtype=complex)
    for g in gates:
        if g.kind == "cx":
            m = cnot_matrix(n, *g.qubits)
        elif g.kind == "swap":
            m = swap_matrix(n, *g.qubits)
        else:
            m = op_on(n, g.qubits[0], g.unitary())
        u = m @ u
    return u


def same_up_to_phase(a, b, tol=1e-10):
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    return abs(abs(np.vdot(a, b)) - 1) < tol and abs(np.linalg.norm(a) - 1) < tol and abs(np.linalg.norm(b) - 1) < tol


def random_unitary_circuit(rng, n, n_gates, swaps=True):
    gates = []
    for _ in range(n_gates):
        r = rng.random()
        if r < 0.35 or n < 2:
            gates.append([H, X, Z][rng.integers(3)](int(rng.integers(n))))
        else:
            a, b = (int(v) for v in rng.choice(n, 2, replace=False))
            gates.append(SWAP(a, b) if swaps and r > 0.85 else CX(a, b))
    return Circuit(n, 0, tuple(gates))


def line_network(n_devices):
    """Devices joined in a line; inner devices are 3-qubit lines with comm qubits at both ends."""
    devs = []
    for i in range(n_devices):
        if 0 < i < n_devices - 1:
            devs.append(DeviceSpec(f"D{i}", CouplingMap(3, [[0, 1], [1, 2]]), (0, 2)))
        else:
            devs.append(DeviceSpec(f"D{i}", CouplingMap(2, [[0, 1]]), (1,)))
    links = []
    for i in range(n_devices - 1):
        left = (f"D{i}", 1 if i == 0 else 2)
        right = (f"D{i + 1}", 1 if i + 1 == n_devices - 1 else 0)
        links.append(QuantumLink(left, right))
    return NetworkTopology(tuple(devs), tuple(links), name=f"line{n_devices}")


def permute_state(amps, l2p):
    """Move logical qubit l of ``amps`` to physical position l2p[l]."""
    n = len(l2p)
    idx = np.arange(1 << n)
    dest = np.zeros_like(idx)
    for l, p in enumerate(l2p):
        dest |= ((idx >> l) & 1) << p
    out = np.zeros_like(amps)
    out[dest] = amps
    return out


def routed_fidelity(original, routed, l2p, rng):
    """|<P U psi | V psi>| for a random psi, P the layout relabelling.

    Qubits neither circuit touches act as identity on both sides, so the check
    is run on the touched qubits only; a permutation never leaves that set.
    """
    from distq.simulator import StateVector, run_exhaustive

    touched = sorted({q for c in (original, routed) for g in c.gates for q in g.qubits}
                     | {q for q, p in enumerate(l2p) if p != q})
    if not touched:
        return 1.0
    pos = {q: i for i, q in enumerate(touched)}
    m = len(touched)
    a = Circuit(m, 0, tuple(g.remap(pos) for g in original.gates))
    b = Circuit(m, 0, tuple(g.remap(pos) for g in routed.gates))
    v = rng.normal(size=1 << m) + 1j * rng.normal(size=1 << m)
    psi = StateVector(v / np.linalg.norm(v))
    ideal = run_exhaustive(a, psi)[0].final_state.amplitudes
    got = run_exhaustive(b, psi)[0].final_state.amplitudes
    sub = [pos[l2p[q]] for q in touched]
    return float(abs(np.vdot(permute_state(ideal, sub), got)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
