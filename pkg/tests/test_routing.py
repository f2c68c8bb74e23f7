import numpy as np
import pytest

from distq.circuit import CX, SWAP, Circuit, H, X, depth
from distq.devices import CouplingMap, ibmqx3
from distq.routing import (
    PERMUTE,
    RESTORE,
    Layout,
    RoutingError,
    is_coupling_legal,
    lower_reversed_cnot,
    lower_swap,
    route,
)
from distq.simulator import StateVector, run_exhaustive

from .conftest import HM, cnot_matrix, dense_unitary, op_on, permute_state, random_unitary_circuit, routed_fidelity, swap_matrix
from .test_circuit import SWAP_ROUTED_CNOT
from .test_devices import all_shortest_paths, random_connected


def test_reversed_cnot_unitary_from_five_matrices():
    # H(c) H(t) CNOT(t->c) H(c) H(t), composed as explicit 4x4 matrices
    hh = op_on(2, 0, HM) @ op_on(2, 1, HM)
    composed = hh @ cnot_matrix(2, 1, 0) @ hh
    assert np.allclose(composed, cnot_matrix(2, 0, 1))
    assert np.allclose(dense_unitary(2, lower_reversed_cnot(0, 1)), cnot_matrix(2, 0, 1))


def test_reversed_cnot_truth_table():
    c = Circuit(2, 0, tuple(lower_reversed_cnot(1, 0)))
    one_zero = StateVector.basis(2, 0b10)  # q1 = 1, q0 = 0
    out = run_exhaustive(c, one_zero)[0].final_state.amplitudes
    assert abs(out[0b11]) == pytest.approx(1.0)
    out = run_exhaustive(c, StateVector.basis(2, 0))[0].final_state.amplitudes
    assert abs(out[0]) == pytest.approx(1.0)


@pytest.mark.parametrize("edges", [[[0, 1]], [[1, 0]], [[0, 1], [1, 0]]])
def test_lower_swap_is_swap(edges):
    cm = CouplingMap(2, edges)
    gates = lower_swap(0, 1, cm)
    assert np.allclose(dense_unitary(2, gates), swap_matrix(2, 0, 1))
    assert is_coupling_legal(Circuit(2, 0, tuple(gates)), cm)
    assert len(gates) == (3 if len(edges) == 2 else 3 + 4)


def test_lower_swap_one_way_edge_expansion():
    gates = lower_swap(0, 1, CouplingMap(2, [[0, 1]]))
    assert [g.kind for g in gates].count("cx") == 3
    assert len(gates) == 3 + 4  # one reversed CNOT adds four Hadamards
    amps = run_exhaustive(Circuit(2, 0, tuple(gates)), StateVector.basis(2, 0b01))[0].final_state.amplitudes
    assert abs(amps[0b10]) == pytest.approx(1.0)
    s = 1 / np.sqrt(2)
    amps = run_exhaustive(Circuit(2, 0, tuple(gates)), StateVector([s, s, 0, 0]))[0].final_state.amplitudes
    assert np.allclose(amps, [s, 0, s, 0])


def test_lower_swap_rejects_non_adjacent():
    with pytest.raises(RoutingError):
        lower_swap(0, 2, CouplingMap(3, [[0, 1], [1, 2]]))


def test_edge_cnot_unchanged():
    cm = CouplingMap(3, [[0, 1], [1, 2]])
    routed, layout = route(Circuit(3, 0, (CX(1, 2), H(0))), cm)
    assert routed.gates == (CX(1, 2), H(0))
    assert layout == Layout.identity(3)


def test_restore_cnot_across_line():
    cm = CouplingMap(3, [[0, 1], [1, 2]])
    routed, layout = route(Circuit(3, 0, (CX(0, 2),)), cm, mode=RESTORE)
    assert layout == Layout.identity(3)
    assert is_coupling_legal(routed, cm)
    # CNOT(q1, q3) realised with q2 left as it was, like the drawn circuit
    assert np.allclose(dense_unitary(3, routed.gates), cnot_matrix(3, 0, 2))
    assert np.allclose(dense_unitary(3, SWAP_ROUTED_CNOT), cnot_matrix(3, 0, 2))
    # same columns as drawn; Hadamards within a column may come in either order
    assert [g for g in routed.gates if g.kind == "cx"] == [g for g in SWAP_ROUTED_CNOT if g.kind == "cx"]
    assert len(routed) == len(SWAP_ROUTED_CNOT) and depth(routed) == depth(Circuit(3, 0, tuple(SWAP_ROUTED_CNOT)))


def test_permute_line_of_four():
    cm = CouplingMap(4, [[0, 1], [1, 2], [2, 3]])
    c = Circuit(4, 0, (CX(0, 3),))
    routed, layout = route(c, cm, mode=PERMUTE)
    assert is_coupling_legal(routed, cm)
    assert sum(1 for g in routed.gates if g.kind == "cx") == 3 * 2 + 1
    assert layout.l2p == [2, 0, 1, 3]
    # routed action == ideal CNOT followed by the layout relabelling
    perm = np.zeros((16, 16))
    for k in range(16):
        perm[permute_state(np.eye(16)[k], layout.l2p).argmax(), k] = 1
    assert np.allclose(dense_unitary(4, routed.gates), perm @ cnot_matrix(4, 0, 3))


def test_permute_logical_swap_is_relabel():
    cm = CouplingMap(3, [[0, 1], [1, 2]])
    routed, layout = route(Circuit(3, 0, (SWAP(0, 2), X(0))), cm, mode=PERMUTE)
    assert routed.gates == (X(2),)
    assert layout.l2p == [2, 1, 0]


def _gate_count_for_path(cm, path):
    """Restore-mode cost of moving the control along ``path``: swap there and back, then the CNOT."""
    total = 0
    for a, b in zip(path[:-2], path[1:-1]):
        both = (a, b) in cm.edges and (b, a) in cm.edges
        total += 2 * (3 if both else 3 + 4)
    c, t = path[-2], path[-1]
    return total + (1 if (c, t) in cm.edges else 5)


def test_single_cnot_cost_minimal_over_shortest_paths(rng):
    for _ in range(150):
        n = int(rng.integers(3, 9))
        edges = random_connected(rng, n)
        if rng.random() < 0.3:
            edges = sorted(set(edges) | {(b, a) for a, b in edges[: len(edges) // 2]})
        cm = CouplingMap(n, edges)
        a, b = (int(x) for x in rng.choice(n, 2, replace=False))
        paths = all_shortest_paths(n, edges, a, b)
        routed, layout = route(Circuit(n, 0, (CX(a, b),)), cm, mode=RESTORE)
        assert layout == Layout.identity(n)
        assert len(routed) == min(_gate_count_for_path(cm, p) for p in paths)
        cx = sum(1 for g in routed.gates if g.kind == "cx")
        assert cx == 1 + 2 * 3 * (len(paths[0]) - 2)


def test_routing_equivalence_ibmqx3_both_modes(rng):
    cm = ibmqx3()
    for trial in range(20):
        n = int(rng.integers(2, 11))
        c = random_unitary_circuit(rng, n, int(rng.integers(1, 31)))
        padded = Circuit(16, 0, c.gates)
        for mode in (RESTORE, PERMUTE):
            routed, layout = route(padded, cm, mode=mode)
            assert is_coupling_legal(routed, cm)
            if mode == RESTORE:
                assert layout == Layout.identity(16)
            assert routed_fidelity(padded, routed, layout.l2p, rng) >= 1 - 1e-10


def test_route_errors():
    cm = CouplingMap(2, [[0, 1]])
    with pytest.raises(RoutingError):
        route(Circuit(3, 0, ()), cm)
    with pytest.raises(RoutingError):
        route(Circuit(2, 0, ()), cm, mode="teleport")
    with pytest.raises(RoutingError):
        Layout([0, 0])


def test_initial_layout_respected():
    cm = CouplingMap(3, [[0, 1], [1, 2]])
    routed, layout = route(Circuit(3, 0, (CX(0, 1),)), cm, initial=Layout([1, 2, 0]))
    assert routed.gates == (CX(1, 2),)
    assert layout == Layout([1, 2, 0])


def test_compacted_check_matches_full_simulation(rng):
    cm = ibmqx3()
    c = Circuit(16, 0, random_unitary_circuit(rng, 6, 20).gates)
    routed, layout = route(c, cm, mode=PERMUTE)
    v = rng.normal(size=1 << 16) + 1j * rng.normal(size=1 << 16)
    psi = StateVector(v / np.linalg.norm(v))
    ideal = run_exhaustive(c, psi)[0].final_state.amplitudes
    got = run_exhaustive(routed, psi)[0].final_state.amplitudes
    assert abs(np.vdot(permute_state(ideal, layout.l2p), got)) >= 1 - 1e-10
    assert routed_fidelity(c, routed, layout.l2p, rng) >= 1 - 1e-10
    # a wrong relabelling is caught by the compacted check
    wrong = list(layout.l2p)
    moved = [q for q in range(16) if wrong[q] != q] or [0, 1]
    a, b = (moved[0], moved[1]) if len(moved) > 1 else (0, 1)
    wrong[a], wrong[b] = wrong[b], wrong[a]
    assert routed_fidelity(c, routed, wrong, rng) < 0.99
