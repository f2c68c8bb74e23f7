import numpy as np
import pytest

from distq.circuit import Circuit
from distq.devices import load_network
from distq.remote import EprLedger, LedgerError, generate_epr, lower_teledata, lower_telegate, swap_entanglement
from distq.simulator import StateVector, random_qubit, run_exhaustive

from .conftest import cnot_matrix, line_network

ZERO = np.array([1, 0], dtype=complex)
ONE = np.array([0, 1], dtype=complex)


def product(n, assign):
    return StateVector.product([assign.get(q, ZERO) for q in range(n)])


def phi_plus_on(n, a, b):
    v = np.zeros(1 << n, dtype=complex)
    v[0] = v[(1 << a) | (1 << b)] = 1 / np.sqrt(2)
    return v


@pytest.fixture
def two_dev():
    return load_network("2x-ibmqx2-linked")


def teledata_circuit(net, src=0):
    ledger = EprLedger(net)
    gen, pair = generate_epr(0, ledger, first="A")
    body = lower_teledata(src, pair, ledger, (0, 1))
    return Circuit(net.n_qubits, 2, tuple(gen + body)), pair, ledger


def test_epr_generation_gives_phi_plus(two_dev):
    ledger = EprLedger(two_dev)
    gates, pair = generate_epr(0, ledger)
    out = run_exhaustive(Circuit(two_dev.n_qubits, 0, tuple(gates)))
    assert len(out) == 1
    assert abs(np.vdot(phi_plus_on(10, 4, 9), out[0].final_state.amplitudes)) == pytest.approx(1.0, abs=1e-12)
    assert ledger.pairs_generated == 1 and not ledger.is_free(("A", 4))


def test_busy_endpoint_rejected(two_dev):
    ledger = EprLedger(two_dev)
    generate_epr(0, ledger)
    with pytest.raises(LedgerError, match="communication qubit occupied"):
        generate_epr(0, ledger)


def test_recycled_generation_counts(two_dev):
    ledger = EprLedger(two_dev)
    _, pair = generate_epr(0, ledger)
    lower_telegate(0, 5, pair, ledger, (0, 1))
    assert ledger.all_free()
    generate_epr(0, ledger)
    assert ledger.pairs_generated == 2 and ledger.pairs_consumed == 1


def test_unallocated_pair_rejected(two_dev):
    ledger = EprLedger(two_dev)
    _, pair = generate_epr(0, ledger)
    lower_telegate(0, 5, pair, ledger, (0, 1))
    with pytest.raises(LedgerError, match="not allocated"):
        lower_telegate(0, 5, pair, ledger, (0, 1))


def test_teledata_one_and_plus(two_dev):
    c, pair, _ = teledata_circuit(two_dev)
    for psi in (ONE, np.array([1, 1]) / np.sqrt(2)):
        branches = run_exhaustive(c, product(10, {0: psi}))
        assert len(branches) == 4
        expected = product(10, {9: psi}).amplitudes
        for b in branches:
            assert b.probability == pytest.approx(0.25, abs=1e-10)
            assert abs(np.vdot(expected, b.final_state.amplitudes)) == pytest.approx(1.0, abs=1e-10)


def test_teledata_random_states_and_cleanup(two_dev, rng):
    c, pair, ledger = teledata_circuit(two_dev)
    assert ledger.pairs_consumed == 1
    assert ledger.holding(pair.b) == "data" and ledger.is_free(pair.a)
    for _ in range(100):
        psi = random_qubit(rng)
        expected = product(10, {9: psi}).amplitudes  # src and comm back in |0>
        for b in run_exhaustive(c, product(10, {0: psi})):
            assert abs(np.vdot(expected, b.final_state.amplitudes)) >= 1 - 1e-10


def telegate_circuit(net):
    ledger = EprLedger(net)
    gen, pair = generate_epr(0, ledger, first="A")
    body = lower_telegate(0, 5, pair, ledger, (0, 1))
    return Circuit(net.n_qubits, 2, tuple(gen + body)), ledger


def test_telegate_truth_table(two_dev):
    c, ledger = telegate_circuit(two_dev)
    assert ledger.pairs_consumed == 1 and ledger.all_free()
    for k in range(4):
        cv, tv = (k >> 0) & 1, (k >> 1) & 1
        vec = {0: ONE if cv else ZERO, 5: ONE if tv else ZERO}
        expected = product(10, {0: vec[0], 5: ONE if cv ^ tv else ZERO}).amplitudes
        branches = run_exhaustive(c, product(10, vec))
        assert len(branches) == 4
        for b in branches:
            assert abs(np.vdot(expected, b.final_state.amplitudes)) >= 1 - 1e-10


def test_telegate_entangles_plus_zero(two_dev):
    c, _ = telegate_circuit(two_dev)
    for b in run_exhaustive(c, product(10, {0: np.array([1, 1]) / np.sqrt(2)})):
        assert abs(np.vdot(phi_plus_on(10, 0, 5), b.final_state.amplitudes)) >= 1 - 1e-10


def test_telegate_random_products_against_ideal(two_dev, rng):
    c, _ = telegate_circuit(two_dev)
    u = cnot_matrix(2, 0, 1)
    for _ in range(100):
        a, t = random_qubit(rng), random_qubit(rng)
        pair_out = u @ np.kron(t, a)  # index bit 0 = control
        expected = np.zeros(1 << 10, dtype=complex)
        for k in range(4):
            expected[((k & 1) << 0) | ((k >> 1) << 5)] = pair_out[k]
        for b in run_exhaustive(c, product(10, {0: a, 5: t})):
            assert abs(np.vdot(expected, b.final_state.amplitudes)) >= 1 - 1e-10


@pytest.mark.parametrize("hops", [1, 2, 3])
def test_entanglement_swapping(hops):
    net = line_network(hops + 1)
    ledger = EprLedger(net)
    gates, pairs = [], []
    for li in range(hops):
        g, p = generate_epr(li, ledger, first=f"D{li}")
        gates += g
        pairs.append(p)
    bits = [(2 * i, 2 * i + 1) for i in range(hops - 1)]
    sw, end = swap_entanglement(pairs, ledger, bits)
    assert (len(sw) == 0) == (hops == 1)
    c = Circuit(net.n_qubits, max(1, 2 * (hops - 1)), tuple(gates + sw))
    branches = run_exhaustive(c)
    assert len(branches) == 4 ** (hops - 1)
    a, b = net.global_index(*end.a), net.global_index(*end.b)
    assert end.a[0] == "D0" and end.b[0] == f"D{hops}"
    target = phi_plus_on(net.n_qubits, a, b)
    for br in branches:
        assert abs(np.vdot(target, br.final_state.amplitudes)) >= 1 - 1e-10
    assert ledger.pairs_generated == hops
    assert ledger.pairs_consumed == hops - 1  # the end-to-end pair is consumed by its user
    # intermediate comm qubits are free again
    assert {ep for ep in ledger.occupancy} == {end.a, end.b}


def test_swap_bits_and_path_checks():
    net = line_network(3)
    ledger = EprLedger(net)
    _, p0 = generate_epr(0, ledger, first="D0")
    _, p1 = generate_epr(1, ledger, first="D1")
    with pytest.raises(LedgerError, match="classical bits"):
        swap_entanglement([p0, p1], ledger, [])
    with pytest.raises(LedgerError, match="intermediate"):
        swap_entanglement([p1, p0], ledger, [(0, 1)])
    with pytest.raises(LedgerError):
        swap_entanglement([], ledger, [])
