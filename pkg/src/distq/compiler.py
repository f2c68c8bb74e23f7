"""Distributed compilation: partition, remote lowering, routing, verification, metrics."""
from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import qasm
from .circuit import SWAP, Circuit, CircuitError, Gate, interaction_graph, require_valid
from .devices import NetworkTopology, network_from_dict
from .remote import EprLedger, EprPair, LedgerError, generate_epr, lower_telegate, lower_teledata, swap_entanglement
from .routing import PERMUTE, RESTORE, route_network
from .simulator import MAX_QUBITS, TOL, ZERO_PROB, StateVector, _walk, random_qubit, run_exhaustive
from .circuit import depth as circuit_depth

TELEGATE, TELEDATA = "telegate", "teledata"
AUTO, IN_ORDER = "auto", "in_order"


class CompileError(ValueError):
    pass


class CapacityError(CompileError):
    pass


@dataclass(frozen=True)
class CostWeights:
    single_qubit: float = 1.0
    cnot: float = 10.0
    epr: float = 100.0
    measure: float = 30.0
    reset: float = 30.0


@dataclass(frozen=True)
class CompileOptions:
    strategy_threshold: int = 3
    routing: str = RESTORE
    placement: str = AUTO
    weights: CostWeights = field(default_factory=CostWeights)

    def check(self) -> None:
        if not isinstance(self.strategy_threshold, int) or self.strategy_threshold < 1:
            raise CompileError(f"malformed options: strategy threshold must be a positive integer, got {self.strategy_threshold!r}")
        if self.routing not in (RESTORE, PERMUTE):
            raise CompileError(f"malformed options: routing must be restore or permute, got {self.routing!r}")
        if self.placement not in (AUTO, IN_ORDER):
            raise CompileError(f"malformed options: placement must be auto or in_order, got {self.placement!r}")
        if any(v < 0 for v in asdict(self.weights).values()):
            raise CompileError("malformed options: negative cost weight")


# --------------------------------------------------------------------------- partitioning


@dataclass(frozen=True)
class Assignment:
    """Logical qubit -> (device id, local physical data qubit)."""

    placement: tuple[tuple[str, int], ...]

    def __getitem__(self, q: int) -> tuple[str, int]:
        return self.placement[q]

    def __len__(self) -> int:
        return len(self.placement)

    def device_of(self, q: int) -> str:
        return self.placement[q][0]

    def devices(self) -> list[str]:
        return [d for d, _ in self.placement]

    def global_positions(self, network: NetworkTopology) -> list[int]:
        return [network.global_index(d, p) for d, p in self.placement]

    def check(self, network: NetworkTopology) -> None:
        if len(set(self.placement)) != len(self.placement):
            raise CompileError("assignment is not injective")
        for d, p in self.placement:
            if p not in network.device(d).data_qubits:
                raise CompileError(f"assignment uses non-data qubit {d}:{p}")

    def to_dict(self) -> list:
        return [[d, p] for d, p in self.placement]


def cut_weight(graph: Mapping[tuple[int, int], int], device_of: Sequence[str]) -> int:
    return sum(w for (a, b), w in graph.items() if device_of[a] != device_of[b])


def _weights(graph: Mapping[tuple[int, int], int], n: int) -> np.ndarray:
    W = np.zeros((n, n), dtype=np.int64)
    for (a, b), w in graph.items():
        W[a, b] += w
        W[b, a] += w
    return W


def _greedy(W: np.ndarray, caps: list[int]) -> list[int]:
    n = W.shape[0]
    deg = W.sum(axis=1)
    side = [-1] * n
    left = set(range(n))
    for d, cap in enumerate(caps):
        members: list[int] = []
        while left and len(members) < cap:
            if members:
                conn = W[:, members].sum(axis=1)
                v = min(left, key=lambda x: (-conn[x], -deg[x], x))
            else:
                v = min(left, key=lambda x: (-deg[x], x))
            members.append(v)
            side[v] = d
            left.discard(v)
    return side


def refine(W: np.ndarray, side: list[int], caps: list[int]) -> list[int]:
    """Pairwise-exchange refinement; every accepted move strictly lowers the cut."""
    side = list(side)
    n, k = W.shape[0], len(caps)
    while True:
        onehot = np.zeros((n, k), dtype=np.int64)
        onehot[np.arange(n), side] = 1
        conn = W @ onehot  # conn[v, d] = weight from v into device d
        load = onehot.sum(axis=0)
        best, best_gain = None, 0
        for u in range(n):
            du = side[u]
            for d in range(k):
                if d != du and load[d] < caps[d]:
                    gain = conn[u, d] - conn[u, du]
                    if gain > best_gain:
                        best, best_gain = ("move", u, d), gain
            for v in range(u + 1, n):
                dv = side[v]
                if dv == du:
                    continue
                gain = conn[u, dv] - conn[u, du] + conn[v, du] - conn[v, dv] - 2 * W[u, v]
                if gain > best_gain:
                    best, best_gain = ("swap", u, v), gain
        if best is None:
            return side
        if best[0] == "move":
            side[best[1]] = best[2]
        else:
            _, u, v = best
            side[u], side[v] = side[v], side[u]


def partition(
    graph: Mapping[tuple[int, int], int],
    network: NetworkTopology,
    n_qubits: int | None = None,
) -> Assignment:
    """Spread logical qubits over devices, keeping heavy interaction edges local.

    Greedy capacity-constrained growth from the highest-degree vertex, then
    pairwise-exchange refinement. Inside a device, qubits with remote edges get
    the data qubits closest to a communication qubit.
    """
    if n_qubits is None:
        n_qubits = 1 + max((max(e) for e in graph), default=-1)
    devices = list(network.devices)
    caps = [len(d.data_qubits) for d in devices]
    if n_qubits > sum(caps):
        raise CapacityError(f"not enough data qubits: circuit needs {n_qubits}, network has {sum(caps)}")
    W = _weights(graph, n_qubits)
    side = refine(W, _greedy(W, caps), caps)
    remote = [int(sum(W[v, u] for u in range(n_qubits) if side[u] != side[v])) for v in range(n_qubits)]
    placement: list[tuple[str, int] | None] = [None] * n_qubits
    for d, dev in enumerate(devices):
        members = sorted((v for v in range(n_qubits) if side[v] == d), key=lambda v: (-remote[v], v))
        if dev.comm_qubits:
            dists = [dev.coupling.distances_from(c) for c in dev.comm_qubits]
            hop = {q: min(dd[q] for dd in dists) for q in dev.data_qubits}
        else:
            hop = {q: 0 for q in dev.data_qubits}
        slots = sorted(dev.data_qubits, key=lambda q: (hop[q], q))
        for v, q in zip(members, slots):
            placement[v] = (dev.device_id, q)
    return Assignment(tuple(placement))


def in_order_assignment(network: NetworkTopology, n_qubits: int) -> Assignment:
    """Logical qubit i on the i-th data qubit, devices in declaration order."""
    slots = [(d.device_id, q) for d in network.devices for q in d.data_qubits]
    if n_qubits > len(slots):
        raise CapacityError(f"not enough data qubits: circuit needs {n_qubits}, network has {len(slots)}")
    return Assignment(tuple(slots[:n_qubits]))


def round_robin_assignment(network: NetworkTopology, n_qubits: int) -> Assignment:
    """Baseline: qubit i to device i mod D, skipping full devices."""
    free = {d.device_id: list(d.data_qubits) for d in network.devices}
    ids = [d.device_id for d in network.devices]
    out = []
    for i in range(n_qubits):
        for k in range(len(ids)):
            dev = ids[(i + k) % len(ids)]
            if free[dev]:
                out.append((dev, free[dev].pop(0)))
                break
        else:
            raise CapacityError("not enough data qubits")
    return Assignment(tuple(out))


def optimal_cut(graph: Mapping[tuple[int, int], int], caps: Sequence[int], n_qubits: int) -> int:
    """Exhaustive minimum cut over every capacity-feasible device labelling."""
    best = None
    for labels in itertools.product(range(len(caps)), repeat=n_qubits):
        if any(labels.count(d) > c for d, c in enumerate(caps)):
            continue
        w = cut_weight(graph, labels)
        best = w if best is None else min(best, w)
    return best


# --------------------------------------------------------------------------- strategy


@dataclass(frozen=True)
class StrategyChoice:
    kind: str
    mover: int | None = None
    destination: str | None = None
    burst: int = 1
    burst_end: int | None = None


def _burst(circuit: Circuit, start: int, q: int, dst: str, device_of: Mapping[int, str]) -> tuple[int, int]:
    """Remote-gate weight of ``q``'s run of gates against ``dst`` starting at ``start``."""
    count, last = 0, start
    for j in range(start, len(circuit.gates)):
        g = circuit.gates[j]
        if q not in g.qubits:
            continue
        if g.is_two_qubit:
            other = g.qubits[1] if g.qubits[0] == q else g.qubits[0]
            if device_of[other] != dst:
                break
            count += 3 if g.kind == "swap" else 1
            last = j
        elif g.kind not in ("h", "x", "z", "u"):
            break
    return count, last


def select_strategy(
    circuit: Circuit,
    index: int,
    device_of: Mapping[int, str],
    threshold: int = 3,
) -> StrategyChoice:
    """Telegate unless one operand has at least ``threshold`` consecutive remote gates
    against the other's device, in which case it is cheaper to teleport it there and back.
    """
    gate = circuit.gates[index]
    a, b = gate.qubits
    if device_of[a] == device_of[b]:
        raise CompileError(f"gate {index} is not remote")
    best = None
    for mover, partner in ((a, b), (b, a)):
        dst = device_of[partner]
        count, last = _burst(circuit, index, mover, dst, device_of)
        if best is None or count > best.burst:
            best = StrategyChoice(TELEDATA, mover, dst, count, last)
    if best.burst >= threshold:
        return best
    return StrategyChoice(TELEGATE, burst=best.burst)


# --------------------------------------------------------------------------- plan & metrics


@dataclass(frozen=True)
class Metrics:
    remote_op_count: int
    epr_pairs_consumed: int
    lowered_depth: int
    total_cost: float
    isolated_dimension: int
    clustered_dimension: int

    def to_dict(self) -> dict:
        return asdict(self)


def isolated_dimension(network: NetworkTopology) -> int:
    """States reachable by the devices working alone: every qubit computes, no communication."""
    return sum(2 ** d.n_qubits for d in network.devices)


def clustered_dimension(network: NetworkTopology) -> int:
    """States of the virtual processor formed by all data qubits together."""
    return 2 ** network.n_data_qubits


@dataclass
class DistributedPlan:
    network: NetworkTopology
    assignment: Assignment
    circuit: Circuit
    ledger_summary: dict
    n_logical: int
    n_logical_clbits: int
    final_positions: tuple[int, ...]
    remote_op_count: int
    options: CompileOptions = field(default_factory=CompileOptions)
    pass_counts: dict = field(default_factory=dict)
    decisions: list = field(default_factory=list)
    metrics: Metrics | None = None

    def to_dict(self) -> dict:
        return {
            "network": self.network.to_dict(),
            "assignment": self.assignment.to_dict(),
            "final_positions": list(self.final_positions),
            "n_logical": self.n_logical,
            "n_logical_clbits": self.n_logical_clbits,
            "remote_op_count": self.remote_op_count,
            "ledger": self.ledger_summary,
            "options": {
                "strategy_threshold": self.options.strategy_threshold,
                "routing": self.options.routing,
                "placement": self.options.placement,
                "weights": asdict(self.options.weights),
            },
            "decisions": self.decisions,
            "lowered": qasm.dumps(self.circuit),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "DistributedPlan":
        network = network_from_dict(doc["network"])
        opts = doc.get("options", {})
        options = CompileOptions(
            strategy_threshold=opts.get("strategy_threshold", 3),
            routing=opts.get("routing", RESTORE),
            placement=opts.get("placement", AUTO),
            weights=CostWeights(**opts.get("weights", {})),
        )
        plan = cls(
            network=network,
            assignment=Assignment(tuple((str(d), int(p)) for d, p in doc["assignment"])),
            circuit=qasm.loads(doc["lowered"]),
            ledger_summary=doc["ledger"],
            n_logical=doc["n_logical"],
            n_logical_clbits=doc["n_logical_clbits"],
            final_positions=tuple(doc["final_positions"]),
            remote_op_count=doc["remote_op_count"],
            options=options,
            decisions=doc.get("decisions", []),
        )
        plan.metrics = compute_metrics(plan)
        return plan


def compute_metrics(plan: DistributedPlan, weights: CostWeights | None = None) -> Metrics:
    w = weights or plan.options.weights
    net = plan.network
    owner = {}
    for d in net.devices:
        for q in range(d.n_qubits):
            owner[net.global_index(d.device_id, q)] = d.device_id
    link_cost = {}
    for l in net.links:
        ga, gb = net.global_index(*l.a), net.global_index(*l.b)
        link_cost[(ga, gb)] = link_cost[(gb, ga)] = l.epr_cost
    total = 0.0
    for g in plan.circuit.gates:
        if g.kind == "cx":
            a, b = g.qubits
            total += w.epr * link_cost[(a, b)] if owner[a] != owner[b] else w.cnot
        elif g.kind == "measure":
            total += w.measure
        elif g.kind == "reset":
            total += w.reset
        else:
            total += w.single_qubit
    return Metrics(
        remote_op_count=plan.remote_op_count,
        epr_pairs_consumed=int(plan.ledger_summary["pairs_consumed"]),
        lowered_depth=circuit_depth(plan.circuit),
        total_cost=float(total),
        isolated_dimension=isolated_dimension(net),
        clustered_dimension=clustered_dimension(net),
    )


# --------------------------------------------------------------------------- compile


class _Lowering:
    """Mutable state of one compilation; owns the ledger exclusively."""

    def __init__(self, circuit: Circuit, network: NetworkTopology, assignment: Assignment, options: CompileOptions):
        self.circuit = circuit
        self.network = network
        self.options = options
        self.home = assignment.global_positions(network)
        self.loc = list(self.home)
        self.ledger = EprLedger(network)
        self.out: list[Gate] = []
        self.next_clbit = circuit.n_clbits
        self.decisions: list[dict] = []
        self.migration: dict | None = None

    def dev(self, g: int) -> str:
        return self.network.locate(g)[0]

    def bits(self) -> tuple[int, int]:
        c = self.next_clbit
        self.next_clbit += 2
        return c, c + 1

    def establish(self, src: str, dst: str) -> EprPair:
        """Emit EPR generation (and swapping) so that ``src`` and ``dst`` share a Φ+."""
        path = self.network.link_path(src, dst)
        pairs = []
        for u, v in zip(path, path[1:]):
            for li in self.network.links_between(u, v):
                l = self.network.links[li]
                if self.ledger.is_free(l.endpoint_at(u)) and self.ledger.is_free(l.endpoint_at(v)):
                    break
            else:
                raise CompileError(f"no free communication qubits on any link {u}-{v}")
            gates, pair = generate_epr(li, self.ledger, first=u)
            self.out += gates
            pairs.append(pair)
        swaps = [self.bits() for _ in pairs[1:]]
        gates, pair = swap_entanglement(pairs, self.ledger, swaps)
        self.out += gates
        return pair

    def telegate(self, c: int, t: int) -> None:
        dc, dt = self.dev(self.loc[c]), self.dev(self.loc[t])
        pair = self.establish(dc, dt)
        self.out += lower_telegate(self.loc[c], self.loc[t], pair, self.ledger, self.bits())

    def _teleport(self, q: int, dst: str, slot: int) -> None:
        pair = self.establish(self.dev(self.loc[q]), dst)
        self.out += lower_teledata(self.loc[q], pair, self.ledger, self.bits())
        landing = self.network.global_index(*pair.b)
        self.out.append(SWAP(landing, slot))
        self.ledger.free(pair.b)
        self.loc[q] = slot

    def free_slot(self, device_id: str) -> int | None:
        dev = self.network.device(device_id)
        taken = set(self.loc) | set(self.home)
        free = [q for q in dev.data_qubits if self.network.global_index(device_id, q) not in taken]
        if not free:
            return None
        dist = [dev.coupling.distances_from(c) for c in dev.comm_qubits] or [[0] * dev.n_qubits]
        best = min(free, key=lambda q: (min(d[q] for d in dist), q))
        return self.network.global_index(device_id, best)

    def migrate(self, choice: StrategyChoice, index: int) -> bool:
        slot = self.free_slot(choice.destination)
        if slot is None:
            return False
        self._teleport(choice.mover, choice.destination, slot)
        self.migration = {"qubit": choice.mover, "end": choice.burst_end}
        self.decisions.append(
            {"gate": index, "strategy": TELEDATA, "qubit": choice.mover, "to": choice.destination, "burst": choice.burst}
        )
        return True

    def return_home(self) -> None:
        q = self.migration["qubit"]
        self._teleport(q, self.dev(self.home[q]), self.home[q])
        self.migration = None

    def run(self) -> None:
        k = self.options.strategy_threshold
        for i, g in enumerate(self.circuit.gates):
            if g.is_two_qubit and self.dev(self.loc[g.qubits[0]]) != self.dev(self.loc[g.qubits[1]]):
                device_of = {q: self.dev(self.loc[q]) for q in range(self.circuit.n_qubits)}
                choice = select_strategy(self.circuit, i, device_of, k) if self.migration is None else StrategyChoice(TELEGATE)
                if choice.kind == TELEDATA and self.migrate(choice, i):
                    self.out.append(g.remap(self.loc))
                else:
                    self.decisions.append({"gate": i, "strategy": TELEGATE})
                    a, b = g.qubits
                    if g.kind == "cx":
                        self.telegate(a, b)
                    else:
                        self.telegate(a, b)
                        self.telegate(b, a)
                        self.telegate(a, b)
            else:
                self.out.append(g.remap(self.loc))
            if self.migration is not None and i >= self.migration["end"]:
                self.return_home()


def compile_circuit(
    circuit: Circuit,
    network: NetworkTopology,
    options: CompileOptions | None = None,
    assignment: Assignment | None = None,
) -> DistributedPlan:
    """Lower ``circuit`` onto ``network``; deterministic for identical inputs."""
    options = options or CompileOptions()
    options.check()
    require_valid(circuit)
    if assignment is None:
        if options.placement == IN_ORDER:
            assignment = in_order_assignment(network, circuit.n_qubits)
        else:
            assignment = partition(interaction_graph(circuit), network, circuit.n_qubits)
    if len(assignment) != circuit.n_qubits:
        raise CompileError("assignment size differs from the circuit")
    assignment.check(network)

    low = _Lowering(circuit, network, assignment, options)
    try:
        low.run()
    except LedgerError as exc:
        raise CompileError(str(exc)) from exc
    distributed = Circuit(network.n_qubits, low.next_clbit, tuple(low.out))
    routed, final, swaps = route_network(distributed, network, options.routing)

    devs = assignment.devices()
    remote_ops = sum(
        (3 if g.kind == "swap" else 1) for g in circuit.gates if g.is_two_qubit and devs[g.qubits[0]] != devs[g.qubits[1]]
    )
    plan = DistributedPlan(
        network=network,
        assignment=assignment,
        circuit=routed,
        ledger_summary=low.ledger.to_dict(),
        n_logical=circuit.n_qubits,
        n_logical_clbits=circuit.n_clbits,
        final_positions=tuple(final[h] for h in low.home),
        remote_op_count=remote_ops,
        options=options,
        pass_counts={
            "input": {"gates": len(circuit), **circuit.count_ops()},
            "remote_lowered": {"gates": len(distributed), **distributed.count_ops()},
            "routed": {"gates": len(routed), "swaps_inserted": swaps, **routed.count_ops()},
        },
        decisions=low.decisions,
    )
    plan.metrics = compute_metrics(plan)
    return plan


# --------------------------------------------------------------------------- verification


@dataclass
class VerifyReport:
    status: str
    max_infidelity: float = 0.0
    cases: int = 0
    branches: int = 0
    failures: list = field(default_factory=list)
    qubits_simulated: int = 0

    @property
    def ok(self) -> bool:
        return self.status == "passed"

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "max_infidelity": self.max_infidelity,
            "cases": self.cases,
            "branches": self.branches,
            "qubits_simulated": self.qubits_simulated,
            "failures": self.failures[:10],
        }


def _test_inputs(n: int, n_random: int, seed: int) -> list[list[np.ndarray]]:
    zero, one = np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)
    if n <= 3:
        basis = [[one if (k >> q) & 1 else zero for q in range(n)] for k in range(1 << n)]
    else:
        basis = [[zero] * n, [one] * n] + [[one if q == j else zero for q in range(n)] for j in range(n)]
    rng = np.random.default_rng(seed)
    rand = [[random_qubit(rng) for _ in range(n)] for _ in range(n_random)]
    return basis + rand


def _merge_dead_bits(read_until: dict[int, int], tol: float):
    """Branch hook: clear correction bits nobody reads any more and fold duplicate branches."""

    def hook(gi: int, live: list) -> list:
        dead = [c for c, last in read_until.items() if last == gi]
        if not dead:
            return live
        groups: dict[tuple, list] = {}
        for bits, p, amps in live:
            for c in dead:
                bits[c] = 0
            key = tuple(bits)
            for entry in groups.setdefault(key, []):
                if abs(np.vdot(entry[2], amps)) >= 1 - tol:
                    entry[1] += p
                    break
            else:
                groups[key].append([list(bits), p, amps])
        return [tuple(e) for entries in groups.values() for e in entries]

    return hook


def verify(
    plan: DistributedPlan,
    original: Circuit,
    *,
    n_random: int = 20,
    seed: int = 0,
    tol: float = TOL,
    cap: int = MAX_QUBITS,
) -> VerifyReport:
    """Branch-exhaustive check that the lowered circuit acts like ``original``.

    Starting from basis states and ``n_random`` random product states, every
    measurement branch of the lowered circuit must match the ideal branch with
    the same original classical bits, up to global phase, with matching
    probability. Ancilla and communication qubits must finish in |0>.
    """
    require_valid(original)
    if original.n_qubits != plan.n_logical:
        raise CompileError("plan and circuit disagree on the number of logical qubits")
    home = plan.assignment.global_positions(plan.network)
    used = sorted(set(q for g in plan.circuit.gates for q in g.qubits) | set(home) | set(plan.final_positions))
    if len(used) > cap:
        return VerifyReport("unverifiable at desk scale", qubits_simulated=len(used))
    compact = {g: i for i, g in enumerate(used)}
    lowered = Circuit(len(used), plan.circuit.n_clbits, tuple(g.remap(compact) for g in plan.circuit.gates))
    m, n = len(used), original.n_qubits
    start_pos = [compact[h] for h in home]
    end_pos = [compact[f] for f in plan.final_positions]

    # correction bits die after their last conditional read
    read_until: dict[int, int] = {}
    for gi, g in enumerate(lowered.gates):
        if g.kind == "measure" and g.clbit >= plan.n_logical_clbits:
            read_until.setdefault(g.clbit, gi)
        if g.kind == "if" and g.clbit >= plan.n_logical_clbits:
            read_until[g.clbit] = gi
    hook = _merge_dead_bits(read_until, tol)

    idx = np.arange(1 << n)
    embed = np.zeros(1 << n, dtype=np.int64)
    for q in range(n):
        embed |= ((idx >> q) & 1) << end_pos[q]

    report = VerifyReport("passed", qubits_simulated=m)
    zero = np.array([1, 0], dtype=complex)
    for case, vecs in enumerate(_test_inputs(n, n_random, seed)):
        ideal = run_exhaustive(original, StateVector.product(vecs) if n else StateVector.zero(0))
        per_qubit = [zero] * m
        for q in range(n):
            per_qubit[start_pos[q]] = vecs[q]
        live = _walk(lowered, StateVector.product(per_qubit), hook)
        matched = [0.0] * len(ideal)
        expected = []
        for br in ideal:
            e = np.zeros(1 << m, dtype=np.complex128)
            e[embed] = br.final_state.amplitudes
            expected.append(e)
        for bits, p, amps in live:
            key = tuple(bits[: plan.n_logical_clbits])
            best, best_j = -1.0, None
            for j, br in enumerate(ideal):
                if br.classical_bits == key:
                    f = abs(np.vdot(expected[j], amps))
                    if f > best:
                        best, best_j = f, j
            infid = 1.0 - best if best_j is not None else 1.0
            report.max_infidelity = float(max(report.max_infidelity, infid))
            report.branches += 1
            if best_j is None or infid > tol:
                report.failures.append({"case": case, "bits": list(key), "infidelity": infid})
            else:
                matched[best_j] += p
        for j, br in enumerate(ideal):
            if abs(matched[j] - br.probability) > 1e-9:
                report.failures.append(
                    {"case": case, "bits": list(br.classical_bits), "probability": matched[j], "expected": br.probability}
                )
        report.cases += 1
    if report.failures:
        report.status = "failed"
    return report


__all__ = [
    "Assignment",
    "CapacityError",
    "CompileError",
    "CompileOptions",
    "CostWeights",
    "DistributedPlan",
    "Metrics",
    "StrategyChoice",
    "VerifyReport",
    "compile_circuit",
    "compute_metrics",
    "cut_weight",
    "clustered_dimension",
    "in_order_assignment",
    "isolated_dimension",
    "optimal_cut",
    "partition",
    "refine",
    "round_robin_assignment",
    "select_strategy",
    "verify",
    "CircuitError",
]
