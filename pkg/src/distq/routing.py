"""Coupling-map routing: reversed-CNOT conjugation and SWAP insertion.

Two-qubit gates are processed in circuit order. A non-adjacent CNOT moves its
control along the shortest path until it neighbours the target; in
``restore`` mode the swaps are undone right after the gate, in ``permute``
mode they persist and the layout records where every logical qubit ended up.
"""
from __future__ import annotations

from typing import Iterable, Sequence

from .circuit import CX, Circuit, CircuitError, Gate, H, require_valid
from .devices import DIRECT, REVERSED, CouplingMap, adjacency_kind, shortest_path

RESTORE, PERMUTE = "restore", "permute"


class RoutingError(ValueError):
    pass


class Layout:
    """Bijection logical qubit <-> physical qubit on one device."""

    def __init__(self, l2p: Sequence[int]):
        l2p = [int(p) for p in l2p]
        if sorted(l2p) != list(range(len(l2p))):
            raise RoutingError(f"layout {l2p} is not a bijection")
        self.l2p = l2p
        self.p2l = [0] * len(l2p)
        for l, p in enumerate(l2p):
            self.p2l[p] = l

    @classmethod
    def identity(cls, n: int) -> "Layout":
        return cls(range(n))

    def copy(self) -> "Layout":
        return Layout(self.l2p)

    def __getitem__(self, logical: int) -> int:
        return self.l2p[logical]

    def __len__(self) -> int:
        return len(self.l2p)

    def __eq__(self, other) -> bool:
        return isinstance(other, Layout) and self.l2p == other.l2p

    def __repr__(self) -> str:
        return f"Layout({self.l2p})"

    def swap_physical(self, a: int, b: int) -> None:
        la, lb = self.p2l[a], self.p2l[b]
        self.p2l[a], self.p2l[b] = lb, la
        self.l2p[la], self.l2p[lb] = b, a


def lower_reversed_cnot(control: int, target: int, coupling: CouplingMap | None = None) -> list[Gate]:
    """CNOT(control -> target) built from the physical edge target -> control."""
    if coupling is not None:
        if (target, control) not in coupling.edges or (control, target) in coupling.edges:
            raise RoutingError(f"reversed CNOT needs edge {target}->{control} and no edge {control}->{target}")
    return [H(control), H(target), CX(target, control), H(control), H(target)]


def lower_cnot(control: int, target: int, coupling: CouplingMap) -> list[Gate]:
    kind = adjacency_kind(coupling, control, target)
    if kind == DIRECT:
        return [CX(control, target)]
    if kind == REVERSED:
        return lower_reversed_cnot(control, target)
    raise RoutingError(f"qubits {control} and {target} are not adjacent")


def lower_swap(a: int, b: int, coupling: CouplingMap) -> list[Gate]:
    """Three alternating CNOTs on an edge, each legalised for its direction.

    The outer pair follows the physical edge, so only the middle CNOT needs
    reversing on a one-way edge.
    """
    if not coupling.adjacent(a, b):
        raise RoutingError(f"cannot swap non-adjacent qubits {a} and {b}")
    if (a, b) not in coupling.edges:
        a, b = b, a
    return lower_cnot(a, b, coupling) + lower_cnot(b, a, coupling) + lower_cnot(a, b, coupling)


def _cnot_cost(coupling: CouplingMap, c: int, t: int) -> int:
    return 1 if (c, t) in coupling.edges else 5


def _swap_cost(coupling: CouplingMap, a: int, b: int) -> int:
    return 3 if (a, b) in coupling.edges and (b, a) in coupling.edges else 7


def cheapest_shortest_path(coupling: CouplingMap, a: int, b: int, swap_factor: int = 2) -> list[int]:
    """Shortest path for moving a CNOT control from ``a`` next to ``b``.

    Among minimum-hop paths, pick the one with the fewest emitted gates
    (``swap_factor`` swaps per hop before the last, plus the final CNOT);
    remaining ties go to the lexicographically smallest sequence.
    """
    if a == b:
        return [a]
    dist = coupling.distances_from(b)
    memo: dict[int, int] = {}

    def finish(v: int) -> int:
        if v not in memo:
            if dist[v] == 1:
                memo[v] = _cnot_cost(coupling, v, b)
            else:
                memo[v] = min(
                    swap_factor * _swap_cost(coupling, v, u) + finish(u)
                    for u in coupling.neighbours[v]
                    if dist[u] == dist[v] - 1
                )
        return memo[v]

    path = [a]
    while dist[path[-1]] > 1:
        v = path[-1]
        path.append(
            min(
                (u for u in coupling.neighbours[v] if dist[u] == dist[v] - 1),
                key=lambda u: (swap_factor * _swap_cost(coupling, v, u) + finish(u), u),
            )
        )
    path.append(b)
    return path


class _DeviceRouter:
    """Routing state for one coupling map, emitting gates on ``offset + physical``."""

    def __init__(self, coupling: CouplingMap, layout: Layout, mode: str, offset: int = 0):
        self.coupling = coupling
        self.layout = layout
        self.mode = mode
        self.offset = offset
        self.history: list[tuple[int, int]] = []
        self.swaps_inserted = 0

    def _emit(self, gates: Iterable[Gate]) -> list[Gate]:
        if not self.offset:
            return list(gates)
        return [g.remap(lambda q, o=self.offset: q + o) for g in gates]

    def _physical_swap(self, a: int, b: int, out: list[Gate]) -> None:
        out.extend(self._emit(lower_swap(a, b, self.coupling)))
        self.layout.swap_physical(a, b)
        self.swaps_inserted += 1

    def restore(self, out: list[Gate]) -> None:
        """Undo every persistent swap since the last restore."""
        while self.history:
            a, b = self.history.pop()
            if self.coupling.adjacent(a, b):
                self._physical_swap(a, b, out)
                continue
            # virtual swaps may join distant qubits: bubble along a path and back
            path = shortest_path(self.coupling, a, b)
            hops = list(zip(path, path[1:]))
            for x, y in hops + hops[-2::-1]:
                self._physical_swap(x, y, out)

    def one_qubit(self, gate: Gate, out: list[Gate]) -> None:
        out.extend(self._emit([gate.remap(self.layout.l2p)]))

    def cnot(self, c: int, t: int, out: list[Gate], mode: str | None = None) -> None:
        mode = mode or self.mode
        pc, pt = self.layout[c], self.layout[t]
        path = cheapest_shortest_path(self.coupling, pc, pt, 2 if mode == RESTORE else 1)
        moves = []
        for nxt in path[1:-1]:
            cur = self.layout[c]
            self._physical_swap(cur, nxt, out)
            moves.append((cur, nxt))
        out.extend(self._emit(lower_cnot(self.layout[c], self.layout[t], self.coupling)))
        if mode == RESTORE:
            for a, b in reversed(moves):
                self._physical_swap(a, b, out)
        else:
            self.history.extend(moves)

    def swap(self, a: int, b: int, out: list[Gate], mode: str | None = None) -> None:
        mode = mode or self.mode
        if mode == PERMUTE:
            # relabel only: the logical swap is absorbed into the layout
            pa, pb = self.layout[a], self.layout[b]
            self.layout.swap_physical(pa, pb)
            self.history.append((pa, pb))
            return
        pa, pb = self.layout[a], self.layout[b]
        path = shortest_path(self.coupling, pa, pb)
        moves = []
        for nxt in path[1:-1]:
            cur = self.layout[a]
            self._physical_swap(cur, nxt, out)
            moves.append((cur, nxt))
        out.extend(self._emit(lower_swap(self.layout[a], self.layout[b], self.coupling)))
        # the layout still names a's old slot, which now holds b's old state
        for x, y in reversed(moves):
            self._physical_swap(x, y, out)


def route(
    circuit: Circuit,
    coupling: CouplingMap,
    initial: Layout | None = None,
    mode: str = RESTORE,
) -> tuple[Circuit, Layout]:
    """Make every two-qubit gate of ``circuit`` legal on ``coupling``.

    Returns the routed circuit over physical qubits and the final layout. In
    ``restore`` mode the final layout equals ``initial``.
    """
    if mode not in (RESTORE, PERMUTE):
        raise RoutingError(f"unknown routing mode {mode!r}")
    require_valid(circuit)
    if circuit.n_qubits > coupling.n_qubits:
        raise RoutingError(f"circuit uses {circuit.n_qubits} qubits, coupling map has {coupling.n_qubits}")
    layout = (initial or Layout.identity(coupling.n_qubits)).copy()
    if len(layout) != coupling.n_qubits:
        raise RoutingError("layout size differs from the coupling map")
    router = _DeviceRouter(coupling, layout, mode)
    out: list[Gate] = []
    for gate in circuit.gates:
        if gate.kind == "cx":
            router.cnot(*gate.qubits, out)
        elif gate.kind == "swap":
            router.swap(*gate.qubits, out)
        else:
            router.one_qubit(gate, out)
    return Circuit(coupling.n_qubits, circuit.n_clbits, tuple(out)), router.layout


def is_coupling_legal(circuit: Circuit, coupling: CouplingMap) -> bool:
    return all(g.kind != "swap" and (g.kind != "cx" or g.qubits in coupling.edges) for g in circuit.gates)


def route_network(circuit: Circuit, network, mode: str = RESTORE) -> tuple[Circuit, list[int], int]:
    """Route a global circuit over every device of ``network``.

    Two-qubit gates inside one device are routed on its coupling map.
    Cross-device CNOTs are only allowed between the two endpoints of a link
    (they stand for EPR generation) and pass through untouched. Gates that
    touch a communication qubit are always routed in restore mode, after any
    persistent swaps on that device have been undone, so link endpoints stay
    where the links are.

    Returns ``(routed, final_positions, swaps_inserted)`` where
    ``final_positions[g]`` is the physical home of virtual qubit ``g``.
    """
    if mode not in (RESTORE, PERMUTE):
        raise RoutingError(f"unknown routing mode {mode!r}")
    routers = {}
    owner: list[tuple[str, int]] = []
    for d in network.devices:
        off = network.offsets[d.device_id]
        routers[d.device_id] = _DeviceRouter(d.coupling, Layout.identity(d.n_qubits), mode, off)
        owner.extend((d.device_id, q) for q in range(d.n_qubits))
    link_pairs = set()
    for l in network.links:
        ga, gb = network.global_index(*l.a), network.global_index(*l.b)
        link_pairs.add((ga, gb))
        link_pairs.add((gb, ga))
    comm = network.comm_globals
    out: list[Gate] = []
    for gate in circuit.gates:
        devs = {owner[q][0] for q in gate.qubits}
        if len(devs) > 1:
            if gate.kind != "cx" or gate.qubits not in link_pairs:
                raise RoutingError(f"cross-device gate {gate} is not on a quantum link")
            for d in sorted(devs):
                routers[d].restore(out)
            out.append(gate)
            continue
        dev = devs.pop()
        r = routers[dev]
        local = [owner[q][1] for q in gate.qubits]
        touches_comm = any(q in comm for q in gate.qubits)
        if touches_comm:
            r.restore(out)
        sub_mode = RESTORE if touches_comm else None
        if gate.kind == "cx":
            r.cnot(local[0], local[1], out, sub_mode)
        elif gate.kind == "swap":
            r.swap(local[0], local[1], out, sub_mode)
        else:
            out.extend([Gate(gate.kind, (r.offset + r.layout[local[0]],), gate.clbit, gate.body, gate.matrix)])
    final = []
    for d in network.devices:
        r = routers[d.device_id]
        final.extend(r.offset + p for p in r.layout.l2p)
    swaps = sum(r.swaps_inserted for r in routers.values())
    return Circuit(circuit.n_qubits, circuit.n_clbits, tuple(out)), final, swaps


__all__ = [
    "Layout",
    "RESTORE",
    "PERMUTE",
    "RoutingError",
    "CircuitError",
    "lower_reversed_cnot",
    "lower_cnot",
    "lower_swap",
    "route",
    "cheapest_shortest_path",
    "route_network",
    "is_coupling_legal",
]
