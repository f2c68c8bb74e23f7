"""Processor coupling maps, communication qubits and the links between processors."""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Iterable

DIRECT, REVERSED, NON_ADJACENT = "direct", "reversed", "non_adjacent"


class TopologyError(ValueError):
    """Invalid device or network description."""


class ConfigParseError(TopologyError):
    def __init__(self, message: str, line: int | None = None, field_name: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field_name:
            where.append(f"field {field_name!r}")
        super().__init__((", ".join(where) + ": " if where else "") + message)
        self.line = line
        self.field = field_name


def _connected(n: int, pairs: Iterable[tuple[int, int]]) -> bool:
    if n <= 1:
        return True
    adj: dict[int, set[int]] = {i: set() for i in range(n)}
    for a, b in pairs:
        adj[a].add(b)
        adj[b].add(a)
    seen = {0}
    todo = [0]
    while todo:
        for nb in adj[todo.pop()]:
            if nb not in seen:
                seen.add(nb)
                todo.append(nb)
    return len(seen) == n


@dataclass(frozen=True)
class CouplingMap:
    """Directed CNOT graph of one processor; ``(c, t)`` allows ``CNOT(c -> t)``."""

    n_qubits: int
    edges: frozenset[tuple[int, int]]

    def __init__(self, n_qubits: int, edges: Iterable[Iterable[int]]):
        es = frozenset((int(a), int(b)) for a, b in edges)
        object.__setattr__(self, "n_qubits", int(n_qubits))
        object.__setattr__(self, "edges", es)
        for a, b in es:
            if not (0 <= a < n_qubits and 0 <= b < n_qubits):
                raise TopologyError(f"edge ({a}, {b}) out of range for {n_qubits} qubits")
            if a == b:
                raise TopologyError(f"self-loop on qubit {a}")
        if not _connected(self.n_qubits, es):
            raise TopologyError("coupling map is not connected")

    @cached_property
    def neighbours(self) -> tuple[tuple[int, ...], ...]:
        adj: list[set[int]] = [set() for _ in range(self.n_qubits)]
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return tuple(tuple(sorted(s)) for s in adj)

    def adjacent(self, a: int, b: int) -> bool:
        return (a, b) in self.edges or (b, a) in self.edges

    def distances_from(self, src: int) -> list[int]:
        dist = [-1] * self.n_qubits
        dist[src] = 0
        todo = deque([src])
        while todo:
            u = todo.popleft()
            for v in self.neighbours[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    todo.append(v)
        return dist

    def __hash__(self):
        return hash((self.n_qubits, self.edges))


def _check_pair(coupling: CouplingMap, a: int, b: int) -> None:
    for q in (a, b):
        if not (0 <= q < coupling.n_qubits):
            raise TopologyError(f"qubit {q} out of range")
    if a == b:
        raise TopologyError("identical qubits")


def adjacency_kind(coupling: CouplingMap, control: int, target: int) -> str:
    _check_pair(coupling, control, target)
    if (control, target) in coupling.edges:
        return DIRECT
    if (target, control) in coupling.edges:
        return REVERSED
    return NON_ADJACENT


def shortest_path(coupling: CouplingMap, a: int, b: int) -> list[int]:
    """Minimum-hop path from ``a`` to ``b`` on the undirected view.

    Among equally short paths the lexicographically smallest qubit sequence wins.
    """
    for q in (a, b):
        if not (0 <= q < coupling.n_qubits):
            raise TopologyError(f"qubit {q} out of range")
    if a == b:
        return [a]
    # distances to b let us walk greedily from a, always taking the smallest
    # neighbour that stays on some shortest path
    dist = coupling.distances_from(b)
    path = [a]
    while path[-1] != b:
        u = path[-1]
        path.append(min(v for v in coupling.neighbours[u] if dist[v] == dist[u] - 1))
    return path


@dataclass(frozen=True)
class DeviceSpec:
    device_id: str
    coupling: CouplingMap
    comm_qubits: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "comm_qubits", tuple(sorted(set(self.comm_qubits))))
        for q in self.comm_qubits:
            if not (0 <= q < self.coupling.n_qubits):
                raise TopologyError(f"device {self.device_id!r}: comm qubit {q} out of range")
        if not self.data_qubits:
            raise TopologyError(f"device {self.device_id!r} has no data qubits")

    @property
    def n_qubits(self) -> int:
        return self.coupling.n_qubits

    @property
    def data_qubits(self) -> tuple[int, ...]:
        comm = set(self.comm_qubits)
        return tuple(q for q in range(self.coupling.n_qubits) if q not in comm)


@dataclass(frozen=True)
class QuantumLink:
    a: tuple[str, int]
    b: tuple[str, int]
    epr_cost: float = 1.0

    def endpoint_at(self, device_id: str) -> tuple[str, int]:
        if self.a[0] == device_id:
            return self.a
        if self.b[0] == device_id:
            return self.b
        raise TopologyError(f"link does not touch device {device_id!r}")


@dataclass(frozen=True)
class NetworkTopology:
    devices: tuple[DeviceSpec, ...]
    links: tuple[QuantumLink, ...] = ()
    name: str = ""
    offsets: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "devices", tuple(self.devices))
        object.__setattr__(self, "links", tuple(self.links))
        ids = [d.device_id for d in self.devices]
        if not ids:
            raise TopologyError("network has no devices")
        if len(set(ids)) != len(ids):
            raise TopologyError("duplicate device ids")
        by_id = {d.device_id: d for d in self.devices}
        for i, link in enumerate(self.links):
            if link.a[0] == link.b[0]:
                raise TopologyError(f"link {i} joins device {link.a[0]!r} to itself")
            if link.epr_cost < 0:
                raise TopologyError(f"link {i} has negative epr_cost")
            for dev, q in (link.a, link.b):
                if dev not in by_id:
                    raise TopologyError(f"link {i} names unknown device {dev!r}")
                if q not in by_id[dev].comm_qubits:
                    raise TopologyError(f"link {i} endpoint ({dev}, {q}) is not a communication qubit")
        index = {d: i for i, d in enumerate(ids)}
        if not _connected(len(ids), [(index[l.a[0]], index[l.b[0]]) for l in self.links]):
            raise TopologyError("link graph over devices is not connected")
        offsets, acc = {}, 0
        for d in self.devices:
            offsets[d.device_id] = acc
            acc += d.n_qubits
        object.__setattr__(self, "offsets", offsets)

    def device(self, device_id: str) -> DeviceSpec:
        for d in self.devices:
            if d.device_id == device_id:
                return d
        raise KeyError(device_id)

    @property
    def n_qubits(self) -> int:
        return sum(d.n_qubits for d in self.devices)

    @property
    def n_data_qubits(self) -> int:
        return sum(len(d.data_qubits) for d in self.devices)

    def global_index(self, device_id: str, local: int) -> int:
        return self.offsets[device_id] + local

    def locate(self, g: int) -> tuple[str, int]:
        """Inverse of :meth:`global_index`."""
        for d in self.devices:
            off = self.offsets[d.device_id]
            if off <= g < off + d.n_qubits:
                return d.device_id, g - off
        raise IndexError(g)

    @cached_property
    def comm_globals(self) -> frozenset[int]:
        return frozenset(self.global_index(d.device_id, q) for d in self.devices for q in d.comm_qubits)

    def link_path(self, src: str, dst: str) -> list[str]:
        """Fewest-hop device path over links; ties go to the smaller device-id sequence."""
        adj: dict[str, set[str]] = {d.device_id: set() for d in self.devices}
        for l in self.links:
            adj[l.a[0]].add(l.b[0])
            adj[l.b[0]].add(l.a[0])
        dist = {dst: 0}
        todo = deque([dst])
        while todo:
            u = todo.popleft()
            for v in adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    todo.append(v)
        path = [src]
        while path[-1] != dst:
            u = path[-1]
            path.append(min(v for v in adj[u] if dist.get(v) == dist[u] - 1))
        return path

    def links_between(self, a: str, b: str) -> list[int]:
        return [i for i, l in enumerate(self.links) if {l.a[0], l.b[0]} == {a, b}]

    def to_dict(self) -> dict:
        return {
            "devices": [
                {
                    "id": d.device_id,
                    "n_qubits": d.n_qubits,
                    "edges": sorted([list(e) for e in d.coupling.edges]),
                    "comm_qubits": list(d.comm_qubits),
                }
                for d in self.devices
            ],
            "links": [{"a": list(l.a), "b": list(l.b), "epr_cost": l.epr_cost} for l in self.links],
        }


def _line_of(text: str, needle: str) -> int | None:
    for i, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return i
    return None


def network_from_dict(doc: dict, name: str = "", text: str = "") -> NetworkTopology:
    def field_error(path: str, msg: str, key: str | None = None):
        return ConfigParseError(msg, _line_of(text, f'"{key}"') if key and text else None, path)

    if not isinstance(doc, dict) or "devices" not in doc:
        raise field_error("devices", "missing 'devices' list", "devices")
    devices = []
    for i, d in enumerate(doc["devices"]):
        try:
            coupling = CouplingMap(int(d["n_qubits"]), d.get("edges", []))
            devices.append(DeviceSpec(str(d["id"]), coupling, tuple(int(q) for q in d.get("comm_qubits", []))))
        except KeyError as exc:
            key = exc.args[0]
            raise field_error(f"devices[{i}].{key}", f"missing field {key!r}", None) from exc
        except (TypeError, ValueError) as exc:
            if isinstance(exc, TopologyError):
                raise
            raise field_error(f"devices[{i}]", f"malformed device entry: {exc}") from exc
    links = []
    for i, l in enumerate(doc.get("links", [])):
        try:
            a, b = l["a"], l["b"]
            links.append(QuantumLink((str(a[0]), int(a[1])), (str(b[0]), int(b[1])), float(l.get("epr_cost", 1.0))))
        except KeyError as exc:
            raise field_error(f"links[{i}].{exc.args[0]}", f"missing field {exc.args[0]!r}") from exc
        except (TypeError, ValueError, IndexError) as exc:
            raise field_error(f"links[{i}]", f"malformed link entry: {exc}") from exc
    return NetworkTopology(tuple(devices), tuple(links), name=name)


def loads_network(text: str, name: str = "") -> NetworkTopology:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(exc.msg, exc.lineno) from exc
    return network_from_dict(doc, name=name, text=text)


def preset_names() -> list[str]:
    return sorted(p.name[:-5] for p in resources.files("distq.presets").iterdir() if p.name.endswith(".json"))


def load_network(source: str | Path) -> NetworkTopology:
    """Load a network from a preset name or a JSON config path."""
    src = str(source)
    if src in preset_names():
        text = resources.files("distq.presets").joinpath(src + ".json").read_text(encoding="utf-8")
        return loads_network(text, name=src)
    path = Path(src)
    if not path.exists():
        raise ConfigParseError(f"no preset or file named {src!r}")
    return loads_network(path.read_text(encoding="utf-8"), name=path.name)


def single_device(device: DeviceSpec) -> NetworkTopology:
    return NetworkTopology((device,), (), name=device.device_id)


def ibmqx3() -> CouplingMap:
    """Coupling map of the 16-qubit ibmqx3 preset."""
    return load_network("ibmqx3").devices[0].coupling
