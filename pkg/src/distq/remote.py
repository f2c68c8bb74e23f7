"""Teleportation-based remote primitives over EPR pairs.

Every function returns plain gate lists on global qubit indices (see
:meth:`NetworkTopology.global_index`) and records resource use in an
:class:`EprLedger`. Classical bits used for corrections are passed in by
the caller so the lowered circuit keeps full control of its classical
register.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .circuit import CX, Gate, H, IfBit, Measure, Reset
from .devices import NetworkTopology

Endpoint = tuple[str, int]


class LedgerError(RuntimeError):
    pass


@dataclass(frozen=True)
class EprPair:
    """A shared Φ+ between communication qubits ``a`` and ``b``.

    ``links`` lists the link indices whose generated pairs were fused into
    this one by entanglement swapping (a single entry for a direct pair).
    """

    a: Endpoint
    b: Endpoint
    links: tuple[int, ...]

    def at(self, device_id: str) -> Endpoint:
        if self.a[0] == device_id:
            return self.a
        if self.b[0] == device_id:
            return self.b
        raise LedgerError(f"pair does not reach device {device_id!r}")

    def other(self, device_id: str) -> Endpoint:
        return self.b if self.a[0] == device_id else self.a


_DATA = "data"


@dataclass
class EprLedger:
    network: NetworkTopology
    generated: dict[int, int] = field(default_factory=dict)
    consumed: dict[int, int] = field(default_factory=dict)
    # comm qubit -> link index whose half it holds, or "data" after a teledata landing
    occupancy: dict[Endpoint, int | str] = field(default_factory=dict)
    cost: float = 0.0
    _active: set = field(default_factory=set, repr=False)

    def __post_init__(self):
        for i in range(len(self.network.links)):
            self.generated.setdefault(i, 0)
            self.consumed.setdefault(i, 0)

    @property
    def pairs_generated(self) -> int:
        return sum(self.generated.values())

    @property
    def pairs_consumed(self) -> int:
        return sum(self.consumed.values())

    def is_free(self, ep: Endpoint) -> bool:
        return ep not in self.occupancy

    def all_free(self) -> bool:
        return not self.occupancy

    def holding(self, ep: Endpoint):
        return self.occupancy.get(ep)

    def _occupy(self, ep: Endpoint, what) -> None:
        if ep in self.occupancy:
            raise LedgerError(f"communication qubit occupied: {ep[0]}:{ep[1]}")
        self.occupancy[ep] = what

    def _check_active(self, pair: EprPair) -> None:
        if pair not in self._active:
            raise LedgerError("pair not allocated")

    def consume(self, pair: EprPair, link: int) -> None:
        self._check_active(pair)
        self._active.discard(pair)
        self.consumed[link] += 1
        if self.consumed[link] > self.generated[link]:  # pragma: no cover - guarded by _active
            raise LedgerError("more pairs consumed than generated")

    def free(self, ep: Endpoint) -> None:
        self.occupancy.pop(ep, None)

    def to_dict(self) -> dict:
        return {
            "pairs_generated": self.pairs_generated,
            "pairs_consumed": self.pairs_consumed,
            "per_link": [
                {"link": i, "generated": self.generated[i], "consumed": self.consumed[i]}
                for i in sorted(self.generated)
            ],
            "epr_cost": self.cost,
        }


def _g(ledger: EprLedger, ep: Endpoint) -> int:
    return ledger.network.global_index(*ep)


def generate_epr(link: int, ledger: EprLedger, first: str | None = None) -> tuple[list[Gate], EprPair]:
    """Prepare Φ+ on both endpoints of ``link``.

    ``first`` names the device whose endpoint becomes ``pair.a`` (and receives
    the Hadamard); by default the link's own ``a`` side.
    """
    l = ledger.network.links[link]
    a, b = (l.a, l.b) if first in (None, l.a[0]) else (l.b, l.a)
    for ep in (a, b):
        if not ledger.is_free(ep):
            raise LedgerError(f"communication qubit occupied: {ep[0]}:{ep[1]}")
    ledger._occupy(a, link)
    ledger._occupy(b, link)
    ledger.generated[link] += 1
    ledger.cost += l.epr_cost
    pair = EprPair(a, b, (link,))
    ledger._active.add(pair)
    ga, gb = _g(ledger, a), _g(ledger, b)
    return [Reset(ga), Reset(gb), H(ga), CX(ga, gb)], pair


def lower_teledata(src: int, pair: EprPair, ledger: EprLedger, bits: tuple[int, int]) -> list[Gate]:
    """Teleport global qubit ``src`` onto ``pair.b``.

    ``pair.a`` must live on the same device as ``src``. Afterwards ``src`` and
    ``pair.a`` are |0> and ``pair.b`` holds the state (marked as data in the
    ledger until :meth:`EprLedger.free` is called on it).
    """
    ledger._check_active(pair)
    a, b = _g(ledger, pair.a), _g(ledger, pair.b)
    m1, m2 = bits
    gates = [
        CX(src, a),
        H(src),
        Measure(a, m1),
        Measure(src, m2),
        IfBit(m1, "x", b),
        IfBit(m2, "z", b),
        Reset(a),
        Reset(src),
    ]
    ledger.consume(pair, pair.links[-1])
    ledger.free(pair.a)
    ledger.free(pair.b)
    ledger._occupy(pair.b, _DATA)
    return gates


def lower_telegate(control: int, target: int, pair: EprPair, ledger: EprLedger, bits: tuple[int, int]) -> list[Gate]:
    """CNOT(control -> target) across devices; ``pair.a`` sits with the control."""
    ledger._check_active(pair)
    a, b = _g(ledger, pair.a), _g(ledger, pair.b)
    m1, m2 = bits
    gates = [
        CX(control, a),
        Measure(a, m1),
        IfBit(m1, "x", b),
        CX(b, target),
        H(b),
        Measure(b, m2),
        IfBit(m2, "z", control),
        Reset(a),
        Reset(b),
    ]
    ledger.consume(pair, pair.links[-1])
    ledger.free(pair.a)
    ledger.free(pair.b)
    return gates


def swap_entanglement(pairs: Sequence[EprPair], ledger: EprLedger, bits: Sequence[tuple[int, int]]) -> tuple[list[Gate], EprPair]:
    """Fuse consecutive hop pairs into one end-to-end pair.

    ``pairs[i].b`` and ``pairs[i + 1].a`` must share a device. ``bits`` holds
    one (mA, mB) tuple per intermediate device.
    """
    if not pairs:
        raise LedgerError("empty link path")
    for p in pairs:
        ledger._check_active(p)
    if len(bits) < len(pairs) - 1:
        raise LedgerError("not enough classical bits for the swaps")
    gates: list[Gate] = []
    current = pairs[0]
    for hop, (nxt, (ma, mb)) in enumerate(zip(pairs[1:], bits)):
        if current.b[0] != nxt.a[0]:
            raise LedgerError("hop pairs do not share an intermediate device")
        x, y = _g(ledger, current.b), _g(ledger, nxt.a)
        end = _g(ledger, nxt.b)
        gates += [
            CX(x, y),
            H(x),
            Measure(x, ma),
            Measure(y, mb),
            IfBit(mb, "x", end),
            IfBit(ma, "z", end),
            Reset(x),
            Reset(y),
        ]
        ledger.consume(current, current.links[-1])
        ledger._active.discard(nxt)
        ledger.free(current.b)
        ledger.free(nxt.a)
        current = EprPair(current.a, nxt.b, current.links + nxt.links)
        ledger._active.add(current)
    return gates, current
