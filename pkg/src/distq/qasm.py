"""Reader and writer for the OpenQASM 2.0 subset used by distq.

Accepted statements, one per line, ``//`` comments allowed::

    OPENQASM 2.0;            (optional header)
    include "qelib1.inc";    (optional, ignored)
    qreg q[n];
    creg c[m];
    h q[i]; x q[i]; z q[i];
    u3(theta,phi,lambda) q[i];
    cx q[i],q[j]; swap q[i],q[j];
    measure q[i] -> c[j];
    reset q[i];
    if(c[j]==1) x q[i];      (body x or z)
"""
from __future__ import annotations

import cmath
import math
import re

import numpy as np

from .circuit import CX, SWAP, Circuit, CircuitError, Gate, H, IfBit, Measure, Reset, U, X, Z, validate


class QasmParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


_Q = r"q\[(\d+)\]"
_C = r"c\[(\d+)\]"
_NUM = r"[-+0-9.eE*/()pi ]+"

_PATTERNS = [
    ("qreg", re.compile(r"qreg\s+q\[(\d+)\]$")),
    ("creg", re.compile(r"creg\s+c\[(\d+)\]$")),
    ("1q", re.compile(rf"(h|x|z)\s+{_Q}$")),
    ("u3", re.compile(rf"u3?\(({_NUM}),({_NUM}),({_NUM})\)\s+{_Q}$")),
    ("2q", re.compile(rf"(cx|swap)\s+{_Q}\s*,\s*{_Q}$")),
    ("measure", re.compile(rf"measure\s+{_Q}\s*->\s*{_C}$")),
    ("reset", re.compile(rf"reset\s+{_Q}$")),
    ("if", re.compile(rf"if\s*\(\s*c\[(\d+)\]\s*==\s*1\s*\)\s*(x|z)\s+{_Q}$")),
]


def _number(text: str, lineno: int) -> float:
    if not re.fullmatch(r"[-+0-9.eE*/()pi ]+", text):
        raise QasmParseError(lineno, f"bad angle {text!r}")
    try:
        return float(eval(text, {"__builtins__": {}}, {"pi": math.pi}))  # noqa: S307 - charset checked above
    except Exception as exc:
        raise QasmParseError(lineno, f"bad angle {text!r}") from exc


def u3_matrix(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [[c, -cmath.exp(1j * lam) * s], [cmath.exp(1j * phi) * s, cmath.exp(1j * (phi + lam)) * c]],
        dtype=np.complex128,
    )


def u3_angles(m: np.ndarray) -> tuple[float, float, float]:
    """Angles of ``m`` as a u3 gate, ignoring global phase."""
    m = np.asarray(m, dtype=np.complex128)
    phase = cmath.phase(m[0, 0]) if abs(m[0, 0]) > 1e-12 else -cmath.phase(-m[0, 1])
    m = m * cmath.exp(-1j * phase)
    theta = 2 * math.atan2(abs(m[1, 0]), abs(m[0, 0]))
    if abs(m[1, 0]) < 1e-12:
        return theta, 0.0, cmath.phase(m[1, 1])
    phi = cmath.phase(m[1, 0])
    lam = cmath.phase(-m[0, 1]) if abs(m[0, 1]) > 1e-12 else cmath.phase(m[1, 1]) - phi
    return theta, phi, lam


def loads(text: str) -> Circuit:
    """Parse circuit text. Raises :class:`QasmParseError` with a 1-based line number."""
    n_qubits = n_clbits = None
    gates: list[Gate] = []
    lines: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("//", 1)[0].strip()
        if not line:
            continue
        if not line.endswith(";"):
            raise QasmParseError(lineno, "missing ';'")
        stmt = line[:-1].strip()
        if stmt.startswith("OPENQASM") or stmt.startswith("include"):
            continue
        for name, pat in _PATTERNS:
            m = pat.match(stmt)
            if m:
                break
        else:
            raise QasmParseError(lineno, f"unrecognised statement {stmt!r}")
        g = m.groups()
        if name == "qreg":
            if n_qubits is not None:
                raise QasmParseError(lineno, "duplicate qreg")
            n_qubits = int(g[0])
            continue
        if name == "creg":
            if n_clbits is not None:
                raise QasmParseError(lineno, "duplicate creg")
            n_clbits = int(g[0])
            continue
        if n_qubits is None:
            raise QasmParseError(lineno, "gate before qreg declaration")
        if name == "1q":
            gate = {"h": H, "x": X, "z": Z}[g[0]](int(g[1]))
        elif name == "u3":
            angles = [_number(a, lineno) for a in g[:3]]
            gate = U(int(g[3]), u3_matrix(*angles))
        elif name == "2q":
            gate = (CX if g[0] == "cx" else SWAP)(int(g[1]), int(g[2]))
        elif name == "measure":
            gate = Measure(int(g[0]), int(g[1]))
        elif name == "reset":
            gate = Reset(int(g[0]))
        else:
            gate = IfBit(int(g[0]), g[1], int(g[2]))
        gates.append(gate)
        lines.append(lineno)
    if n_qubits is None:
        raise QasmParseError(0, "no qreg declaration")
    circuit = Circuit(n_qubits, n_clbits or 0, tuple(gates))
    bad = validate(circuit)
    if bad:
        v = bad[0]
        raise QasmParseError(lines[v.gate_index], v.message)
    return circuit


def load(path) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def _fmt(x: float) -> str:
    return repr(float(x))


def dumps(circuit: Circuit) -> str:
    """Serialise ``circuit``. U1q gates are written as u3 and lose their global phase."""
    out = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{circuit.n_qubits}];"]
    if circuit.n_clbits:
        out.append(f"creg c[{circuit.n_clbits}];")
    for gate in circuit.gates:
        q = gate.qubits
        if gate.kind in ("h", "x", "z"):
            out.append(f"{gate.kind} q[{q[0]}];")
        elif gate.kind == "u":
            t, p, l = u3_angles(gate.unitary())
            out.append(f"u3({_fmt(t)},{_fmt(p)},{_fmt(l)}) q[{q[0]}];")
        elif gate.kind in ("cx", "swap"):
            out.append(f"{gate.kind} q[{q[0]}],q[{q[1]}];")
        elif gate.kind == "measure":
            out.append(f"measure q[{q[0]}] -> c[{gate.clbit}];")
        elif gate.kind == "reset":
            out.append(f"reset q[{q[0]}];")
        elif gate.kind == "if":
            out.append(f"if(c[{gate.clbit}]==1) {gate.body} q[{q[0]}];")
        else:  # pragma: no cover - validate() rejects unknown kinds
            raise CircuitError(f"cannot serialise {gate.kind}")
    return "\n".join(out) + "\n"
