"""Distributed quantum circuit compiler with a verifying statevector simulator."""
from ._kernels import BACKEND
from .circuit import CX, SWAP, Circuit, CircuitError, Gate, H, IfBit, Measure, Reset, U, X, Z, depth, interaction_graph, validate
from .compiler import CompileOptions, compile_circuit, compute_metrics, partition, select_strategy, verify
from .devices import CouplingMap, DeviceSpec, NetworkTopology, QuantumLink, load_network
from .simulator import StateVector, equal_up_to_global_phase, run_exhaustive, run_sampled

__version__ = "0.1.0"
