"""Command-line front end.

Exit codes: 0 success, 1 parse error, 2 capacity / validation / verification error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import qasm
from ._kernels import BACKEND
from .circuit import CircuitError
from .compiler import (
    AUTO,
    IN_ORDER,
    CompileError,
    CompileOptions,
    DistributedPlan,
    clustered_dimension,
    compile_circuit,
    isolated_dimension,
    verify,
)
from .devices import ConfigParseError, TopologyError, load_network
from .qasm import QasmParseError
from .routing import PERMUTE, RESTORE, RoutingError
from .simulator import SimulationError, run_exhaustive, run_sampled

SCHEMA_VERSION = 1


class _Fail(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _read_circuit(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _Fail(1, f"cannot read circuit {path}: {exc.strerror}") from exc
    return qasm.loads(text), text


def _network(source: str):
    net = load_network(source)
    return net, json.dumps(net.to_dict(), sort_keys=True)


def _options(args) -> CompileOptions:
    return CompileOptions(
        strategy_threshold=args.strategy_threshold,
        routing=args.routing,
        placement=IN_ORDER if args.placement == "in-order" else AUTO,
    )


def _emit(report: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(report, indent=2, sort_keys=True))
        return
    for key, value in report.items():
        if isinstance(value, dict):
            print(f"{key}:")
            for k, v in value.items():
                print(f"  {k}: {v}")
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            print(f"{key}:")
            for item in value:
                print("  " + "  ".join(f"{k}={v}" for k, v in item.items()))
        else:
            print(f"{key}: {value}")


def _base(command: str, args, **inputs) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, "inputs": inputs, "seed": getattr(args, "seed", None)}


def cmd_compile(args) -> dict:
    circuit, text = _read_circuit(args.circuit)
    net, net_text = _network(args.network)
    plan = compile_circuit(circuit, net, _options(args))
    out = Path(args.out) if args.out else Path(args.circuit).with_suffix(".lowered.qasm")
    out.write_text(qasm.dumps(plan.circuit), encoding="utf-8")
    plan_path = Path(args.plan_out) if args.plan_out else out.with_suffix(".plan.json")
    plan_path.write_text(json.dumps(plan.to_dict(), indent=2, sort_keys=True), encoding="utf-8")
    report = _base("compile", args, circuit_sha256=_sha256(text), network=args.network, network_sha256=_sha256(net_text))
    report.update(
        assignment=[f"q{i}->{d}:{p}" for i, (d, p) in enumerate(plan.assignment.placement)],
        metrics=plan.metrics.to_dict(),
        ledger=plan.ledger_summary,
        pass_counts=plan.pass_counts,
        decisions=plan.decisions,
        outputs={"lowered": out.name, "plan": plan_path.name},
    )
    if not args.no_verify:
        rep = verify(plan, circuit, seed=args.seed)
        report["verification"] = rep.to_dict()
        if rep.status == "failed" and args.strict:
            _emit(report, args.json)
            raise _Fail(2, f"verification failed: max infidelity {rep.max_infidelity:.3e}")
    return report


def cmd_verify(args) -> dict:
    circuit, text = _read_circuit(args.circuit)
    if args.plan:
        try:
            plan = DistributedPlan.from_dict(json.loads(Path(args.plan).read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError, KeyError) as exc:
            raise _Fail(1, f"cannot read plan {args.plan}: {exc}") from exc
        source = {"plan_sha256": _sha256(Path(args.plan).read_text(encoding="utf-8"))}
    else:
        if not args.network:
            raise _Fail(2, "verify needs --plan or --network")
        net, net_text = _network(args.network)
        plan = compile_circuit(circuit, net, _options(args))
        source = {"network": args.network, "network_sha256": _sha256(net_text)}
    rep = verify(plan, circuit, seed=args.seed)
    report = _base("verify", args, circuit_sha256=_sha256(text), **source)
    report["verification"] = rep.to_dict()
    report["metrics"] = plan.metrics.to_dict()
    if rep.status == "failed":
        _emit(report, args.json)
        raise _Fail(2, f"verification failed: max infidelity {rep.max_infidelity:.3e}")
    return report


def cmd_simulate(args) -> dict:
    circuit, text = _read_circuit(args.circuit)
    report = _base("simulate", args, circuit_sha256=_sha256(text))
    report["mode"] = args.mode
    if args.mode == "exhaustive":
        branches = run_exhaustive(circuit)
        report["branches"] = [{"bits": b.to_dict()["bits"], "probability": round(b.probability, 12)} for b in branches]
    else:
        br = run_sampled(circuit, seed=args.seed)
        report["outcome"] = {"bits": br.to_dict()["bits"], "probability": round(br.probability, 12)}
    return report


def cmd_metrics(args) -> dict:
    net, net_text = _network(args.network)
    report = _base("metrics", args, network=args.network, network_sha256=_sha256(net_text))
    if args.circuit:
        circuit, text = _read_circuit(args.circuit)
        report["inputs"]["circuit_sha256"] = _sha256(text)
        report["metrics"] = compile_circuit(circuit, net, _options(args)).metrics.to_dict()
    else:
        report["metrics"] = {
            "isolated_dimension": isolated_dimension(net),
            "clustered_dimension": clustered_dimension(net),
        }
    m = report["metrics"]
    m["clustered_log2"] = m["clustered_dimension"].bit_length() - 1
    return report


def cmd_topology(args) -> dict:
    net, net_text = _network(args.network)
    report = _base("topology", args, network=args.network, network_sha256=_sha256(net_text))
    report["devices"] = [
        {
            "id": d.device_id,
            "n_qubits": d.n_qubits,
            "data_qubits": list(d.data_qubits),
            "comm_qubits": list(d.comm_qubits),
            "edges": " ".join(f"{a}->{b}" for a, b in sorted(d.coupling.edges)),
        }
        for d in net.devices
    ]
    report["links"] = [
        {"a": f"{l.a[0]}:{l.a[1]}", "b": f"{l.b[0]}:{l.b[1]}", "epr_cost": l.epr_cost} for l in net.links
    ]
    return report


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="distq", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"distq 0.1.0 ({BACKEND} kernels)")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, circuit=True, network=True, network_required=True):
        if circuit:
            sp.add_argument("circuit", help="circuit file (OpenQASM 2.0 subset)")
        if network:
            sp.add_argument("--network", required=network_required, help="network config path or preset name")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--json", action="store_true", help="machine-readable report")

    def compile_opts(sp):
        sp.add_argument("--routing", choices=[RESTORE, PERMUTE], default=RESTORE)
        sp.add_argument("--strategy-threshold", type=int, default=3)
        sp.add_argument("--placement", choices=["auto", "in-order"], default="auto")

    sp = sub.add_parser("compile", help="lower a circuit onto a network")
    common(sp)
    compile_opts(sp)
    sp.add_argument("--out", help="lowered circuit path (default: <circuit>.lowered.qasm)")
    sp.add_argument("--plan-out", help="plan JSON path (default: <out>.plan.json)")
    sp.add_argument("--no-verify", action="store_true")
    sp.add_argument("--strict", action="store_true", help="exit 2 when verification fails")
    sp.set_defaults(func=cmd_compile)

    sp = sub.add_parser("verify", help="check a plan against its source circuit")
    common(sp, network_required=False)
    compile_opts(sp)
    sp.add_argument("--plan", help="plan JSON written by compile")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("simulate", help="run a circuit from |0...0>")
    common(sp, network=False)
    sp.add_argument("--mode", choices=["sampled", "exhaustive"], default="exhaustive")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("metrics", help="state-space and compilation metrics")
    sp.add_argument("circuit", nargs="?")
    common(sp, circuit=False)
    compile_opts(sp)
    sp.set_defaults(func=cmd_metrics)

    sp = sub.add_parser("topology", help="list devices, links and coupling edges")
    common(sp, circuit=False)
    sp.set_defaults(func=cmd_topology)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = args.func(args)
    except _Fail as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (QasmParseError, ConfigParseError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 1
    except (CompileError, CircuitError, TopologyError, RoutingError, SimulationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(report, args.json)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
