"""Command-line front end.

Exit codes: 0 success, 1 bad input, 2 internal invariant violation.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, gates
from .bounds import check_bounds
from .entcap import EntCapConfig, ancilla_sweep, optimize_entcap
from .gates import GateFileError
from .hamcap import hamiltonian_capacity
from .holevo import optimize_delta_chi
from .optim import InvariantViolation
from .protosim import (PROTOCOLS, ae_forward, cp_backward, teleport_simulate)
from .qalg import (BipartiteGate, Hamiltonian, StateVector, haar_random_state,
                   haar_random_unitary)
from .schmidt import (double_epr_output_entropy, operator_schmidt, schmidt_entropy_bound,
                      schmidt_number)

SCHEMA_VERSION = "1.0"
COMMANDS = ("schmidt", "entcap", "ecap-sweep", "holevo", "hamcap", "bounds-report", "proto")

# flags each command accepts beyond --out/--format/--plain/--threads
ALLOWED = {
    "schmidt": {"gate"},
    "entcap": {"gate", "ancilla", "restarts", "seed", "max_iter", "gtol", "destroying"},
    "ecap-sweep": {"gate", "dims", "restarts", "seed", "max_iter", "gtol"},
    "holevo": {"gate", "ancilla", "restarts", "seed", "max_iter", "gtol", "ensemble_size",
               "direction"},
    "hamcap": {"ham", "kind", "s_grid", "ancilla", "restarts", "seed", "max_iter", "gtol",
               "ensemble_size"},
    "bounds-report": {"gate", "ancilla", "restarts", "seed", "max_iter", "gtol",
                      "ensemble_size", "direction"},
    "proto": {"name", "msg", "d", "seed", "gate"},
}

log = logging.getLogger("gatecap")


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _ints(text: str, what: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"{what} must be comma-separated integers, got {text!r}") from None


def _floats(text: str, what: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"{what} must be comma-separated numbers, got {text!r}") from None


def parse_gate(tag: str) -> tuple[BipartiteGate, dict]:
    """Resolve a --gate tag; returns the gate and its report descriptor."""
    name, _, arg = tag.partition(":")
    try:
        if name == "cnot" and not arg:
            g = gates.cnot()
        elif name == "j" and not arg:
            g = gates.j_gate()
        elif name == "swap":
            g = gates.swap(int(arg) if arg else 2)
        elif name == "cp" and arg:
            g = gates.cp(int(arg))
        elif name == "ae" and arg:
            g = gates.ae(int(arg))
        elif name == "phase" and arg:
            g = gates.phase_gate(float(arg))
        elif name == "file" and arg:
            g = gates.gate_from_file(arg)
        else:
            raise InputError(f"unknown gate tag {tag!r}; expected cnot, swap:d, j, cp:d, ae:d, "
                             f"phase:alpha or file:PATH")
    except (ValueError, TypeError) as exc:
        if isinstance(exc, GateFileError):
            raise InputError(str(exc)) from exc
        raise InputError(f"bad gate tag {tag!r}: {exc}") from exc
    except OSError as exc:
        raise InputError(f"cannot read gate file: {exc}") from exc
    return g, gate_descriptor(g, tag)


def gate_descriptor(g: BipartiteGate, source: str) -> dict:
    return {"source": source, "name": g.name, "params": [float(p) for p in g.params],
            "dims": list(g.dims), "digest": gates.gate_digest(g),
            "matrix": gates.gate_to_json(g)["matrix"]}


def parse_hamiltonian(tag: str) -> tuple[Hamiltonian, dict]:
    name, _, arg = tag.partition(":")
    try:
        if name == "zz":
            h = gates.zz_hamiltonian()
        elif name == "xxyy":
            a, b = _floats(arg, "xxyy parameters")
            h = gates.xx_yy_hamiltonian(a, b)
        elif name == "local":
            h = gates.local_hamiltonian()
        elif name == "zero":
            h = gates.zero_hamiltonian()
        elif name == "file" and arg:
            doc = json.loads(Path(arg).read_text())
            m = np.array([[complex(re, im) for re, im in row] for row in doc["matrix"]])
            h = Hamiltonian(m, tuple(doc["dims"]), Path(arg).stem)
        else:
            raise InputError(f"unknown Hamiltonian tag {tag!r}; expected zz, xxyy:a,b, local, "
                             f"zero or file:PATH")
    except InputError:
        raise
    except (ValueError, TypeError, KeyError, OSError) as exc:
        raise InputError(f"bad Hamiltonian {tag!r}: {exc}") from exc
    return h, {"source": tag, "name": h.name, "dims": list(h.dims)}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gatecap", description="Capacities of bipartite unitary gates.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for cmd in COMMANDS:
        s = sub.add_parser(cmd)
        s.add_argument("--gate")
        s.add_argument("--ham")
        s.add_argument("--kind", choices=["entanglement", "holevo"])
        s.add_argument("--ancilla")
        s.add_argument("--dims")
        s.add_argument("--restarts", type=int)
        s.add_argument("--seed", type=int)
        s.add_argument("--max-iter", dest="max_iter", type=int)
        s.add_argument("--gtol", type=float)
        s.add_argument("--ensemble-size", dest="ensemble_size", type=int)
        s.add_argument("--s-grid", dest="s_grid")
        s.add_argument("--direction", choices=["forward", "backward"])
        s.add_argument("--destroying", action="store_true", default=None)
        s.add_argument("--name")
        s.add_argument("--msg")
        s.add_argument("--d", type=int)
        s.add_argument("--out")
        s.add_argument("--format", choices=["json", "table"], default="json")
        s.add_argument("--plain", action="store_true")
        s.add_argument("--threads", type=int, default=1)
        s.add_argument("-v", "--verbose", action="store_true")
    return p


def _config(args) -> EntCapConfig:
    kw = {}
    if args.ancilla is not None:
        anc = _ints(args.ancilla, "--ancilla")
        if len(anc) != 2:
            raise InputError(f"--ancilla takes nA,nB, got {args.ancilla!r}")
        kw["ancilla_dims"] = tuple(anc)
    for flag, key in (("restarts", "restarts"), ("seed", "seed"), ("max_iter", "max_iterations"),
                      ("gtol", "gradient_tolerance")):
        if getattr(args, flag) is not None:
            kw[key] = getattr(args, flag)
    kw["threads"] = max(1, args.threads)
    try:
        return EntCapConfig(**kw)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _need_gate(args):
    if not args.gate:
        raise InputError(f"{args.command} needs --gate")
    return parse_gate(args.gate)


def cmd_schmidt(args):
    gate, desc = _need_gate(args)
    dec = operator_schmidt(gate)
    lower, upper = schmidt_entropy_bound(gate)
    res = {"coefficients": [float(c) for c in dec.coefficients],
           "schmidt_number": schmidt_number(dec), "lower": lower, "upper": upper,
           "double_epr_output_entropy": double_epr_output_entropy(gate)}
    return desc, {}, {"schmidt": res}


def cmd_entcap(args):
    gate, desc = _need_gate(args)
    cfg = _config(args)
    if args.destroying:
        gate = gate.adjoint()
    res = optimize_entcap(gate, cfg)
    return desc, {**cfg.as_dict(), "destroying": bool(args.destroying)}, {"entcap": res.as_dict()}


def cmd_sweep(args):
    gate, desc = _need_gate(args)
    if not args.dims:
        raise InputError("ecap-sweep needs --dims n1,n2,...")
    dims = _ints(args.dims, "--dims")
    cfg = _config(args)
    try:
        sweep = ancilla_sweep(gate, dims, cfg)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    return desc, {**cfg.as_dict(), "dims": dims}, {
        "ecap_sweep": [{"n": n, "value": v} for n, v in sweep]}


def _directed(gate, direction):
    return gate.role_swapped() if direction == "backward" else gate


def cmd_holevo(args):
    gate, desc = _need_gate(args)
    cfg = _config(args)
    direction = args.direction or "forward"
    try:
        res = optimize_delta_chi(_directed(gate, direction), args.ensemble_size, None, cfg)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    return desc, {**cfg.as_dict(), "ensemble_size": res.ensemble_size,
                  "direction": direction}, {"holevo": res.as_dict()}


def cmd_hamcap(args):
    if not args.ham:
        raise InputError("hamcap needs --ham (zz, xxyy:a,b, local, zero or file:PATH)")
    h, desc = parse_hamiltonian(args.ham)
    cfg = _config(args)
    grid = _floats(args.s_grid, "--s-grid") if args.s_grid else None
    kind = args.kind or "entanglement"
    try:
        res = hamiltonian_capacity(h, kind, grid, cfg, args.ensemble_size)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    return desc, {**cfg.as_dict(), "kind": kind,
                  "s_grid": [s for s, _ in res.samples]}, {"hamcap": res.as_dict()}


def cmd_bounds(args):
    gate, desc = _need_gate(args)
    cfg = _config(args)
    direction = args.direction or "forward"
    g = _directed(gate, direction)
    de = optimize_entcap(g, cfg)
    dea = optimize_entcap(g.adjoint(), cfg)
    dchi = optimize_delta_chi(g, args.ensemble_size, None, cfg)
    report = check_bounds(g, {"delta_e": de.value, "delta_e_adjoint": dea.value,
                              "delta_chi": dchi.value}, ancilla_dims=cfg.ancillas_for(g))
    results = {"bounds": report.as_dict(),
               "entcap": {"value": de.value, "converged": de.converged},
               "entcap_adjoint": {"value": dea.value, "converged": dea.converged},
               "holevo": {"value": dchi.value, "converged": dchi.converged}}
    config = {**cfg.as_dict(), "ensemble_size": dchi.ensemble_size, "direction": direction}
    if report.violations:
        names = ", ".join(c.name for c in report.violations)
        raise _Violation(desc, config, results, f"bound checks violated: {names}")
    return desc, config, results


class _Violation(Exception):
    """Carries a partial report out of a handler that found a broken invariant."""

    def __init__(self, desc, config, results, message):
        self.payload = (desc, config, results)
        super().__init__(message)


def _messages(name, d):
    if name in PROTOCOLS:
        return PROTOCOLS[name][1]
    if name == "cp-backward":
        return [(0,), (1,)]
    if name == "ae-forward":
        return [(x,) for x in range(d)]
    return []


def cmd_proto(args):
    names = list(PROTOCOLS) + ["cp-backward", "ae-forward", "teleport"]
    if args.name not in names:
        raise InputError(f"--name must be one of {', '.join(names)}")
    d = args.d if args.d is not None else 3
    seed = args.seed if args.seed is not None else 0
    if args.name == "teleport":
        if args.gate:
            gate, desc = parse_gate(args.gate)
        else:
            gate = BipartiteGate(haar_random_unitary(4, [seed, 1]), (2, 2), "haar")
            desc = gate_descriptor(gate, "haar")
        da, db = gate.dims
        psi = StateVector(haar_random_state(da * db, [seed, 2]), (("A", da), ("B", db)))
        outs = [teleport_simulate(gate, psi)]
    else:
        desc = None
        if args.msg is not None:
            msg = tuple(int(c) for c in args.msg) if args.name in PROTOCOLS else (int(args.msg),)
            msgs = [msg]
        else:
            msgs = _messages(args.name, d)
        outs = []
        try:
            for m in msgs:
                if args.name in PROTOCOLS:
                    if len(m) != 2:
                        raise InputError(f"{args.name} takes a two-bit message, got {args.msg!r}")
                    outs.append(PROTOCOLS[args.name][0](*m))
                elif args.name == "cp-backward":
                    outs.append(cp_backward(m[0], d))
                else:
                    outs.append(ae_forward(m[0], d))
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    res = {"proto": [o.as_dict() for o in outs], "all_pass": all(o.passed for o in outs)}
    cfg = {"name": args.name, "msg": args.msg, "d": d, "seed": seed}
    if not res["all_pass"]:
        raise _Violation(desc, cfg, res, f"protocol {args.name} failed")
    return desc, cfg, res


HANDLERS = {"schmidt": cmd_schmidt, "entcap": cmd_entcap, "ecap-sweep": cmd_sweep,
            "holevo": cmd_holevo, "hamcap": cmd_hamcap, "bounds-report": cmd_bounds,
            "proto": cmd_proto}


def _check_flags(args):
    allowed = ALLOWED[args.command]
    for key in ("gate", "ham", "kind", "ancilla", "dims", "restarts", "seed", "max_iter", "gtol",
                "ensemble_size", "s_grid", "direction", "destroying", "name", "msg", "d"):
        if getattr(args, key) is not None and key not in allowed:
            flag = "--" + key.replace("_", "-")
            raise InputError(f"{flag} is not valid with {args.command}")


def make_report(command, gate, config, results, started, finished) -> dict:
    return {"schema_version": SCHEMA_VERSION, "tool_version": __version__, "command": command,
            "gate": gate, "config": config, "results": results,
            "timestamps": {"started": started, "finished": finished}}


def _flatten(prefix, obj, rows):
    if isinstance(obj, dict):
        for k, v in obj.items():
            if k in ("optimal_input", "optimal_ensemble", "matrix"):
                continue
            _flatten(f"{prefix}.{k}" if prefix else k, v, rows)
    elif isinstance(obj, list) and obj and isinstance(obj[0], (dict, list)):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, rows)
    else:
        if isinstance(obj, float):
            obj = f"{obj:.6f}"
        elif isinstance(obj, list):
            obj = "[" + ", ".join(f"{v:.6f}" if isinstance(v, float) else str(v) for v in obj) + "]"
        rows.append((prefix, str(obj)))


def render_table(report: dict, plain: bool = False) -> str:
    rows = []
    _flatten("", report["results"], rows)
    width = max((len(k) for k, _ in rows), default=0)
    lines = [] if plain else [f"gatecap {report['command']}", "-" * (width + 20)]
    lines += [f"{k.ljust(width)}  {v}" for k, v in rows]
    return "\n".join(lines)


def _now():
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _emit(report, args, out=None):
    out = out or sys.stdout
    text = json.dumps(report, sort_keys=True, indent=1)
    if args.out:
        Path(args.out).write_text(text + "\n")
    if args.format == "table":
        print(render_table(report, args.plain), file=out)
    else:
        print(text, file=out)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    started = _now()
    try:
        _check_flags(args)
        gate, config, results = HANDLERS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except _Violation as exc:
        desc, cfg, results = exc.payload
        _emit(make_report(args.command, desc, cfg, results, started, _now()), args)
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 2
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 2
    _emit(make_report(args.command, gate, config, results, started, _now()), args)
    return 0


def main():
    sys.exit(run())
