"""Named gates and Hamiltonians, and ingestion of unitaries from JSON files."""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .qalg import PAULI, BipartiteGate, Hamiltonian, unitarity_deviation

FILE_UNITARITY_TOL = 1e-8


class GateFileError(ValueError):
    """Base class for matrix-file problems."""


class GateParseError(GateFileError):
    pass


class GateDimensionError(GateFileError):
    pass


class GateUnitarityError(GateFileError):
    def __init__(self, deviation: float, path=None):
        self.deviation = deviation
        where = f" in {path}" if path else ""
        super().__init__(f"matrix{where} is not unitary: |U^dag U - I|_F = {deviation:.3e} "
                         f"exceeds {FILE_UNITARITY_TOL:g}")


def _permutation_gate(perm: dict, dims, name, params=()) -> BipartiteGate:
    """Gate mapping basis state |x,y> to |perm[(x,y)]>."""
    da, db = dims
    u = np.zeros((da * db, da * db), dtype=complex)
    for (x, y), (x2, y2) in perm.items():
        u[x2 * db + y2, x * db + y] = 1.0
    return BipartiteGate(u, dims, name, params)


def _check_d(d: int) -> int:
    d = int(d)
    if d < 2:
        raise ValueError(f"dimension must be at least 2, got {d}")
    return d


def cnot() -> BipartiteGate:
    return _permutation_gate({(x, y): (x, y ^ x) for x in range(2) for y in range(2)},
                             (2, 2), "cnot")


def swap(d: int = 2) -> BipartiteGate:
    d = _check_d(d)
    return _permutation_gate({(x, y): (y, x) for x in range(d) for y in range(d)},
                             (d, d), "swap", (d,))


def j_gate() -> BipartiteGate:
    # |00> <-> (|00>+|11>)/sqrt2 and |11> <-> (|00>-|11>)/sqrt2 as a real involution
    r = 1 / np.sqrt(2)
    u = np.array([[r, 0, 0, r],
                  [0, 1, 0, 0],
                  [0, 0, 1, 0],
                  [r, 0, 0, -r]], dtype=complex)
    return BipartiteGate(u, (2, 2), "j")


def cp(d: int) -> BipartiteGate:
    """Cyclic permutation: |x,y> -> |x,y-1> for y != 0, |x,0> -> |x-1,d-1>."""
    d = _check_d(d)
    perm = {}
    for x in range(d):
        for y in range(d):
            perm[(x, y)] = (x, y - 1) if y else ((x - 1) % d, d - 1)
    return _permutation_gate(perm, (d, d), "cp", (d,))


def ae(d: int) -> BipartiteGate:
    """|x,0> <-> |x,x> for x != 0; everything else fixed."""
    d = _check_d(d)
    perm = {(x, y): (x, y) for x in range(d) for y in range(d)}
    for x in range(1, d):
        perm[(x, 0)], perm[(x, x)] = (x, x), (x, 0)
    return _permutation_gate(perm, (d, d), "ae", (d,))


def zz_hamiltonian() -> Hamiltonian:
    return Hamiltonian(np.kron(PAULI["Z"], PAULI["Z"]), (2, 2), "zz")


def xx_yy_hamiltonian(alpha: float, beta: float) -> Hamiltonian:
    h = alpha * np.kron(PAULI["X"], PAULI["X"]) + beta * np.kron(PAULI["Y"], PAULI["Y"])
    return Hamiltonian(h, (2, 2), f"xxyy({alpha:g},{beta:g})")


def local_hamiltonian(a=None, b=None) -> Hamiltonian:
    """a (x) I + I (x) b; defaults to sigma_z on Alice."""
    a = PAULI["Z"] if a is None else np.asarray(a, dtype=complex)
    b = np.zeros((2, 2)) if b is None else np.asarray(b, dtype=complex)
    h = np.kron(a, np.eye(b.shape[0])) + np.kron(np.eye(a.shape[0]), b)
    return Hamiltonian(h, (a.shape[0], b.shape[0]), "local")


def zero_hamiltonian(da: int = 2, db: int = 2) -> Hamiltonian:
    return Hamiltonian(np.zeros((da * db, da * db)), (da, db), "zero")


def phase_gate(alpha: float) -> BipartiteGate:
    """exp(-i alpha sigma_z (x) sigma_z)."""
    ph = np.exp(-1j * alpha * np.array([1, -1, -1, 1]))
    return BipartiteGate(np.diag(ph), (2, 2), "phase", (float(alpha),))


def local_gate(a: np.ndarray, b: np.ndarray, name="local") -> BipartiteGate:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return BipartiteGate(np.kron(a, b), (a.shape[0], b.shape[0]), name)


def gate_to_json(gate: BipartiteGate) -> dict:
    rows = [[[float(z.real), float(z.imag)] for z in row] for row in gate.matrix]
    return {"dims": list(gate.dims), "matrix": rows}


def gate_digest(gate: BipartiteGate) -> str:
    blob = json.dumps(gate_to_json(gate), separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def gate_from_json(doc, source=None) -> BipartiteGate:
    where = f" in {source}" if source else ""
    if not isinstance(doc, dict):
        raise GateParseError(f"top level{where} must be an object with 'dims' and 'matrix'")
    for key in ("dims", "matrix"):
        if key not in doc:
            raise GateParseError(f"missing field '{key}'{where}")
    dims = doc["dims"]
    if (not isinstance(dims, list) or len(dims) != 2
            or not all(isinstance(d, int) and not isinstance(d, bool) and d >= 1 for d in dims)):
        raise GateParseError(f"field 'dims'{where} must be two positive integers, got {dims!r}")
    rows = doc["matrix"]
    if not isinstance(rows, list) or not rows:
        raise GateParseError(f"field 'matrix'{where} must be a non-empty list of rows")
    width = None
    data = []
    for i, row in enumerate(rows):
        if not isinstance(row, list):
            raise GateParseError(f"matrix row {i}{where} is not a list")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise GateParseError(f"matrix row {i}{where} has {len(row)} entries, row 0 has {width}")
        vals = []
        for j, entry in enumerate(row):
            if (not isinstance(entry, list) or len(entry) != 2
                    or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in entry)):
                raise GateParseError(f"matrix entry [{i}][{j}]{where} must be [re, im], got {entry!r}")
            vals.append(complex(entry[0], entry[1]))
        data.append(vals)
    u = np.array(data, dtype=complex)
    n = dims[0] * dims[1]
    if u.shape != (n, n):
        raise GateDimensionError(f"dims {dims}{where} need a {n}x{n} matrix, got {u.shape[0]}x{u.shape[1]}")
    dev = unitarity_deviation(u)
    if dev > FILE_UNITARITY_TOL:
        raise GateUnitarityError(dev, source)
    name = doc.get("name", Path(str(source)).stem if source else "file")
    return BipartiteGate(u, tuple(dims), str(name), unitarity_tol=FILE_UNITARITY_TOL)


def gate_from_file(path) -> BipartiteGate:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise GateParseError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return gate_from_json(doc, path)


def gate_to_file(gate: BipartiteGate, path) -> None:
    doc = gate_to_json(gate)
    doc["name"] = gate.name
    Path(path).write_text(json.dumps(doc, indent=1))
