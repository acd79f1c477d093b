"""Consistency checks of computed capacities against the general bounds.

An optimizer can only undershoot a supremum. A check whose right-hand side
is an optimized value can therefore fail without any theorem being broken;
such failures are reported as inconclusive rather than as violations.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .qalg import BipartiteGate
from .schmidt import operator_schmidt, schmidt_entropy_bound, schmidt_number

DEFAULT_SLACK = {
    "cor34_schmidt_upper": 1e-6,
    "cor35_schmidt_lower": 1e-6,
    "lemma1_teleport": 1e-6,
    "lemma5_teleport": 1e-6,
    "bound3_destroying": 2e-2,
    "bound1_nonlocality": 1e-6,
}

SATISFIED = "satisfied"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive: RHS under-optimized"
SKIPPED = "skipped"


class MissingQuantityError(KeyError):
    def __init__(self, names):
        self.names = list(names)
        super().__init__("missing computed quantities: " + ", ".join(self.names))


@dataclass(frozen=True)
class Check:
    name: str
    lhs: float
    relation: str
    rhs: float
    slack: float
    satisfied: bool
    status: str
    note: str = ""

    def as_dict(self) -> dict:
        return {"name": self.name, "lhs": self.lhs, "relation": self.relation, "rhs": self.rhs,
                "slack": self.slack, "satisfied": self.satisfied, "status": self.status,
                "note": self.note}


@dataclass(frozen=True)
class BoundsReport:
    gate: dict
    computed: dict
    checks: list = field(default_factory=list)
    ceilings: list = field(default_factory=list)

    @property
    def violations(self) -> list[Check]:
        return [c for c in self.checks if c.status == VIOLATED]

    def check(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)

    def as_dict(self) -> dict:
        return {"gate": dict(self.gate), "computed": dict(self.computed),
                "checks": [c.as_dict() for c in self.checks],
                "ceilings": [{"name": n, "value": v} for n, v in self.ceilings]}


def _check(name, lhs, rhs, slack, rhs_optimized=False, note="") -> Check:
    ok = bool(lhs <= rhs + slack)
    if ok:
        status = SATISFIED
    else:
        status = INCONCLUSIVE if rhs_optimized else VIOLATED
    return Check(name, float(lhs), "<=", float(rhs), float(slack), ok, status, note)


def check_bounds(gate: BipartiteGate, computed: dict, slack: dict | float | None = None,
                 ancilla_dims=None) -> BoundsReport:
    """Evaluate every bound whose inputs are present in ``computed``.

    ``computed`` must hold ``delta_e``; ``delta_e_adjoint`` and ``delta_chi``
    enable the checks that need them. ``ancilla_dims`` is the ancilla size
    ``delta_e`` was optimized with (gate dims if omitted).
    """
    if isinstance(slack, (int, float)):
        slacks = {k: float(slack) for k in DEFAULT_SLACK}
    else:
        slacks = {**DEFAULT_SLACK, **(slack or {})}
    missing = [k for k in ("delta_e",) if k not in computed]
    if missing:
        raise MissingQuantityError(missing)

    dec = operator_schmidt(gate)
    sch = schmidt_number(dec)
    lower, upper = schmidt_entropy_bound(gate)
    da, db = gate.dims
    tele = float(2 * np.log2(min(da, db)))
    de = float(computed["delta_e"])
    dea = computed.get("delta_e_adjoint")
    dchi = computed.get("delta_chi")
    na, nb = ancilla_dims if ancilla_dims is not None else gate.dims

    checks = [_check("cor34_schmidt_upper", de, upper, slacks["cor34_schmidt_upper"],
                     note="delta_e <= log2 Sch(U)")]
    if na >= da and nb >= db:
        checks.append(_check("cor35_schmidt_lower", lower, de, slacks["cor35_schmidt_lower"],
                             rhs_optimized=True, note="schmidt_lower <= delta_e"))
    else:
        checks.append(Check("cor35_schmidt_lower", lower, "<=", de,
                            slacks["cor35_schmidt_lower"], True, SKIPPED,
                            "ancillas smaller than gate dims"))
    checks.append(_check("lemma1_teleport", de, tele, slacks["lemma1_teleport"],
                         note="delta_e <= 2 log2 min(dA, dB)"))
    if dchi is not None:
        checks.append(_check("lemma5_teleport", float(dchi), tele, slacks["lemma5_teleport"],
                             note="delta_chi <= 2 log2 min(dA, dB)"))
        if dea is not None:
            checks.append(_check("bound3_destroying", float(dchi), de + float(dea),
                                 slacks["bound3_destroying"], rhs_optimized=True,
                                 note="delta_chi <= delta_e + delta_e_adjoint"))
    s1 = slacks["bound1_nonlocality"]
    if sch > 1:
        checks.append(_check("bound1_nonlocality", s1, de, 0.0, rhs_optimized=True,
                             note="nonlocal gate: delta_e exceeds slack"))
    else:
        checks.append(_check("bound1_nonlocality", de, 0.0, s1,
                             note="local gate: delta_e within slack of 0"))

    ceilings = [("bound2_unassisted_two_way", de), ("lemma1_teleport", tele)]
    full = {"delta_e": de, "delta_e_adjoint": None if dea is None else float(dea),
            "delta_chi": None if dchi is None else float(dchi), "schmidt_number": sch,
            "schmidt_lower": lower, "schmidt_upper": upper}
    gate_info = {"name": gate.name, "dims": list(gate.dims),
                 "params": [float(p) for p in gate.params]}
    return BoundsReport(gate_info, full, checks, ceilings)
