"""One-shot entanglement capacity of a bipartite unitary.

The capacity is the supremum over pure inputs on A A' B B' of
E(U psi) - E(psi) across the AA'|BB' cut. It is found by local ascent from
many starting states, so every reported value is a lower bound on the true
supremum.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import optim
from .qalg import BipartiteGate, LayoutError, StateVector, entanglement_entropy, haar_random_state
from .schmidt import double_epr_input, operator_schmidt, schmidt_number

UPPER_SLACK = 1e-6


@dataclass(frozen=True)
class EntCapConfig:
    ancilla_dims: tuple[int, int] | None = None  # None means the gate's own dims
    restarts: int = 16
    max_iterations: int = 3000
    gradient_tolerance: float = 1e-10
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.max_iterations < 1 or self.gradient_tolerance <= 0:
            raise ValueError("max_iterations and gradient_tolerance must be positive")
        if self.ancilla_dims is not None:
            na, nb = (int(n) for n in self.ancilla_dims)
            if na < 0 or nb < 0:
                raise ValueError(f"ancilla dims must be nonnegative, got {self.ancilla_dims}")
            object.__setattr__(self, "ancilla_dims", (na, nb))

    def ancillas_for(self, gate: BipartiteGate) -> tuple[int, int]:
        if self.ancilla_dims is None:
            return gate.dims
        return tuple(max(n, 1) for n in self.ancilla_dims)

    def as_dict(self) -> dict:
        return {"ancilla_dims": None if self.ancilla_dims is None else list(self.ancilla_dims),
                "restarts": self.restarts, "max_iterations": self.max_iterations,
                "gradient_tolerance": self.gradient_tolerance, "seed": self.seed}


@dataclass(frozen=True, eq=False)
class EntCapResult:
    value: float
    optimal_input: StateVector
    input_entanglement: float
    output_entanglement: float
    per_restart_values: list = field(default_factory=list)
    converged: bool = True
    seed: int = 0
    ancilla_dims: tuple[int, int] = (1, 1)

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "value_kind": "lower bound on the supremum (local optimization)",
            "input_entanglement": self.input_entanglement,
            "output_entanglement": self.output_entanglement,
            "per_restart_values": list(self.per_restart_values),
            "converged": self.converged,
            "seed": self.seed,
            "ancilla_dims": list(self.ancilla_dims),
            "optimal_input": {
                "layout": [[lab, d] for lab, d in self.optimal_input.layout],
                "amplitudes": [[float(z.real), float(z.imag)]
                               for z in self.optimal_input.amplitudes],
            },
        }


def input_layout(gate: BipartiteGate, ancillas) -> tuple:
    (da, db), (na, nb) = gate.dims, ancillas
    return (("A", da), ("A'", na), ("B", db), ("B'", nb))


def apply_gate(gate: BipartiteGate, psi: StateVector) -> StateVector:
    """Act with the gate on subsystems A and B of psi, identity elsewhere."""
    labels = psi.labels
    if "A" not in labels or "B" not in labels:
        raise LayoutError(f"state needs subsystems A and B, has {list(labels)}")
    ia, ib = labels.index("A"), labels.index("B")
    if (psi.dims[ia], psi.dims[ib]) != gate.dims:
        raise LayoutError(f"gate dims {gate.dims} do not match state dims "
                          f"A={psi.dims[ia]}, B={psi.dims[ib]}")
    t = np.tensordot(gate.tensor(), psi.tensor(), axes=([2, 3], [ia, ib]))
    # tensordot leaves axes as (A, B, *rest); restore the original order
    src = [ia, ib] + [i for i in range(len(labels)) if i not in (ia, ib)]
    t = np.transpose(t, [src.index(i) for i in range(len(labels))])
    return psi.with_amplitudes(t.reshape(-1))


def delta_e_fixed_input(gate: BipartiteGate, psi: StateVector) -> float:
    """E(U psi) - E(psi) across the state's own cut."""
    out = apply_gate(gate, psi)
    return entanglement_entropy(out) - entanglement_entropy(psi)


class _Objective:
    """E(U psi) - E(psi) on raw real parameters, with its gradient."""

    def __init__(self, gate: BipartiteGate, ancillas):
        self.da, self.db = gate.dims
        self.na, self.nb = ancillas
        self.u = gate.tensor()
        self.udag = gate.adjoint().tensor()
        self.shape = (self.da, self.na, self.db, self.nb)
        self.cut = (self.da * self.na, self.db * self.nb)

    def _apply(self, ut, psi):
        t = np.einsum("abcd,cxdy->axby", ut, psi.reshape(self.shape))
        return t.reshape(self.cut)

    def __call__(self, x):
        z = optim.r2c(x)
        psi = z / np.linalg.norm(z)
        m_in = psi.reshape(self.cut)
        e_in, g_in = optim.entropy_and_grad(m_in)
        m_out = self._apply(self.u, psi)
        e_out, g_out = optim.entropy_and_grad(m_out)
        g = self._apply(self.udag, g_out).reshape(-1) - g_in.reshape(-1)
        return e_out - e_in, optim.c2r(optim.project_normalization(z, g))


def embed_state(psi: StateVector, gate: BipartiteGate, ancillas) -> np.ndarray:
    """Zero-pad an input on smaller ancillas into the (A, A', B, B') space."""
    psi = psi.permuted(["A", "A'", "B", "B'"])
    da, db = gate.dims
    na, nb = ancillas
    _, pa, _, pb = psi.dims
    if pa > na or pb > nb:
        raise LayoutError(f"cannot embed ancillas {(pa, pb)} into {(na, nb)}")
    t = np.zeros((da, na, db, nb), dtype=complex)
    t[:, :pa, :, :pb] = psi.tensor()
    return t.reshape(-1)


def optimize_entcap(gate: BipartiteGate, cfg: EntCapConfig = EntCapConfig(),
                    warm_starts: Sequence[StateVector] = ()) -> EntCapResult:
    ancillas = cfg.ancillas_for(gate)
    layout = input_layout(gate, ancillas)
    dim = int(np.prod([d for _, d in layout]))
    fun = _Objective(gate, ancillas)

    starts = [optim.c2r(double_epr_input(gate, ancillas).amplitudes)]
    starts += [optim.c2r(embed_state(w, gate, ancillas)) for w in warm_starts]
    starts += [optim.c2r(haar_random_state(dim, optim.restart_rng(cfg.seed, i)))
               for i in range(cfg.restarts)]
    outcomes = optim.run_restarts(fun, starts, cfg.max_iterations, cfg.gradient_tolerance,
                                  cfg.threads)
    best = optim.best_of(outcomes)
    psi = StateVector.from_unnormalized(optim.r2c(best.x), layout)
    e_in = entanglement_entropy(psi)
    e_out = entanglement_entropy(apply_gate(gate, psi))
    value = e_out - e_in
    ceiling = np.log2(schmidt_number(operator_schmidt(gate)))
    if value > ceiling + UPPER_SLACK:
        raise optim.InvariantViolation(
            f"entanglement capacity {value:.9f} exceeds log2 Sch(U) = {ceiling:.9f}")
    return EntCapResult(value, psi, e_in, e_out, [o.value for o in outcomes], best.converged,
                        cfg.seed, ancillas)


def destroying_capacity(gate: BipartiteGate, cfg: EntCapConfig = EntCapConfig()) -> EntCapResult:
    return optimize_entcap(gate.adjoint(), cfg)


def ancilla_sweep(gate: BipartiteGate, dims_list: Sequence[int],
                  cfg: EntCapConfig = EntCapConfig()) -> list[tuple[int, float]]:
    """Capacity with n-dimensional ancillas on both sides for each n in dims_list.

    Each level is warm-started from the previous optimum, so the sequence
    can only drop through optimizer tolerance.
    """
    dims_list = [int(n) for n in dims_list]
    if dims_list != sorted(dims_list):
        raise ValueError(f"dims_list must be ascending, got {dims_list}")
    out = []
    prev = None
    for n in dims_list:
        level = replace(cfg, ancilla_dims=(n, n))
        res = optimize_entcap(gate, level, warm_starts=[prev] if prev is not None else ())
        out.append((n, res.value))
        prev = res.optimal_input
    return out
