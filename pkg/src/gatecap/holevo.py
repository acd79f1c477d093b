"""Holevo information and the entanglement-assisted one-way classical capacity.

The forward capacity is the one-shot supremum over finite pure-state
ensembles on A A' B B' of chi(Bob's output reductions) - chi(Bob's input
reductions). As with the entanglement capacity, the optimizer returns a lower
bound on that supremum.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.special import softmax

from . import optim
from .entcap import EntCapConfig, apply_gate, embed_state, input_layout
from .qalg import (BipartiteGate, DensityMatrix, LayoutError, StateVector, haar_random_state,
                   max_entangled, partial_trace, von_neumann_entropy, weyl)

UPPER_SLACK = 1e-6
PAD_LOGIT = 20.0


@dataclass(frozen=True, eq=False)
class Ensemble:
    probs: np.ndarray
    states: tuple

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float).reshape(-1)
        states = tuple(self.states)
        if len(states) < 1 or len(states) != p.size:
            raise ValueError(f"{p.size} probabilities for {len(states)} states")
        if (p < 0).any() or abs(p.sum() - 1.0) > 1e-10:
            raise ValueError(f"probabilities must be nonnegative and sum to 1, got {p}")
        lay = states[0].layout
        if any(s.layout != lay or s.alice != states[0].alice for s in states):
            raise LayoutError("ensemble members must share one layout and cut")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "states", states)

    @property
    def layout(self):
        return self.states[0].layout

    def bob_reductions(self) -> list[tuple[float, DensityMatrix]]:
        bob = self.states[0].bob
        return [(float(p), partial_trace(s, bob)) for p, s in zip(self.probs, self.states)]

    def as_dict(self) -> dict:
        return {
            "layout": [[lab, d] for lab, d in self.layout],
            "probs": [float(p) for p in self.probs],
            "states": [[[float(z.real), float(z.imag)] for z in s.amplitudes] for s in self.states],
        }


@dataclass(frozen=True, eq=False)
class HolevoResult:
    value: float
    optimal_ensemble: Ensemble
    chi_in: float
    chi_out: float
    per_restart_values: list = field(default_factory=list)
    converged: bool = True
    seed: int = 0
    ensemble_size: int = 0
    ancilla_dims: tuple[int, int] = (1, 1)

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "value_kind": "lower bound on the supremum (local optimization)",
            "chi_in": self.chi_in,
            "chi_out": self.chi_out,
            "per_restart_values": list(self.per_restart_values),
            "converged": self.converged,
            "seed": self.seed,
            "ensemble_size": self.ensemble_size,
            "ancilla_dims": list(self.ancilla_dims),
            "optimal_ensemble": self.optimal_ensemble.as_dict(),
        }


def holevo_chi(ensemble) -> float:
    """S(sum p_i eta_i) - sum p_i S(eta_i) for (prob, density matrix) pairs."""
    pairs = list(ensemble)
    if not pairs:
        raise ValueError("empty ensemble")
    probs = np.array([p for p, _ in pairs], dtype=float)
    if (probs < 0).any() or abs(probs.sum() - 1.0) > 1e-10:
        raise ValueError(f"probabilities must be nonnegative and sum to 1, got {probs}")
    mats = [m.entries if isinstance(m, DensityMatrix) else np.asarray(m, dtype=complex)
            for _, m in pairs]
    if len({m.shape for m in mats}) != 1:
        raise LayoutError("ensemble members have different dimensions")
    avg = sum(p * m for p, m in zip(probs, mats))
    return von_neumann_entropy(avg) - sum(p * von_neumann_entropy(m) for p, m in zip(probs, mats))


def delta_chi_fixed_ensemble(gate: BipartiteGate, ens: Ensemble) -> float:
    """Increase of the Holevo information of Bob's reductions caused by one use of the gate."""
    out = Ensemble(ens.probs, [apply_gate(gate, s) for s in ens.states])
    return holevo_chi(out.bob_reductions()) - holevo_chi(ens.bob_reductions())


def _chi_and_grad(m: np.ndarray, p: np.ndarray):
    """Holevo quantity of Bob's reductions for a batch of cut matrices.

    ``m`` has shape (members, alice dim, bob dim). Returns chi, the
    complex-form gradient with respect to m and the gradient with respect to p.
    """
    eta = np.einsum("kaj,kal->kjl", m, m.conj())
    avg = np.einsum("k,kjl->jl", p, eta)
    s_avg, g_avg = optim.hermitian_entropy_and_grad(avg)
    s_i, g_i = optim.hermitian_entropy_and_grad(eta)
    chi = float(s_avg - p @ s_i)
    diff = g_avg[None] - g_i
    gm = 2.0 * p[:, None, None] * np.einsum("kaj,klj->kal", m, diff)
    gp = np.einsum("lj,kjl->k", g_avg, eta).real - s_i
    return chi, gm, gp


class _Objective:
    def __init__(self, gate: BipartiteGate, ancillas, size: int):
        self.da, self.db = gate.dims
        self.na, self.nb = ancillas
        self.k = size
        self.dim = self.da * self.na * self.db * self.nb
        self.u = gate.tensor()
        self.udag = gate.adjoint().tensor()
        self.shape = (size, self.da, self.na, self.db, self.nb)
        self.cut = (size, self.da * self.na, self.db * self.nb)

    def _apply(self, ut, z):
        return np.einsum("abcd,kcxdy->kaxby", ut, z.reshape(self.shape)).reshape(self.cut)

    def unpack(self, x):
        w = x[:self.k]
        z = optim.r2c(x[self.k:]).reshape(self.k, self.dim)
        return w, z

    def pack(self, w, z):
        return np.concatenate([w, optim.c2r(z.reshape(-1))])

    def __call__(self, x):
        w, z = self.unpack(x)
        p = softmax(w)
        nrm = np.linalg.norm(z, axis=1)
        psi = z / nrm[:, None]
        m_in = psi.reshape(self.cut)
        chi_in, gm_in, gp_in = _chi_and_grad(m_in, p)
        m_out = self._apply(self.u, psi)
        chi_out, gm_out, gp_out = _chi_and_grad(m_out, p)
        g = (self._apply(self.udag, gm_out) - gm_in).reshape(self.k, self.dim)
        radial = np.real(np.sum(psi.conj() * g, axis=1))
        gz = (g - radial[:, None] * psi) / nrm[:, None]
        c = gp_out - gp_in
        gw = p * (c - p @ c)
        return chi_out - chi_in, self.pack(gw, gz)


def _shared_pair_start(gate, ancillas, size) -> np.ndarray:
    """Alice Weyl-encodes her half of a maximally entangled A|B' pair."""
    da, db = gate.dims
    na, nb = ancillas
    r = min(da, nb)
    pair = np.zeros((da, nb), dtype=complex)
    pair[:r, :r] = max_entangled(r).reshape(r, r)
    members = []
    for k in range(size):
        w = weyl(da, k % da, (k // da) % da)
        t = np.einsum("ab,bx->ax", w, pair)  # (A, B')
        full = np.einsum("ay,x,b->axby", t, np.eye(na)[0], np.eye(db)[0])
        members.append(full.reshape(-1))
    return np.array(members)


def default_ensemble_size(gate: BipartiteGate, ancillas) -> int:
    return gate.dims[0] * gate.dims[1] * ancillas[0] * ancillas[1]


def optimize_delta_chi(gate: BipartiteGate, ensemble_size: int | None = None,
                       ancilla_dims=None, cfg: EntCapConfig = EntCapConfig(),
                       warm_starts: Sequence[Ensemble] = ()) -> HolevoResult:
    if ancilla_dims is not None:
        cfg = replace(cfg, ancilla_dims=tuple(ancilla_dims))
    ancillas = cfg.ancillas_for(gate)
    size = default_ensemble_size(gate, ancillas) if ensemble_size is None else int(ensemble_size)
    if size < 2:
        raise ValueError(f"ensemble size must be at least 2, got {size}")
    layout = input_layout(gate, ancillas)
    fun = _Objective(gate, ancillas, size)

    starts = []
    product = np.zeros((size, fun.dim), dtype=complex)
    product[:, 0] = 1.0
    starts.append(fun.pack(np.zeros(size), product))
    starts.append(fun.pack(np.zeros(size), _shared_pair_start(gate, ancillas, size)))
    for ens in warm_starts:
        starts.append(_pad_ensemble(ens, gate, ancillas, size, fun))
    for i in range(cfg.restarts):
        rng = optim.restart_rng(cfg.seed, i)
        z = np.array([haar_random_state(fun.dim, rng) for _ in range(size)])
        starts.append(fun.pack(0.1 * rng.standard_normal(size), z))

    outcomes = optim.run_restarts(fun, starts, cfg.max_iterations, cfg.gradient_tolerance,
                                  cfg.threads)
    best = optim.best_of(outcomes)
    w, z = fun.unpack(best.x)
    p = softmax(w)
    p = p / p.sum()
    ens = Ensemble(p, [StateVector.from_unnormalized(zk, layout) for zk in z])
    out = Ensemble(ens.probs, [apply_gate(gate, s) for s in ens.states])
    chi_in = holevo_chi(ens.bob_reductions())
    chi_out = holevo_chi(out.bob_reductions())
    value = chi_out - chi_in
    ceiling = 2 * np.log2(min(gate.dims))
    if value > ceiling + UPPER_SLACK:
        raise optim.InvariantViolation(
            f"assisted capacity {value:.9f} exceeds 2 log2 min(dA, dB) = {ceiling:.9f}")
    return HolevoResult(value, ens, chi_in, chi_out, [o.value for o in outcomes],
                        best.converged, cfg.seed, size, ancillas)


def _pad_ensemble(ens: Ensemble, gate, ancillas, size, fun) -> np.ndarray:
    """Embed a smaller ensemble; extra members get negligible weight."""
    k = len(ens.states)
    if k > size:
        raise ValueError(f"warm start has {k} members, more than {size}")
    z = np.zeros((size, fun.dim), dtype=complex)
    for i, s in enumerate(ens.states):
        z[i] = embed_state(s, gate, ancillas)
    z[k:] = z[0]
    w = np.log(np.maximum(ens.probs, 1e-300))
    w = np.concatenate([w, np.full(size - k, w.min() - PAD_LOGIT)])
    return fun.pack(w, z)
