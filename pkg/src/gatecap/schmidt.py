"""Schmidt decompositions of bipartite pure states and unitaries."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qalg import (BipartiteGate, StateVector, entanglement_entropy, max_entangled,
                   unitarity_deviation)

RANK_CUTOFF = 1e-10


@dataclass(frozen=True, eq=False)
class StateSchmidt:
    coefficients: np.ndarray
    alice_basis: np.ndarray  # columns
    bob_basis: np.ndarray  # columns


@dataclass(frozen=True, eq=False)
class OperatorSchmidt:
    """U = sum_i coefficients[i] * alice_factors[i] (x) bob_factors[i].

    Factors are orthonormal under Tr(X^dag Y) and the coefficients satisfy
    sum_i c_i^2 = dA * dB.
    """

    coefficients: np.ndarray
    alice_factors: np.ndarray  # (k, dA, dA)
    bob_factors: np.ndarray  # (k, dB, dB)
    dims: tuple[int, int]

    def reconstruct(self) -> np.ndarray:
        return np.einsum("k,kab,kcd->acbd", self.coefficients, self.alice_factors,
                         self.bob_factors).reshape(self.dims[0] * self.dims[1], -1)

    def normalized(self) -> np.ndarray:
        """Coefficients divided by sqrt(dA dB), so their squares sum to 1."""
        return self.coefficients / np.sqrt(self.dims[0] * self.dims[1])


def state_schmidt(psi: StateVector) -> StateSchmidt:
    u, s, vh = np.linalg.svd(psi.cut_matrix(), full_matrices=False)
    return StateSchmidt(s, u, vh.T)


def reshuffle(u: np.ndarray, dims) -> np.ndarray:
    """Rearrange U[(a,b),(a',b')] into R[(a,a'),(b,b')]."""
    da, db = dims
    return u.reshape(da, db, da, db).transpose(0, 2, 1, 3).reshape(da * da, db * db)


def operator_schmidt(gate: BipartiteGate, tol: float = 1e-8) -> OperatorSchmidt:
    dev = unitarity_deviation(gate.matrix)
    if dev > tol:
        raise ValueError(f"operator Schmidt decomposition needs a unitary (deviation {dev:.3e})")
    da, db = gate.dims
    x, s, yh = np.linalg.svd(reshuffle(gate.matrix, gate.dims), full_matrices=False)
    alice = x.T.reshape(-1, da, da)
    bob = yh.reshape(-1, db, db)
    return OperatorSchmidt(s, alice, bob, (da, db))


def schmidt_number(dec, rank_cutoff: float = RANK_CUTOFF) -> int:
    c = np.asarray(dec.coefficients)
    if c.size == 0 or c.max() == 0:
        return 0
    return int(np.count_nonzero(c > rank_cutoff * c.max()))


def double_epr_input(gate: BipartiteGate, ancillas=None) -> StateVector:
    """|Phi>_{AA'} |Phi>_{BB'}, truncated to the ancilla dimensions."""
    da, db = gate.dims
    na, nb = ancillas if ancillas is not None else (da, db)
    ma = np.eye(da, na, dtype=complex) / np.sqrt(min(da, na))
    mb = np.eye(db, nb, dtype=complex) / np.sqrt(min(db, nb))
    amps = np.kron(ma.reshape(-1), mb.reshape(-1))
    return StateVector(amps, (("A", da), ("A'", na), ("B", db), ("B'", nb)))


def schmidt_entropy_bound(gate: BipartiteGate) -> tuple[float, float]:
    """(lower, upper) ebit bounds on the one-shot entanglement capacity.

    upper is log2 of the Schmidt number; lower is the entropy of the
    normalized squared operator Schmidt coefficients, which is what the gate
    produces from two maximally entangled pairs.
    """
    dec = operator_schmidt(gate)
    mu2 = dec.normalized() ** 2
    mu2 = mu2[mu2 > 1e-15]
    lower = float(-np.sum(mu2 * np.log2(mu2)))
    upper = float(np.log2(schmidt_number(dec)))
    return lower, upper


def double_epr_output_entropy(gate: BipartiteGate) -> float:
    """Cross-check for the lower bound: entropy of U (|Phi>|Phi>) directly."""
    from .entcap import apply_gate

    psi = double_epr_input(gate)
    return entanglement_entropy(apply_gate(gate, psi))
