"""Complex linear algebra and pure/mixed state primitives.

Subsystem order is row-major over the layout list everywhere in the package:
for a layout ``(("A", 2), ("A'", 2), ("B", 2))`` the amplitude index is
``a * 4 + a' * 2 + b``. All logarithms are base 2.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

EIG_CUTOFF = 1e-12
HERMITIAN_TOL = 1e-10
NEGATIVE_TOL = 1e-10
NORM_TOL = 1e-12


class LayoutError(ValueError):
    """Subsystem labels or dimensions do not line up."""


class InvalidStateError(ValueError):
    """A state, density matrix or operator violates its invariants."""


Layout = tuple[tuple[str, int], ...]


def _as_layout(layout) -> Layout:
    out = tuple((str(lab), int(dim)) for lab, dim in layout)
    labels = [lab for lab, _ in out]
    if len(set(labels)) != len(labels):
        raise LayoutError(f"duplicate subsystem labels in {labels}")
    if any(dim < 1 for _, dim in out):
        raise LayoutError(f"subsystem dimensions must be positive: {out}")
    return out


def _layout_size(layout: Layout) -> int:
    return int(np.prod([d for _, d in layout], dtype=np.int64)) if layout else 1


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state with labelled subsystems and an Alice/Bob cut.

    ``alice`` lists the labels on Alice's side of the cut; every other label
    belongs to Bob. By default labels starting with ``A`` are Alice's.
    """

    amplitudes: np.ndarray
    layout: Layout
    alice: frozenset = field(default=None)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        layout = _as_layout(self.layout)
        if _layout_size(layout) != amps.size:
            raise LayoutError(
                f"layout {layout} has size {_layout_size(layout)}, amplitudes have {amps.size}")
        norm = np.linalg.norm(amps)
        if abs(norm ** 2 - 1.0) > NORM_TOL:
            raise InvalidStateError(f"state is not normalized: |psi|^2 = {norm ** 2!r}")
        alice = self.alice
        labels = {lab for lab, _ in layout}
        if alice is None:
            alice = frozenset(lab for lab in labels if lab.startswith("A"))
        alice = frozenset(alice)
        if not alice <= labels:
            raise LayoutError(f"cut mentions unknown labels {sorted(alice - labels)}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "alice", alice)

    @classmethod
    def from_unnormalized(cls, amplitudes, layout, alice=None) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        return cls(amps / np.linalg.norm(amps), layout, alice)

    @classmethod
    def basis(cls, digits: Sequence[int], layout, alice=None) -> "StateVector":
        layout = _as_layout(layout)
        amps = np.zeros(_layout_size(layout), dtype=complex)
        amps[np.ravel_multi_index(tuple(digits), [d for _, d in layout])] = 1.0
        return cls(amps, layout, alice)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lab for lab, _ in self.layout)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d for _, d in self.layout)

    @property
    def bob(self) -> frozenset:
        return frozenset(self.labels) - self.alice

    def dim_of(self, labels) -> int:
        lookup = dict(self.layout)
        return int(np.prod([lookup[lab] for lab in labels], dtype=np.int64))

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.dims)

    def cut_matrix(self) -> np.ndarray:
        """Amplitudes reshaped to (Alice dimension, Bob dimension)."""
        a_axes = [i for i, lab in enumerate(self.labels) if lab in self.alice]
        b_axes = [i for i, lab in enumerate(self.labels) if lab not in self.alice]
        t = np.transpose(self.tensor(), a_axes + b_axes)
        return t.reshape(self.dim_of(self.alice), -1)

    def density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), self.layout)

    def with_amplitudes(self, amplitudes) -> "StateVector":
        return StateVector(amplitudes, self.layout, self.alice)

    def permuted(self, labels: Sequence[str]) -> "StateVector":
        """Same state with subsystems reordered to ``labels``."""
        order = [self.labels.index(lab) for lab in labels]
        t = np.transpose(self.tensor(), order).reshape(-1)
        return StateVector(t, tuple(self.layout[i] for i in order), self.alice)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    entries: np.ndarray
    layout: Layout

    def __post_init__(self):
        rho = np.asarray(self.entries, dtype=complex)
        layout = _as_layout(self.layout)
        n = _layout_size(layout)
        if rho.shape != (n, n):
            raise LayoutError(f"density matrix of shape {rho.shape} does not match layout {layout}")
        herm = np.abs(rho - rho.conj().T).max() if n else 0.0
        if herm > HERMITIAN_TOL:
            raise InvalidStateError(f"density matrix not Hermitian (deviation {herm:.3e})")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > HERMITIAN_TOL:
            raise InvalidStateError(f"density matrix trace is {tr!r}, expected 1")
        low = np.linalg.eigvalsh(rho).min()
        if low < -NEGATIVE_TOL:
            raise InvalidStateError(f"density matrix has negative eigenvalue {low:.3e}")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)
        object.__setattr__(self, "layout", layout)

    @classmethod
    def mixed(cls, d: int, label: str = "A") -> "DensityMatrix":
        return cls(np.eye(d) / d, ((label, d),))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lab for lab, _ in self.layout)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d for _, d in self.layout)


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    entries: np.ndarray
    dims: tuple[int, int]
    name: str = "H"

    def __post_init__(self):
        h = np.asarray(self.entries, dtype=complex)
        dims = (int(self.dims[0]), int(self.dims[1]))
        n = dims[0] * dims[1]
        if h.shape != (n, n):
            raise LayoutError(f"Hamiltonian of shape {h.shape} does not match dims {dims}")
        dev = np.abs(h - h.conj().T).max()
        if dev > HERMITIAN_TOL:
            raise InvalidStateError(f"Hamiltonian not Hermitian (deviation {dev:.3e})")
        h.setflags(write=False)
        object.__setattr__(self, "entries", h)
        object.__setattr__(self, "dims", dims)

    def __mul__(self, c: float) -> "Hamiltonian":
        return Hamiltonian(self.entries * float(c), self.dims, f"{c:g}*{self.name}")

    __rmul__ = __mul__

    def spread(self) -> float:
        """Largest minus smallest eigenvalue."""
        w = np.linalg.eigvalsh(self.entries)
        return float(w[-1] - w[0])


@dataclass(frozen=True, eq=False)
class BipartiteGate:
    """Unitary on a dA x dB system, rows ordered Alice-major."""

    matrix: np.ndarray
    dims: tuple[int, int]
    name: str = "U"
    params: tuple = ()
    unitarity_tol: float = field(default=1e-10, repr=False)

    def __post_init__(self):
        u = np.asarray(self.matrix, dtype=complex)
        dims = (int(self.dims[0]), int(self.dims[1]))
        n = dims[0] * dims[1]
        if u.shape != (n, n):
            raise LayoutError(f"gate matrix of shape {u.shape} does not match dims {dims}")
        dev = unitarity_deviation(u)
        if dev > self.unitarity_tol:
            raise InvalidStateError(f"gate {self.name!r} is not unitary (|U^dag U - I|_F = {dev:.3e})")
        u.setflags(write=False)
        object.__setattr__(self, "matrix", u)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "params", tuple(self.params))

    def adjoint(self) -> "BipartiteGate":
        name = self.name[:-4] if self.name.endswith("^dag") else self.name + "^dag"
        return BipartiteGate(self.matrix.conj().T, self.dims, name, self.params, self.unitarity_tol)

    def role_swapped(self) -> "BipartiteGate":
        """The same gate with Alice and Bob exchanged (conjugation by SWAP)."""
        da, db = self.dims
        t = self.matrix.reshape(da, db, da, db).transpose(1, 0, 3, 2)
        name = self.name[:-8] if self.name.endswith("^swapped") else self.name + "^swapped"
        return BipartiteGate(t.reshape(da * db, da * db), (db, da), name, self.params,
                             self.unitarity_tol)

    def tensor(self) -> np.ndarray:
        """Matrix as a (dA, dB, dA, dB) array: out indices first."""
        da, db = self.dims
        return self.matrix.reshape(da, db, da, db)


def unitarity_deviation(u: np.ndarray) -> float:
    u = np.asarray(u)
    return float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0])))


def tensor_product(a, b):
    """Kronecker product of two states, two density matrices or two arrays."""
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(np.kron(a.amplitudes, b.amplitudes), a.layout + b.layout,
                           a.alice | b.alice)
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(np.kron(a.entries, b.entries), a.layout + b.layout)
    if isinstance(a, (StateVector, DensityMatrix)) or isinstance(b, (StateVector, DensityMatrix)):
        raise TypeError(f"cannot tensor {type(a).__name__} with {type(b).__name__}")
    return np.kron(np.asarray(a), np.asarray(b))


def partial_trace(rho, keep) -> DensityMatrix:
    """Reduce ``rho`` (DensityMatrix or StateVector) to the labels in ``keep``.

    Kept subsystems stay in their original order.
    """
    keep = set(keep)
    unknown = keep - set(rho.labels)
    if unknown:
        raise LayoutError(f"unknown labels {sorted(unknown)}; layout has {list(rho.labels)}")
    kept = [i for i, lab in enumerate(rho.labels) if lab in keep]
    gone = [i for i, lab in enumerate(rho.labels) if lab not in keep]
    dims = rho.dims
    dk = int(np.prod([dims[i] for i in kept], dtype=np.int64))
    layout = tuple(rho.layout[i] for i in kept)
    if isinstance(rho, StateVector):
        m = np.transpose(rho.tensor(), kept + gone).reshape(dk, -1)
        red = m @ m.conj().T
    else:
        n = len(dims)
        t = rho.entries.reshape(dims + dims)
        t = np.transpose(t, kept + gone + [n + i for i in kept] + [n + i for i in gone])
        dg = int(np.prod([dims[i] for i in gone], dtype=np.int64))
        red = np.einsum("agbg->ab", t.reshape(dk, dg, dk, dg))
    return DensityMatrix(0.5 * (red + red.conj().T), layout)


def entropy_of_spectrum(w: np.ndarray) -> float:
    w = np.asarray(w, dtype=float)
    w = w[w > EIG_CUTOFF]
    return float(-np.sum(w * np.log2(w)))


def spectrum(rho) -> np.ndarray:
    """Eigenvalues of a density matrix with tiny negatives clamped to 0."""
    m = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    dev = np.abs(m - m.conj().T).max()
    if dev > HERMITIAN_TOL:
        raise InvalidStateError(f"matrix not Hermitian (deviation {dev:.3e})")
    w = np.linalg.eigvalsh(m)
    if w.size and w.min() < -NEGATIVE_TOL:
        raise InvalidStateError(f"negative eigenvalue {w.min():.3e}")
    return np.clip(w, 0.0, None)


def von_neumann_entropy(rho) -> float:
    """Entropy in bits; eigenvalues under 1e-12 contribute nothing."""
    return entropy_of_spectrum(spectrum(rho))


def schmidt_probabilities(m: np.ndarray) -> np.ndarray:
    """Squared singular values of a cut matrix."""
    s = np.linalg.svd(m, compute_uv=False)
    return s ** 2


def entanglement_entropy(psi: StateVector) -> float:
    return entropy_of_spectrum(schmidt_probabilities(psi.cut_matrix()))


def fidelity(psi: StateVector, rho) -> float:
    """<psi|rho|psi> for a DensityMatrix or a StateVector target."""
    if isinstance(rho, StateVector):
        if rho.amplitudes.size != psi.amplitudes.size:
            raise LayoutError("dimension mismatch")
        return float(abs(np.vdot(psi.amplitudes, rho.amplitudes)) ** 2)
    m = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho)
    if m.shape[0] != psi.amplitudes.size:
        raise LayoutError(f"dimension mismatch: state {psi.amplitudes.size}, operator {m.shape[0]}")
    val = np.vdot(psi.amplitudes, m @ psi.amplitudes).real
    return float(min(max(val, 0.0), 1.0))


def matrix_exponential(h: Hamiltonian, s: float) -> BipartiteGate:
    """exp(-i H s) through the eigendecomposition of H."""
    w, v = np.linalg.eigh(h.entries)
    u = (v * np.exp(-1j * w * s)) @ v.conj().T
    return BipartiteGate(u, h.dims, f"exp(-i {h.name} s)", (float(s),))


def haar_random_unitary(d: int, seed) -> np.ndarray:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def haar_random_state(d: int, seed) -> np.ndarray:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return z / np.linalg.norm(z)


def max_entangled(n: int) -> np.ndarray:
    """Amplitudes of (1/sqrt n) sum_i |i>|i> on an n x n system."""
    return np.eye(n, dtype=complex).reshape(-1) / np.sqrt(n)


PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def weyl(d: int, j: int, k: int) -> np.ndarray:
    """Generalized Pauli X^j Z^k on a d-level system."""
    x = np.roll(np.eye(d), 1, axis=0)
    z = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return np.linalg.matrix_power(x, j) @ np.linalg.matrix_power(z, k)
