import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gatecap.qalg import (DensityMatrix, Hamiltonian, InvalidStateError, LayoutError,
                          StateVector, entanglement_entropy, fidelity, haar_random_state,
                          haar_random_unitary, matrix_exponential, max_entangled, partial_trace,
                          tensor_product, von_neumann_entropy)

Q = (("A", 2),)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def ket(label, *amps):
    return StateVector.from_unnormalized(amps, ((label, len(amps)),))


def bell():
    return StateVector(max_entangled(2), (("A", 2), ("B", 2)))


def test_tensor_product_basis():
    psi = tensor_product(ket("A", 1, 0), ket("B", 0, 1))
    assert psi.layout == (("A", 2), ("B", 2))
    assert np.allclose(psi.amplitudes, [0, 1, 0, 0])


def test_tensor_product_norm():
    other = StateVector(max_entangled(2), (("A'", 2), ("B'", 2)))
    psi = tensor_product(bell(), other)
    assert psi.amplitudes.size == 16
    assert abs(np.linalg.norm(psi.amplitudes) - 1) < 1e-12


def test_tensor_product_identity_and_mismatch():
    assert np.array_equal(tensor_product(np.eye(2), np.eye(2)), np.eye(4))
    with pytest.raises(TypeError):
        tensor_product(bell(), np.eye(2))


def test_partial_trace_examples():
    red = partial_trace(bell().density(), ["A"])
    assert np.allclose(red.entries, np.eye(2) / 2)

    rho_a = DensityMatrix(np.array([[0.7, 0.2j], [-0.2j, 0.3]]), Q)
    sigma_b = DensityMatrix(np.array([[0.4, 0.1], [0.1, 0.6]]), (("B", 2),))
    assert np.allclose(partial_trace(tensor_product(rho_a, sigma_b), ["A"]).entries, rho_a.entries)

    psi = StateVector.basis((0, 1), (("A", 2), ("B", 2)))
    assert np.allclose(partial_trace(psi.density(), ["A"]).entries, np.diag([1, 0]))
    with pytest.raises(LayoutError):
        partial_trace(psi.density(), ["C"])


def test_partial_trace_of_state_matches_density_route():
    psi = StateVector(haar_random_state(24, 3), (("A", 2), ("B", 3), ("A'", 4)))
    for keep in (["A"], ["B", "A'"], ["A", "A'"]):
        assert np.allclose(partial_trace(psi, keep).entries,
                           partial_trace(psi.density(), keep).entries, atol=1e-12)


def test_entropy_examples():
    assert von_neumann_entropy(DensityMatrix(np.eye(2) / 2, Q)) == pytest.approx(1.0, abs=1e-12)
    assert von_neumann_entropy(ket("A", 0.6, 0.8j).density()) == pytest.approx(0.0, abs=1e-12)
    expected = -(0.25 * math.log2(0.25) + 0.75 * math.log2(0.75))
    assert von_neumann_entropy(np.diag([0.25, 0.75])) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.811278, abs=1e-6)


def test_entropy_rejects_non_hermitian():
    with pytest.raises(InvalidStateError):
        von_neumann_entropy(np.array([[0.5, 0.1], [0.3, 0.5]]))


def test_entanglement_entropy_examples():
    assert entanglement_entropy(bell()) == pytest.approx(1.0, abs=1e-12)
    phi3 = StateVector(max_entangled(3), (("A", 3), ("B", 3)))
    assert entanglement_entropy(phi3) == pytest.approx(math.log2(3), abs=1e-12)
    prod = tensor_product(ket("A", 1, 1j), ket("B", 2, 1))
    assert entanglement_entropy(prod) == pytest.approx(0.0, abs=1e-12)
    # reduced matrix (1/3)[[2,1],[1,1]] has eigenvalues (3 +- sqrt5)/6
    psi = StateVector.from_unnormalized([1, 1, 1, 0], (("A", 2), ("B", 2)))
    lam = [(3 + math.sqrt(5)) / 6, (3 - math.sqrt(5)) / 6]
    expected = -sum(x * math.log2(x) for x in lam)
    assert entanglement_entropy(psi) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.550, abs=1e-3)


def test_fidelity_examples():
    zero, one = ket("A", 1, 0), ket("A", 0, 1)
    psi = ket("A", 0.6, 0.8j)
    assert fidelity(psi, psi.density()) == pytest.approx(1.0)
    assert fidelity(zero, one.density()) == pytest.approx(0.0)
    assert fidelity(zero, DensityMatrix.mixed(2)) == pytest.approx(0.5)
    with pytest.raises(LayoutError):
        fidelity(zero, np.eye(4) / 4)


def test_matrix_exponential():
    zero = Hamiltonian(np.zeros((4, 4)), (2, 2))
    assert np.allclose(matrix_exponential(zero, 1.3).matrix, np.eye(4))
    h = Hamiltonian(np.diag([1, -1, -1, 1]), (2, 2))
    u = matrix_exponential(h, np.pi / 4).matrix
    ph = np.exp(-1j * np.pi / 4)
    assert np.allclose(u, np.diag([ph, ph.conjugate(), ph.conjugate(), ph]), atol=1e-12)
    rng = np.random.default_rng(4)
    a = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    h = Hamiltonian(a + a.conj().T, (2, 3))
    prod = matrix_exponential(h, 0.7).matrix @ matrix_exponential(h, -0.7).matrix
    assert np.abs(prod - np.eye(6)).max() < 1e-10
    with pytest.raises(InvalidStateError):
        Hamiltonian(a, (2, 3))


def test_haar_random_unitary():
    u1 = haar_random_unitary(1, 0)
    assert u1.shape == (1, 1) and abs(abs(u1[0, 0]) - 1) < 1e-12
    assert np.array_equal(haar_random_unitary(5, 11), haar_random_unitary(5, 11))
    u = haar_random_unitary(6, 3)
    assert np.abs(u.conj().T @ u - np.eye(6)).max() < 1e-10


def test_state_invariants_enforced():
    with pytest.raises(InvalidStateError):
        StateVector([1, 1], Q)
    with pytest.raises(LayoutError):
        StateVector([1, 0, 0], Q)
    with pytest.raises(LayoutError):
        StateVector([1, 0], Q, alice={"Z"})


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(2, 6))
def test_entropy_unitary_invariance(seed, d):
    rng = np.random.default_rng(seed)
    w = rng.dirichlet(np.ones(d))
    v = haar_random_unitary(d, rng)
    rho = (v * w) @ v.conj().T
    conj = haar_random_unitary(d, rng)
    assert abs(von_neumann_entropy(conj @ rho @ conj.conj().T) - von_neumann_entropy(rho)) < 1e-9


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_partial_trace_commutes_and_preserves_trace(seed):
    layout = (("A", 2), ("B", 3), ("C", 2))
    psi = StateVector(haar_random_state(12, seed), layout, alice={"A"})
    rho = psi.density()
    direct = partial_trace(rho, ["A"])
    via_c = partial_trace(partial_trace(rho, ["A", "B"]), ["A"])
    via_b = partial_trace(partial_trace(rho, ["A", "C"]), ["A"])
    assert np.abs(direct.entries - via_c.entries).max() < 1e-12
    assert np.abs(direct.entries - via_b.entries).max() < 1e-12
    assert abs(np.trace(direct.entries) - 1) < 1e-12
    assert np.linalg.eigvalsh(direct.entries).min() > -1e-12


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(2, 4), st.integers(2, 4))
def test_entanglement_entropy_symmetric_in_cut(seed, da, db):
    psi = StateVector(haar_random_state(da * db, seed), (("A", da), ("B", db)))
    flipped = StateVector(psi.amplitudes, psi.layout, alice={"B"})
    assert abs(entanglement_entropy(psi) - entanglement_entropy(flipped)) < 1e-10
    sa = von_neumann_entropy(partial_trace(psi, ["A"]))
    sb = von_neumann_entropy(partial_trace(psi, ["B"]))
    assert abs(sa - sb) < 1e-10


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_tensor_product_associative(seed):
    rng = np.random.default_rng(seed)
    a = StateVector(haar_random_state(2, rng), (("A", 2),))
    b = StateVector(haar_random_state(3, rng), (("B", 3),))
    c = StateVector(haar_random_state(2, rng), (("C", 2),))
    left = tensor_product(tensor_product(a, b), c)
    right = tensor_product(a, tensor_product(b, c))
    assert left.layout == right.layout
    assert np.abs(left.amplitudes - right.amplitudes).max() < 1e-15
