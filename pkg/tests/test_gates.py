import json

import numpy as np
import pytest

from gatecap import gates
from gatecap.gates import GateDimensionError, GateParseError, GateUnitarityError
from gatecap.qalg import BipartiteGate, StateVector, haar_random_unitary


def basis(d, x, y):
    v = np.zeros(d * d)
    v[x * d + y] = 1
    return v


def test_permutation_actions():
    assert np.array_equal(gates.cnot().matrix @ basis(2, 1, 0), basis(2, 1, 1))
    assert np.array_equal(gates.swap(2).matrix @ basis(2, 0, 1), basis(2, 1, 0))
    assert np.array_equal(gates.swap(3).matrix @ basis(3, 1, 2), basis(3, 2, 1))
    cp3 = gates.cp(3).matrix
    assert np.array_equal(cp3 @ basis(3, 1, 2), basis(3, 1, 1))
    assert np.array_equal(cp3 @ basis(3, 0, 0), basis(3, 2, 2))
    ae3 = gates.ae(3).matrix
    assert np.array_equal(ae3 @ basis(3, 2, 0), basis(3, 2, 2))
    assert np.array_equal(ae3 @ basis(3, 2, 1), basis(3, 2, 1))


def test_j_gate():
    j = gates.j_gate().matrix
    r = 1 / np.sqrt(2)
    assert np.allclose(j @ basis(2, 0, 0), [r, 0, 0, r])
    assert np.allclose(j @ basis(2, 1, 1), [r, 0, 0, -r])
    assert np.allclose(j @ basis(2, 0, 1), basis(2, 0, 1))
    assert np.allclose(j @ basis(2, 1, 0), basis(2, 1, 0))
    assert np.abs(j @ j - np.eye(4)).max() < 1e-12


def test_cp_order_for_d2():
    cp2 = gates.cp(2).matrix
    assert np.array_equal(np.linalg.matrix_power(cp2, 4), np.eye(4))
    assert not np.array_equal(np.linalg.matrix_power(cp2, 2), np.eye(4))


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_ae_involution(d):
    u = gates.ae(d).matrix
    assert np.array_equal(u @ u, np.eye(d * d))


@pytest.mark.parametrize("ctor", [gates.swap, gates.cp, gates.ae])
def test_dimension_checked(ctor):
    with pytest.raises(ValueError):
        ctor(1)


def test_constructors_unitary_and_adjoint():
    gs = [gates.cnot(), gates.j_gate(), gates.swap(3), gates.cp(4), gates.ae(3),
          gates.phase_gate(0.3)]
    for g in gs:
        assert np.abs(g.matrix.conj().T @ g.matrix - np.eye(g.matrix.shape[0])).max() < 1e-12
        twice = g.adjoint().adjoint()
        assert np.array_equal(twice.matrix, g.matrix)
        assert twice.name == g.name


def test_hamiltonians():
    assert np.allclose(gates.zz_hamiltonian().entries, np.diag([1, -1, -1, 1]))
    xx = np.kron([[0, 1], [1, 0]], [[0, 1], [1, 0]])
    assert np.allclose(gates.xx_yy_hamiltonian(1, 0).entries, xx)
    h = gates.xx_yy_hamiltonian(0.3, -1.7).entries
    assert np.allclose(h, h.conj().T)


def test_file_roundtrip(tmp_path):
    path = tmp_path / "cnot.json"
    gates.gate_to_file(gates.cnot(), path)
    assert np.array_equal(gates.gate_from_file(path).matrix, gates.cnot().matrix)


def test_file_rectangular_dims(tmp_path):
    u = haar_random_unitary(6, 9)
    path = tmp_path / "g.json"
    gates.gate_to_file(BipartiteGate(u, (2, 3)), path)
    g = gates.gate_from_file(path)
    assert g.dims == (2, 3)
    assert np.array_equal(g.matrix, u)


def _write(tmp_path, doc):
    path = tmp_path / "m.json"
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return path


def test_file_errors_are_distinct(tmp_path):
    doc = gates.gate_to_json(gates.cnot())
    doc["matrix"][0][0] = [2.0, 0.0]
    with pytest.raises(GateUnitarityError) as err:
        gates.gate_from_file(_write(tmp_path, doc))
    assert err.value.deviation > 1e-8
    assert "not unitary" in str(err.value)

    doc = gates.gate_to_json(gates.cnot())
    doc["dims"] = [2, 3]
    with pytest.raises(GateDimensionError):
        gates.gate_from_file(_write(tmp_path, doc))

    doc = gates.gate_to_json(gates.cnot())
    doc["matrix"][2] = doc["matrix"][2][:3]
    with pytest.raises(GateParseError, match="row 2"):
        gates.gate_from_file(_write(tmp_path, doc))

    with pytest.raises(GateParseError, match="line 1"):
        gates.gate_from_file(_write(tmp_path, '{"dims": [2, 2], "matrix": '))

    with pytest.raises(GateParseError, match="dims"):
        gates.gate_from_file(_write(tmp_path, {"matrix": [[[1, 0]]]}))


def test_role_swapped_exchanges_parties():
    g = BipartiteGate(haar_random_unitary(6, 2), (2, 3))
    s = g.role_swapped()
    assert s.dims == (3, 2)
    perm = np.zeros((6, 6))
    for a in range(2):
        for b in range(3):
            perm[b * 2 + a, a * 3 + b] = 1
    assert np.allclose(s.matrix, perm @ g.matrix @ perm.T)
    assert np.array_equal(s.role_swapped().matrix, g.matrix)


def test_basis_state_helper():
    psi = StateVector.basis((1, 2), (("A", 3), ("B", 3)))
    assert psi.amplitudes[5] == 1
