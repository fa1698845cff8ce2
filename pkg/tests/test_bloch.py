import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from magk.bloch import (SIGMA_Z, SymmetryOp, TightBindingModel, builtin_c4t_model, builtin_ops,
                        check_symmetry, chern_block, chern_number, hamiltonian_at, invariants,
                        spin_blocks, symmetric_perturbation, transform_model)
from magk.errors import (GappedAssumptionFailed, NotSpinConserving, SchemaError,
                         SymmetryViolated)


def block_model(mass):
    return TightBindingModel(2, chern_block(mass))


def flat():
    return TightBindingModel(2, {(0, 0): np.diag([1.0, -1.0])})


def random_unitary(n, rng):
    q, r = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_hamiltonian_examples():
    k = (0.3, 1.1)
    assert np.allclose(hamiltonian_at(flat(), k), np.diag([1, -1]))
    hop = TightBindingModel(1, {(1, 0): [[1]], (-1, 0): [[1]], (0, 1): [[1]], (0, -1): [[1]]})
    assert hamiltonian_at(hop, k)[0, 0] == pytest.approx(2 * np.cos(0.3) + 2 * np.cos(1.1))
    h = hamiltonian_at(block_model(1.0), k)
    want = (np.sin(0.3) * np.array([[0, 1], [1, 0]]) + np.sin(1.1) * np.array([[0, -1j], [1j, 0]])
            + (1 + np.cos(0.3) + np.cos(1.1)) * SIGMA_Z)
    assert np.allclose(h, want)


def test_model_json_round_trip():
    model, c4t, _ = builtin_c4t_model(1.0)
    again = TightBindingModel.from_json(model.to_json())
    assert np.allclose(hamiltonian_at(again, (0.4, 2.0)), hamiltonian_at(model, (0.4, 2.0)))
    assert np.allclose(SymmetryOp.from_json(c4t.to_json()).U, c4t.U)


def test_model_schema_errors():
    with pytest.raises(SchemaError) as err:
        TightBindingModel.from_json({"bands": 1, "hoppings": [{"d": [1, 0], "t": [[[1, 0]]]}]})
    assert "pointer" in err.value.detail
    with pytest.raises(SchemaError):
        TightBindingModel.from_json({"bands": 2, "hoppings": [{"d": [0, 0], "t": [[[1, 0]]]}]})
    with pytest.raises(SchemaError):
        SymmetryOp(np.array([[1, 1], [0, 1]]))


def test_symmetry_residuals():
    model, c4t, sz = builtin_c4t_model(1.0)
    assert check_symmetry(model, SymmetryOp(np.eye(4))) == 0
    assert check_symmetry(model, c4t) < 1e-10
    assert check_symmetry(model, sz) == 0
    assert transform_model(model, c4t).to_json() == model.to_json()


def test_builtin_operator_algebra():
    c4t, sz = builtin_ops()
    assert np.allclose(c4t.fourth_power(), -np.eye(4))
    assert np.allclose(sz.U @ c4t.U, -c4t.U @ sz.U)


@pytest.mark.parametrize("eps", [0.05, 0.2])
def test_sz_breaking_residual(eps):
    model, _, sz = builtin_c4t_model(1.0)
    off = np.zeros((4, 4), dtype=complex)
    off[0, 2] = off[2, 0] = eps
    broken = model + TightBindingModel(4, {(0, 0): off})
    assert check_symmetry(broken, sz) >= eps
    with pytest.raises(NotSpinConserving):
        spin_blocks(broken, sz)
    _, c4t, _ = builtin_c4t_model(1.0)
    with pytest.raises(SymmetryViolated):
        invariants(broken, c4t, sz, mesh=24)


def test_spin_blocks():
    model, _, sz = builtin_c4t_model(1.0)
    up, down = spin_blocks(model, sz)
    assert (up.n, down.n) == (2, 2)
    assert np.allclose(hamiltonian_at(up, (0.7, 0.2)), hamiltonian_at(block_model(1.0), (0.7, 0.2)))
    whole, empty = spin_blocks(flat(), SymmetryOp(np.eye(2)))
    assert (whole.n, empty.n) == (2, 0)


def test_chern_examples():
    assert chern_number(flat()) == 0
    c24, c48 = chern_number(block_model(1.0), 24), chern_number(block_model(1.0), 48)
    assert abs(c24) == 1 and c24 == c48
    assert chern_number(block_model(-1.0), 24) == -c24
    assert chern_number(block_model(3.0), 24) == 0


def test_gap_closing_is_reported():
    with pytest.raises(GappedAssumptionFailed):
        chern_number(block_model(2.0), 24)
    with pytest.raises(GappedAssumptionFailed):
        chern_number(block_model(0.0), 24)


@settings(max_examples=15)
@given(st.integers(0, 2**32 - 1))
def test_gauge_invariance(seed):
    W = random_unitary(2, np.random.default_rng(seed))
    assert chern_number(block_model(1.0).conjugated(W), 24) == chern_number(block_model(1.0), 24)


def test_builtin_invariants():
    model, c4t, sz = builtin_c4t_model(1.0)
    results = {(r.total, r.spin_up, r.spin_down, r.z2_parity)
               for r in (invariants(model, c4t, sz, mesh=N) for N in (24, 48))}
    assert len(results) == 1
    total, up, down, parity = results.pop()
    assert total == 0 and abs(up) == 1 and up + down == 0 and parity == 1
    trivial = invariants(*builtin_c4t_model(3.0), mesh=24)
    assert (trivial.total, trivial.spin_up, trivial.spin_down, trivial.z2_parity) == (0, 0, 0, 0)


@settings(max_examples=10)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 0.1))
def test_symmetric_perturbations_keep_parity(seed, scale):
    model, c4t, sz = builtin_c4t_model(1.0)
    pert = symmetric_perturbation(model, (c4t, sz), (4, 2), np.random.default_rng(seed), scale)
    assert check_symmetry(pert, c4t) < 1e-8 and check_symmetry(pert, sz) < 1e-8
    r = invariants(pert, c4t, sz, mesh=24)
    assert r.total == 0 and r.spin_up + r.spin_down == 0 and r.z2_parity == 1


def test_result_json_is_finite():
    r = invariants(*builtin_c4t_model(1.0), mesh=24).to_json()
    assert set(r) == {"total", "spin_up", "spin_down", "z2_parity", "gap_min", "mesh"}
    assert r["gap_min"] > 0
