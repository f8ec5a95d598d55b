import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rundyn.channel import (
    RandomUnitaryChannel,
    UnitaryOperator,
    apply,
    apply_adjoint,
    iterate,
    orbit,
    sample_trajectory,
    superoperator,
    trajectory_average,
)
from rundyn.errors import CapacityError, DimensionError, InvariantError
from rundyn.operator_core import (
    hs_distance,
    hs_inner,
    maximally_mixed,
    random_density_matrix,
    random_unitary,
    unvec,
    vec,
    von_neumann_entropy,
)
from rundyn.qubit_network import basis_state, build_cyclic_channel, cnot


def random_channel(rng, d, k):
    probs = rng.dirichlet(np.ones(k))
    return RandomUnitaryChannel.from_unitaries(probs, [random_unitary(d, rng) for _ in range(k)])


def test_identity_channel_is_identity(rng):
    ch = RandomUnitaryChannel.from_unitaries([1.0], [np.eye(3)])
    rho = random_density_matrix(3, rng)
    assert np.allclose(apply(ch, rho), rho)
    assert np.array_equal(superoperator(ch), np.eye(9))


def test_two_qubit_cnot_pair_on_basis_state():
    ch = build_cyclic_channel(2)
    out = apply(ch, basis_state(1, 2))
    # C_{1,2}: z=1 -> 3 ; C_{2,1}: control qubit 2 is 0, z=1 unchanged
    expected = 0.5 * (basis_state(1, 2) + basis_state(3, 2))
    assert np.array_equal(out, expected)


def test_unital(rng):
    ch = random_channel(rng, 5, 3)
    assert hs_distance(apply(ch, maximally_mixed(5)), maximally_mixed(5)) < 1e-12
    assert np.allclose(apply_adjoint(ch, np.eye(5)), np.eye(5), atol=1e-12)


def test_adjoint_single_term(rng):
    u = random_unitary(3, rng)
    ch = RandomUnitaryChannel.from_unitaries([1.0], [u])
    a = rng.standard_normal((3, 3)) + 0j
    assert np.allclose(apply_adjoint(ch, a), u.conj().T @ a @ u)


def test_adjoint_duality_cnot_channel(rng):
    ch = build_cyclic_channel(2)
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    b = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    assert abs(hs_inner(apply_adjoint(ch, a), b) - hs_inner(a, apply(ch, b))) < 1e-12


def test_iterate_zero_and_one(rng):
    ch = build_cyclic_channel(3)
    rho = random_density_matrix(8, rng)
    assert np.array_equal(iterate(ch, rho, 0), rho)
    assert np.array_equal(iterate(ch, rho, 1), apply(ch, rho))
    assert np.array_equal(orbit(ch, rho, 3)[3], iterate(ch, rho, 3))
    with pytest.raises(ValueError):
        iterate(ch, rho, -1)


def test_superoperator_consistency(rng):
    ch = build_cyclic_channel(2)
    m = superoperator(ch)
    rho = random_density_matrix(4, rng)
    assert np.linalg.norm(m @ vec(rho) - vec(apply(ch, rho))) < 1e-12


def test_superoperator_spectrum_in_unit_disk(rng):
    for ch in (build_cyclic_channel(3), random_channel(rng, 3, 4)):
        w = np.linalg.eigvals(superoperator(ch))
        assert np.max(np.abs(w)) <= 1 + 1e-10


def test_superoperator_capacity():
    ch = build_cyclic_channel(7)
    with pytest.raises(CapacityError, match="4096"):
        superoperator(ch)


def test_permutation_fast_path_matches_dense(rng):
    u = cnot(3, 2, 3)
    dense = UnitaryOperator(dim=8, _dense=u.matrix.copy())
    assert dense.perm is None
    a = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    assert np.allclose(u.conjugate(a), dense.conjugate(a))
    assert np.allclose(u.conjugate_adjoint(a), dense.conjugate_adjoint(a))
    m = u.superoperator()
    pi = u.pair_permutation()
    assert np.array_equal(m[pi, np.arange(64)], np.ones(64))


def test_from_matrix_detects_permutation():
    u = UnitaryOperator.from_matrix(cnot(2, 1, 2).matrix)
    assert u.perm is not None
    assert UnitaryOperator.from_matrix(np.array([[0, 1j], [1j, 0]])).perm is None


@pytest.mark.parametrize(
    "probs",
    [[0.5, 0.4], [1.0, 0.0], [1.2, -0.2], [0.5, float("nan")]],
)
def test_probability_validation(probs):
    with pytest.raises(InvariantError):
        RandomUnitaryChannel.from_unitaries(probs, [np.eye(2), np.eye(2)])


def test_channel_validation():
    with pytest.raises(InvariantError):
        RandomUnitaryChannel([])
    with pytest.raises(DimensionError):
        RandomUnitaryChannel.from_unitaries([0.5, 0.5], [np.eye(2), np.eye(3)])
    with pytest.raises(InvariantError):
        RandomUnitaryChannel.from_unitaries([1.0], [np.array([[1, 1], [0, 1]])])
    ch = build_cyclic_channel(2)
    with pytest.raises(DimensionError):
        apply(ch, np.eye(3))


def test_trajectory_single_term(rng):
    u = random_unitary(3, rng)
    ch = RandomUnitaryChannel.from_unitaries([1.0], [u])
    rho = random_density_matrix(3, rng)
    traj = sample_trajectory(ch, rho, 4, seed=11)
    assert len(traj) == 5
    expected = rho
    for r in traj[1:]:
        expected = u @ expected @ u.conj().T
        assert np.allclose(r, expected)


def test_trajectory_deterministic(rng):
    ch = build_cyclic_channel(3)
    rho = random_density_matrix(8, rng)
    a = sample_trajectory(ch, rho, 20, seed=2**63 + 5)
    b = sample_trajectory(ch, rho, 20, seed=2**63 + 5)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    c = trajectory_average(ch, rho, 5, 50, seed=9)
    d = trajectory_average(ch, rho, 5, 50, seed=9)
    assert all(np.array_equal(x, y) for x, y in zip(c, d))


def test_trajectory_average_approaches_exact_map(rng):
    ch = build_cyclic_channel(2)
    rho = random_density_matrix(4, rng)
    samples = 4000
    avg = trajectory_average(ch, rho, 6, samples, seed=3)
    exact = orbit(ch, rho, 6)
    assert max(hs_distance(a, e) for a, e in zip(avg, exact)) < 5 / np.sqrt(samples)


@settings(max_examples=40, deadline=None)
@given(d=st.integers(1, 8), k=st.integers(1, 4), seed=st.integers(0, 2**32 - 1))
def test_channel_invariants(d, k, seed):
    rng = np.random.default_rng(seed)
    ch = random_channel(rng, d, k)
    rho = random_density_matrix(d, rng, rank=int(rng.integers(1, d + 1)))
    sigma = random_density_matrix(d, rng)
    out = apply(ch, rho)
    assert abs(np.trace(out) - 1) < 1e-12
    assert np.max(np.abs(out - out.conj().T)) < 1e-12
    assert von_neumann_entropy(out) >= von_neumann_entropy(rho) - 1e-9
    assert hs_distance(out, apply(ch, sigma)) <= hs_distance(rho, sigma) + 1e-12
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    assert abs(hs_inner(apply_adjoint(ch, a), sigma) - hs_inner(a, apply(ch, sigma))) < 1e-10
    assert np.allclose(unvec(superoperator(ch) @ vec(rho), d), out, atol=1e-12)
