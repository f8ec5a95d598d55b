import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rundyn.errors import DimensionError, InvariantError
from rundyn.operator_core import (
    gram_matrix,
    gram_schmidt_hs,
    hermitian_eig,
    hs_distance,
    hs_inner,
    pure_state,
    random_density_matrix,
    trace_distance,
    unvec,
    vec,
    von_neumann_entropy,
)
from rundyn.qubit_network import analytic_attractors, basis_state, cnot, invariant_ket

from oracles import hs_inner_loops

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
KET0 = np.diag([1, 0]).astype(complex)
KET1 = np.diag([0, 1]).astype(complex)


def test_hs_inner_examples():
    assert hs_inner(I2, I2) == 2
    assert hs_inner(SX, SZ) == 0
    x2 = analytic_attractors(3).blocks[0].basis[1]
    assert abs(hs_inner(x2, x2) - 1) < 1e-14


def test_hs_inner_matches_loops(rng):
    a = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    b = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    assert abs(hs_inner(a, b) - hs_inner_loops(a, b)) < 1e-12
    assert abs(hs_inner(a, b) - np.conj(hs_inner(b, a))) < 1e-12


def test_hs_inner_dimension_mismatch():
    with pytest.raises(DimensionError):
        hs_inner(I2, np.eye(3))


def test_hs_distance_examples():
    rho = random_density_matrix(3, np.random.default_rng(1))
    assert hs_distance(rho, rho) == 0
    assert hs_distance(KET0, KET1) == pytest.approx(np.sqrt(2), abs=1e-15)
    # diag(1/2, -1/2): sqrt(1/4 + 1/4)
    assert hs_distance(KET0, I2 / 2) == pytest.approx(1 / np.sqrt(2), abs=1e-15)
    with pytest.raises(DimensionError):
        hs_distance(I2, np.eye(4))


def test_trace_distance_orthogonal_states():
    assert trace_distance(KET0, KET1) == pytest.approx(1.0)


def test_entropy_examples():
    assert von_neumann_entropy(KET0) == 0
    assert von_neumann_entropy(np.eye(4) / 4) == pytest.approx(2.0, abs=1e-14)
    rho = 0.5 * (basis_state(1, 2) + basis_state(3, 2))
    assert von_neumann_entropy(rho) == pytest.approx(1.0, abs=1e-14)


def test_entropy_rejects_non_hermitian():
    with pytest.raises(InvariantError):
        von_neumann_entropy(np.array([[0.5, 1], [0, 0.5]]))


@settings(max_examples=40, deadline=None)
@given(d=st.integers(1, 12), seed=st.integers(0, 2**32 - 1))
def test_entropy_bounds(d, seed):
    rho = random_density_matrix(d, np.random.default_rng(seed), rank=max(1, d // 2))
    s = von_neumann_entropy(rho)
    assert -1e-12 <= s <= np.log2(d) + 1e-12


def test_hermitian_eig_examples():
    w, _ = hermitian_eig(np.diag([3.0, 1.0]))
    assert np.allclose(w, [1, 3])
    w, _ = hermitian_eig(SX)
    assert np.allclose(w, [-1, 1])


def test_hermitian_eig_projected_state():
    # rho inside span{|0>, |Phi>} for N=3; P2 rho P2 = rho has exactly two nonzero eigenvalues
    phi = invariant_ket(3)
    zero = np.zeros(8)
    zero[0] = 1
    rho = 0.25 * np.outer(zero, zero) + 0.75 * np.outer(phi, phi.conj())
    w, _ = hermitian_eig(rho)
    assert np.sum(np.abs(w) > 1e-12) == 2
    assert np.allclose(sorted(w[np.abs(w) > 1e-12]), [0.25, 0.75])


@pytest.mark.parametrize("d", [2, 7, 16, 64])
def test_hermitian_eig_reconstruction(rng, d):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    a = g + g.conj().T
    w, v = hermitian_eig(a)
    assert np.all(np.diff(w) >= 0)
    assert np.linalg.norm(v @ np.diag(w) @ v.conj().T - a) < 1e-10 * d
    assert np.linalg.norm(v.conj().T @ v - np.eye(d)) < 1e-10 * d


def test_hermitian_eig_rejects_non_hermitian():
    with pytest.raises(InvariantError):
        hermitian_eig(np.array([[1, 2], [0, 1]]))


def test_vec_convention():
    assert np.array_equal(vec(I2), [1, 0, 0, 1])
    a = np.arange(9).reshape(3, 3).astype(complex)
    v = vec(a)
    for i in range(3):
        for j in range(3):
            assert v[i + 3 * j] == a[i, j]


def test_vec_roundtrip_bit_identical(rng):
    a = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    assert np.array_equal(unvec(vec(a), 6), a)
    assert np.array_equal(unvec(vec(a)), a)


def test_unvec_rejects_non_square_length():
    with pytest.raises(DimensionError):
        unvec(np.ones(5))


def test_kron_identity_for_cnot(rng):
    c = cnot(2, 1, 2).matrix
    x = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    assert np.allclose(np.kron(c, c.conj()) @ vec(x), vec(c @ x @ c.conj().T), atol=1e-15)


def test_gram_schmidt_duplicates():
    out = gram_schmidt_hs([I2, I2])
    assert len(out) == 1
    assert np.allclose(out[0], I2 / np.sqrt(2))


def test_gram_schmidt_span():
    out = gram_schmidt_hs([SZ, I2 + SZ])
    assert len(out) == 2
    assert np.allclose(gram_matrix(out), np.eye(2), atol=1e-12)
    # both outputs lie in span{1, sigma_z}: diagonal, off-diagonals zero
    for x in out:
        assert np.allclose(x - np.diag(np.diag(x)), 0)


def test_gram_schmidt_keeps_orthonormal_attractor_basis():
    raw = list(analytic_attractors(4).blocks[0].basis)
    out = gram_schmidt_hs(raw)
    assert len(out) == 5
    for a, b in zip(raw, out):
        assert abs(abs(hs_inner(a, b)) - 1) < 1e-12


def test_gram_schmidt_empty():
    assert gram_schmidt_hs([]) == []


@settings(max_examples=30, deadline=None)
@given(k=st.integers(1, 12), d=st.integers(1, 4), seed=st.integers(0, 2**32 - 1))
def test_gram_schmidt_orthonormal(k, d, seed):
    rng = np.random.default_rng(seed)
    ops = [rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)) for _ in range(k)]
    out = gram_schmidt_hs(ops)
    assert len(out) == min(k, d * d)
    assert np.max(np.abs(gram_matrix(out) - np.eye(len(out)))) < 1e-10


def test_hs_inner_positive_definite(rng):
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    assert hs_inner(a, a).real > 0
    assert abs(hs_inner(a, a).imag) < 1e-12
    assert hs_inner(np.zeros((3, 3)), np.zeros((3, 3))) == 0


def test_pure_state_normalizes():
    rho = pure_state([3, 4j])
    assert np.trace(rho) == pytest.approx(1)


def test_kron_order_for_complex_unitary(rng):
    # column stacking: vec(A X B) = (B^T kron A) vec(X), so U X U^dagger <-> conj(U) kron U
    from rundyn.operator_core import random_unitary

    u = random_unitary(3, rng)
    x = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert np.allclose(np.kron(u.conj(), u) @ vec(x), vec(u @ x @ u.conj().T), atol=1e-14)
