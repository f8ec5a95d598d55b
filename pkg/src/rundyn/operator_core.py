"""Complex linear algebra on the operator space B(H).

Operators are plain ``numpy`` arrays of dtype ``complex128``. The helpers in
this module know nothing about channels; they provide Hilbert-Schmidt
geometry, entropy, Hermitian eigendecomposition and the column-stacking
vectorization used by every superoperator in the package.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, InvariantError

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-10
ENTROPY_CUTOFF = 1e-14
GRAM_SCHMIDT_DROP = 1e-10


def as_matrix(a) -> np.ndarray:
    """Return ``a`` as a finite 2-D complex array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvariantError("matrix has non-finite entries")
    return m


def _square(a, name: str = "matrix") -> np.ndarray:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    return m


def _same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"incompatible operands: {a.shape} vs {b.shape}")


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(a).T


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    m = _square(a)
    return bool(np.max(np.abs(m - dagger(m)), initial=0.0) <= tol)


def check_hermitian(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    m = _square(a)
    dev = np.max(np.abs(m - dagger(m)), initial=0.0)
    if dev > tol:
        raise InvariantError(f"matrix is not Hermitian (max deviation {dev:.3e} > {tol:.0e})")
    return m


def check_density_matrix(rho) -> np.ndarray:
    """Validate a density matrix and return it as a complex array.

    Raises :class:`InvariantError` if ``rho`` is not Hermitian, does not have
    unit trace, or has an eigenvalue below ``-1e-10``.
    """
    m = check_hermitian(rho)
    tr = np.trace(m)
    if abs(tr - 1.0) > TRACE_TOL:
        raise InvariantError(f"density matrix trace is {tr.real:.15g}, expected 1")
    lo = np.linalg.eigvalsh(m)[0]
    if lo < -POSITIVITY_TOL:
        raise InvariantError(f"density matrix has negative eigenvalue {lo:.3e}")
    return m


def check_unitary(u) -> np.ndarray:
    m = _square(u, "unitary")
    d = m.shape[0]
    err = np.linalg.norm(dagger(m) @ m - np.eye(d))
    if err > 1e-12 * d:
        raise InvariantError(f"matrix is not unitary (Frobenius error {err:.3e})")
    return m


def pure_state(psi) -> np.ndarray:
    """Projector onto the normalized ket ``psi``."""
    v = np.asarray(psi, dtype=complex).ravel()
    norm = np.linalg.norm(v)
    if norm == 0:
        raise InvariantError("zero state vector")
    v = v / norm
    return np.outer(v, v.conj())


def maximally_mixed(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex) / d


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product ``Tr(A^dagger B)``."""
    a = _square(a)
    b = _square(b)
    _same_shape(a, b)
    return complex(np.vdot(a, b))


def hs_norm(a) -> float:
    return float(np.linalg.norm(as_matrix(a)))


def hs_distance(a, b) -> float:
    """Hilbert-Schmidt (Frobenius) norm of ``A - B``."""
    a = as_matrix(a)
    b = as_matrix(b)
    _same_shape(a, b)
    return float(np.linalg.norm(a - b))


def trace_distance(a, b) -> float:
    """Half the trace norm of ``A - B``; requires a Hermitian difference."""
    a = as_matrix(a)
    b = as_matrix(b)
    _same_shape(a, b)
    diff = check_hermitian(a - b, tol=1e-10)
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(diff))))


def hermitian_eig(a) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix."""
    m = check_hermitian(a)
    # symmetrize away the sub-tolerance anti-Hermitian part
    w, v = np.linalg.eigh(0.5 * (m + dagger(m)))
    return w, v


def von_neumann_entropy(rho) -> float:
    """Von Neumann entropy in bits.

    Eigenvalues below ``1e-14`` contribute nothing, which also absorbs the
    tiny negative eigenvalues roundoff produces for rank-deficient states.
    """
    w, _ = hermitian_eig(rho)
    w = w[w > ENTROPY_CUTOFF]
    return float(max(0.0, -np.sum(w * np.log2(w))))


def vec(a) -> np.ndarray:
    """Column-stacking vectorization: ``vec(A)[i + d*j] == A[i, j]``."""
    m = _square(a)
    return m.reshape(-1, order="F").copy()


def unvec(v, d: int | None = None) -> np.ndarray:
    """Inverse of :func:`vec`."""
    v = np.asarray(v, dtype=complex).ravel()
    n = v.size
    if d is None:
        d = int(round(np.sqrt(n)))
    if d * d != n:
        raise DimensionError(f"vector length {n} is not a perfect square d*d with d={d}")
    return v.reshape(d, d, order="F").copy()


def gram_schmidt_hs(ops: Iterable, drop_tol: float = GRAM_SCHMIDT_DROP) -> list[np.ndarray]:
    """Orthonormalize operators in the Hilbert-Schmidt inner product.

    Modified Gram-Schmidt with a second re-orthogonalization pass. Operators
    whose residual norm after projection falls below ``drop_tol`` are
    dropped, so the result may be shorter than the input.
    """
    basis: list[np.ndarray] = []
    shape = None
    for op in ops:
        x = as_matrix(op).copy()
        if shape is None:
            shape = x.shape
        elif x.shape != shape:
            raise DimensionError(f"incompatible operands: {shape} vs {x.shape}")
        for _ in range(2):
            for q in basis:
                x -= np.vdot(q, x) * q
        norm = np.linalg.norm(x)
        if norm < drop_tol:
            continue
        basis.append(x / norm)
    return basis


def gram_matrix(ops: Sequence[np.ndarray]) -> np.ndarray:
    """Matrix of pairwise Hilbert-Schmidt inner products."""
    if len(ops) == 0:
        return np.zeros((0, 0), dtype=complex)
    flat = np.stack([np.asarray(o, dtype=complex).ravel() for o in ops])
    return flat.conj() @ flat.T


def random_density_matrix(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Density matrix ``G G^dagger / Tr`` from a complex Gaussian ``d x rank`` matrix."""
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    rho = g @ dagger(g)
    rho = 0.5 * (rho + dagger(rho))
    return rho / np.trace(rho).real


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR with the diagonal phase fix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph
