"""Attractor spaces of random unitary operations.

The attractor space is spanned by operators ``X`` with ``U_i X U_i^dagger =
lam X`` for every unitary of the channel and ``|lam| = 1``. Knowing an
orthonormal basis of it gives the projection onto asymptotic dynamics and the
closed form ``Phi^n(rho) -> sum lam^n Tr(X^dagger rho) X``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channel import DENSE_LIMIT, RandomUnitaryChannel, superoperator
from .errors import CapacityError, DimensionError, InvariantError
from .operator_core import as_matrix, gram_schmidt_hs, unvec, vec

UNIT_CIRCLE_TOL = 1e-9
CLUSTER_TOL = 1e-8
NULL_RTOL = 1e-10
RESIDUAL_TOL = 1e-9
CSTAR_TOL = 1e-8
SVD_LIMIT = 1024
SNAP_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class AttractorBlock:
    eigenvalue: complex
    basis: tuple[np.ndarray, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)


@dataclass(frozen=True, eq=False)
class AttractorBasis:
    """Unit-modulus eigenvalues, each with an orthonormal list of eigenoperators."""

    dim: int
    blocks: tuple[AttractorBlock, ...] = field(default_factory=tuple)

    @property
    def total_dimension(self) -> int:
        return sum(b.dim for b in self.blocks)

    @property
    def eigenvalues(self) -> list[complex]:
        return [b.eigenvalue for b in self.blocks]

    def dimensions(self) -> dict[complex, int]:
        return {b.eigenvalue: b.dim for b in self.blocks}

    def block(self, lam: complex, tol: float = CLUSTER_TOL) -> AttractorBlock | None:
        for b in self.blocks:
            if abs(b.eigenvalue - lam) < tol:
                return b
        return None

    def elements(self) -> list[tuple[complex, np.ndarray]]:
        return [(b.eigenvalue, x) for b in self.blocks for x in b.basis]


def _snap(lam: complex) -> complex:
    """Round real and imaginary parts that sit within 1e-10 of -1, 0 or 1."""
    parts = []
    for v in (lam.real, lam.imag):
        r = round(v)
        parts.append(float(r) if abs(v - r) < SNAP_TOL and r in (-1, 0, 1) else v)
    return complex(parts[0], parts[1])


def _ipow(lam: complex, n: int) -> complex:
    # binary powering; complex.__pow__ goes through exp/log for large n
    result = 1.0 + 0j
    base = complex(lam)
    while n:
        if n & 1:
            result *= base
        base *= base
        n >>= 1
    return result


def _phase_key(lam: complex) -> tuple[float, float]:
    # order by phase in [0, 2pi), so lam=1 comes first
    ph = np.angle(lam) % (2 * np.pi)
    if ph > 2 * np.pi - 1e-12:
        ph = 0.0
    return (round(ph, 9), abs(lam))


def peripheral_eigenvalues(ch: RandomUnitaryChannel, dense_limit: int = DENSE_LIMIT) -> list[complex]:
    """Distinct eigenvalues of the superoperator on the unit circle."""
    d2 = ch.dim * ch.dim
    if d2 > dense_limit:
        raise CapacityError(
            f"dense spectrum needs d^2 = {d2} <= {dense_limit}; "
            "pass explicit candidate eigenvalues instead (e.g. 1,-1 for involutive gate sets)"
        )
    w = np.linalg.eigvals(superoperator(ch, dense_limit=dense_limit))
    w = w[np.abs(w) > 1 - UNIT_CIRCLE_TOL]
    clusters: list[list[complex]] = []
    for lam in sorted(w, key=lambda z: _phase_key(z)):
        for c in clusters:
            if abs(c[0] - lam) < CLUSTER_TOL:
                c.append(lam)
                break
        else:
            clusters.append([lam])
    out = [_snap(complex(np.mean(c))) for c in clusters]
    if not any(abs(lam - 1) < CLUSTER_TOL for lam in out):
        # unital channels always fix the identity
        out.insert(0, 1.0 + 0j)
    return sorted(out, key=_phase_key)


def _stacked_constraints(ch: RandomUnitaryChannel, lam: complex) -> np.ndarray:
    d2 = ch.dim * ch.dim
    eye = np.eye(d2)
    return np.vstack([u.superoperator() - lam * eye for u in ch.unitaries])


def _null_space_svd(ch: RandomUnitaryChannel, lam: complex, weighted: bool = False) -> list[np.ndarray]:
    if weighted:
        a = superoperator(ch) - lam * np.eye(ch.dim * ch.dim)
    else:
        a = _stacked_constraints(ch, lam)
    d2 = a.shape[1]
    # rank decisions only need R of a QR factorization of the tall stack
    r = np.linalg.qr(a, mode="r") if a.shape[0] > d2 else a
    _, s, vh = np.linalg.svd(r)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        keep = np.arange(d2)
    else:
        rank = int(np.sum(s >= NULL_RTOL * smax))
        keep = np.arange(rank, d2)
    return [vh[k].conj() for k in keep]


def _null_space_orbits(ch: RandomUnitaryChannel, lam: complex) -> list[np.ndarray]:
    """Common eigenspace for permutation unitaries, by propagating values along orbits.

    Each superoperator permutes the ``d^2`` matrix units, so ``M_i v = lam v``
    reads ``v[pi_i(k)] = conj(lam) v[k]``. Fixing ``v = 1`` at the first index
    of a connected component and propagating fixes the component; it
    contributes one basis vector if every edge is consistent and none
    otherwise.
    """
    d2 = ch.dim * ch.dim
    fwd = [u.pair_permutation() for u in ch.unitaries]
    bwd = []
    for p in fwd:
        inv = np.empty_like(p)
        inv[p] = np.arange(d2)
        bwd.append(inv)
    step_f = np.conj(lam)
    step_b = lam
    val = np.zeros(d2, dtype=complex)
    seen = np.zeros(d2, dtype=bool)
    vectors = []
    for root in range(d2):
        if seen[root]:
            continue
        seen[root] = True
        val[root] = 1.0
        members = [root]
        ok = True
        queue = deque([root])
        while queue:
            a = queue.popleft()
            for maps, step in ((fwd, step_f), (bwd, step_b)):
                for p in maps:
                    b = p[a]
                    want = step * val[a]
                    if seen[b]:
                        if abs(val[b] - want) > 1e-12:
                            ok = False
                    else:
                        seen[b] = True
                        val[b] = want
                        members.append(b)
                        queue.append(b)
        if ok:
            v = np.zeros(d2, dtype=complex)
            idx = np.array(members)
            v[idx] = val[idx]
            vectors.append(v / np.linalg.norm(v))
    return vectors


def common_eigenspace(
    ch: RandomUnitaryChannel,
    lam: complex,
    method: str = "auto",
    svd_limit: int = SVD_LIMIT,
) -> list[np.ndarray]:
    """Orthonormal basis of ``{X : U_i X U_i^dagger = lam X for all i}``.

    ``method="svd"`` takes the null space of the stacked constraint matrix
    ``[(conj(U_i) kron U_i) - lam]`` with relative singular value threshold
    ``1e-10``. ``method="orbit"`` is exact and needs permutation unitaries.
    ``"auto"`` uses SVD up to ``d^2 <= svd_limit`` and orbits beyond that.
    ``method="superoperator"`` instead takes the null space of the weighted
    superoperator ``sum_i p_i conj(U_i) kron U_i - lam``; for ``|lam| = 1`` it
    has the same kernel, but reaches it through the probabilities.
    """
    lam = complex(lam)
    if abs(abs(lam) - 1) > UNIT_CIRCLE_TOL:
        raise InvariantError(f"eigenvalue {lam} is not on the unit circle")
    d = ch.dim
    d2 = d * d
    all_perm = all(u.perm is not None for u in ch.unitaries)
    if method == "auto":
        if d2 <= svd_limit:
            method = "svd"
        elif all_perm:
            method = "orbit"
        else:
            raise CapacityError(
                f"stacked constraint SVD needs d^2 = {d2} <= {svd_limit} for non-permutation unitaries"
            )
    if method in ("svd", "superoperator"):
        if d2 > max(svd_limit, DENSE_LIMIT):
            raise CapacityError(f"constraint SVD needs d^2 = {d2} <= {max(svd_limit, DENSE_LIMIT)}")
        vecs = _null_space_svd(ch, lam, weighted=method == "superoperator")
    elif method == "orbit":
        if not all_perm:
            raise ValueError("orbit method needs permutation-backed unitaries")
        vecs = _null_space_orbits(ch, lam)
    else:
        raise ValueError(f"unknown method {method!r}")
    return gram_schmidt_hs(unvec(v, d) for v in vecs)


def solve_attractors(
    ch: RandomUnitaryChannel,
    candidates: Sequence[complex] | None = None,
    method: str = "auto",
    dense_limit: int = DENSE_LIMIT,
    svd_limit: int = SVD_LIMIT,
) -> AttractorBasis:
    """Attractor basis of ``ch``.

    Without ``candidates`` the unit-circle eigenvalues come from the dense
    spectrum of the superoperator. Candidates with an empty eigenspace are
    skipped.
    """
    if candidates is None:
        candidates = peripheral_eigenvalues(ch, dense_limit=dense_limit)
    cands: list[complex] = []
    for c in candidates:
        c = _snap(complex(c))
        if not any(abs(c - o) < CLUSTER_TOL for o in cands):
            cands.append(c)
    blocks = []
    for lam in sorted(cands, key=_phase_key):
        basis = common_eigenspace(ch, lam, method=method, svd_limit=svd_limit)
        if basis:
            blocks.append(AttractorBlock(lam, tuple(basis)))
    return AttractorBasis(ch.dim, tuple(blocks))


def _check_dim(basis: AttractorBasis, rho) -> np.ndarray:
    m = as_matrix(rho)
    if m.shape != (basis.dim, basis.dim):
        raise DimensionError(f"operand shape {m.shape} does not match attractor dimension {basis.dim}")
    return m


def overlaps(basis: AttractorBasis, rho) -> list[tuple[complex, np.ndarray, complex]]:
    """``(lam, X, Tr(X^dagger rho))`` for every basis element."""
    rho = _check_dim(basis, rho)
    return [(lam, x, complex(np.vdot(x, rho))) for lam, x in basis.elements()]


def project(basis: AttractorBasis, rho) -> np.ndarray:
    """Orthogonal projection onto the attractor space."""
    return asymptotic_state(basis, rho, 0)


def asymptotic_state(basis: AttractorBasis, rho, n: int) -> np.ndarray:
    """``sum lam^n Tr(X^dagger rho) X`` over the attractor basis."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    rho = _check_dim(basis, rho)
    out = np.zeros_like(rho)
    for b in basis.blocks:
        phase = _ipow(b.eigenvalue, n)
        for x in b.basis:
            out += phase * np.vdot(x, rho) * x
    return out


def nonstationary_weight(basis: AttractorBasis, rho) -> float:
    """Norm of the projection of ``rho`` onto blocks with ``lam != 1``."""
    rho = _check_dim(basis, rho)
    total = 0.0
    for b in basis.blocks:
        if abs(b.eigenvalue - 1) < CLUSTER_TOL:
            continue
        total += sum(abs(np.vdot(x, rho)) ** 2 for x in b.basis)
    return float(np.sqrt(total))


def attractor_projector(basis: AttractorBasis) -> np.ndarray:
    """``sum vec(X) vec(X)^dagger``: the projection as a ``d^2 x d^2`` matrix."""
    d2 = basis.dim * basis.dim
    if basis.total_dimension == 0:
        return np.zeros((d2, d2), dtype=complex)
    v = np.stack([vec(x) for _, x in basis.elements()], axis=1)
    return v @ v.conj().T


def eigen_residuals(basis: AttractorBasis, ch: RandomUnitaryChannel) -> dict[complex, float]:
    """Largest ``||U_i X U_i^dagger - lam X||`` per block."""
    if ch.dim != basis.dim:
        raise DimensionError("channel and attractor basis have different dimensions")
    out = {}
    for b in basis.blocks:
        worst = 0.0
        for x in b.basis:
            for u in ch.unitaries:
                worst = max(worst, float(np.linalg.norm(u.conjugate(x) - b.eigenvalue * x)))
        out[b.eigenvalue] = worst
    return out


def orthonormality_error(basis: AttractorBasis) -> float:
    xs = [x for _, x in basis.elements()]
    if not xs:
        return 0.0
    flat = np.stack([x.ravel() for x in xs])
    g = flat.conj() @ flat.T
    return float(np.max(np.abs(g - np.eye(len(xs)))))


@dataclass
class RelationCheck:
    name: str
    passed: bool
    max_error: float
    detail: str = ""


@dataclass
class CStarReport:
    checks: list[RelationCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __str__(self) -> str:
        lines = []
        for c in self.checks:
            mark = "PASS" if c.passed else "FAIL"
            extra = f" ({c.detail})" if c.detail else ""
            lines.append(f"{mark} {c.name}: max error {c.max_error:.3e}{extra}")
        return "\n".join(lines)


def _span_residual(x: np.ndarray, basis: Sequence[np.ndarray]) -> float:
    r = x.copy()
    for y in basis:
        r -= np.vdot(y, r) * y
    return float(np.linalg.norm(r))


def verify_cstar_relations(basis: AttractorBasis, tol: float = CSTAR_TOL, max_power: int = 3) -> CStarReport:
    """Check the algebraic relations an attractor basis must satisfy.

    * every eigenvalue has unit modulus;
    * ``X^dagger`` of an element of block ``lam`` lies in block ``conj(lam)``;
    * ``Tr(X^n Y^m) = 0`` whenever ``lam^n mu^m != 1``, for ``1 <= n, m <= max_power``.
    """
    checks = []

    err = max((abs(abs(b.eigenvalue) - 1) for b in basis.blocks), default=0.0)
    checks.append(RelationCheck("unit modulus", err < tol, err))

    worst = 0.0
    missing = []
    for b in basis.blocks:
        partner = basis.block(np.conj(b.eigenvalue), tol=tol)
        if partner is None:
            missing.append(b.eigenvalue)
            continue
        for x in b.basis:
            worst = max(worst, _span_residual(x.conj().T, partner.basis))
    detail = f"no conjugate block for {missing}" if missing else ""
    checks.append(RelationCheck("adjoint pairing", worst < tol and not missing, worst, detail))

    powers = []
    for b in basis.blocks:
        for x in b.basis:
            pw = [np.eye(basis.dim, dtype=complex)]
            for _ in range(max_power):
                pw.append(pw[-1] @ x)
            powers.append((b.eigenvalue, pw))
    worst = 0.0
    tested = 0
    for lam, px in powers:
        for mu, py in powers:
            for n in range(1, max_power + 1):
                for m in range(1, max_power + 1):
                    if abs(_ipow(lam, n) * _ipow(mu, m) - 1) <= tol:
                        continue
                    tested += 1
                    # Tr(A B) without forming the product
                    t = abs(np.sum(px[n] * py[m].T))
                    worst = max(worst, float(t))
    checks.append(RelationCheck("trace orthogonality", worst < tol, worst, f"{tested} products"))
    return CStarReport(checks)
