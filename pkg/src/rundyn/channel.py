"""Random unitary operations ``rho -> sum_i p_i U_i rho U_i^dagger``.

Unitaries that are permutations of the computational basis (CNOT gates and
products of them) keep an index map alongside, and conjugation by them is a
re-indexing of the density matrix instead of two dense products.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionError, InvariantError, CapacityError
from .operator_core import as_matrix, check_unitary

DENSE_LIMIT = 4096
PROB_TOL = 1e-12


def _rng(seed: int) -> np.random.Generator:
    # PCG64 (O'Neill 2014) seeded with the seed reduced to 64 bits
    return np.random.Generator(np.random.PCG64(int(seed) & 0xFFFFFFFFFFFFFFFF))


@dataclass(frozen=True, eq=False)
class UnitaryOperator:
    """A unitary on ``C^dim``, optionally backed by a basis permutation.

    ``perm[k]`` is the image of basis state ``k``: ``U|k> = |perm[k]>``.
    """

    dim: int
    perm: np.ndarray | None = None
    _dense: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def from_matrix(cls, m, check: bool = True) -> "UnitaryOperator":
        m = as_matrix(m)
        if check:
            check_unitary(m)
        perm = _as_permutation(m)
        return cls(dim=m.shape[0], perm=perm, _dense=m)

    @classmethod
    def from_permutation(cls, perm: Sequence[int]) -> "UnitaryOperator":
        p = np.asarray(perm, dtype=np.intp)
        if p.ndim != 1 or not np.array_equal(np.sort(p), np.arange(p.size)):
            raise InvariantError("index map is not a permutation")
        p.setflags(write=False)
        return cls(dim=p.size, perm=p)

    @property
    def matrix(self) -> np.ndarray:
        if self._dense is not None:
            return self._dense
        m = np.zeros((self.dim, self.dim), dtype=complex)
        m[self.perm, np.arange(self.dim)] = 1.0
        object.__setattr__(self, "_dense", m)
        return m

    @property
    def inverse_perm(self) -> np.ndarray:
        inv = np.empty_like(self.perm)
        inv[self.perm] = np.arange(self.dim)
        return inv

    def conjugate(self, a: np.ndarray) -> np.ndarray:
        """``U A U^dagger``."""
        if self.perm is not None:
            inv = self.inverse_perm
            return a[np.ix_(inv, inv)]
        u = self.matrix
        return u @ a @ u.conj().T

    def conjugate_adjoint(self, a: np.ndarray) -> np.ndarray:
        """``U^dagger A U``."""
        if self.perm is not None:
            return a[np.ix_(self.perm, self.perm)]
        u = self.matrix
        return u.conj().T @ a @ u

    def superoperator(self) -> np.ndarray:
        """Matrix of ``X -> U X U^dagger`` on column-stacked vectors: ``conj(U) kron U``."""
        u = self.matrix
        return np.kron(u.conj(), u)

    def pair_permutation(self) -> np.ndarray:
        """Index map of the superoperator on ``vec`` indices ``i + d*j``."""
        if self.perm is None:
            raise ValueError("unitary is not permutation-backed")
        d = self.dim
        return (self.perm[:, None] + d * self.perm[None, :]).reshape(-1, order="F")

    def is_identity_up_to_phase(self, tol: float = 1e-12) -> bool:
        if self.perm is not None:
            return bool(np.array_equal(self.perm, np.arange(self.dim)))
        u = self.matrix
        phase = u[0, 0]
        if abs(abs(phase) - 1) > tol:
            return False
        return bool(np.max(np.abs(u - phase * np.eye(self.dim))) <= tol)


def _as_permutation(m: np.ndarray) -> np.ndarray | None:
    if not np.all((m == 0) | (m == 1)):
        return None
    rows, cols = np.nonzero(m)
    d = m.shape[0]
    if rows.size != d or not np.array_equal(np.sort(cols), np.arange(d)):
        return None
    perm = np.empty(d, dtype=np.intp)
    perm[cols] = rows
    if not np.array_equal(np.sort(perm), np.arange(d)):
        return None
    return perm


class RandomUnitaryChannel:
    """Mixture of unitary conjugations with strictly positive probabilities."""

    def __init__(self, terms: Sequence[tuple[float, UnitaryOperator]]):
        terms = tuple((float(p), u) for p, u in terms)
        if not terms:
            raise InvariantError("channel needs at least one term")
        probs = np.array([p for p, _ in terms])
        if np.any(~np.isfinite(probs)) or np.any(probs <= 0):
            raise InvariantError("channel probabilities must be strictly positive")
        if abs(probs.sum() - 1.0) > PROB_TOL:
            raise InvariantError(f"channel probabilities sum to {probs.sum():.15g}, expected 1")
        dims = {u.dim for _, u in terms}
        if len(dims) != 1:
            raise DimensionError(f"unitaries have differing dimensions {sorted(dims)}")
        self.terms = terms
        self.dim = dims.pop()

    @classmethod
    def from_unitaries(cls, probabilities: Sequence[float], unitaries: Sequence) -> "RandomUnitaryChannel":
        if len(probabilities) != len(unitaries):
            raise InvariantError("need one probability per unitary")
        ops = [u if isinstance(u, UnitaryOperator) else UnitaryOperator.from_matrix(u) for u in unitaries]
        return cls(list(zip(probabilities, ops)))

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([p for p, _ in self.terms])

    @property
    def unitaries(self) -> list[UnitaryOperator]:
        return [u for _, u in self.terms]

    def with_probabilities(self, probabilities: Sequence[float]) -> "RandomUnitaryChannel":
        """Same unitary set, different weights."""
        return RandomUnitaryChannel.from_unitaries(probabilities, self.unitaries)

    def _check(self, a) -> np.ndarray:
        m = as_matrix(a)
        if m.shape != (self.dim, self.dim):
            raise DimensionError(f"operand shape {m.shape} does not match channel dimension {self.dim}")
        return m

    def __repr__(self) -> str:
        return f"RandomUnitaryChannel(dim={self.dim}, terms={len(self.terms)})"


def apply(ch: RandomUnitaryChannel, rho) -> np.ndarray:
    """One application of the channel."""
    rho = ch._check(rho)
    out = np.zeros_like(rho)
    for p, u in ch.terms:
        out += p * u.conjugate(rho)
    return out


def apply_adjoint(ch: RandomUnitaryChannel, a) -> np.ndarray:
    """The Hilbert-Schmidt adjoint ``A -> sum_i p_i U_i^dagger A U_i``."""
    a = ch._check(a)
    out = np.zeros_like(a)
    for p, u in ch.terms:
        out += p * u.conjugate_adjoint(a)
    return out


def iterate(ch: RandomUnitaryChannel, rho, n: int) -> np.ndarray:
    if n < 0:
        raise ValueError("iteration count must be nonnegative")
    rho = ch._check(rho)
    for _ in range(n):
        rho = apply(ch, rho)
    return rho


def orbit(ch: RandomUnitaryChannel, rho, n: int) -> list[np.ndarray]:
    """``[rho, Phi(rho), ..., Phi^n(rho)]``."""
    if n < 0:
        raise ValueError("iteration count must be nonnegative")
    states = [ch._check(rho)]
    for _ in range(n):
        states.append(apply(ch, states[-1]))
    return states


def superoperator(ch: RandomUnitaryChannel, dense_limit: int = DENSE_LIMIT) -> np.ndarray:
    """``sum_i p_i conj(U_i) kron U_i``, acting on column-stacked operators."""
    d2 = ch.dim * ch.dim
    if d2 > dense_limit:
        raise CapacityError(
            f"superoperator would be {d2}x{d2}; dense limit is d^2 <= {dense_limit}"
        )
    m = np.zeros((d2, d2), dtype=complex)
    for p, u in ch.terms:
        m += p * u.superoperator()
    return m


def sample_trajectory(ch: RandomUnitaryChannel, rho, n: int, seed: int) -> list[np.ndarray]:
    """One stochastic realization: at each step conjugate by ``U_i`` drawn with probability ``p_i``."""
    if n < 0:
        raise ValueError("iteration count must be nonnegative")
    rho = ch._check(rho)
    choices = _rng(seed).choice(len(ch.terms), size=n, p=ch.probabilities)
    out = [rho]
    for i in choices:
        out.append(ch.terms[i][1].conjugate(out[-1]))
    return out


def trajectory_average(ch: RandomUnitaryChannel, rho, n: int, samples: int, seed: int) -> list[np.ndarray]:
    """Average over ``samples`` independent trajectories, for each step ``0..n``.

    All gate choices are drawn up front as a ``(samples, n)`` array from one
    generator, so the result depends only on ``(seed, samples, n)``.
    """
    if n < 0 or samples < 1:
        raise ValueError("need n >= 0 and at least one sample")
    rho = ch._check(rho)
    choices = _rng(seed).choice(len(ch.terms), size=(samples, n), p=ch.probabilities)
    states = np.broadcast_to(rho, (samples,) + rho.shape).copy()
    means = [rho.copy()]
    for step in range(n):
        for i, (_, u) in enumerate(ch.terms):
            sel = choices[:, step] == i
            if not np.any(sel):
                continue
            if u.perm is not None:
                inv = u.inverse_perm
                states[sel] = states[sel][:, inv][:, :, inv]
            else:
                m = u.matrix
                states[sel] = m @ states[sel] @ m.conj().T
        means.append(states.mean(axis=0))
    return means
