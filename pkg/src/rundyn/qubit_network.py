"""Cyclic qubit networks coupled by randomly applied CNOT gates.

Basis convention: ``|z> = |j_N ... j_2 j_1>`` with ``z = sum_i 2**(i-1) j_i``,
so qubit 1 is the least significant bit and bit strings are written with
qubit N first.

The closed-form attractors of these networks are kept here as oracles for the
numerical solver: for every N the ``lam = 1`` eigenspace is spanned by five
operators built from ``|0>`` and the uniform superposition ``|Phi>`` of all
other basis states, and only for N = 2 is there an extra ``lam = -1``
element.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .attractor import AttractorBasis, AttractorBlock
from .channel import PROB_TOL, RandomUnitaryChannel, UnitaryOperator
from .errors import DimensionError, InvariantError
from .operator_core import as_matrix


def bits_to_index(bits: Sequence[int]) -> int:
    """``[j_1, j_2, ..., j_N] -> z``."""
    z = 0
    for i, b in enumerate(bits):
        if b not in (0, 1):
            raise ValueError(f"bit values must be 0 or 1, got {b!r}")
        z |= int(b) << i
    return z


def index_to_bits(z: int, n_qubits: int) -> list[int]:
    """``z -> [j_1, j_2, ..., j_N]``."""
    if not 0 <= z < 1 << n_qubits:
        raise ValueError(f"index {z} out of range for {n_qubits} qubits")
    return [(z >> i) & 1 for i in range(n_qubits)]


def bitstring_to_index(s: str) -> int:
    """``"j_N...j_1" -> z``; the rightmost character is qubit 1."""
    if not s or any(c not in "01" for c in s):
        raise ValueError(f"not a bit string: {s!r}")
    return int(s, 2)


def basis_state(z: int, n_qubits: int) -> np.ndarray:
    d = 1 << n_qubits
    if not 0 <= z < d:
        raise ValueError(f"index {z} out of range for {n_qubits} qubits")
    rho = np.zeros((d, d), dtype=complex)
    rho[z, z] = 1.0
    return rho


def cnot(n_qubits: int, control: int, target: int) -> UnitaryOperator:
    """``C_{control,target}``: flips qubit ``target`` when qubit ``control`` is 1 (1-based)."""
    if n_qubits < 2:
        raise ValueError("a CNOT needs at least two qubits")
    if not (1 <= control <= n_qubits and 1 <= target <= n_qubits):
        raise ValueError(f"qubit indices must lie in 1..{n_qubits}")
    if control == target:
        raise ValueError("control and target must differ")
    z = np.arange(1 << n_qubits, dtype=np.intp)
    perm = z ^ (((z >> (control - 1)) & 1) << (target - 1))
    return UnitaryOperator.from_permutation(perm)


@dataclass(frozen=True)
class NetworkSpec:
    n_qubits: int
    probabilities: tuple[float, ...] | None = None
    topology: str = "cyclic"
    gate_family: str = "cnot"
    _probs: tuple[float, ...] = field(init=False, repr=False)

    def __post_init__(self):
        if self.n_qubits < 2:
            raise InvariantError("a network needs at least two qubits")
        if self.topology != "cyclic":
            raise InvariantError(f"unsupported topology {self.topology!r}")
        if self.gate_family != "cnot":
            raise InvariantError(f"unsupported gate family {self.gate_family!r}")
        n = self.n_qubits
        probs = (1.0 / n,) * n if self.probabilities is None else tuple(float(p) for p in self.probabilities)
        if len(probs) != n:
            raise InvariantError(f"need {n} probabilities, got {len(probs)}")
        if any(not p > 0 for p in probs):
            raise InvariantError("probabilities must be strictly positive")
        if abs(sum(probs) - 1.0) > PROB_TOL:
            raise InvariantError(f"probabilities sum to {sum(probs):.15g}, expected 1")
        object.__setattr__(self, "_probs", probs)

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    @property
    def probs(self) -> tuple[float, ...]:
        return self._probs

    @property
    def edges(self) -> list[tuple[int, int]]:
        n = self.n_qubits
        return [(i, i % n + 1) for i in range(1, n + 1)]


def build_cyclic_channel(spec: NetworkSpec | int) -> RandomUnitaryChannel:
    """Channel with terms ``(p_i, C_{i, i+1 mod N})``."""
    if isinstance(spec, int):
        spec = NetworkSpec(spec)
    gates = [cnot(spec.n_qubits, c, t) for c, t in spec.edges]
    return RandomUnitaryChannel(list(zip(spec.probs, gates)))


def invariant_ket(n_qubits: int) -> np.ndarray:
    """``|Phi>``: uniform superposition of all basis states except ``|0>``."""
    d = 1 << n_qubits
    phi = np.ones(d, dtype=complex) / np.sqrt(d - 1)
    phi[0] = 0.0
    return phi


def invariant_projector(n_qubits: int) -> np.ndarray:
    """``P_2 = |0><0| + |Phi><Phi|``."""
    d = 1 << n_qubits
    phi = invariant_ket(n_qubits)
    p2 = np.outer(phi, phi.conj())
    p2[0, 0] += 1.0
    return p2


def _x6_raw() -> np.ndarray:
    # |j_2 j_1> labels; |01> is z=1, |10> is z=2, |11> is z=3
    x = np.zeros((4, 4), dtype=complex)
    x[1, 2] = -1
    x[1, 3] = 1
    x[2, 1] = 1
    x[2, 3] = -1
    x[3, 1] = -1
    x[3, 2] = 1
    return x


def analytic_attractors(n_qubits: int) -> AttractorBasis:
    """Closed-form attractor basis of the uniform-or-not cyclic CNOT network."""
    if n_qubits < 2:
        raise ValueError("need at least two qubits")
    d = 1 << n_qubits
    zero = np.zeros(d, dtype=complex)
    zero[0] = 1.0
    phi = invariant_ket(n_qubits)
    x1 = np.outer(zero, zero)
    x2 = np.outer(zero, phi.conj())
    x3 = np.outer(phi, zero)
    x4 = np.outer(phi, phi.conj())
    x5 = (np.eye(d) - x1 - x4) / np.sqrt(d - 2)
    blocks = [AttractorBlock(1.0 + 0j, (x1, x2, x3, x4, x5))]
    if n_qubits == 2:
        blocks.append(AttractorBlock(-1.0 + 0j, (_x6_raw() / np.sqrt(6),)))
    return AttractorBasis(d, tuple(blocks))


def _check_state(n_qubits: int, rho) -> np.ndarray:
    m = as_matrix(rho)
    d = 1 << n_qubits
    if m.shape != (d, d):
        raise DimensionError(f"state shape {m.shape} does not match {n_qubits} qubits")
    return m


def invariant_subspace_overlap(n_qubits: int, rho) -> float:
    """``p = Tr(P_2 rho)``: weight of ``rho`` on the decoherence-free subspace."""
    rho = _check_state(n_qubits, rho)
    return float(np.real(np.trace(invariant_projector(n_qubits) @ rho)))


def analytic_asymptotic_state(n_qubits: int, rho) -> np.ndarray:
    """``P_2 rho P_2 + (1 - p)(1 - P_2)/(2**N - 2)`` for N > 2.

    For N = 2 the limit is not stationary in general; use
    :func:`rundyn.attractor.asymptotic_state` instead.
    """
    if n_qubits <= 2:
        raise ValueError(
            "the stationary closed form holds for N > 2 only; "
            "use attractor.asymptotic_state with the N = 2 attractor basis"
        )
    rho = _check_state(n_qubits, rho)
    d = 1 << n_qubits
    p2 = invariant_projector(n_qubits)
    p = float(np.real(np.trace(p2 @ rho)))
    return p2 @ rho @ p2 + (1.0 - p) * (np.eye(d) - p2) / (d - 2)
