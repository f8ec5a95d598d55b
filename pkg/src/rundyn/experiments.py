"""Experiment drivers behind the command-line interface."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import attractor as att
from .channel import RandomUnitaryChannel, apply, apply_adjoint, orbit, trajectory_average
from .operator_core import (
    hs_distance,
    hs_inner,
    maximally_mixed,
    random_density_matrix,
    trace_distance,
    von_neumann_entropy,
)
from .qubit_network import analytic_asymptotic_state, analytic_attractors

STATIONARY_TOL = 1e-10
MONOTONE_SLACK = 1e-10


@dataclass
class CurveResult:
    label: str
    distances: np.ndarray
    entropies: np.ndarray
    trace_distances: np.ndarray | None
    nonstationary_weight: float

    @property
    def stationary(self) -> bool:
        return self.nonstationary_weight < STATIONARY_TOL

    @property
    def classification(self) -> str:
        return "stationary" if self.stationary else "non-stationary"

    def is_monotone(self, slack: float = MONOTONE_SLACK) -> bool:
        return bool(np.all(np.diff(self.distances) <= slack))


def convergence_curve(
    ch: RandomUnitaryChannel,
    basis: att.AttractorBasis,
    rho: np.ndarray,
    n_max: int,
    label: str = "",
    with_trace_norm: bool = False,
) -> CurveResult:
    """``D_n = ||Phi^n(rho) - sum lam^n Tr(X^dagger rho) X||_HS`` for ``n = 0..n_max``."""
    states = orbit(ch, rho, n_max)
    dist = np.empty(n_max + 1)
    ent = np.empty(n_max + 1)
    tdist = np.empty(n_max + 1) if with_trace_norm else None
    for n, r in enumerate(states):
        target = att.asymptotic_state(basis, rho, n)
        dist[n] = hs_distance(r, target)
        ent[n] = von_neumann_entropy(r)
        if tdist is not None:
            tdist[n] = trace_distance(r, target)
    return CurveResult(label, dist, ent, tdist, att.nonstationary_weight(basis, rho))


def trajectory_distances(
    ch: RandomUnitaryChannel, rho: np.ndarray, n_max: int, samples: int, seed: int
) -> np.ndarray:
    """HS distance between the trajectory average and the exact iterate, per step."""
    avg = trajectory_average(ch, rho, n_max, samples, seed)
    exact = orbit(ch, rho, n_max)
    return np.array([hs_distance(a, e) for a, e in zip(avg, exact)])


def resampled_probabilities(k: int, seed: int) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(seed))
    p = rng.dirichlet(np.ones(k))
    # keep every weight comfortably away from zero
    p = 0.5 * p + 0.5 / k
    return p / p.sum()


def projector_deviation(a: att.AttractorBasis, b: att.AttractorBasis) -> float:
    return float(np.linalg.norm(att.attractor_projector(a) - att.attractor_projector(b)))


@dataclass
class Check:
    name: str
    passed: bool
    value: float
    tolerance: float
    note: str = ""

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        note = f" [{self.note}]" if self.note else ""
        return f"{mark} {self.name}: {self.value:.3e} (tol {self.tolerance:.0e}){note}"


@dataclass
class SolveReport:
    basis: att.AttractorBasis
    residuals: dict[complex, float]
    orthonormality: float
    cstar: att.CStarReport
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks) and self.cstar.passed


def format_lambda(lam: complex) -> str:
    lam = complex(lam)
    if lam.imag == 0:
        return f"{lam.real:g}"
    sign = "+" if lam.imag >= 0 else "-"
    return f"{lam.real:.12g}{sign}{abs(lam.imag):.12g}i"


def solve_report(
    ch: RandomUnitaryChannel,
    candidates=None,
    seed: int = 0,
    n_qubits_cyclic: int | None = None,
) -> SolveReport:
    basis = att.solve_attractors(ch, candidates)
    res = att.eigen_residuals(basis, ch)
    ortho = att.orthonormality_error(basis)
    checks = [
        Check("eigen-equation residual", max(res.values(), default=0.0) < att.RESIDUAL_TOL,
              max(res.values(), default=0.0), att.RESIDUAL_TOL),
        Check("orthonormality", ortho < att.RESIDUAL_TOL, ortho, att.RESIDUAL_TOL),
    ]
    if len(ch.terms) > 1:
        other = ch.with_probabilities(resampled_probabilities(len(ch.terms), seed))
        if ch.dim ** 2 <= att.SVD_LIMIT:
            # weighted route: both spectra and kernels come from sum_i p_i conj(U_i) kron U_i
            b1 = att.solve_attractors(ch, candidates, method="superoperator")
            b2 = att.solve_attractors(other, candidates, method="superoperator")
            dev = max(projector_deviation(b1, b2), projector_deviation(basis, b2))
            note = f"resampled weights, seed {seed}"
        else:
            b2 = att.solve_attractors(other, basis.eigenvalues or [1.0])
            dev = projector_deviation(basis, b2)
            note = f"resampled weights, seed {seed}; candidate route only"
        checks.append(Check("probability independence", dev < 1e-8, dev, 1e-8, note))
    if n_qubits_cyclic is not None:
        dev = projector_deviation(basis, analytic_attractors(n_qubits_cyclic))
        checks.append(Check("analytic attractor oracle", dev < 1e-8, dev, 1e-8))
    return SolveReport(basis, res, ortho, att.verify_cstar_relations(basis), checks)


def verification_suite(
    ch: RandomUnitaryChannel,
    candidates=None,
    seed: int = 0,
    n_qubits_cyclic: int | None = None,
    n_random: int = 20,
    n_steps: int = 60,
) -> list[Check]:
    """Invariant battery for one system; deterministic given ``seed``."""
    rng = np.random.Generator(np.random.PCG64(seed))
    d = ch.dim
    rhos = [random_density_matrix(d, rng, rank=int(rng.integers(1, d + 1))) for _ in range(n_random)]
    checks: list[Check] = []

    def add(name, value, tol, note=""):
        checks.append(Check(name, bool(value <= tol), float(value), tol, note))

    outs = [apply(ch, r) for r in rhos]
    add("trace preservation", max(abs(np.trace(o) - 1) for o in outs), 1e-12)
    add("unitality", hs_distance(apply(ch, maximally_mixed(d)), maximally_mixed(d)), 1e-12)
    add("entropy monotonicity (violation)",
        max(max(0.0, von_neumann_entropy(r) - von_neumann_entropy(o)) for r, o in zip(rhos, outs)), 1e-9)
    add("HS contraction (violation)",
        max(max(0.0, hs_distance(outs[k], outs[k + 1]) - hs_distance(rhos[k], rhos[k + 1]))
            for k in range(len(rhos) - 1)) if len(rhos) > 1 else 0.0, 1e-12)
    gs = [rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)) for _ in range(2 * n_random)]
    add("adjoint duality",
        max(abs(hs_inner(apply_adjoint(ch, gs[2 * k]), gs[2 * k + 1]) - hs_inner(gs[2 * k], apply(ch, gs[2 * k + 1])))
            for k in range(n_random)), 1e-10)

    rep = solve_report(ch, candidates, seed=seed, n_qubits_cyclic=n_qubits_cyclic)
    basis = rep.basis
    checks.extend(rep.checks)
    for c in rep.cstar.checks:
        checks.append(Check(f"C*-relation: {c.name}", c.passed, c.max_error, att.CSTAR_TOL, c.detail))

    add("projection idempotence",
        max(hs_distance(att.project(basis, att.project(basis, r)), att.project(basis, r)) for r in rhos), 1e-10)
    add("projection commutes with channel",
        max(hs_distance(apply(ch, att.project(basis, r)), att.project(basis, apply(ch, r))) for r in rhos), 1e-9)
    one = basis.block(1.0)
    fixed = 0.0
    if one is not None:
        for x in one.basis:
            h = 0.5 * (x + x.conj().T)
            fixed = max(fixed, hs_distance(apply(ch, h), h))
    add("fixed points of the lam=1 block", fixed, 1e-9)

    if any(u.is_identity_up_to_phase() for u in ch.unitaries):
        dev = max(abs(lam - 1) for lam in basis.eigenvalues)
        add("identity in set => only lam=1", dev, 1e-9)
    involutive = all(
        np.array_equal(u.perm[u.perm], np.arange(d)) if u.perm is not None
        else np.allclose(u.matrix @ u.matrix, u.matrix[0, 0] ** 2 * np.eye(d), atol=1e-12)
        for u in ch.unitaries
    )
    if involutive:
        add("involutive gates => lam^2 = 1", max(abs(lam * lam - 1) for lam in basis.eigenvalues), 1e-9)

    if n_qubits_cyclic is not None and n_qubits_cyclic > 2:
        add("closed-form asymptotic state vs projection",
            max(hs_distance(analytic_asymptotic_state(n_qubits_cyclic, r), att.project(basis, r)) for r in rhos),
            1e-9)

    worst = 0.0
    for r in rhos[:3]:
        curve = convergence_curve(ch, basis, r, n_steps)
        worst = max(worst, float(np.max(np.diff(curve.distances), initial=0.0)))
    add("convergence distance non-increasing (max step increase)", worst, MONOTONE_SLACK)
    return checks
