"""Asymptotic dynamics of iterated random unitary operations.

``rundyn`` iterates channels ``rho -> sum_i p_i U_i rho U_i^dagger``, computes
their attractor spaces and the closed-form asymptotic states they imply, and
carries the analytic attractors of cyclic CNOT qubit networks.
"""

from .attractor import (
    AttractorBasis,
    AttractorBlock,
    asymptotic_state,
    attractor_projector,
    common_eigenspace,
    peripheral_eigenvalues,
    project,
    solve_attractors,
    verify_cstar_relations,
)
from .channel import (
    RandomUnitaryChannel,
    UnitaryOperator,
    apply,
    apply_adjoint,
    iterate,
    sample_trajectory,
    superoperator,
)
from .errors import CapacityError, ConfigError, DimensionError, InvariantError
from .operator_core import gram_schmidt_hs, hs_distance, hs_inner, unvec, vec, von_neumann_entropy
from .qubit_network import (
    NetworkSpec,
    analytic_asymptotic_state,
    analytic_attractors,
    build_cyclic_channel,
    cnot,
    invariant_subspace_overlap,
)

__version__ = "0.1.0"
