"""Quantum gloves: states that carry the chirality of a reference frame.

Angular-momentum algebra on products of orbital and spin-1/2 factors, parity
and rotation actions, irrep decomposition, Haar twirling, discrimination
metrics and a Monte-Carlo chirality-exchange simulator.
"""

from .angular import (
    EulerAngles,
    angular_momentum_generators,
    apply_parity,
    apply_rotation,
    clebsch_gordan,
    haar_random_rotation,
    parity_operator,
    permutation_project,
    rotation_operator,
    wigner_D_matrix,
    wigner_small_d,
)
from .catalog import CatalogEntry, all_entries, get_entry, verify_all, verify_entry
from .errors import CapacityError, DimensionError, DomainError, GloveError
from .irreps import (
    GlovePair,
    IrrepBlock,
    chirality_operator,
    construct_glove_pair,
    decompose,
    glove_existence,
)
from .protocol import ChannelConfig, resource_report, simulate_exchange
from .spaces import FactorSpec, SpaceSpec, parse_space
from .states import DensityMatrix, LinearOperator, StateVector, inner_product
from .twirl import (
    communication_cost,
    haar_twirl_exact,
    haar_twirl_monte_carlo,
    helstrom_success,
    lmax_footprint,
    optimize_approx_gloves,
    trace_distance,
    von_neumann_entropy,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError", "CatalogEntry", "ChannelConfig", "DensityMatrix", "DimensionError",
    "DomainError", "EulerAngles", "FactorSpec", "GloveError", "GlovePair", "IrrepBlock",
    "LinearOperator", "SpaceSpec", "StateVector", "all_entries", "angular_momentum_generators",
    "apply_parity", "apply_rotation", "chirality_operator", "clebsch_gordan",
    "communication_cost", "construct_glove_pair", "decompose", "get_entry", "glove_existence",
    "haar_random_rotation", "haar_twirl_exact", "haar_twirl_monte_carlo", "helstrom_success",
    "inner_product", "lmax_footprint", "optimize_approx_gloves", "parity_operator",
    "parse_space", "permutation_project", "resource_report", "rotation_operator",
    "simulate_exchange", "trace_distance", "verify_all", "verify_entry",
    "von_neumann_entropy", "wigner_D_matrix", "wigner_small_d",
]
