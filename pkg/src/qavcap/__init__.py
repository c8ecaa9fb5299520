"""Entanglement-assisted capacities of compound, arbitrarily varying and
fully quantum jammer channels, with exact finite-blocklength checks."""

from .core import (
    JammerChannel,
    QuantumChannel,
    apply_channel,
    choi_from_kraus,
    complementary_channel,
    kraus_from_choi,
    partial_trace,
    purify,
)
from .errors import BudgetError, DimensionError, InvariantError, ParseError, QavcapError, SolverError
from .finite_n import (
    CodingScheme,
    ErrorOperator,
    build_error_operator,
    coding_error,
    definetti_bound_check,
    definetti_state,
    permutation_covariance_check,
    symmetrize_scheme,
    theorem3_bound_check,
    worst_case_jammer,
)
from .measures import mi_gradient, mi_of_input, mutual_information, von_neumann_entropy
from .models import AvcKernel, ChannelSet, slice_channel
from .solvers import (
    SolverConfig,
    SolverReport,
    avqc_ea_capacity,
    classical_ba_capacity,
    classical_compound_capacity,
    compound_ea_capacity,
    ea_capacity,
    fqavc_ea_capacity,
    separation_report,
    symmetrizability_check,
)

__version__ = "0.1.0"
