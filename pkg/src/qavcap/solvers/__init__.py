from .base import SolverConfig, SolverReport
from .quantum import avqc_ea_capacity, compound_ea_capacity, ea_capacity, fqavc_ea_capacity
from .classical import (
    SeparationReport,
    SymmetrizabilityResult,
    classical_ba_capacity,
    classical_compound_capacity,
    separation_report,
    symmetrizability_check,
)
