"""Pfaffian dark-dark solitons of the coupled complex modified KdV equation.

Tau functions are built as Pfaffians, carried exactly as sums of
exponentials, and certified against their bilinear equations and the PDE.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .assembly import (
    CollisionReport,
    FieldSample,
    InteractionConstants,
    PhaseShifts,
    asymptotic_field,
    collision_report,
    field_jets,
    fields,
    interaction_constants,
    one_soliton_closed,
    phase_shifts,
    separation_time,
    soliton_coefficient,
    two_soliton_closed,
)
from .config import RunConfig
from .errors import (
    BranchWarning,
    CcmkdvError,
    CoincidentParameterError,
    ConfigError,
    ConvergenceError,
    DegenerateConfigWarning,
    InstabilityError,
    NearSingularError,
    NoSignChangeError,
    NonFiniteResultError,
    OrderBoundError,
    ReductionConditionError,
    SingularParameterError,
)
from .expsum import ExpSum, hirota
from .jet import Jet
from .pfaffian import SkewMatrix, perfect_matchings, pfaffian_batch, pfaffian_expand, pfaffian_ltl
from .reduction import ConstraintPoint, FamilyScan, family_scan, reduction_residual, solve_p, solve_re
from .report import ResidualReport
from .tau import (
    F_INDEX,
    G1_INDEX,
    G2_INDEX,
    PHASE_DEFAULT,
    PHASE_REGULAR,
    BKPParams,
    SolitonConfig,
    TauIndex,
    tau_eval,
    tau_expsum,
    tau_jet,
    verify_conjugacy,
)
from .verifier import (
    bilinear_residuals,
    bkp_residuals,
    evolve_and_compare,
    hirota_apply,
    pde_residual,
    toda_residual,
)

__version__ = "0.1.0"
