"""Sparse-plus-low-rank index coding via Riemannian trust-region optimization.

The package solves, for each admissible rank r, the problem of finding the
sparsest K-by-K unit-diagonal matrix of rank r.  Off-diagonal nonzeros of the
solution correspond to side information a receiver must hold, the rank to the
blocklength (inverse data rate) of the scalar linear index code the matrix
encodes; varying r from 1 to K traces the side-information versus rate
tradeoff curve.
"""

__version__ = "0.1.0"

from .altmin import AltMinConfig, altmin_solve, altmin_sweep, lp_row_subproblem
from .errors import (
    IndexCodingError,
    InfeasibleRowError,
    InvalidInputError,
    NumericalFailureError,
    PipelineError,
    RankDeficiencyError,
    RetractionFailureError,
)
from .ic_model import (
    IndexCode,
    SideInformation,
    achievable_rate,
    code_from_factors,
    decode_simulation,
    pattern_to_side_info,
    side_info_amount,
    sum_rate,
    verify_alignment,
)
from .linalg import numerical_rank, random_gaussian, solve_small_spd
from .manifold import (
    FactorPoint,
    TangentVector,
    connection,
    egrad_to_rgrad,
    metric,
    project_horizontal,
    retract,
    rhess_apply,
)
from .objectives import (
    RefinementObjective,
    RegularizedObjective,
    SparsityPattern,
    extract_pattern,
)
from .pipeline import (
    IndexCodingSolution,
    PipelineConfig,
    TradeoffCurve,
    TradeoffEntry,
    find_pattern,
    refine,
    solve_one,
    sweep,
)
from .trust_region import SolveResult, TrustRegionConfig, tcg_subproblem, tr_solve
