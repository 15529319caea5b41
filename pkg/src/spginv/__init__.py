"""Sparse and row-sparse reflexive generalized inverses.

For a rank-deficient A, every inverse produced here satisfies the
generalized-inverse identity A H A = A, reflexivity H A H = H, and the
symmetry of A H, so theta = H b solves the least-squares problem for every
right-hand side b.  The solvers trade the remaining freedom for sparsity:

* ADMM minimization of the entrywise 1-norm or the row-wise 2,1-norm,
* ADMM targeting of an explicit nonzero-row budget (with or without
  2,1-norm minimization on top),
* determinant and 2,1-norm local search over r-row column blocks, with an
  r(1+eps) approximation guarantee,
* exact, dual-certified optima for rank-1 and (conditionally) rank-2 inputs.
"""

from .matrix_core import (
    SpectralFactors,
    NormReport,
    PropertyReport,
    as_matrix,
    svd_partition,
    assemble_h,
    pseudoinverse,
    norms,
    mp_residuals,
    multi_rhs_apply,
)
from .instances import (
    InstanceSpec,
    WorstCaseSpec,
    MatrixMarketError,
    gen_rank_r,
    worst_case_build,
    read_matrix,
    write_matrix,
)
from .admm import (
    RhoSchedule,
    AdmmConfig,
    AdmmState,
    SolveTrace,
    GInverseResult,
    soft_threshold,
    z_update,
    row_shrink,
    project_row_support,
    row_shrink_capped,
    derive_row_budget,
    admm1_solve,
    admm21_solve,
    admm20_solve,
    admm2120_solve,
)
from .local_search import (
    LsConfig,
    LocalSearchCache,
    column_block,
    init_basis,
    ls_det,
    make_cache,
    pinv_swap_eval,
    cache_commit_swap,
    ls_21,
)
from .exact_low_rank import (
    CertificateReport,
    ConditionFailed,
    certificate_E,
    certificate_W,
    verify_certificate,
    rank1_optimal,
    rank2_candidate,
)

__version__ = "0.1.0"
