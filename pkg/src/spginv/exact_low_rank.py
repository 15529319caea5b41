"""Certified 2,1-norm-optimal inverses for rank one and (conditionally) rank two.

Optimality is proved by weak duality: the dual of 2,1-norm minimization over
generalized inverses maximizes tr(A.T W) subject to every row of A.T W A.T
having 2-norm at most one.  For a column block over T we can construct a W,
supported on rows S and columns T, whose objective equals the block's
2,1-norm; when it is also dual feasible the block is optimal and the
certificate gap is zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .admm import GInverseResult, package_result
from .local_search import column_block
from .matrix_core import as_matrix

__all__ = [
    "CertificateReport",
    "ConditionFailed",
    "certificate_E",
    "certificate_W",
    "verify_certificate",
    "rank1_optimal",
    "rank2_candidate",
]

FEASIBILITY_SLACK = 1e-8
RANK_DETECT_TOL = 1e-10
MAX_PAIR_COLUMNS = 2000


@dataclass(frozen=True)
class CertificateReport:
    """Weak-duality audit: dual objective tr(A.T W), the largest row norm of
    A.T W A.T (feasible iff <= 1 + 1e-8), the primal 2,1-norm and their gap."""

    dual_objective: float
    max_row_norm: float
    primal_21: float
    gap: float
    feasible: bool


@dataclass(frozen=True)
class ConditionFailed:
    """Witness that the rank-2 column-block construction cannot be certified:
    the column whose coordinates in the best pair violate |b1| + |b2| <= 1."""

    witness_column: int
    beta: tuple[float, float]
    pair: tuple[int, int]
    pair_norm21: float


def certificate_E(a_hat) -> np.ndarray:
    """The r x r scaling matrix behind the certificate: from the compact SVD
    of the block, E = diag(1/||z_i||) @ (V sigma^-2 V.T) with z_i the columns
    of sigma^-1 V.T.  Its rows satisfy ||E[i] @ a_hat.T|| = 1 and its diagonal
    equals the row norms of pinv(a_hat)."""
    a_hat = as_matrix(a_hat)
    m, r = a_hat.shape
    if m < r:
        raise ValueError("block must have at least as many rows as columns")
    _, s, vt = np.linalg.svd(a_hat, full_matrices=False)
    if s[0] == 0.0 or s[-1] <= 1e-12 * s[0]:
        raise ValueError("block is rank deficient")
    vhat = vt / s[:, None]
    g = vhat.T @ vhat
    z_norms = np.sqrt(np.diag(g))
    return g / z_norms[:, None]


def certificate_W(a, s, t, e) -> np.ndarray:
    """Dual candidate supported on rows s and columns t: the block is
    solve(A[s, t].T, E).  Satisfies A[:, t].T @ W @ A.T = E @ A[:, t].T and
    tr(A.T W) = ||pinv(A[:, t])||_{2,1}."""
    a = as_matrix(a)
    s = list(s)
    t = list(t)
    atil = a[np.ix_(s, t)]
    try:
        what = np.linalg.solve(atil.T, np.asarray(e, dtype=float))
    except np.linalg.LinAlgError as exc:
        raise ValueError("A[S, T] is singular; no certificate from this block") from exc
    w = np.zeros(a.shape)
    w[np.ix_(s, t)] = what
    return w


def verify_certificate(a, h, w) -> CertificateReport:
    """Score (h, w) under weak duality.  A feasible w with gap below 1e-6
    certifies h as 2,1-norm optimal among generalized inverses."""
    a = as_matrix(a)
    h = as_matrix(h)
    w = as_matrix(w)
    if h.shape != (a.shape[1], a.shape[0]):
        raise ValueError(f"h must have shape {(a.shape[1], a.shape[0])}")
    if w.shape != a.shape:
        raise ValueError(f"w must have shape {a.shape}")
    dual = float(np.sum(a * w))
    rows = a.T @ w @ a.T
    max_row = float(np.linalg.norm(rows, axis=1).max())
    primal = float(np.linalg.norm(h, axis=1).sum())
    return CertificateReport(
        dual_objective=dual,
        max_row_norm=max_row,
        primal_21=primal,
        gap=primal - dual,
        feasible=max_row <= 1.0 + FEASIBILITY_SLACK,
    )


def _require_rank(a: np.ndarray, want: int) -> np.ndarray:
    sv = np.linalg.svd(a, compute_uv=False)
    detected = int(np.count_nonzero(sv > RANK_DETECT_TOL * sv[0])) if sv[0] > 0 else 0
    if detected != want:
        raise ValueError(f"input must have rank {want}, detected {detected}")
    return sv


def rank1_optimal(a) -> GInverseResult:
    """Certified best inverse of a rank-1 matrix: take the lowest-index
    nonzero row s, the column t maximizing |A[s, t]|, and the single-column
    block over t.  The certificate rows come out as |A[s, i]| / |A[s, t]|,
    so feasibility and a zero gap are automatic."""
    a = as_matrix(a)
    _require_rank(a, 1)
    row_peak = np.abs(a).max(axis=1)
    alive = np.flatnonzero(row_peak > 1e-14 * row_peak.max())
    s_row = int(alive[0])
    t_col = int(np.argmax(np.abs(a[s_row])))
    h = column_block(a, (t_col,))
    e = certificate_E(a[:, [t_col]])
    w = certificate_W(a, (s_row,), (t_col,), e)
    cert = verify_certificate(a, h, w)
    return package_result(a, h, "rank1", support=(t_col,), certificate=cert)


def rank2_candidate(a):
    """Try to certify a column block for a rank-2 matrix.

    Enumerates all column pairs with a well-conditioned 2-column block,
    scoring each by the closed form ||pinv||_{2,1} =
    sqrt(||a_j2||^2 / det(G)) + sqrt(||a_j1||^2 / det(G)); the minimizer is
    the candidate.  Every column is then expressed in that basis by solving
    the 2 x 2 Gram system.  If all coordinate vectors satisfy
    |b1| + |b2| <= 1 + 1e-8 the block is returned with a passing
    certificate; otherwise the first violating column is returned as a
    ConditionFailed witness and no optimality is claimed.
    """
    a = as_matrix(a)
    m, n = a.shape
    if n > MAX_PAIR_COLUMNS:
        raise ValueError(f"column-pair enumeration is capped at n <= {MAX_PAIR_COLUMNS}")
    sv = _require_rank(a, 2)
    sigma1 = float(sv[0])
    col_sq = (a ** 2).sum(axis=0)
    cross = a.T @ a
    det = np.outer(col_sq, col_sq) - cross ** 2
    # lower bound on each pair's smallest squared singular value
    with np.errstate(divide="ignore", invalid="ignore"):
        smin_sq = det / np.add.outer(col_sq, col_sq)
        score = np.sqrt(col_sq[None, :] / det) + np.sqrt(col_sq[:, None] / det)
    usable = (det > 0.0) & (smin_sq > (RANK_DETECT_TOL * sigma1) ** 2)
    usable &= np.triu(np.ones_like(usable), k=1).astype(bool)
    if not usable.any():
        raise ValueError("no well-conditioned rank-2 column pair found")
    score[~usable] = np.inf
    # first flat argmin = lexicographically smallest minimizing pair
    j1, j2 = np.unravel_index(int(np.argmin(score)), score.shape)
    j1, j2 = int(j1), int(j2)
    gram = np.array([[col_sq[j1], cross[j1, j2]], [cross[j1, j2], col_sq[j2]]])
    betas = np.linalg.solve(gram, a[:, [j1, j2]].T @ a)
    sums = np.abs(betas).sum(axis=0)
    bad = np.flatnonzero(sums > 1.0 + FEASIBILITY_SLACK)
    if bad.size:
        col = int(bad[0])
        return ConditionFailed(
            witness_column=col,
            beta=(float(betas[0, col]), float(betas[1, col])),
            pair=(j1, j2),
            pair_norm21=float(score[j1, j2]),
        )
    ahat = a[:, [j1, j2]]
    _, piv = scipy.linalg.qr(ahat.T, mode="r", pivoting=True)
    s_rows = tuple(int(p) for p in piv[:2])
    h = column_block(a, (j1, j2))
    e = certificate_E(ahat)
    w = certificate_W(a, s_rows, (j1, j2), e)
    cert = verify_certificate(a, h, w)
    return package_result(a, h, "rank2", support=(j1, j2), certificate=cert)
