"""Dense-matrix primitives: SVD partitioning, norms, Moore-Penrose residuals,
and assembly of candidate generalized inverses from the null-space parametrization.

Every inverse produced in this package has the form

    H = V1 @ diag(d_inv) @ U1.T + V2 @ Z @ U1.T

for some (n-r) x r matrix Z, where (U1, V1, V2, d_inv) come from a compact
SVD of the input A.  Matrices of this form satisfy A H A = A, H A H = H and
(A H).T = A H identically; choosing Z is what the solvers do.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SpectralFactors",
    "NormReport",
    "PropertyReport",
    "as_matrix",
    "svd_partition",
    "assemble_h",
    "pseudoinverse",
    "norms",
    "mp_residuals",
    "multi_rhs_apply",
]

DEFAULT_RANK_TOL = 1e-10
DEFAULT_ZERO_TOL = 1e-5


def as_matrix(a) -> np.ndarray:
    """Coerce to a C-contiguous float64 2-D array with finite entries."""
    m = np.ascontiguousarray(a, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if m.size == 0:
        raise ValueError("empty matrix")
    if not np.isfinite(m).all():
        raise ValueError("matrix contains non-finite entries")
    return m


@dataclass(frozen=True)
class SpectralFactors:
    """Compact-SVD partition of a real m x n matrix of rank r.

    u1 (m x r) and v1 (n x r) hold the left/right singular vectors for the
    positive singular values, v2 (n x (n-r)) an orthonormal basis of the
    null space, sigma the singular values in descending order and d_inv
    their reciprocals.  The left null-space basis is never materialized;
    no formula in this package needs it.
    """

    u1: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    sigma: np.ndarray
    d_inv: np.ndarray
    rank: int

    @property
    def m(self) -> int:
        return self.u1.shape[0]

    @property
    def n(self) -> int:
        return self.v1.shape[0]


@dataclass(frozen=True)
class NormReport:
    """Sparsity-oriented norms of a matrix at a given zero tolerance.

    n1: entrywise 1-norm.  n0: entries with magnitude above zero_tol.
    n21: sum of row 2-norms.  n20: rows with 2-norm above zero_tol.
    """

    n1: float
    n0: int
    n21: float
    n20: int
    zero_tol: float


@dataclass(frozen=True)
class PropertyReport:
    """Frobenius residuals of the four Moore-Penrose defining identities,
    plus the linearized reflexivity defect ||H A pinv(A) - H||_F."""

    p1: float
    p2: float
    p3: float
    p4: float
    reflex_linear: float


def svd_partition(a, rank_tol: float = DEFAULT_RANK_TOL, rank: int | None = None) -> SpectralFactors:
    """Compute the compact-SVD partition of a nonzero matrix.

    The numerical rank is the number of singular values exceeding
    rank_tol * sigma_1.  Pass an explicit ``rank`` to truncate there
    instead (useful when the generating rank is known exactly).
    """
    a = as_matrix(a)
    m, n = a.shape
    if not np.any(a):
        raise ValueError("zero matrix has no generalized-inverse parametrization of this form")
    # full_matrices only when m < n: that is the one case where the economy
    # SVD does not return all n right singular vectors needed for v2.
    u, s, vt = np.linalg.svd(a, full_matrices=m < n)
    if rank is None:
        if not 0.0 < rank_tol < 1.0:
            raise ValueError("rank_tol must lie in (0, 1)")
        r = int(np.count_nonzero(s > rank_tol * s[0]))
    else:
        r = int(rank)
        if not 1 <= r <= min(m, n):
            raise ValueError(f"rank must lie in [1, {min(m, n)}], got {r}")
        if s[r - 1] <= 0.0:
            raise ValueError(f"requested rank {r} exceeds the numerical rank")
    return SpectralFactors(
        u1=u[:, :r].copy(),
        v1=vt[:r].T.copy(),
        v2=vt[r:n].T.copy(),
        sigma=s[:r].copy(),
        d_inv=1.0 / s[:r],
        rank=r,
    )


def assemble_h(f: SpectralFactors, z) -> np.ndarray:
    """Assemble H = (V1 diag(d_inv) + V2 Z) U1.T from null-space coordinates Z."""
    z = np.asarray(z, dtype=float)
    expected = (f.n - f.rank, f.rank)
    if z.shape != expected:
        raise ValueError(f"z must have shape {expected}, got {z.shape}")
    core = f.v1 * f.d_inv + f.v2 @ z
    return core @ f.u1.T


def pseudoinverse(f: SpectralFactors) -> np.ndarray:
    """Moore-Penrose pseudoinverse, i.e. the Z = 0 member of the family."""
    return assemble_h(f, np.zeros((f.n - f.rank, f.rank)))


def norms(h, zero_tol: float = DEFAULT_ZERO_TOL) -> NormReport:
    """Entrywise and row-wise sparsity norms of h."""
    h = as_matrix(h)
    if zero_tol < 0.0:
        raise ValueError("zero_tol must be nonnegative")
    absh = np.abs(h)
    row = np.linalg.norm(h, axis=1)
    return NormReport(
        n1=float(absh.sum()),
        n0=int(np.count_nonzero(absh > zero_tol)),
        n21=float(row.sum()),
        n20=int(np.count_nonzero(row > zero_tol)),
        zero_tol=zero_tol,
    )


def mp_residuals(a, h, a_pinv=None) -> PropertyReport:
    """Frobenius norms of A H A - A, H A H - H, the two symmetry defects,
    and H A pinv(A) - H.  ``a_pinv`` defaults to numpy's pseudoinverse."""
    a = as_matrix(a)
    h = as_matrix(h)
    if h.shape != (a.shape[1], a.shape[0]):
        raise ValueError(f"h must have shape {(a.shape[1], a.shape[0])}, got {h.shape}")
    if a_pinv is None:
        a_pinv = np.linalg.pinv(a)
    ah = a @ h
    ha = h @ a
    return PropertyReport(
        p1=float(np.linalg.norm(ah @ a - a)),
        p2=float(np.linalg.norm(ha @ h - h)),
        p3=float(np.linalg.norm(ah - ah.T)),
        p4=float(np.linalg.norm(ha - ha.T)),
        reflex_linear=float(np.linalg.norm(ha @ a_pinv - h)),
    )


def multi_rhs_apply(h, b, zero_tol: float = 0.0) -> np.ndarray:
    """Apply h to one or many right-hand sides, touching only its nonzero rows.

    Rows of h whose 2-norm is at or below zero_tol contribute exact zeros to
    the output, so a row-sparse h costs O(n20 * m * k) instead of O(n * m * k).
    When h satisfies the generalized-inverse and symmetry properties, each
    output column solves the corresponding least-squares problem.
    """
    h = as_matrix(h)
    b = np.asarray(b, dtype=float)
    if b.shape[0] != h.shape[1]:
        raise ValueError(f"b has {b.shape[0]} rows but h has {h.shape[1]} columns")
    support = np.linalg.norm(h, axis=1) > zero_tol
    out = np.zeros((h.shape[0],) + b.shape[1:])
    if support.any():
        out[support] = h[support] @ b
    return out
