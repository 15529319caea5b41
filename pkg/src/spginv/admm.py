"""Four ADMM solvers over the null-space parametrization H = (V1 D^-1 + V2 Z) U1.T.

All four share the same Z-step (an orthogonal projection) and differ in the
E-step and stopping rule:

  admm1_solve     entrywise 1-norm minimization; iterates live in R^{n x m}
                  and the E-step is scalar soft thresholding.
  admm21_solve    2,1-norm (sum of row norms) minimization in reduced
                  coordinates R^{n x r}; the E-step shrinks whole rows.
  admm20_solve    feasibility for a row-support budget gamma; the E-step
                  projects onto the gamma largest rows.  Nonconvex.
  admm2120_solve  2,1-norm minimization subject to the same row budget,
                  warm-started from the unconstrained 2,1 solution, with a
                  decreasing-penalty schedule.  Nonconvex.

Multipliers are kept in scaled form (multiplier / rho), so the multiplier
update is exactly "add the primal residual".
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .matrix_core import (
    SpectralFactors,
    NormReport,
    PropertyReport,
    assemble_h,
    mp_residuals,
    norms,
    pseudoinverse,
)

if TYPE_CHECKING:  # pragma: no cover
    from .exact_low_rank import CertificateReport

__all__ = [
    "RhoSchedule",
    "AdmmConfig",
    "AdmmState",
    "SolveTrace",
    "GInverseResult",
    "soft_threshold",
    "z_update",
    "row_shrink",
    "project_row_support",
    "row_shrink_capped",
    "derive_row_budget",
    "package_result",
    "admm1_solve",
    "admm21_solve",
    "admm20_solve",
    "admm2120_solve",
]


@dataclass(frozen=True)
class RhoSchedule:
    """Penalty schedule for the budget-constrained 2,1 solver: hold
    ``initial`` until the iterate is feasible with primal residual below
    ``primal_gate``, then divide rho by alpha each quiet iteration, backing
    alpha off toward alpha_min whenever the gate is violated."""

    initial: float = 1e4
    primal_gate: float = 1e-4
    alpha_max: float = 2.0
    alpha_min: float = 1.0


@dataclass(frozen=True)
class AdmmConfig:
    """Solver parameters.  ``fixed_eps`` switches the stopping rule from the
    dynamic absolute/relative criterion to ||r||_F <= eps and ||s||_F <= eps.
    ``omega`` interpolates the row budget between rank and the unconstrained
    2,1 optimum's row count; ``gamma`` overrides it outright."""

    rho: float = 1.0
    eps_abs: float = 1e-4
    eps_rel: float = 1e-4
    fixed_eps: float | None = None
    max_seconds: float = 7200.0
    max_iters: int | None = None
    omega: float = 0.8
    gamma: int | None = None
    zero_tol: float = 1e-5
    rho_schedule: RhoSchedule = field(default_factory=RhoSchedule)

    def __post_init__(self):
        if self.rho <= 0.0:
            raise ValueError("rho must be positive")
        if self.eps_abs <= 0.0 or self.eps_rel <= 0.0:
            raise ValueError("tolerances must be positive")
        if not 0.0 < self.omega < 1.0:
            raise ValueError("omega must lie in (0, 1)")

    @classmethod
    def for_admm1(cls) -> "AdmmConfig":
        return cls(rho=3.0, eps_abs=1e-4, eps_rel=1e-4)

    @classmethod
    def for_admm21(cls) -> "AdmmConfig":
        return cls(rho=1.0, eps_abs=1e-7, eps_rel=1e-7)

    @classmethod
    def for_admm20(cls) -> "AdmmConfig":
        # rho never enters the projection E-step; kept for state reporting
        return cls(rho=1.0)

    @classmethod
    def for_admm2120(cls) -> "AdmmConfig":
        return cls(rho=1e4, eps_abs=1e-4, eps_rel=1e-4)


@dataclass(frozen=True)
class AdmmState:
    """Final iterate bundle: null-space coordinates, splitting variable,
    scaled multiplier, iteration count, residual norms and current rho."""

    z: np.ndarray
    e: np.ndarray
    lam: np.ndarray
    iter: int
    primal_res: float
    dual_res: float
    rho: float


@dataclass(frozen=True)
class SolveTrace:
    """Per-iteration scalars: residual norms, solver objective, the max-abs
    deviation of (lambda step - primal residual), and the rho in effect."""

    primal: np.ndarray
    dual: np.ndarray
    objective: np.ndarray
    multiplier_step_dev: np.ndarray
    rho: np.ndarray


@dataclass(frozen=True)
class GInverseResult:
    """A computed generalized inverse plus its report card."""

    h: np.ndarray
    method: str
    norms: NormReport
    properties: PropertyReport
    iters: int
    seconds: float
    converged: bool
    support: tuple[int, ...] | None = None
    certificate: "CertificateReport | None" = None
    state: AdmmState | None = None
    trace: SolveTrace | None = None


def soft_threshold(a, kappa):
    """Shrink toward zero by kappa: a-kappa above, a+kappa below, else 0.
    Works elementwise on arrays."""
    if kappa < 0.0:
        raise ValueError("kappa must be nonnegative")
    return np.sign(a) * np.maximum(np.abs(a) - kappa, 0.0)


def z_update(j, f: SpectralFactors, project_u1: bool) -> np.ndarray:
    """Least-squares optimal null-space coordinates for a target J:
    V2.T @ J @ U1 in full coordinates, V2.T @ J in reduced ones."""
    j = np.asarray(j, dtype=float)
    expected = (f.n, f.m) if project_u1 else (f.n, f.rank)
    if j.shape != expected:
        raise ValueError(f"j must have shape {expected}, got {j.shape}")
    return f.v2.T @ j @ f.u1 if project_u1 else f.v2.T @ j


def row_shrink(y, rho: float) -> np.ndarray:
    """Row-wise shrinkage: the proximal map of the 2,1-norm at parameter
    1/rho.  Rows with 2-norm at most 1/rho vanish; the rest shorten by 1/rho."""
    if rho <= 0.0:
        raise ValueError("rho must be positive")
    y = np.asarray(y, dtype=float)
    rn = np.linalg.norm(y, axis=1)
    scale = np.zeros_like(rn)
    hit = rn > 1.0 / rho
    scale[hit] = (rn[hit] - 1.0 / rho) / rn[hit]
    return y * scale[:, None]


def project_row_support(y, gamma: int) -> np.ndarray:
    """Keep the gamma rows of largest 2-norm, zero the rest.  Ties at the
    cutoff keep the lower index (stable sort)."""
    y = np.asarray(y, dtype=float)
    gamma = int(gamma)
    if not 0 <= gamma <= y.shape[0]:
        raise ValueError(f"gamma must lie in [0, {y.shape[0]}]")
    order = np.argsort(-np.linalg.norm(y, axis=1), kind="stable")
    out = np.zeros_like(y)
    keep = order[:gamma]
    out[keep] = y[keep]
    return out


def row_shrink_capped(y, rho: float, gamma: int) -> np.ndarray:
    """Global minimizer of ||E||_{2,1} + (rho/2)||E - Y||_F^2 over matrices
    with at most gamma nonzero rows: shrink the gamma largest rows of Y past
    the 1/rho threshold and zero everything else."""
    y = np.asarray(y, dtype=float)
    gamma = int(gamma)
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    out = row_shrink(y, rho)
    if gamma < y.shape[0]:
        order = np.argsort(-np.linalg.norm(y, axis=1), kind="stable")
        out[order[gamma:]] = 0.0
    return out


def derive_row_budget(omega: float, rank: int, n20_opt: int) -> int:
    """Row budget gamma = max(rank, floor(omega*rank + (1-omega)*n20_opt))."""
    if not 0.0 < omega < 1.0:
        raise ValueError("omega must lie in (0, 1)")
    return max(rank, math.floor(omega * rank + (1.0 - omega) * n20_opt))


def package_result(a, h, method, *, iters=0, seconds=0.0, converged=True,
                   support=None, certificate=None, state=None, trace=None,
                   zero_tol=1e-5, a_pinv=None) -> GInverseResult:
    """Attach norms and property residuals to a computed inverse, guarding
    the analytic identities the construction is supposed to satisfy."""
    props = mp_residuals(a, h, a_pinv)
    bound = 1e-6 * max(1.0, float(np.linalg.norm(a)))
    worst = max(props.p1, props.p3, props.reflex_linear)
    if worst > bound:
        raise ArithmeticError(
            f"assembled inverse violates its structural identities "
            f"(residual {worst:.3e} > {bound:.3e})")
    return GInverseResult(
        h=h, method=method, norms=norms(h, zero_tol), properties=props,
        iters=iters, seconds=seconds, converged=converged, support=support,
        certificate=certificate, state=state, trace=trace,
    )


class _TraceRecorder:
    def __init__(self):
        self.primal, self.dual, self.objective = [], [], []
        self.dev, self.rho = [], []

    def add(self, pr, dr, obj, dev, rho):
        self.primal.append(pr)
        self.dual.append(dr)
        self.objective.append(obj)
        self.dev.append(dev)
        self.rho.append(rho)

    def freeze(self) -> SolveTrace:
        return SolveTrace(
            primal=np.asarray(self.primal),
            dual=np.asarray(self.dual),
            objective=np.asarray(self.objective),
            multiplier_step_dev=np.asarray(self.dev),
            rho=np.asarray(self.rho),
        )


def _reconstruct(f: SpectralFactors) -> np.ndarray:
    return (f.u1 * f.sigma) @ f.v1.T


def _out_of_budget(cfg: AdmmConfig, t0: float, k: int) -> bool:
    if cfg.max_iters is not None and k >= cfg.max_iters:
        return True
    return time.perf_counter() - t0 > cfg.max_seconds


def _budget(cfg: AdmmConfig, explicit, f: SpectralFactors, n20_opt=None) -> int:
    if explicit is not None:
        gamma = int(explicit)
    elif cfg.gamma is not None:
        gamma = int(cfg.gamma)
    elif n20_opt is not None:
        gamma = derive_row_budget(cfg.omega, f.rank, n20_opt)
    else:
        raise ValueError("a row budget gamma is required")
    if gamma < f.rank:
        raise ValueError(f"gamma={gamma} is infeasible: every generalized inverse "
                         f"has at least rank(A)={f.rank} nonzero rows")
    return gamma


def admm1_solve(f: SpectralFactors, cfg: AdmmConfig | None = None) -> GInverseResult:
    """Minimize the entrywise 1-norm of H over the parametrized family.

    Iterates on n x m matrices.  Initialization scales V1 @ U1.T to unit
    max-abs entry (a dual-feasible multiplier) and seeds E so that the first
    Z-step lands on the pseudoinverse.  Stops on the dynamic primal/dual
    criterion, a fixed epsilon, or the time/iteration budget (in which case
    the last iterate is returned with converged=False).
    """
    cfg = cfg if cfg is not None else AdmmConfig.for_admm1()
    t0 = time.perf_counter()
    rho = cfg.rho
    n, m, r = f.n, f.m, f.rank
    p = pseudoinverse(f)
    p_norm = float(np.linalg.norm(p))
    theta = f.v1 @ f.u1.T
    lam = theta / (np.abs(theta).max() * rho)
    e = p + lam
    z = np.zeros((n - r, r))
    rec = _TraceRecorder()
    k = 0
    converged = False
    pr = dr = float("inf")
    while not _out_of_budget(cfg, t0, k):
        j = e - p - lam
        z = f.v2.T @ j @ f.u1
        vzu = (f.v2 @ z) @ f.u1.T
        cur = p + vzu
        y = cur + lam
        e_new = soft_threshold(y, 1.0 / rho)
        rk = cur - e_new
        lam_prev = lam
        lam = lam + rk
        sk = rho * (f.v2.T @ (e_new - e) @ f.u1)
        pr, dr = float(np.linalg.norm(rk)), float(np.linalg.norm(sk))
        e = e_new
        k += 1
        rec.add(pr, dr, float(np.abs(e).sum()),
                float(np.abs((lam - lam_prev) - rk).max()), rho)
        if cfg.fixed_eps is not None:
            stop = pr <= cfg.fixed_eps and dr <= cfg.fixed_eps
        else:
            p_thresh = cfg.eps_abs * math.sqrt(n * m) + cfg.eps_rel * max(
                float(np.linalg.norm(e)), float(np.linalg.norm(vzu)), p_norm)
            d_thresh = cfg.eps_abs * math.sqrt((n - r) * r) + cfg.eps_rel * rho * float(
                np.linalg.norm(f.v2.T @ lam @ f.u1))
            stop = pr <= p_thresh and dr <= d_thresh
        if stop:
            converged = True
            break
    state = AdmmState(z=z, e=e, lam=lam, iter=k, primal_res=pr, dual_res=dr, rho=rho)
    return package_result(
        _reconstruct(f), assemble_h(f, z), "admm1",
        iters=k, seconds=time.perf_counter() - t0, converged=converged,
        state=state, trace=rec.freeze(), zero_tol=cfg.zero_tol, a_pinv=p)


def _reduced_stop_dynamic(cfg, rho, pr, dr, f, e, vz, p_core_norm, lam):
    n, r = f.n, f.rank
    p_thresh = cfg.eps_abs * math.sqrt(n * r) + cfg.eps_rel * max(
        float(np.linalg.norm(e)), float(np.linalg.norm(vz)), p_core_norm)
    d_thresh = cfg.eps_abs * math.sqrt((n - r) * r) + cfg.eps_rel * rho * float(
        np.linalg.norm(f.v2.T @ lam))
    return pr <= p_thresh and dr <= d_thresh


def admm21_solve(f: SpectralFactors, cfg: AdmmConfig | None = None) -> GInverseResult:
    """Minimize the 2,1-norm (sum of row 2-norms) of H.

    Works in reduced n x r coordinates: right-multiplying by U1.T preserves
    row norms, so the m-dimensional axis drops out of the iteration entirely.
    The E-step is row-wise shrinkage; initialization normalizes V1 by its
    largest row norm (dual feasible for the row-norm constraints).
    """
    cfg = cfg if cfg is not None else AdmmConfig.for_admm21()
    t0 = time.perf_counter()
    rho = cfg.rho
    n, r = f.n, f.rank
    p_core = f.v1 * f.d_inv
    p_core_norm = float(np.linalg.norm(p_core))
    kappa = float(np.linalg.norm(f.v1, axis=1).max())
    lam = f.v1 / (kappa * rho)
    e = p_core + lam
    z = np.zeros((n - r, r))
    rec = _TraceRecorder()
    k = 0
    converged = False
    pr = dr = float("inf")
    while not _out_of_budget(cfg, t0, k):
        j = e - p_core - lam
        z = f.v2.T @ j
        vz = f.v2 @ z
        cur = p_core + vz
        y = cur + lam
        e_new = row_shrink(y, rho)
        rk = cur - e_new
        lam_prev = lam
        lam = lam + rk
        sk = rho * (f.v2.T @ (e_new - e))
        pr, dr = float(np.linalg.norm(rk)), float(np.linalg.norm(sk))
        e = e_new
        k += 1
        rec.add(pr, dr, float(np.linalg.norm(e, axis=1).sum()),
                float(np.abs((lam - lam_prev) - rk).max()), rho)
        if cfg.fixed_eps is not None:
            stop = pr <= cfg.fixed_eps and dr <= cfg.fixed_eps
        else:
            stop = _reduced_stop_dynamic(cfg, rho, pr, dr, f, e, vz, p_core_norm, lam)
        if stop:
            converged = True
            break
    state = AdmmState(z=z, e=e, lam=lam, iter=k, primal_res=pr, dual_res=dr, rho=rho)
    return package_result(
        _reconstruct(f), assemble_h(f, z), "admm21",
        iters=k, seconds=time.perf_counter() - t0, converged=converged,
        state=state, trace=rec.freeze(), zero_tol=cfg.zero_tol)


def admm20_solve(f: SpectralFactors, cfg: AdmmConfig | None = None,
                 gamma: int | None = None) -> GInverseResult:
    """Find any member of the family with at most gamma nonzero rows.

    Pure feasibility: the E-step projects onto the gamma largest rows and no
    norm is minimized, so the penalty parameter never enters the update.
    Starts from the pseudoinverse (zero multiplier) and stops as soon as the
    candidate V1 D^-1 + V2 Z has at most gamma rows above the zero tolerance.
    """
    cfg = cfg if cfg is not None else AdmmConfig.for_admm20()
    gamma = _budget(cfg, gamma, f)
    t0 = time.perf_counter()
    rho = cfg.rho
    n, r = f.n, f.rank
    p_core = f.v1 * f.d_inv
    lam = np.zeros((n, r))
    e = p_core.copy()
    z = np.zeros((n - r, r))
    rec = _TraceRecorder()
    k = 0
    converged = False
    pr = dr = float("inf")
    gamma_eff = min(gamma, n)
    while not _out_of_budget(cfg, t0, k):
        j = e - p_core - lam
        z = f.v2.T @ j
        cur = p_core + f.v2 @ z
        y = cur + lam
        e_new = project_row_support(y, gamma_eff)
        rk = cur - e_new
        lam_prev = lam
        lam = lam + rk
        sk = rho * (f.v2.T @ (e_new - e))
        pr, dr = float(np.linalg.norm(rk)), float(np.linalg.norm(sk))
        e = e_new
        k += 1
        n20 = int(np.count_nonzero(np.linalg.norm(cur, axis=1) > cfg.zero_tol))
        rec.add(pr, dr, float(n20), float(np.abs((lam - lam_prev) - rk).max()), rho)
        if n20 <= gamma:
            converged = True
            break
    state = AdmmState(z=z, e=e, lam=lam, iter=k, primal_res=pr, dual_res=dr, rho=rho)
    return package_result(
        _reconstruct(f), assemble_h(f, z), "admm20",
        iters=k, seconds=time.perf_counter() - t0, converged=converged,
        state=state, trace=rec.freeze(), zero_tol=cfg.zero_tol)


def admm2120_solve(f: SpectralFactors, cfg: AdmmConfig | None = None,
                   gamma: int | None = None,
                   warm: GInverseResult | None = None) -> GInverseResult:
    """Minimize the 2,1-norm subject to at most gamma nonzero rows.

    Warm-started from an unconstrained 2,1 result (its final splitting
    variable and multiplier state when available, else its H).  The E-step
    is capped row shrinkage.  The penalty starts large to force the support
    constraint, then decreases geometrically once the iterate is feasible
    and the primal residual is quiet; each violation episode restores the
    last good penalty and backs the decrease factor off toward 1.  The
    multiplier is rescaled whenever rho changes so the underlying unscaled
    multiplier is continuous.  Stops on the usual residual criterion plus
    feasibility.
    """
    cfg = cfg if cfg is not None else AdmmConfig.for_admm2120()
    if warm is None:
        raise ValueError("admm2120_solve requires the unconstrained 2,1 result as warm start")
    gamma = _budget(cfg, gamma, f, n20_opt=warm.norms.n20)
    t0 = time.perf_counter()
    sched = cfg.rho_schedule
    rho = sched.initial
    alpha = sched.alpha_max
    n, r = f.n, f.rank
    p_core = f.v1 * f.d_inv
    p_core_norm = float(np.linalg.norm(p_core))
    if warm.state is not None:
        e = warm.state.e.copy()
        lam = warm.state.lam * (warm.state.rho / rho)
    else:
        z0 = f.v2.T @ (warm.h @ f.u1)
        e = p_core + f.v2 @ z0
        lam = np.zeros((n, r))
    z = np.zeros((n - r, r))
    rec = _TraceRecorder()
    k = 0
    converged = False
    pr = dr = float("inf")
    feasible_phase = False
    last_good_rho = rho
    prev_quiet = True
    gamma_eff = min(gamma, n)
    while not _out_of_budget(cfg, t0, k):
        j = e - p_core - lam
        z = f.v2.T @ j
        vz = f.v2 @ z
        cur = p_core + vz
        y = cur + lam
        e_new = row_shrink_capped(y, rho, gamma_eff)
        rk = cur - e_new
        lam_prev = lam
        lam = lam + rk
        sk = rho * (f.v2.T @ (e_new - e))
        pr, dr = float(np.linalg.norm(rk)), float(np.linalg.norm(sk))
        e = e_new
        k += 1
        n20 = int(np.count_nonzero(np.linalg.norm(cur, axis=1) > cfg.zero_tol))
        rec.add(pr, dr, float(np.linalg.norm(e, axis=1).sum()),
                float(np.abs((lam - lam_prev) - rk).max()), rho)
        if cfg.fixed_eps is not None:
            stop = pr <= cfg.fixed_eps and dr <= cfg.fixed_eps
        else:
            stop = _reduced_stop_dynamic(cfg, rho, pr, dr, f, e, vz, p_core_norm, lam)
        if stop and n20 <= gamma:
            converged = True
            break
        primal_quiet = pr < sched.primal_gate
        if not feasible_phase:
            if primal_quiet and n20 <= gamma:
                feasible_phase = True
                last_good_rho = rho
        else:
            if primal_quiet:
                last_good_rho = rho
                new_rho = rho / alpha
            else:
                new_rho = last_good_rho
                if prev_quiet:  # one decrement per violation episode
                    alpha = max(sched.alpha_min, 0.9 * alpha)
            if new_rho != rho:
                lam = lam * (rho / new_rho)
                rho = new_rho
        prev_quiet = primal_quiet
    state = AdmmState(z=z, e=e, lam=lam, iter=k, primal_res=pr, dual_res=dr, rho=rho)
    return package_result(
        _reconstruct(f), assemble_h(f, z), "admm2120",
        iters=k, seconds=time.perf_counter() - t0, converged=converged,
        state=state, trace=rec.freeze(), zero_tol=cfg.zero_tol)
