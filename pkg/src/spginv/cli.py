"""Command-line front end: instance generation, solving, verification, and
benchmark tables.

Exit codes: 0 success (including nonconverged runs, which are flagged),
2 usage or instance-specification errors, 3 data/shape errors, 4 internal
numerical failure.  GINV_THREADS caps BLAS parallelism (default 1, for
deterministic benchmarking).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import os
import sys

import numpy as np
from threadpoolctl import threadpool_limits

from . import admm, exact_low_rank, local_search
from .admm import AdmmConfig, GInverseResult, derive_row_budget
from .instances import (
    InstanceSpec,
    MatrixMarketError,
    WorstCaseSpec,
    gen_rank_r,
    read_matrix,
    worst_case_build,
    write_matrix,
)
from .local_search import LsConfig
from .matrix_core import mp_residuals, norms, svd_partition

__all__ = ["main", "BenchRow", "CSV_HEADER"]

CSV_HEADER = "instance,method,omega,norm1,norm0,norm21,norm20,time_sec,iters,converged"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4

ADMM_METHODS = ("admm1", "admm21", "admm20", "admm2120")
ALL_METHODS = ADMM_METHODS + ("ls", "ls21", "rank1", "rank2")


@dataclasses.dataclass(frozen=True)
class BenchRow:
    """One solved instance/method combination, mirroring the CSV columns."""

    instance: str
    method: str
    omega: float | None
    norm1: float
    norm0: int
    norm21: float
    norm20: int
    time_sec: float
    iters: int
    converged: bool

    @classmethod
    def from_result(cls, instance: str, res: GInverseResult,
                    omega: float | None = None) -> "BenchRow":
        return cls(
            instance=instance, method=res.method, omega=omega,
            norm1=res.norms.n1, norm0=res.norms.n0,
            norm21=res.norms.n21, norm20=res.norms.n20,
            time_sec=res.seconds, iters=res.iters, converged=res.converged,
        )

    def human(self) -> str:
        omega = "" if self.omega is None else f" omega={self.omega:.6g}"
        return (f"{self.instance} {self.method}{omega} "
                f"norm1={self.norm1:.6g} norm0={self.norm0} "
                f"norm21={self.norm21:.6g} norm20={self.norm20} "
                f"time_sec={self.time_sec:.6g} iters={self.iters} "
                f"converged={'true' if self.converged else 'false'}")

    def csv_fields(self) -> list[str]:
        return [
            self.instance,
            self.method,
            "" if self.omega is None else format(self.omega, ".17g"),
            format(self.norm1, ".17g"),
            str(self.norm0),
            format(self.norm21, ".17g"),
            str(self.norm20),
            format(self.time_sec, ".17g"),
            str(self.iters),
            "true" if self.converged else "false",
        ]


def _write_csv(path, rows: list[BenchRow]) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER.split(","))
        for row in rows:
            writer.writerow(row.csv_fields())


def _parse_list(text: str, conv):
    return [conv(tok) for tok in text.split(",") if tok.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spginv",
        description="sparse and row-sparse reflexive generalized inverses")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a random rank-r instance")
    p_gen.add_argument("--m", type=int, required=True)
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--r", type=int, required=True)
    p_gen.add_argument("--density", type=float, default=0.3)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=cmd_gen)

    p_solve = sub.add_parser("solve", help="compute a generalized inverse")
    p_solve.add_argument("--in", dest="infile", required=True)
    p_solve.add_argument("--method", choices=ALL_METHODS, required=True)
    p_solve.add_argument("--rank", type=int, default=None,
                         help="truncate the SVD at this known rank")
    p_solve.add_argument("--rho", type=float, default=None)
    p_solve.add_argument("--eps-abs", type=float, default=None)
    p_solve.add_argument("--eps-rel", type=float, default=None)
    p_solve.add_argument("--fixed-eps", type=float, default=None)
    p_solve.add_argument("--omega", type=float, default=0.8)
    p_solve.add_argument("--gamma", type=int, default=None)
    p_solve.add_argument("--epsilon", type=float, default=1e-2,
                         help="local-search improvement threshold")
    p_solve.add_argument("--time-limit", type=float, default=None)
    p_solve.add_argument("--out-h", default=None)
    p_solve.add_argument("--csv", default=None)
    p_solve.set_defaults(func=cmd_solve)

    p_check = sub.add_parser("check", help="verify an inverse against its matrix")
    p_check.add_argument("--a", dest="a_file", required=True)
    p_check.add_argument("--h", dest="h_file", required=True)
    p_check.add_argument("--w", dest="w_file", default=None,
                         help="dual certificate matrix to verify")
    p_check.add_argument("--certify", action="store_true")
    p_check.add_argument("--rank", type=int, default=None)
    p_check.set_defaults(func=cmd_check)

    p_bench = sub.add_parser("bench", help="run a benchmark table")
    p_bench.add_argument("--sizes", required=True,
                         help="comma list of m values; n = m/2, r = m/4")
    p_bench.add_argument("--methods", required=True,
                         help=f"comma list from {', '.join(ALL_METHODS[:6])}")
    p_bench.add_argument("--omegas", default="",
                         help="comma list of omega values for the budgeted solvers")
    p_bench.add_argument("--density", type=float, default=0.3)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--csv", required=True)
    p_bench.set_defaults(func=cmd_bench)

    p_worst = sub.add_parser("worstcase",
                             help="evaluate the determinant search on its worst-case family")
    p_worst.add_argument("--r", type=int, required=True)
    p_worst.add_argument("--delta", type=float, required=True)
    p_worst.add_argument("--epsilon", type=float, default=1e-2)
    p_worst.set_defaults(func=cmd_worstcase)
    return parser


def cmd_gen(args) -> int:
    try:
        spec = InstanceSpec(m=args.m, n=args.n, r=args.r,
                            density=args.density, seed=args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    a = gen_rank_r(spec)
    write_matrix(args.out, a)
    f = svd_partition(a)
    print(f"wrote {args.out}: {spec.m}x{spec.n}, svd-verified rank {f.rank}")
    return EXIT_OK


def _admm_config(args, method: str) -> AdmmConfig:
    base = {
        "admm1": AdmmConfig.for_admm1,
        "admm21": AdmmConfig.for_admm21,
        "admm20": AdmmConfig.for_admm20,
        "admm2120": AdmmConfig.for_admm2120,
    }[method]()
    overrides = {}
    if args.rho is not None:
        overrides["rho"] = args.rho
    if args.eps_abs is not None:
        overrides["eps_abs"] = args.eps_abs
    if args.eps_rel is not None:
        overrides["eps_rel"] = args.eps_rel
    if args.fixed_eps is not None:
        overrides["fixed_eps"] = args.fixed_eps
    if args.time_limit is not None:
        overrides["max_seconds"] = args.time_limit
    if args.omega is not None:
        overrides["omega"] = args.omega
    if args.gamma is not None:
        overrides["gamma"] = args.gamma
    return dataclasses.replace(base, **overrides)


def _run_method(a, f, method: str, args):
    """Returns (result, omega_used); for rank2 the result may be the
    ConditionFailed witness instead of an inverse."""
    if method in ADMM_METHODS:
        cfg = _admm_config(args, method)
        if method == "admm1":
            return admm.admm1_solve(f, cfg), None
        if method == "admm21":
            return admm.admm21_solve(f, cfg), None
        if method == "admm20" and args.gamma is not None:
            return admm.admm20_solve(f, cfg, gamma=args.gamma), None
        warm = admm.admm21_solve(f, AdmmConfig.for_admm21())
        gamma = args.gamma if args.gamma is not None else derive_row_budget(
            args.omega, f.rank, warm.norms.n20)
        omega = args.omega if args.gamma is None else None
        if method == "admm20":
            return admm.admm20_solve(f, cfg, gamma=gamma), omega
        return admm.admm2120_solve(f, cfg, gamma=gamma, warm=warm), omega
    ls_cfg = LsConfig(epsilon=args.epsilon)
    if method == "ls":
        return local_search.ls_det(a, f, ls_cfg), None
    if method == "ls21":
        start = local_search.ls_det(a, f, ls_cfg)
        return local_search.ls_21(a, f, LsConfig(epsilon=args.epsilon, criterion="norm21"),
                                  init_t=start.support), None
    if method == "rank1":
        return exact_low_rank.rank1_optimal(a), None
    return exact_low_rank.rank2_candidate(a), None


def cmd_solve(args) -> int:
    try:
        a = read_matrix(args.infile)
    except (MatrixMarketError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    try:
        f = svd_partition(a, rank=args.rank)
        out = _run_method(a, f, args.method, args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (np.linalg.LinAlgError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    result, omega = out
    if isinstance(result, exact_low_rank.ConditionFailed):
        print(f"{args.infile} rank2: condition failed at column "
              f"{result.witness_column} with beta=({result.beta[0]:.6g}, "
              f"{result.beta[1]:.6g}); best pair {result.pair} has "
              f"norm21={result.pair_norm21:.6g} but optimality cannot be certified")
        return EXIT_OK
    row = BenchRow.from_result(args.infile, result, omega)
    print(row.human())
    if result.certificate is not None:
        _print_certificate(result.certificate)
    if args.out_h:
        write_matrix(args.out_h, result.h)
    if args.csv:
        _write_csv(args.csv, [row])
    return EXIT_OK


def _print_certificate(cert) -> None:
    print(f"certificate: dual_objective={cert.dual_objective:.6g} "
          f"max_row_norm={cert.max_row_norm:.6g} primal_21={cert.primal_21:.6g} "
          f"gap={cert.gap:.6g} feasible={'true' if cert.feasible else 'false'}")
    if cert.feasible and cert.gap <= 1e-8:
        print("optimal (gap <= 1e-8)")


def cmd_check(args) -> int:
    try:
        a = read_matrix(args.a_file)
        h = read_matrix(args.h_file)
        w = read_matrix(args.w_file) if args.w_file else None
    except (MatrixMarketError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    if h.shape != (a.shape[1], a.shape[0]):
        print(f"error: h has shape {h.shape}, expected {(a.shape[1], a.shape[0])}",
              file=sys.stderr)
        return EXIT_DATA
    props = mp_residuals(a, h)
    rep = norms(h)
    print(f"properties: p1={props.p1:.6g} p2={props.p2:.6g} p3={props.p3:.6g} "
          f"p4={props.p4:.6g} reflex_linear={props.reflex_linear:.6g}")
    print(f"norms: n1={rep.n1:.6g} n0={rep.n0} n21={rep.n21:.6g} "
          f"n20={rep.n20} zero_tol={rep.zero_tol:.6g}")
    if not args.certify and w is None:
        return EXIT_OK
    try:
        if w is not None:
            cert = exact_low_rank.verify_certificate(a, h, w)
        else:
            f = svd_partition(a, rank=args.rank)
            if f.rank == 1:
                ref = exact_low_rank.rank1_optimal(a)
            elif f.rank == 2:
                ref = exact_low_rank.rank2_candidate(a)
                if isinstance(ref, exact_low_rank.ConditionFailed):
                    print(f"certification unavailable: rank-2 condition failed at "
                          f"column {ref.witness_column}")
                    return EXIT_OK
            else:
                print("error: certification needs rank <= 2 or an explicit --w",
                      file=sys.stderr)
                return EXIT_USAGE
            # score the *given* h against the constructed dual candidate
            primal = float(np.linalg.norm(h, axis=1).sum())
            cert = dataclasses.replace(
                ref.certificate,
                primal_21=primal,
                gap=primal - ref.certificate.dual_objective,
            )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    _print_certificate(cert)
    return EXIT_OK


def cmd_bench(args) -> int:
    sizes = _parse_list(args.sizes, int)
    methods = _parse_list(args.methods, str)
    omegas = _parse_list(args.omegas, float)
    for method in methods:
        if method not in ALL_METHODS:
            print(f"error: unknown method {method!r}", file=sys.stderr)
            return EXIT_USAGE
    rows: list[BenchRow] = []
    for m in sizes:
        if m % 4 != 0:
            print(f"error: size {m} must be divisible by 4 (n = m/2, r = m/4)",
                  file=sys.stderr)
            return EXIT_USAGE
        spec = InstanceSpec(m=m, n=m // 2, r=m // 4,
                            density=args.density, seed=args.seed)
        label = f"m{m}n{m // 2}r{m // 4}s{args.seed}"
        a = gen_rank_r(spec)
        f = svd_partition(a, rank=spec.r)
        warm: GInverseResult | None = None

        def warm_start() -> GInverseResult:
            nonlocal warm
            if warm is None:
                warm = admm.admm21_solve(f, AdmmConfig.for_admm21())
            return warm

        for method in methods:
            try:
                if method == "admm1":
                    rows.append(BenchRow.from_result(
                        label, admm.admm1_solve(f, AdmmConfig.for_admm1())))
                elif method == "admm21":
                    rows.append(BenchRow.from_result(label, warm_start()))
                elif method in ("admm20", "admm2120"):
                    base = warm_start()
                    for omega in omegas:
                        gamma = derive_row_budget(omega, f.rank, base.norms.n20)
                        if method == "admm20":
                            res = admm.admm20_solve(f, AdmmConfig.for_admm20(), gamma=gamma)
                        else:
                            res = admm.admm2120_solve(f, AdmmConfig.for_admm2120(),
                                                      gamma=gamma, warm=base)
                        rows.append(BenchRow.from_result(label, res, omega))
                elif method == "ls":
                    rows.append(BenchRow.from_result(label, local_search.ls_det(a, f)))
                elif method == "ls21":
                    start = local_search.ls_det(a, f)
                    rows.append(BenchRow.from_result(
                        label, local_search.ls_21(a, f, init_t=start.support)))
                else:
                    print(f"error: method {method!r} is not benchable", file=sys.stderr)
                    return EXIT_USAGE
            except (ValueError, np.linalg.LinAlgError, ArithmeticError) as exc:
                # record the failure but keep the table going
                print(f"warning: {label} {method} failed: {exc}", file=sys.stderr)
    _write_csv(args.csv, rows)
    for row in rows:
        print(row.human())
    print(f"wrote {args.csv} ({len(rows)} rows)")
    return EXIT_OK


def cmd_worstcase(args) -> int:
    try:
        spec = WorstCaseSpec(r=args.r, delta=args.delta)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _, a_full = worst_case_build(spec)
    r = spec.r
    f = svd_partition(a_full, rank=r)
    init = (tuple(range(r)), tuple(range(r)))
    ls_res = local_search.ls_det(a_full, f, LsConfig(epsilon=args.epsilon), init=init)
    swap_t = (r,) + tuple(range(1, r))
    h_best = local_search.column_block(a_full, swap_t)
    best_norm = norms(h_best).n21
    ratio = ls_res.norms.n21 / best_norm
    print(f"r={r} delta={args.delta:.6g}")
    print(f"ls block norm21={ls_res.norms.n21:.6g} (support {ls_res.support})")
    print(f"best block norm21={best_norm:.6g} (support {swap_t})")
    print(f"ratio={ratio:.6g} limit={r}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    threads = int(os.environ.get("GINV_THREADS", "1"))
    with threadpool_limits(limits=threads):
        return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
