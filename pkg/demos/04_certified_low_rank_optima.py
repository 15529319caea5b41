"""Exact 2,1-norm optima for rank one and two, proved by dual certificates.

For rank-1 matrices the best column block is provably the global optimum;
for rank-2 matrices the same is true whenever every column's coordinates in
the best 2-column basis satisfy |b1| + |b2| <= 1.  Optimality is audited by
weak duality: a dual-feasible W whose objective matches the primal norm
leaves a zero gap.
"""

import numpy as np

from spginv import (
    ConditionFailed,
    admm21_solve,
    rank1_optimal,
    rank2_candidate,
    svd_partition,
)

rng = np.random.default_rng(5)

# --- rank 1: always certifiable -------------------------------------------
a1 = np.outer(rng.normal(size=8), rng.normal(size=5))
res = rank1_optimal(a1)
cert = res.certificate
print("rank-1 example")
print(f"  support row {res.support}, n21={res.norms.n21:.6f}")
print(f"  certificate: dual={cert.dual_objective:.6f} gap={cert.gap:.2e} "
      f"feasible={cert.feasible}")

check = admm21_solve(svd_partition(a1))
print(f"  convex solver agrees: n21={check.norms.n21:.6f}\n")

# --- rank 2: certified when the coordinate condition holds ----------------
good = np.array([[1.0, 0.0, 0.3], [0.0, 1.0, 0.3]])
res2 = rank2_candidate(good)
print("rank-2 example that satisfies the condition")
print(f"  pair {res2.support}, n21={res2.norms.n21:.6f}, "
      f"gap={res2.certificate.gap:.2e}\n")

# --- rank 2: and one that does not ----------------------------------------
bad = np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0]])
out = rank2_candidate(bad)
assert isinstance(out, ConditionFailed)
print("rank-2 example where no column block is optimal")
print(f"  best pair {out.pair} has n21={out.pair_norm21:.4f}, but column "
      f"{out.witness_column} has coordinates {out.beta} with |b1|+|b2| > 1")
true_opt = admm21_solve(svd_partition(bad))
print(f"  the true optimum is n21={true_opt.norms.n21:.6f} "
      f"(= sqrt(2)/2 * (1+sqrt(3))), spread over all three rows")
