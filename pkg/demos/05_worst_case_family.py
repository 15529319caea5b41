"""The family on which determinant local search is exactly r times worse.

A near-singular Toeplitz block is a determinant local maximizer (swapping in
the extra column b leaves |det| unchanged), yet the block using b has 2,1-norm
smaller by a factor approaching r as the step delta shrinks.  This shows the
r(1+eps) guarantee of the determinant search cannot be improved.
"""

import numpy as np

from spginv import (
    LsConfig,
    WorstCaseSpec,
    column_block,
    ls_det,
    norms,
    svd_partition,
    worst_case_build,
)

for r in (2, 3, 4):
    print(f"--- r = {r} ---")
    for delta in (0.3, 1e-2, 1e-4):
        a_tilde, a_full = worst_case_build(WorstCaseSpec(r=r, delta=delta))
        factors = svd_partition(a_full, rank=r)

        # start the search exactly on the trap basis
        trap = (tuple(range(r)), tuple(range(r)))
        stuck = ls_det(a_full, factors, LsConfig(epsilon=1e-2), init=trap)

        # the block that swaps in the extra column is far better
        better = column_block(a_full, (r,) + tuple(range(1, r)))
        ratio = stuck.norms.n21 / norms(better).n21
        print(f"  delta={delta:7.0e}: search stays at {stuck.support} "
              f"(swaps={stuck.iters}), ratio={ratio:.4f} -> r={r}")

print("\nclosed forms: the trap block's rows all have norm ~sqrt(r) while the")
print("better block's rows past the first have norm O(delta), so the ratio of")
print("their 2,1-norms tends to r * sqrt(r) / sqrt(r) = r as delta -> 0")
