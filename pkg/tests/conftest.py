import numpy as np
import pytest

from spginv import InstanceSpec, gen_rank_r, svd_partition


@pytest.fixture
def tum_fixture():
    """The 2x3 totally-unimodular matrix whose exact 2,1-norm optimum and
    column-block norms are known in closed form."""
    return np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0]])


@pytest.fixture
def tum_optimum():
    """Closed-form 2,1-norm optimal inverse of the 2x3 fixture."""
    s3 = np.sqrt(3.0)
    h = np.array([[3 + s3, s3 - 3], [3 - s3, 3 - s3], [s3 - 3, 3 + s3]]) / 6.0
    return h, (np.sqrt(2.0) / 2.0) * (1.0 + s3)


def random_instance(m, n, r, seed, density=0.3):
    a = gen_rank_r(InstanceSpec(m=m, n=n, r=r, density=density, seed=seed))
    return a, svd_partition(a, rank=r)
