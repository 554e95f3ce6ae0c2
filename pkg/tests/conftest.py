"""Independent reference constructions shared by the tests.

These deliberately avoid the package: spin operators are built from explicit
Kronecker products or from the textbook spin-J matrices.
"""

import numpy as np
import pytest
from functools import reduce


def kron_all(mats):
    return reduce(np.kron, mats)


def local_lowering(N):
    """sigma_n = |g><e| on atom n, basis (|e>, |g>) per atom."""
    sm = np.array([[0.0, 0.0], [1.0, 0.0]])
    eye = np.eye(2)
    return [kron_all([sm if k == n else eye for k in range(N)]) for n in range(N)]


def product_space_spin(N):
    """(J_-, J_z, J^2) on the 2**N product space."""
    low = local_lowering(N)
    jm = sum(low)
    jp = jm.T
    jz = sum(l.T @ l - l @ l.T for l in low) / 2
    jx = (jp + jm) / 2
    jy = (jp - jm) / 2j
    jsq = (jx @ jx + jy @ jy + jz @ jz).real
    return jm, jz, jsq


def spin_j_lowering(J):
    """Textbook J_- for a single spin J, basis M = J, J-1, ..., -J."""
    ms = np.arange(J, -J - 1, -1)
    d = len(ms)
    jm = np.zeros((d, d))
    for a in range(d - 1):
        M = ms[a]
        jm[a + 1, a] = np.sqrt(J * (J + 1) - M * (M - 1))
    return ms, jm


@pytest.fixture(scope="session")
def benchmark_point():
    """N=100, gamma_2 = eps, gamma_p = 100 eps (2 pi x 10 Hz and 2 pi x 1 kHz)."""
    from dickeradiance import solve

    return solve(100, 100.0, 0.0, 1.0)
