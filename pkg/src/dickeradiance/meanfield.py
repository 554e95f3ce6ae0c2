"""Second-order cumulant (mean-field) theory for single-atom collective decay.

Variables are the single-atom inversion ``s = <sigma_1^z>``, the pair
coherence ``c = <sigma_1^+ sigma_2>`` and the inversion correlation
``zz = <sigma_1^z sigma_2^z>``; permutation symmetry makes every pair
equivalent.  The third-order moment ``<sigma_1^z sigma_2 sigma_3^+>`` is
factorised as ``s * c`` to close the system.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import InvalidArgument, NumericalFailure

__all__ = [
    "MeanfieldCoefficients",
    "MeanfieldSolution",
    "MeanfieldTrajectory",
    "mf_coefficients",
    "mf_rhs",
    "mf_steady_state",
    "mf_observables",
    "mf_evolve",
]


@dataclass(frozen=True)
class MeanfieldCoefficients:
    c1: float
    c2: float
    c3: float


@dataclass(frozen=True)
class MeanfieldSolution:
    sig_corr: float
    sig_z: float


@dataclass(frozen=True)
class MeanfieldTrajectory:
    t: np.ndarray
    sig_z: np.ndarray
    sig_corr: np.ndarray
    sig_zz: np.ndarray


def _check_rates(n_atoms, gamma_p, gamma_1):
    if int(n_atoms) != n_atoms or n_atoms < 1:
        raise InvalidArgument(f"n_atoms must be a positive integer, got {n_atoms!r}")
    if gamma_p < 0 or gamma_1 < 0:
        raise InvalidArgument("rates must be nonnegative")
    if gamma_p + gamma_1 <= 0:
        raise InvalidArgument("gamma_p + gamma_1 must be positive")


def mf_coefficients(n_atoms, gamma_p, gamma_1) -> MeanfieldCoefficients:
    """Coefficients of the steady-state quadratic ``c1 x^2 + c2 x + c3 = 0`` for ``x = c``."""
    _check_rates(n_atoms, gamma_p, gamma_1)
    N = n_atoms
    tot = gamma_p + gamma_1
    c1 = 4 * (N - 1) * (N - 2) * gamma_1**2 / tot**2
    c2 = 2 + 2 * N * gamma_1 / tot - 2 * gamma_1 * (2 * N - 3) * (gamma_p - gamma_1) / tot**2
    c3 = 2 * gamma_1 * (gamma_1 - gamma_p) / tot**2
    return MeanfieldCoefficients(c1, c2, c3)


def _positive_root(c1, c2, c3):
    """The ``(-c2 + sqrt(c2^2 - 4 c1 c3)) / (2 c1)`` root, cancellation-free.

    Written as ``-2 c3 / (c2 + sqrt(...))`` it also covers ``c1 = 0``, where it
    reduces to the linear solution ``-c3 / c2``.
    """
    disc = c2 * c2 - 4 * c1 * c3
    if disc < 0:
        raise NumericalFailure(f"negative discriminant {disc:.3e} (c1={c1}, c2={c2}, c3={c3})")
    root = np.sqrt(disc)
    if c2 + root == 0:
        raise NumericalFailure(f"degenerate quadratic (c1={c1}, c2={c2}, c3={c3})")
    return -2 * c3 / (c2 + root)


def mf_rhs(n_atoms, gamma_p, gamma_1, y):
    """Right-hand side ``d(s, c, zz)/dt`` of the closed cumulant equations."""
    s, c, zz = y
    N = n_atoms
    tot = gamma_p + gamma_1
    g = gamma_1
    ds = -tot * s - 2 * (N - 1) * g * c + (gamma_p - g)
    dc = -tot * c + g / 2 * zz + g / 2 * s + g * (N - 2) * s * c
    dzz = -2 * tot * zz + 2 * (gamma_p - g) * s + 4 * g * c - 4 * g * (N - 2) * s * c
    return np.array([ds, dc, dzz])


def mf_steady_state(n_atoms, gamma_p, gamma_1) -> MeanfieldSolution:
    """Closed-form stationary point of the cumulant equations."""
    co = mf_coefficients(n_atoms, gamma_p, gamma_1)
    c = _positive_root(co.c1, co.c2, co.c3)
    tot = gamma_p + gamma_1
    s = ((gamma_p - gamma_1) - 2 * (n_atoms - 1) * gamma_1 * c) / tot
    if not (-1 - 1e-12 <= s <= 1 + 1e-12) or abs(c) > 1 + 1e-12:
        raise NumericalFailure(
            f"unphysical mean-field root (sig_z={s}, sig_corr={c}) for "
            f"N={n_atoms}, gamma_p={gamma_p}, gamma_1={gamma_1}"
        )
    return MeanfieldSolution(sig_corr=float(c), sig_z=float(s))


def mf_steady_zz(n_atoms, gamma_p, gamma_1, sol: MeanfieldSolution) -> float:
    """``<sigma_1^z sigma_2^z>`` at the fixed point, eliminated from its own equation."""
    s, c = sol.sig_z, sol.sig_corr
    g = gamma_1
    tot = gamma_p + gamma_1
    return (2 * (gamma_p - g) * s + 4 * g * c - 4 * g * (n_atoms - 2) * s * c) / (2 * tot)


def mf_observables(sol: MeanfieldSolution, n_atoms):
    """Return ``(<J_+ J_->, sum_n <sigma_n^+ sigma_n>, R_f)`` for a mean-field solution.

    The diagonal part of ``<J_+ J_->`` is the total excited population, so
    ``<J_+ J_-> = N (s + 1) / 2 + N (N - 1) c``.
    """
    N = n_atoms
    sum_pop = N * (sol.sig_z + 1) / 2
    jpjm = sum_pop + N * (N - 1) * sol.sig_corr
    return jpjm, sum_pop, (jpjm - sum_pop) / N


def mf_evolve(n_atoms, gamma_p, gamma_1, initial, t_final, n_points=201) -> MeanfieldTrajectory:
    """Integrate the closed cumulant equations from ``initial = (s, c, zz)``."""
    _check_rates(n_atoms, gamma_p, gamma_1)
    y0 = np.asarray(initial, dtype=float)
    if y0.shape != (3,) or np.any(np.abs(y0) > 1):
        raise InvalidArgument(f"initial must be three values of magnitude <= 1, got {initial!r}")
    if t_final < 0:
        raise InvalidArgument("t_final must be nonnegative")
    if t_final == 0:
        col = y0[:, None]
        return MeanfieldTrajectory(np.zeros(1), col[0], col[1], col[2])
    t_eval = np.linspace(0.0, t_final, n_points)
    sol = solve_ivp(
        lambda t, y: mf_rhs(n_atoms, gamma_p, gamma_1, y),
        (0.0, float(t_final)),
        y0,
        method="DOP853",
        t_eval=t_eval,
        rtol=1e-11,
        atol=1e-13,
        max_step=t_final / 20,
    )
    if not sol.success:
        raise NumericalFailure(f"mean-field integration failed: {sol.message}")
    if np.any(np.abs(sol.y) > 1 + 1e-8):
        raise NumericalFailure("mean-field trajectory left the physical range |x| <= 1")
    return MeanfieldTrajectory(sol.t, sol.y[0], sol.y[1], sol.y[2])
