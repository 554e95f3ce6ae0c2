"""Permutation-invariant Dicke-ladder representation and population dynamics.

The reduced model keeps only the populations of the collective states
``|J, M>``.  A permutation-symmetric density matrix of N two-level atoms is
block diagonal in J with the identity on each multiplicity space, and both
the local pump and the collective decay channels map ``(J, M)``-diagonal
operators onto diagonal operators.  The dynamics therefore closes on the
vector of populations, which evolves under a continuous-time Markov
generator ``dp/dt = G p``.

Populations are stored *aggregated* over the ``d_N^J`` degenerate copies of
each spin-J sector, so observables are plain weighted sums.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp

from .errors import InvalidArgument, NonUniqueSteadyState, NumericalFailure

__all__ = [
    "MAX_ATOMS",
    "DickeBasis",
    "DiagonalState",
    "ModelParams",
    "CircuitParams",
    "RateGenerator",
    "BadCavityWarning",
    "build_basis",
    "degeneracy",
    "ladder_coefficient",
    "ladder_coefficients",
    "build_generator",
    "steady_state",
    "residual",
    "evolve",
    "effective_rates",
]

#: Largest ensemble accepted by :func:`build_basis`.  The chain has
#: (N/2 + 1)^2 states, so N = 1000 already means ~250k sparse unknowns.
MAX_ATOMS = 1000

POSITIVITY_SLACK = 1e-12
NORMALIZATION_TOL = 1e-10
RESIDUAL_TOL = 1e-10


def _twice(x) -> int:
    """Return 2*x as an exact integer for integer or half-integer ``x``."""
    t = 2 * Fraction(x).limit_denominator(4)
    if t.denominator != 1:
        raise InvalidArgument(f"{x!r} is not an integer or half-integer")
    return int(t)


def _check_n_atoms(n_atoms) -> int:
    if isinstance(n_atoms, bool) or int(n_atoms) != n_atoms:
        raise InvalidArgument(f"n_atoms must be an integer, got {n_atoms!r}")
    n_atoms = int(n_atoms)
    if not 1 <= n_atoms <= MAX_ATOMS:
        raise InvalidArgument(f"n_atoms must lie in [1, {MAX_ATOMS}], got {n_atoms}")
    return n_atoms


def degeneracy(n_atoms, J) -> int:
    """Multiplicity of the spin-``J`` irreducible sector for ``n_atoms`` spins.

    Uses ``d_N^J = C(N, N/2 - J) - C(N, N/2 - J - 1)``, which equals
    ``(2J+1) N! / ((N/2+J+1)! (N/2-J)!)`` and stays in exact integers.
    """
    n_atoms = _check_n_atoms(n_atoms)
    two_j = _twice(J)
    if two_j < 0 or two_j > n_atoms or (n_atoms - two_j) % 2:
        raise InvalidArgument(f"J={J} is not an admissible sector for N={n_atoms}")
    k = (n_atoms - two_j) // 2
    return math.comb(n_atoms, k) - (math.comb(n_atoms, k - 1) if k > 0 else 0)


@dataclass(frozen=True)
class DickeBasis:
    """Enumeration of the ``(J, M)`` states of ``n_atoms`` two-level atoms.

    States are ordered by sector (J descending) and, inside a sector, by M
    descending from ``J`` to ``-J``.

    Attributes
    ----------
    n_atoms : int
    sectors : tuple of (float, int)
        ``(J, d_N^J)`` pairs, J descending.
    j, m : ndarray
        Quantum numbers of every state, indexed by state index.
    """

    n_atoms: int
    sectors: tuple
    j: np.ndarray = field(repr=False)
    m: np.ndarray = field(repr=False)
    _offsets: dict = field(repr=False, compare=False)

    @property
    def size(self) -> int:
        return len(self.j)

    @property
    def degeneracies(self) -> np.ndarray:
        """Degeneracy of the sector each state belongs to (float array)."""
        d = {_twice(J): float(dj) for J, dj in self.sectors}
        return np.array([d[int(round(2 * J))] for J in self.j])

    def index(self, J, M) -> int:
        """Contiguous state index of ``|J, M>``."""
        two_j, two_m = _twice(J), _twice(M)
        if two_j not in self._offsets or abs(two_m) > two_j or (two_j - two_m) % 2:
            raise InvalidArgument(f"(J={J}, M={M}) is not a state of N={self.n_atoms}")
        return self._offsets[two_j] + (two_j - two_m) // 2

    def indices(self, j, m) -> np.ndarray:
        """Vectorised :meth:`index` for arrays of valid quantum numbers."""
        two_j = np.rint(2 * np.asarray(j)).astype(np.int64)
        two_m = np.rint(2 * np.asarray(m)).astype(np.int64)
        offs = np.array([self._offsets[t] for t in two_j.ravel()], dtype=np.int64)
        return offs.reshape(two_j.shape) + (two_j - two_m) // 2

    def labels(self):
        """List of ``(J, M)`` tuples in index order."""
        return list(zip(self.j.tolist(), self.m.tolist()))


def build_basis(n_atoms) -> DickeBasis:
    """Build the Dicke basis for ``n_atoms`` atoms (1 <= N <= ``MAX_ATOMS``)."""
    n_atoms = _check_n_atoms(n_atoms)
    sectors = []
    offsets = {}
    js, ms = [], []
    for two_j in range(n_atoms, -1, -2):
        J = two_j / 2
        sectors.append((J, degeneracy(n_atoms, J)))
        offsets[two_j] = len(js)
        for two_m in range(two_j, -two_j - 1, -2):
            js.append(J)
            ms.append(two_m / 2)
    j = np.array(js)
    m = np.array(ms)
    j.setflags(write=False)
    m.setflags(write=False)
    return DickeBasis(n_atoms, tuple(sectors), j, m, offsets)


def ladder_coefficient(J, M, k) -> float:
    """Matrix element ``<J, M-k| J_-^k |J, M>`` for ``k`` in {1, 2, 4}.

    Zero whenever the ladder would be stepped below ``M = -J``.
    """
    if k not in (1, 2, 4):
        raise InvalidArgument(f"k must be 1, 2 or 4, got {k!r}")
    return float(ladder_coefficients(np.atleast_1d(float(J)), np.atleast_1d(float(M)), k)[0])


def ladder_coefficients(j, m, k) -> np.ndarray:
    """Vectorised :func:`ladder_coefficient` over arrays of ``(J, M)``."""
    j = np.asarray(j, dtype=float)
    m = np.asarray(m, dtype=float)
    out = np.ones(np.broadcast(j, m).shape)
    for i in range(k):
        mi = m - i
        out = out * np.sqrt(np.clip(j * (j + 1) - mi * (mi - 1), 0.0, None))
    # rows with M - k < -J leave the ladder; the sqrt factor above is then 0
    # for the offending step already, but guard explicitly against roundoff
    return np.where(m - k >= -j - 1e-9, out, 0.0)


@dataclass(frozen=True)
class ModelParams:
    """Rates of the reduced master equation, all in units of ``epsilon``.

    ``epsilon`` is the reference rate (angular frequency, s^-1) used only when
    converting to absolute units; the default corresponds to 2*pi*10 Hz.
    """

    n_atoms: int
    gamma_p: float
    gamma_1: float = 0.0
    gamma_2: float = 0.0
    epsilon: float = 2 * np.pi * 10.0

    def __post_init__(self):
        _check_n_atoms(self.n_atoms)
        for name in ("gamma_p", "gamma_1", "gamma_2"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise InvalidArgument(f"{name} must be a finite nonnegative rate, got {v!r}")
        if not np.isfinite(self.epsilon) or self.epsilon <= 0:
            raise InvalidArgument(f"epsilon must be positive, got {self.epsilon!r}")


@dataclass(frozen=True)
class DiagonalState:
    """Aggregate populations over the Dicke basis."""

    basis: DickeBasis
    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.shape != (self.basis.size,):
            raise InvalidArgument(
                f"population vector has shape {p.shape}, expected ({self.basis.size},)"
            )
        if not np.all(np.isfinite(p)) or p.min() < -POSITIVITY_SLACK:
            raise InvalidArgument("populations must be finite and nonnegative")
        if abs(p.sum() - 1.0) > NORMALIZATION_TOL:
            raise InvalidArgument(f"populations sum to {p.sum()!r}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @classmethod
    def pure(cls, basis: DickeBasis, J, M) -> "DiagonalState":
        p = np.zeros(basis.size)
        p[basis.index(J, M)] = 1.0
        return cls(basis, p)

    @classmethod
    def ground(cls, basis: DickeBasis) -> "DiagonalState":
        """All atoms in ``|g>``: the state ``|N/2, -N/2>``."""
        N = basis.n_atoms
        return cls.pure(basis, N / 2, -N / 2)

    def probability(self, J, M) -> float:
        return float(self.p[self.basis.index(J, M)])


@dataclass(frozen=True)
class RateGenerator:
    """Column-stochastic generator ``G`` of the population dynamics."""

    basis: DickeBasis
    matrix: sp.csr_matrix = field(repr=False)
    params: ModelParams

    def outflow(self) -> np.ndarray:
        """Total escape rate out of every state (negated diagonal)."""
        return -self.matrix.diagonal()

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def _pump_rates(N, j, m):
    """Local-pump rates out of ``(J, M)`` into ``(J+1, M+1)``, ``(J, M+1)``, ``(J-1, M+1)``.

    Each is (reduced matrix element) x (Clebsch-Gordan coefficient squared for
    coupling a rank-1 raising component to spin J).  The three branches sum to
    ``N/2 - M``, the number of ground-state atoms.
    """
    half = N / 2
    with np.errstate(divide="ignore", invalid="ignore"):
        up = (half - j) * (j + m + 1) * (j + m + 2) / ((2 * j + 1) * (2 * j + 2))
        same = (half + 1) * (j - m) * (j + m + 1) / (2 * j * (j + 1))
        down = (half + j + 1) * (j - m) * (j - m - 1) / (2 * j * (2 * j + 1))
    zero_j = j == 0
    same = np.where(zero_j, 0.0, same)
    down = np.where(zero_j, 0.0, down)
    return up, same, down


def build_generator(basis: DickeBasis, params: ModelParams) -> RateGenerator:
    """Assemble the population generator for pumping plus collective decay.

    Transitions leaving ``(J, M)``:

    * ``(J, M-1)`` at ``gamma_1 * A_1(J, M)^2``
    * ``(J, M-2)`` at ``gamma_2 * A_2(J, M)^2``
    * ``(J', M+1)`` for ``J'`` in ``{J-1, J, J+1}`` from the local pump, with
      total ``gamma_p * (N/2 - M)``.
    """
    if basis.n_atoms != params.n_atoms:
        raise InvalidArgument(
            f"basis has N={basis.n_atoms} but params have N={params.n_atoms}"
        )
    N = basis.n_atoms
    j, m = basis.j, basis.m
    src = np.arange(basis.size)
    rows, cols, vals = [], [], []

    def add(mask, dj, dm, rate):
        if not np.any(mask):
            return
        s = src[mask]
        rows.append(basis.indices(j[mask] + dj, m[mask] + dm))
        cols.append(s)
        vals.append(rate[mask])

    if params.gamma_1 > 0:
        r1 = params.gamma_1 * ladder_coefficients(j, m, 1) ** 2
        add(r1 > 0, 0, -1, r1)
    if params.gamma_2 > 0:
        r2 = params.gamma_2 * ladder_coefficients(j, m, 2) ** 2
        add(r2 > 0, 0, -2, r2)
    if params.gamma_p > 0:
        up, same, down = (params.gamma_p * r for r in _pump_rates(N, j, m))
        add((up > 0) & (j + 1 <= N / 2), 1, 1, up)
        add((same > 0) & (m + 1 <= j), 0, 1, same)
        add((down > 0) & (m + 1 <= j - 1), -1, 1, down)

    if rows:
        r = np.concatenate(rows)
        c = np.concatenate(cols)
        v = np.concatenate(vals)
    else:
        r = c = np.zeros(0, dtype=np.int64)
        v = np.zeros(0)
    off = sp.coo_matrix((v, (r, c)), shape=(basis.size, basis.size)).tocsc()
    out = np.asarray(off.sum(axis=0)).ravel()
    G = (off - sp.diags(out)).tocsr()
    G.sort_indices()
    return RateGenerator(basis, G, params)


def residual(gen: RateGenerator, state: DiagonalState) -> float:
    """Stationarity residual ``||G p||_inf / max_i sum_j |G_ij|``."""
    return _residual(gen.matrix, state.p)


def _residual(G: sp.spmatrix, p: np.ndarray) -> float:
    scale = float(abs(G).sum(axis=1).max()) if G.nnz else 1.0
    return float(np.abs(G @ p).max()) / (scale or 1.0)


def steady_state(gen: RateGenerator) -> DiagonalState:
    """Unique stationary distribution of ``gen``.

    One balance equation is replaced by normalisation and the resulting sparse
    system is solved directly.  If that solve is singular or inaccurate a dense
    null-space computation is attempted.

    Raises
    ------
    NonUniqueSteadyState
        If ``gamma_p == 0``: the bottom of every ladder is then dark.
    NumericalFailure
        If the residual exceeds ``1e-10`` of the largest row magnitude.
    """
    if gen.params.gamma_p <= 0:
        raise NonUniqueSteadyState(
            "the stationary distribution is not unique without pumping (gamma_p = 0)"
        )
    G = gen.matrix
    n = G.shape[0]
    A = G.tolil(copy=True)
    A[0, :] = np.ones(n)
    b = np.zeros(n)
    b[0] = 1.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", spla.MatrixRankWarning)
        p = spla.spsolve(A.tocsc(), b)
    if not np.all(np.isfinite(p)) or _residual(G, p) > RESIDUAL_TOL:
        p = _dense_nullvector(G)
    p = _clean(p)
    res = _residual(G, p)
    if res > RESIDUAL_TOL:
        raise NumericalFailure(f"steady-state residual {res:.3e} exceeds tolerance", res)
    return DiagonalState(gen.basis, p)


def _dense_nullvector(G):
    if G.shape[0] > 20000:
        raise NumericalFailure("sparse steady-state solve failed and the chain is too large for a dense fallback")
    ns = scipy.linalg.null_space(G.toarray(), rcond=1e-13)
    if ns.shape[1] != 1:
        raise NonUniqueSteadyState(f"generator null space has dimension {ns.shape[1]}")
    v = ns[:, 0]
    return v / v.sum()


def _clean(p):
    p = np.asarray(p, dtype=float)
    if p.min() < -1e-9 * max(1.0, np.abs(p).max()):
        raise NumericalFailure(f"negative population {p.min():.3e} in solution")
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def evolve(gen: RateGenerator, initial: DiagonalState, t_final, dt_hint=None) -> DiagonalState:
    """Integrate ``dp/dt = G p`` from ``initial`` up to ``t_final``.

    A stiff (BDF) integrator is used; ``dt_hint`` sets the spacing of the
    checkpoints at which normalisation and positivity are verified.
    """
    if t_final < 0:
        raise InvalidArgument(f"t_final must be nonnegative, got {t_final!r}")
    if initial.basis.n_atoms != gen.basis.n_atoms:
        raise InvalidArgument("initial state and generator have different N")
    if t_final == 0:
        return initial
    G = gen.matrix.tocsc()
    n_checks = 1 if not dt_hint else max(1, min(10_000, int(math.ceil(t_final / dt_hint))))
    t_eval = np.linspace(0.0, t_final, n_checks + 1)
    sol = solve_ivp(
        lambda t, p: G @ p,
        (0.0, float(t_final)),
        initial.p,
        method="BDF",
        jac=G,
        t_eval=t_eval,
        rtol=1e-10,
        atol=1e-14,
    )
    if not sol.success:
        raise NumericalFailure(f"time integration failed: {sol.message}")
    for k in range(sol.y.shape[1]):
        p = sol.y[:, k]
        if abs(p.sum() - 1.0) > 1e-8 or p.min() < -1e-8:
            raise NumericalFailure(
                f"population drift at t={sol.t[k]:.4g}: sum={p.sum():.12f}, min={p.min():.3e}"
            )
    return DiagonalState(gen.basis, _clean(sol.y[:, -1]))


class BadCavityWarning(UserWarning):
    """kappa_a is not large compared with lambda; adiabatic elimination is strained."""


@dataclass(frozen=True)
class CircuitParams:
    """Parameters of the two-resonator circuit realisation.

    All rates share one unit (e.g. 2*pi*Hz); ``kappa_b`` is recorded only.
    """

    lambda_ab: float
    lambda_bgamma: float
    delta: float
    kappa_a: float
    kappa_b: float
    n_atoms: int

    def __post_init__(self):
        _check_n_atoms(self.n_atoms)
        for name in ("lambda_ab", "lambda_bgamma", "delta", "kappa_a", "kappa_b"):
            v = getattr(self, name)
            if not np.isfinite(v) or v <= 0:
                raise InvalidArgument(f"{name} must be a positive rate, got {v!r}")

    @property
    def transition_rate(self) -> float:
        return self.lambda_ab * self.lambda_bgamma**2 / (self.n_atoms * self.delta**2)

    @property
    def bad_cavity(self) -> bool:
        """True when ``kappa_a >= 100 * lambda``."""
        return self.kappa_a >= 100 * self.transition_rate


def effective_rates(cp: CircuitParams):
    """Return ``(lambda, gamma_2)`` for the circuit parameters ``cp``.

    ``lambda = lambda_ab * lambda_bgamma**2 / (N * delta**2)`` and
    ``gamma_2 = 4 * lambda**2 / kappa_a``.  Warns with
    :class:`BadCavityWarning` when ``kappa_a < 100 * lambda``.
    """
    lam = cp.transition_rate
    if not cp.bad_cavity:
        warnings.warn(
            f"kappa_a={cp.kappa_a:g} is not >> lambda={lam:g}; bad-cavity elimination is strained",
            BadCavityWarning,
            stacklevel=2,
        )
    return lam, 4 * lam**2 / cp.kappa_a
