"""Steady-state observables of a diagonal Dicke state.

All quantities are weighted sums over the aggregate populations
``p(J, M)``.  Because the states carry no coherences between different M,
``<J_x> = <J_y> = 0`` and ``<J_x^2 + J_y^2> = <J^2 - J_z^2>``; the squeezing
witness reduces accordingly.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .dicke import DiagonalState, ladder_coefficients
from .errors import InvalidArgument, UndefinedCorrelation

__all__ = [
    "ObservableSet",
    "LadderDistribution",
    "ladder_moment",
    "inversion_moments",
    "atom_atom_correlation",
    "spin_squeezing",
    "g2",
    "ladder_distribution",
    "observables",
]

# moments below this are treated as exactly zero when forming ratios
_ZERO_MOMENT = 1e-300


@dataclass(frozen=True)
class ObservableSet:
    """Every reported steady-state quantity for one state.

    ``g2_1`` / ``g2_2`` are ``None`` where the correlation is undefined
    (vanishing denominator).
    """

    n_atoms: int
    jpjm: float
    jp2jm2: float
    jp4jm4: float
    jz: float
    jz2: float
    jsq: float
    sum_pop: float
    r_f: float
    sigma_z: float
    xi2: float
    g2_1: Optional[float]
    g2_2: Optional[float]

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class LadderDistribution:
    """Populations keyed by ``(J, M)``; suitable for heat-map export."""

    entries: dict

    def __post_init__(self):
        vals = np.fromiter(self.entries.values(), dtype=float)
        if vals.size and (vals.min() < -1e-12 or abs(vals.sum() - 1) > 1e-10):
            raise InvalidArgument("ladder distribution must be nonnegative and normalised")

    def triples(self):
        """``(J, M, probability)`` tuples, J and M descending."""
        return [(J, M, p) for (J, M), p in self.entries.items()]

    def grid(self):
        """Dense ``(J, M)`` array with NaN outside ``|M| <= J``.

        Returns ``(j_values, m_values, P)`` with ``P[a, b]`` the probability of
        ``(j_values[a], m_values[b])``.
        """
        js = sorted({J for J, _ in self.entries}, reverse=True)
        ms = sorted({M for _, M in self.entries}, reverse=True)
        jpos = {J: a for a, J in enumerate(js)}
        mpos = {M: b for b, M in enumerate(ms)}
        P = np.full((len(js), len(ms)), np.nan)
        for (J, M), p in self.entries.items():
            P[jpos[J], mpos[M]] = p
        return np.array(js), np.array(ms), P


def ladder_moment(state: DiagonalState, k) -> float:
    """``<J_+^k J_-^k>`` of a diagonal state, for ``k`` in {1, 2, 4}."""
    if k not in (1, 2, 4):
        raise InvalidArgument(f"k must be 1, 2 or 4, got {k!r}")
    b = state.basis
    return float(state.p @ ladder_coefficients(b.j, b.m, k) ** 2)


def inversion_moments(state: DiagonalState):
    """Return ``(<J_z>, <J_z^2>, <J^2>)``."""
    b = state.basis
    p = state.p
    return float(p @ b.m), float(p @ b.m**2), float(p @ (b.j * (b.j + 1)))


def atom_atom_correlation(state: DiagonalState) -> float:
    """``R_f = (<J_+ J_-> - sum_n <sigma_n^+ sigma_n>) / N``.

    Positive values mean correlations enhance the collective occupation
    (superradiance), negative values mean suppression (subradiance).
    """
    N = state.basis.n_atoms
    jz, _, _ = inversion_moments(state)
    return (ladder_moment(state, 1) - (N / 2 + jz)) / N


def spin_squeezing(state: DiagonalState) -> float:
    """Squeezing witness ``xi^2 = 2 * sum_j Var(J_j) / N`` of a diagonal state."""
    N = state.basis.n_atoms
    jz, _, jsq = inversion_moments(state)
    return 2 * (jsq - jz**2) / N


def g2(state: DiagonalState, order) -> float:
    """Equal-time second-order correlation of the emitted field.

    ``order=1`` (field ~ J_-):   ``<J_+^2 J_-^2> / <J_+ J_->^2``

    ``order=2`` (field ~ J_-^2): ``<J_+^4 J_-^4> / <J_+^2 J_-^2>^2``

    Raises :class:`UndefinedCorrelation` if the denominator vanishes.  A
    vanishing numerator with a positive denominator (e.g. order 2 with N < 4)
    gives 0.
    """
    if order == 1:
        num, den = ladder_moment(state, 2), ladder_moment(state, 1)
    elif order == 2:
        num, den = ladder_moment(state, 4), ladder_moment(state, 2)
    else:
        raise InvalidArgument(f"order must be 1 or 2, got {order!r}")
    if den <= _ZERO_MOMENT:
        raise UndefinedCorrelation(f"g2 of order {order} has a vanishing denominator")
    return num / den**2


def _g2_or_none(state, order):
    try:
        return g2(state, order)
    except UndefinedCorrelation:
        return None


def ladder_distribution(state: DiagonalState) -> LadderDistribution:
    b = state.basis
    return LadderDistribution(
        {(J, M): float(p) for J, M, p in zip(b.j.tolist(), b.m.tolist(), state.p)}
    )


def observables(state: DiagonalState) -> ObservableSet:
    """Compute the full :class:`ObservableSet` of ``state``."""
    N = state.basis.n_atoms
    jz, jz2, jsq = inversion_moments(state)
    jpjm = ladder_moment(state, 1)
    sum_pop = N / 2 + jz
    return ObservableSet(
        n_atoms=N,
        jpjm=jpjm,
        jp2jm2=ladder_moment(state, 2),
        jp4jm4=ladder_moment(state, 4),
        jz=jz,
        jz2=jz2,
        jsq=jsq,
        sum_pop=sum_pop,
        r_f=(jpjm - sum_pop) / N,
        sigma_z=2 * jz / N,
        xi2=2 * (jsq - jz**2) / N,
        g2_1=_g2_or_none(state, 1),
        g2_2=_g2_or_none(state, 2),
    )
