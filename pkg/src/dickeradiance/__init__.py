"""Steady-state collective radiance of incoherently pumped atomic ensembles.

The ensemble is described in the permutation-invariant Dicke basis with local
incoherent pumping and collective one-atom (``L[J_-]``) or two-atom
(``L[J_-^2]``) decay.

Submodules
----------
dicke        Dicke basis, rate generator, steady state and time evolution
observables  Collective moments, atom-atom correlation, squeezing, g2
meanfield    Cumulant equations for single-atom collective decay
oracle       Full Hilbert-space Liouvillians for small ensembles
verify       Reduced-vs-oracle cross-checks
cli          Command-line interface
"""

from .dicke import (
    CircuitParams,
    DiagonalState,
    DickeBasis,
    ModelParams,
    RateGenerator,
    build_basis,
    build_generator,
    degeneracy,
    effective_rates,
    evolve,
    ladder_coefficient,
    steady_state,
)
from .errors import (
    InvalidArgument,
    NonUniqueSteadyState,
    NumericalFailure,
    ParseError,
    UndefinedCorrelation,
)
from .observables import (
    ObservableSet,
    atom_atom_correlation,
    g2,
    ladder_distribution,
    ladder_moment,
    observables,
    spin_squeezing,
)

__version__ = "0.1.0"


def solve(n_atoms, gamma_p, gamma_1=0.0, gamma_2=0.0) -> DiagonalState:
    """Steady state for the given rates (shorthand for basis + generator + solve)."""
    params = ModelParams(n_atoms, gamma_p, gamma_1, gamma_2)
    return steady_state(build_generator(build_basis(n_atoms), params))
