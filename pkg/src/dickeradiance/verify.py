"""Cross-checks of the reduced solver against the brute-force oracle."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .dicke import ModelParams, build_basis, build_generator, steady_state
from .observables import observables
from .oracle import (
    full_atomic_liouvillian,
    full_cavity_liouvillian,
    full_observables,
    full_steady_state,
    project_to_dicke,
)

__all__ = [
    "CheckResult",
    "ORACLE_RATIOS",
    "ORACLE_CHANNELS",
    "ORACLE_SCALES",
    "oracle_grid",
    "oracle_equivalence",
    "adiabatic_elimination",
    "run_all",
]

ORACLE_RATIOS = (0.1, 1.0, 10.0)
ORACLE_CHANNELS = ("gamma_1", "gamma_2", "both")
ORACLE_SCALES = (0.5, 2.0)

POPULATION_TOL = 1e-8
COHERENCE_TOL = 1e-8


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}  {self.detail}"


def oracle_grid():
    """``(gamma_p, gamma_1, gamma_2)`` triples: pump ratio x channel x decay scale."""
    out = []
    for ratio, channel, scale in itertools.product(ORACLE_RATIOS, ORACLE_CHANNELS, ORACLE_SCALES):
        g1 = scale if channel in ("gamma_1", "both") else 0.0
        g2 = scale if channel in ("gamma_2", "both") else 0.0
        out.append((ratio * scale, g1, g2))
    return out


@lru_cache(maxsize=256)
def _full_solution(N, gp, g1, g2):
    return full_steady_state(full_atomic_liouvillian(N, gp, g1, g2))


def oracle_equivalence(n_values=range(2, 7), grid=None):
    """Compare reduced and full steady states population by population."""
    grid = oracle_grid() if grid is None else grid
    results = []
    for N in n_values:
        basis = build_basis(N)
        worst_pop = worst_coh = 0.0
        for gp, g1, g2 in grid:
            reduced = steady_state(build_generator(basis, ModelParams(N, gp, g1, g2)))
            full = _full_solution(N, gp, g1, g2)
            projected, coherence = project_to_dicke(full, basis)
            worst_pop = max(worst_pop, float(np.abs(projected.p - reduced.p).max()))
            worst_coh = max(worst_coh, coherence)
        ok = worst_pop <= POPULATION_TOL and worst_coh <= COHERENCE_TOL
        results.append(
            CheckResult(
                f"oracle-equivalence N={N}",
                ok,
                f"max|dp|={worst_pop:.2e} max coherence={worst_coh:.2e} ({len(grid)} points)",
            )
        )
    return results


def _close(a, b, rel, floor):
    return abs(a - b) <= max(rel * abs(b), floor)


def adiabatic_elimination(n_atoms=2, coupling_ratio=0.05, n_max=5, pump_ratio=0.5, rel_tol=0.05):
    """Atom-cavity steady state vs. the collective model with ``gamma_2 = 4 lam^2 / kappa_a``.

    ``kappa_a = 1``; ``lam = coupling_ratio``; ``gamma_p = pump_ratio * gamma_2``.
    Observables that vanish identically in the reference (e.g. ``<J_+^4 J_-^4>``
    for N < 4) are compared with an absolute floor of 1e-9.
    """
    kappa = 1.0
    lam = coupling_ratio * kappa
    gamma_2 = 4 * lam**2 / kappa
    gamma_p = pump_ratio * gamma_2
    cav = full_observables(full_steady_state(full_cavity_liouvillian(n_atoms, n_max, lam, kappa, gamma_p)))
    ref = full_observables(full_steady_state(full_atomic_liouvillian(n_atoms, gamma_p, 0.0, gamma_2)))
    worst_name, worst = None, 0.0
    ok = True
    for key, b in ref.as_dict().items():
        a = getattr(cav, key)
        if key == "n_atoms" or b is None:
            ok &= a is None or key == "n_atoms"
            continue
        if not _close(a, b, rel_tol, 1e-9):
            ok = False
        dev = abs(a - b) / abs(b) if abs(b) > 1e-9 else abs(a - b)
        if dev > worst:
            worst_name, worst = key, dev
    return CheckResult(
        f"adiabatic-elimination N={n_atoms} lam/kappa={coupling_ratio}",
        ok,
        f"worst deviation {worst:.3%} ({worst_name})",
    )


def reduced_vs_full_observables(n_values=range(2, 7), grid=None, tol=1e-8):
    """Observable-level agreement between the diagonal formulas and dense algebra."""
    grid = oracle_grid() if grid is None else grid
    results = []
    for N in n_values:
        basis = build_basis(N)
        worst = 0.0
        for gp, g1, g2 in grid:
            red = observables(steady_state(build_generator(basis, ModelParams(N, gp, g1, g2)))).as_dict()
            full = full_observables(_full_solution(N, gp, g1, g2)).as_dict()
            for key, b in full.items():
                a = red[key]
                if a is None or b is None:
                    worst = max(worst, 0.0 if a is b else np.inf)
                else:
                    worst = max(worst, abs(a - b) / max(1.0, abs(b)))
        results.append(CheckResult(f"observables N={N}", worst <= tol, f"max deviation {worst:.2e}"))
    return results


def run_all():
    """Every check run by ``dickeradiance verify``."""
    results = oracle_equivalence()
    results += reduced_vs_full_observables()
    results.append(adiabatic_elimination(coupling_ratio=0.02))
    results.append(adiabatic_elimination(coupling_ratio=0.05))
    return results
