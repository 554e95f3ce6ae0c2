"""Brute-force Liouvillians on the full product Hilbert space.

These are reference implementations for small ensembles: the collective
master equation on all ``2**N`` atomic states, and the atom-cavity model
whose bad-cavity limit produces two-atom decay.  Superoperators act on
column-stacked density matrices, ``vec(A rho B) = (B^T kron A) vec(rho)``.

Single-atom basis ordering is ``(|e>, |g>)``; in the atom-cavity model the
cavity is the leftmost tensor factor.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .dicke import DiagonalState, DickeBasis
from .errors import InvalidArgument, NonUniqueSteadyState, NumericalFailure
from .observables import ObservableSet

__all__ = [
    "MAX_ORACLE_ATOMS",
    "MAX_CAVITY_ATOMS",
    "FullState",
    "FullLiouvillian",
    "CutoffWarning",
    "collective_operators",
    "full_atomic_liouvillian",
    "full_cavity_liouvillian",
    "full_steady_state",
    "project_to_dicke",
    "full_observables",
    "trace_out_cavity",
    "swap_atoms",
]

MAX_ORACLE_ATOMS = 6
MAX_CAVITY_ATOMS = 4

_SIGMA_MINUS = sp.csr_matrix(np.array([[0.0, 0.0], [1.0, 0.0]]))  # |g><e|


class CutoffWarning(UserWarning):
    """The cavity Fock cutoff carries non-negligible steady-state population."""


@dataclass(frozen=True)
class FullState:
    """Dense density matrix on the atomic (or atom-cavity) product space."""

    rho: np.ndarray = field(repr=False)
    n_atoms: int
    n_max: Optional[int] = None

    def __post_init__(self):
        d = 2**self.n_atoms * (1 if self.n_max is None else self.n_max + 1)
        if self.rho.shape != (d, d):
            raise InvalidArgument(f"rho has shape {self.rho.shape}, expected ({d}, {d})")
        if np.abs(self.rho - self.rho.conj().T).max() > 1e-10:
            raise InvalidArgument("rho is not Hermitian")
        if abs(np.trace(self.rho) - 1) > 1e-10:
            raise InvalidArgument(f"rho has trace {np.trace(self.rho)}")
        if np.linalg.eigvalsh(self.rho).min() < -1e-8:
            raise InvalidArgument("rho is not positive semidefinite")

    @property
    def dim(self) -> int:
        return self.rho.shape[0]


@dataclass(frozen=True)
class FullLiouvillian:
    """Superoperator ``L`` with ``d vec(rho)/dt = L vec(rho)``."""

    dim: int
    matrix: sp.csr_matrix = field(repr=False)
    model: str
    n_atoms: int
    gamma_p: float
    n_max: Optional[int] = None

    def apply(self, rho: np.ndarray) -> np.ndarray:
        v = self.matrix @ rho.reshape(-1, order="F")
        return v.reshape(self.dim, self.dim, order="F")


def _local(op, n, N):
    """``op`` acting on atom ``n`` of ``N``."""
    return sp.kron(sp.kron(sp.identity(2**n), op), sp.identity(2 ** (N - n - 1)), format="csr")


@lru_cache(maxsize=None)
def _atom_ops(N):
    lowering = [_local(_SIGMA_MINUS, n, N) for n in range(N)]
    jm = sum(lowering[1:], lowering[0]).tocsr()
    return tuple(lowering), jm


def collective_operators(n_atoms):
    """Dense ``dict`` of ``J_-, J_+, J_x, J_y, J_z, J^2`` on ``2**n_atoms`` states."""
    _, jm = _atom_ops(n_atoms)
    jm = jm.toarray().astype(complex)
    jp = jm.conj().T
    jx = (jp + jm) / 2
    jy = (jp - jm) / 2j
    jz = (jp @ jm - jm @ jp) / 2
    return {"jm": jm, "jp": jp, "jx": jx, "jy": jy, "jz": jz, "jsq": jx @ jx + jy @ jy + jz @ jz}


def _dissipator(op, rate):
    """Superoperator of ``rate * (O rho O^+ - {O^+ O, rho}/2)``."""
    op = sp.csr_matrix(op)
    d = op.shape[0]
    eye = sp.identity(d, format="csr")
    ada = (op.conj().T @ op).tocsr()
    sup = sp.kron(op.conj(), op) - 0.5 * sp.kron(eye, ada) - 0.5 * sp.kron(ada.T, eye)
    return rate * sup


def _hamiltonian(h):
    d = h.shape[0]
    eye = sp.identity(d, format="csr")
    return -1j * (sp.kron(eye, h) - sp.kron(h.T, eye))


def full_atomic_liouvillian(n_atoms, gamma_p, gamma_1=0.0, gamma_2=0.0) -> FullLiouvillian:
    """``gamma_p sum_n L[sigma_n^+] + gamma_1 L[J_-] + gamma_2 L[J_-^2]`` on ``2**N`` states."""
    if not 1 <= n_atoms <= MAX_ORACLE_ATOMS:
        raise InvalidArgument(f"oracle supports 1 <= N <= {MAX_ORACLE_ATOMS}, got {n_atoms}")
    if min(gamma_p, gamma_1, gamma_2) < 0:
        raise InvalidArgument("rates must be nonnegative")
    lowering, jm = _atom_ops(n_atoms)
    d = 2**n_atoms
    L = sp.csr_matrix((d * d, d * d), dtype=complex)
    if gamma_p:
        for s in lowering:
            L = L + _dissipator(s.T, gamma_p)
    if gamma_1:
        L = L + _dissipator(jm, gamma_1)
    if gamma_2:
        L = L + _dissipator(jm @ jm, gamma_2)
    return FullLiouvillian(d, sp.csr_matrix(L), "atomic", n_atoms, gamma_p)


def full_cavity_liouvillian(n_atoms, n_max, lam, kappa_a, gamma_p) -> FullLiouvillian:
    """Atom-cavity model ``-i[H, rho] + gamma_p sum_n L[sigma_n^+] + kappa_a L[a]``.

    ``H = lam (a^+ J_-^2 + a J_+^2)`` in the frame where the cavity is resonant
    with two-atom transitions.  The cavity is truncated at ``n_max`` photons.
    """
    if not 1 <= n_atoms <= MAX_CAVITY_ATOMS:
        raise InvalidArgument(f"cavity oracle supports 1 <= N <= {MAX_CAVITY_ATOMS}, got {n_atoms}")
    if n_max < 2:
        raise InvalidArgument(f"n_max must be at least 2, got {n_max}")
    if lam < 0 or kappa_a <= 0 or gamma_p < 0:
        raise InvalidArgument("need lam >= 0, kappa_a > 0, gamma_p >= 0")
    lowering, jm = _atom_ops(n_atoms)
    nf = n_max + 1
    a = sp.diags(np.sqrt(np.arange(1, nf)), 1, format="csr")
    ia = sp.identity(2**n_atoms, format="csr")
    ic = sp.identity(nf, format="csr")
    jm2 = jm @ jm
    H = lam * (sp.kron(a.T, jm2) + sp.kron(a, jm2.T))
    L = _hamiltonian(sp.csr_matrix(H, dtype=complex)) + _dissipator(sp.kron(a, ia), kappa_a)
    for s in lowering:
        L = L + _dissipator(sp.kron(ic, s.T), gamma_p)
    d = nf * 2**n_atoms
    return FullLiouvillian(d, sp.csr_matrix(L), "atom-cavity", n_atoms, gamma_p, n_max)


def full_steady_state(L: FullLiouvillian) -> FullState:
    """Stationary density matrix of ``L`` (trace-normalised direct solve)."""
    if L.gamma_p <= 0:
        raise NonUniqueSteadyState("without pumping the steady state is not unique")
    d = L.dim
    A = L.matrix.tolil(copy=True)
    # replace the first balance equation by the trace constraint
    A[0, :] = 0
    diag_pos = np.arange(d) * (d + 1)
    A[0, diag_pos] = 1.0
    b = np.zeros(d * d, dtype=complex)
    b[0] = 1.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", spla.MatrixRankWarning)
        try:
            x = spla.spsolve(A.tocsc(), b)
        except spla.MatrixRankWarning as exc:
            raise NonUniqueSteadyState("Liouvillian null space is degenerate") from exc
    if not np.all(np.isfinite(x)):
        raise NonUniqueSteadyState("Liouvillian null space is degenerate")
    rho = x.reshape(d, d, order="F")
    rho = (rho + rho.conj().T) / 2
    rho /= np.trace(rho).real
    res = np.abs(L.apply(rho)).max()
    scale = max(1.0, abs(L.matrix).max())
    if res > 1e-10 * scale:
        raise NumericalFailure(f"oracle steady-state residual {res:.3e}", res)
    state = FullState(rho, L.n_atoms, L.n_max)
    if L.n_max is not None:
        top = np.real(np.diag(_cavity_marginal(state)))[-2:]
        if top.max() > 1e-6:
            warnings.warn(
                f"top Fock populations {top} exceed 1e-6; raise n_max", CutoffWarning, stacklevel=2
            )
    return state


def _cavity_marginal(fs: FullState):
    nf = fs.n_max + 1
    da = 2**fs.n_atoms
    return np.einsum("iaja->ij", fs.rho.reshape(nf, da, nf, da))


def trace_out_cavity(fs: FullState) -> FullState:
    """Reduced atomic state of an atom-cavity :class:`FullState`."""
    if fs.n_max is None:
        return fs
    nf = fs.n_max + 1
    da = 2**fs.n_atoms
    rho = np.einsum("iaib->ab", fs.rho.reshape(nf, da, nf, da))
    return FullState(rho, fs.n_atoms)


def swap_atoms(fs: FullState, i, k) -> np.ndarray:
    """``P rho P`` for the permutation exchanging atoms ``i`` and ``k``."""
    atomic = trace_out_cavity(fs)
    N = atomic.n_atoms
    axes = list(range(N))
    axes[i], axes[k] = axes[k], axes[i]
    t = atomic.rho.reshape((2,) * (2 * N))
    t = t.transpose(axes + [N + a for a in axes])
    return t.reshape(2**N, 2**N)


@lru_cache(maxsize=None)
def _dicke_eigenbasis(N):
    """Orthonormal common eigenbasis of ``J^2`` and ``J_z`` with ``(J, M)`` labels."""
    ops = collective_operators(N)
    # J(J+1) levels are >= 2 apart; a small J_z shift splits M without crossing
    alpha = 0.5 / (N + 1)
    w, U = np.linalg.eigh((ops["jsq"] + alpha * ops["jz"]).real)
    jz_vals = np.real(np.einsum("ia,ij,ja->a", U, ops["jz"].real, U))
    two_m = np.rint(2 * jz_vals).astype(int)
    jj = w - alpha * two_m / 2
    two_j = np.rint(np.sqrt(4 * jj + 1) - 1).astype(int)
    return U, two_j, two_m


def project_to_dicke(fs: FullState, basis: DickeBasis):
    """Aggregate ``(J, M)`` populations of ``fs`` and its largest Dicke-basis coherence.

    Returns ``(DiagonalState, coherence_residual)``.  Atom-cavity states are
    traced over the cavity first.
    """
    fs = trace_out_cavity(fs)
    if fs.n_atoms != basis.n_atoms:
        raise InvalidArgument(f"state has N={fs.n_atoms}, basis has N={basis.n_atoms}")
    U, two_j, two_m = _dicke_eigenbasis(fs.n_atoms)
    r = U.T @ fs.rho @ U
    pops = np.real(np.diag(r))
    p = np.zeros(basis.size)
    np.add.at(p, basis.indices(two_j / 2, two_m / 2), pops)
    off = r - np.diag(np.diag(r))
    residual = float(np.abs(off).max()) if off.size else 0.0
    p = np.clip(p, 0.0, None)
    return DiagonalState(basis, p / p.sum()), residual


def _expect(op, rho):
    return complex(np.trace(op @ rho))


def full_observables(fs: FullState) -> ObservableSet:
    """Observables by exact operator algebra, squeezing from all three spin components."""
    fs = trace_out_cavity(fs)
    N = fs.n_atoms
    rho = fs.rho
    ops = collective_operators(N)
    jm, jp = ops["jm"], ops["jp"]
    jm2 = jm @ jm
    jp2 = jp @ jp
    jpjm = _expect(jp @ jm, rho).real
    jp2jm2 = _expect(jp2 @ jm2, rho).real
    jp4jm4 = _expect(jp2 @ jp2 @ jm2 @ jm2, rho).real
    jz = _expect(ops["jz"], rho).real
    jz2 = _expect(ops["jz"] @ ops["jz"], rho).real
    jsq = _expect(ops["jsq"], rho).real
    var = 0.0
    for key in ("jx", "jy", "jz"):
        o = ops[key]
        var += _expect(o @ o, rho).real - _expect(o, rho).real ** 2
    sum_pop = N / 2 + jz
    tiny = 1e-300
    return ObservableSet(
        n_atoms=N,
        jpjm=jpjm,
        jp2jm2=jp2jm2,
        jp4jm4=jp4jm4,
        jz=jz,
        jz2=jz2,
        jsq=jsq,
        sum_pop=sum_pop,
        r_f=(jpjm - sum_pop) / N,
        sigma_z=2 * jz / N,
        xi2=2 * var / N,
        g2_1=jp2jm2 / jpjm**2 if jpjm > tiny else None,
        g2_2=jp4jm4 / jp2jm2**2 if jp2jm2 > tiny else None,
    )
