import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dickeradiance.dicke import (
    BadCavityWarning,
    CircuitParams,
    DiagonalState,
    ModelParams,
    build_basis,
    build_generator,
    degeneracy,
    effective_rates,
    evolve,
    ladder_coefficient,
    ladder_coefficients,
    residual,
    steady_state,
)
from dickeradiance.errors import InvalidArgument, NonUniqueSteadyState

from conftest import local_lowering, product_space_spin, spin_j_lowering


# --- basis and degeneracies -------------------------------------------------


def test_basis_n2():
    b = build_basis(2)
    assert b.sectors == ((1.0, 1), (0.0, 1))
    assert b.size == 4
    assert b.labels() == [(1.0, 1.0), (1.0, 0.0), (1.0, -1.0), (0.0, 0.0)]


def test_basis_n6_matches_brute_force_coupling():
    # count J(J+1) eigenvalue multiplicities of J^2 on the 64-dim product space
    _, _, jsq = product_space_spin(6)
    w = np.linalg.eigvalsh(jsq)
    two_j = np.rint(np.sqrt(4 * w + 1) - 1).astype(int)
    counts = {t / 2: int(np.sum(two_j == t)) // (t + 1) for t in set(two_j.tolist())}
    b = build_basis(6)
    assert dict(b.sectors) == counts == {3.0: 1, 2.0: 5, 1.0: 9, 0.0: 5}
    assert sum(d * (2 * J + 1) for J, d in b.sectors) == 64


@pytest.mark.parametrize("N", range(1, 11))
def test_degeneracy_matches_excitation_counting(N):
    # d_J = #states with M = J minus #states with M = J + 1
    n_with_m = lambda M: math.comb(N, int(N / 2 + M)) if abs(M) <= N / 2 else 0
    for J, d in build_basis(N).sectors:
        assert d == n_with_m(J) - n_with_m(J + 1)


@pytest.mark.parametrize("N", range(1, 101))
def test_sum_rule_and_factorial_formula(N):
    b = build_basis(N)
    assert sum(d * int(2 * J + 1) for J, d in b.sectors) == 2**N
    for J, d in b.sectors:
        a, c = int(N / 2 + J + 1), int(N / 2 - J)
        assert d * math.factorial(a) * math.factorial(c) == int(2 * J + 1) * math.factorial(N)
    assert b.sectors[0] == (N / 2, 1)
    assert [J for J, _ in b.sectors] == sorted((J for J, _ in b.sectors), reverse=True)
    assert b.sectors[-1][0] == (0.0 if N % 2 == 0 else 0.5)


def test_basis_n100_size():
    b = build_basis(100)
    assert b.size == 2601 == 51**2


def test_index_is_bijection():
    b = build_basis(7)
    idx = [b.index(J, M) for J, M in b.labels()]
    assert idx == list(range(b.size))
    np.testing.assert_array_equal(b.indices(b.j, b.m), np.arange(b.size))


@pytest.mark.parametrize("N", [0, -3, 1001, 2.5])
def test_basis_rejects_bad_n(N):
    with pytest.raises(InvalidArgument):
        build_basis(N)


def test_degeneracy_examples():
    assert degeneracy(6, 2) == 5
    assert degeneracy(2, 0) == 1
    for N in (1, 4, 9, 100):
        assert degeneracy(N, N / 2) == 1


@pytest.mark.parametrize("N,J", [(6, 0.5), (5, 0), (4, 3), (4, -1), (3, 0.25)])
def test_degeneracy_rejects_inadmissible(N, J):
    with pytest.raises(InvalidArgument):
        degeneracy(N, J)


# --- ladder coefficients ----------------------------------------------------


def test_ladder_coefficient_examples():
    assert ladder_coefficient(1, 1, 1) == pytest.approx(math.sqrt(2), rel=1e-15)
    assert ladder_coefficient(1, 1, 2) == pytest.approx(2.0, rel=1e-15)
    assert ladder_coefficient(0.5, 0.5, 2) == 0.0
    for J in (0.5, 1, 3.5, 50):
        assert ladder_coefficient(J, -J, 1) == 0.0


@pytest.mark.parametrize("J", [0.5, 1, 1.5, 2, 3.5, 6])
@pytest.mark.parametrize("k", [1, 2, 4])
def test_ladder_coefficient_matches_matrix_power(J, k):
    ms, jm = spin_j_lowering(J)
    jmk = np.linalg.matrix_power(jm, k)
    for a, M in enumerate(ms):
        expected = jmk[a + k, a] if a + k < len(ms) else 0.0
        assert ladder_coefficient(J, M, k) == pytest.approx(expected, rel=1e-12, abs=1e-12)


def test_ladder_coefficient_rejects_k3():
    with pytest.raises(InvalidArgument):
        ladder_coefficient(2, 1, 3)


# --- generator ----------------------------------------------------------------


def test_generator_two_atom_decay_only():
    b = build_basis(2)
    G = build_generator(b, ModelParams(2, 0.0, 0.0, 1.0)).toarray()
    i, f = b.index(1, 1), b.index(1, -1)
    assert -G[i, i] == pytest.approx(4.0)
    assert G[f, i] == pytest.approx(4.0)
    assert np.count_nonzero(G[:, i]) == 2


def test_generator_pump_only_outflow():
    b = build_basis(2)
    G = build_generator(b, ModelParams(2, 1.0)).toarray()
    i = b.index(1, -1)
    assert -G[i, i] == pytest.approx(2.0)


def _pump_rates_brute_force(N):
    """Aggregate pump rates between (J, M) sectors from product-space projectors."""
    jm, jz, jsq = product_space_spin(N)
    w, U = np.linalg.eigh(jsq)
    two_j = np.rint(np.sqrt(4 * w + 1) - 1).astype(int)
    mz = np.rint(2 * np.diag(jz)).astype(int)
    proj = {}
    for tj in set(two_j.tolist()):
        PJ = U[:, two_j == tj] @ U[:, two_j == tj].T
        for tm in range(-tj, tj + 1, 2):
            PM = np.diag((mz == tm).astype(float))
            proj[(tj / 2, tm / 2)] = PJ @ PM
    low = local_lowering(N)
    rates = {}
    for (J, M), P in proj.items():
        dJ = np.trace(P)
        for (J2, M2), Q in proj.items():
            if M2 != M + 1:
                continue
            r = sum(np.trace(Q @ s.T @ P @ s) for s in low) / dJ
            if r > 1e-12:
                rates[(J, M, J2, M2)] = r
    return rates


@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_pump_coefficients_match_product_space(N):
    b = build_basis(N)
    G = build_generator(b, ModelParams(N, 1.0)).toarray()
    expected = _pump_rates_brute_force(N)
    got = {}
    for (J, M), i in zip(b.labels(), range(b.size)):
        for (J2, M2), f in zip(b.labels(), range(b.size)):
            if f != i and G[f, i] > 0:
                got[(J, M, J2, M2)] = G[f, i]
    assert got.keys() == expected.keys()
    for key, r in expected.items():
        assert got[key] == pytest.approx(r, rel=1e-10)


rates = st.floats(min_value=0.0, max_value=50.0, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(N=st.integers(1, 30), gp=rates, g1=rates, g2=rates)
def test_generator_is_stochastic(N, gp, g1, g2):
    b = build_basis(N)
    gen = build_generator(b, ModelParams(N, gp, g1, g2))
    G = gen.toarray()
    off = G - np.diag(np.diag(G))
    assert off.min() >= 0
    scale = max(1.0, np.abs(G).max())
    assert np.abs(G.sum(axis=0)).max() <= 1e-12 * scale
    expected_out = (
        gp * (N / 2 - b.m)
        + g1 * ladder_coefficients(b.j, b.m, 1) ** 2
        + g2 * ladder_coefficients(b.j, b.m, 2) ** 2
    )
    np.testing.assert_allclose(-np.diag(G), expected_out, rtol=1e-12, atol=1e-12 * scale)


def test_generator_deterministic():
    b = build_basis(40)
    p = ModelParams(40, 3.7, 0.2, 1.1)
    A, B = build_generator(b, p).matrix, build_generator(b, p).matrix
    assert np.array_equal(A.indptr, B.indptr)
    assert np.array_equal(A.indices, B.indices)
    assert A.data.tobytes() == B.data.tobytes()


def test_generator_rejects_mismatched_n():
    with pytest.raises(InvalidArgument):
        build_generator(build_basis(4), ModelParams(5, 1.0))


def test_model_params_rejects_negative_rates():
    with pytest.raises(InvalidArgument):
        ModelParams(4, -1.0)
    with pytest.raises(InvalidArgument):
        ModelParams(4, 1.0, gamma_2=float("nan"))


# --- steady state -------------------------------------------------------------


def test_steady_state_single_atom():
    s = steady_state(build_generator(build_basis(1), ModelParams(1, 0.3, 0.0, 5.0)))
    assert s.probability(0.5, 0.5) == pytest.approx(1.0, abs=1e-14)


def test_steady_state_requires_pumping():
    with pytest.raises(NonUniqueSteadyState):
        steady_state(build_generator(build_basis(4), ModelParams(4, 0.0, 0.0, 1.0)))


@settings(max_examples=40, deadline=None)
@given(N=st.integers(1, 60), gp=st.floats(1e-3, 1e3), g1=st.floats(0, 10), g2=st.floats(0, 10))
def test_steady_state_contract(N, gp, g1, g2):
    gen = build_generator(build_basis(N), ModelParams(N, gp, g1, g2))
    s = steady_state(gen)
    assert s.p.min() >= 0
    assert s.p.sum() == pytest.approx(1.0, abs=1e-12)
    assert residual(gen, s) <= 1e-10


def test_steady_state_strong_pumping_n100():
    b = build_basis(100)
    s = steady_state(build_generator(b, ModelParams(100, 1e8, 0.0, 1.0)))
    assert int(np.argmax(s.p)) == b.index(50, 50)
    assert s.probability(50, 50) > 0.99
    assert 2 * float(s.p @ b.m) / 100 > 0.999


# --- time evolution -----------------------------------------------------------


def test_evolve_zero_time_is_identity():
    b = build_basis(4)
    gen = build_generator(b, ModelParams(4, 1.0, 0.0, 1.0))
    init = DiagonalState.ground(b)
    assert evolve(gen, init, 0.0, 0.1) is init


def test_evolve_converges_to_steady_state():
    b = build_basis(4)
    gen = build_generator(b, ModelParams(4, 1.0, 0.0, 1.0))
    final = evolve(gen, DiagonalState.ground(b), 50.0, 0.5)
    np.testing.assert_allclose(final.p, steady_state(gen).p, atol=1e-6)


def test_evolve_conserves_probability():
    b = build_basis(10)
    gen = build_generator(b, ModelParams(10, 0.7, 0.4, 0.9))
    s = DiagonalState.ground(b)
    for t in (0.01, 0.3, 2.0):
        p = evolve(gen, s, t, t / 10).p
        assert p.sum() == pytest.approx(1.0, abs=1e-10)
        assert p.min() >= 0


def test_evolve_rejects_negative_time():
    b = build_basis(2)
    gen = build_generator(b, ModelParams(2, 1.0))
    with pytest.raises(InvalidArgument):
        evolve(gen, DiagonalState.ground(b), -1.0)


def test_diagonal_state_validation():
    b = build_basis(2)
    with pytest.raises(InvalidArgument):
        DiagonalState(b, np.array([0.5, 0.5, 0.5, -0.5]))
    with pytest.raises(InvalidArgument):
        DiagonalState(b, np.array([0.5, 0.5, 0.5, 0.5]))


# --- circuit conversion -------------------------------------------------------

TWO_PI = 2 * np.pi


def reference_circuit(**kw):
    base = dict(
        lambda_ab=TWO_PI * 20e6,
        lambda_bgamma=TWO_PI * 20e6,
        delta=TWO_PI * 200e6,
        kappa_a=TWO_PI * 1.6e6,
        kappa_b=TWO_PI * 10e3,
        n_atoms=100,
    )
    base.update(kw)
    return CircuitParams(**base)


def test_effective_rates_reference_values():
    lam, g2 = effective_rates(reference_circuit())
    assert lam / TWO_PI == pytest.approx(2e3, rel=1e-12)
    assert g2 / TWO_PI == pytest.approx(10.0, rel=1e-12)


def test_effective_rates_homogeneity():
    lam, g2 = effective_rates(reference_circuit())
    lam2, g22 = effective_rates(reference_circuit(lambda_ab=TWO_PI * 40e6))
    assert lam2 == pytest.approx(2 * lam, rel=1e-14)
    assert g22 == pytest.approx(4 * g2, rel=1e-14)


def test_effective_rates_warns_outside_bad_cavity():
    cp = reference_circuit(kappa_a=TWO_PI * 100e3)
    assert not cp.bad_cavity
    with pytest.warns(BadCavityWarning):
        effective_rates(cp)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        effective_rates(reference_circuit())


@pytest.mark.parametrize("field", ["lambda_ab", "delta", "kappa_a", "kappa_b"])
def test_circuit_params_reject_nonpositive(field):
    with pytest.raises(InvalidArgument):
        reference_circuit(**{field: 0.0})
