import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qavcap.core import (
    JammerChannel,
    QuantumChannel,
    adjoint_on_subsystem,
    apply_to_subsystem,
    apply_via_choi,
    as_density_matrix,
    as_pure_state,
    choi_from_kraus,
    complementary_channel,
    compose,
    compose_perm,
    kraus_from_choi,
    kron_all,
    partial_trace,
    permutation_matrix,
    permute_subsystems,
    purify,
    random_channel,
    random_density_matrix,
    symmetric_projector,
    tensor_channels,
    unitary_channel,
)
from qavcap.errors import BudgetError, DimensionError, InvariantError

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_density_matrix_validation():
    as_density_matrix(np.eye(3) / 3)
    with pytest.raises(InvariantError) as exc:
        as_density_matrix(np.eye(2))
    assert exc.value.invariant == "unit_trace"
    with pytest.raises(InvariantError) as exc:
        as_density_matrix(np.diag([1.5, -0.5]))
    assert exc.value.invariant == "positive_semidefinite"
    assert exc.value.magnitude == pytest.approx(0.5)
    with pytest.raises(InvariantError):
        as_density_matrix(np.array([[0.5, 0.1], [0.0, 0.5]]))
    with pytest.raises(DimensionError):
        as_density_matrix(np.ones((2, 3)) / 2)


def test_pure_state_norm():
    as_pure_state(np.ones(4) / 2)
    with pytest.raises(InvariantError):
        as_pure_state(np.ones(4))


def test_channel_rejects_trace_violation():
    bad = np.array([[[1.0, 0.0], [0.0, 1.0 - 1e-3]]])
    with pytest.raises(InvariantError) as exc:
        QuantumChannel(bad)
    assert exc.value.invariant == "trace_preservation"
    assert exc.value.magnitude == pytest.approx(2e-3, rel=1e-2)


def test_jammer_dimension_mismatch_names_axis():
    T = random_channel(4, 2, np.random.default_rng(0))
    with pytest.raises(DimensionError) as exc:
        JammerChannel(T, 3, 2)
    assert exc.value.axis == "d_in"


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(1, 3), st.integers(1, 3))
def test_choi_round_trip_preserves_action(seed, d_in, d_out):
    rng = np.random.default_rng(seed)
    T = random_channel(d_in, d_out, rng)
    T2 = kraus_from_choi(choi_from_kraus(T), d_in, d_out)
    rho = random_density_matrix(d_in, rng)
    assert np.allclose(T.apply(rho), T2.apply(rho), atol=1e-10)
    assert np.allclose(apply_via_choi(T.choi, rho, d_in, d_out), T.apply(rho), atol=1e-12)
    T.validate()


def test_choi_of_identity_is_unnormalized_bell_projector():
    T = unitary_channel(np.eye(2))
    omega = np.zeros((4, 4))
    for i, j in itertools.product(range(2), repeat=2):
        omega[3 * i, 3 * j] = 1.0
    assert np.allclose(T.choi, omega)


def test_kraus_from_choi_rejects_non_cp():
    choi = np.diag([1.0, 0.0, 0.0, 1.0]) + np.diag([0, 0.0, 0.0, 0.0])
    choi[0, 3] = choi[3, 0] = 1.5
    with pytest.raises(InvariantError) as exc:
        kraus_from_choi(choi, 2, 2)
    assert exc.value.invariant == "choi_psd"


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_adjoint_duality(seed):
    rng = np.random.default_rng(seed)
    T = random_channel(3, 2, rng)
    X = random_density_matrix(3, rng)
    Y = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    Y = Y + Y.conj().T
    assert np.trace(Y @ T.apply(X)) == pytest.approx(np.trace(T.adjoint(Y) @ X), abs=1e-12)


def test_complementary_channel_shares_purification_spectrum(rng):
    T = random_channel(2, 3, rng)
    Tc = complementary_channel(T)
    rho = random_density_matrix(2, rng)
    # for a pure input the output and environment spectra coincide
    psi = rng.normal(size=2) + 1j * rng.normal(size=2)
    psi /= np.linalg.norm(psi)
    pure = np.outer(psi, psi.conj())
    a = np.sort(np.linalg.eigvalsh(T.apply(pure)))[::-1]
    b = np.sort(np.linalg.eigvalsh(Tc.apply(pure)))[::-1]
    k = min(a.size, b.size)
    assert np.allclose(a[:k], b[:k], atol=1e-12)
    assert np.trace(Tc.apply(rho)).real == pytest.approx(1.0)


@settings(max_examples=30, deadline=None)
@given(seeds, st.lists(st.integers(1, 3), min_size=1, max_size=3))
def test_partial_trace_of_product(seed, dims):
    rng = np.random.default_rng(seed)
    parts = [random_density_matrix(d, rng) for d in dims]
    M = kron_all(parts)
    for keep in range(len(dims)):
        assert np.allclose(partial_trace(M, dims, [keep]), parts[keep], atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(2, 3), st.integers(1, 4))
def test_permutations_compose_and_match_matrices(seed, d, n):
    rng = np.random.default_rng(seed)
    M = random_density_matrix(d ** n, rng)
    p1 = [int(i) for i in rng.permutation(n)]
    p2 = [int(i) for i in rng.permutation(n)]
    P = permutation_matrix(d, n, p1)
    assert np.allclose(P @ P.T, np.eye(d ** n))
    assert np.allclose(permute_subsystems(M, d, n, p1), P @ M @ P.T)
    twice = permute_subsystems(permute_subsystems(M, d, n, p1), d, n, p2)
    assert np.allclose(twice, permute_subsystems(M, d, n, compose_perm(p2, p1)))


def test_permutation_moves_subsystem_to_target(rng):
    a, b, c = (random_density_matrix(2, rng) for _ in range(3))
    out = permute_subsystems(kron_all([a, b, c]), 2, 3, [2, 0, 1])
    assert np.allclose(out, kron_all([b, c, a]))


@pytest.mark.parametrize("d,n", [(2, 1), (2, 3), (3, 2), (4, 2)])
def test_symmetric_projector(d, n):
    P = symmetric_projector(d, n)
    assert np.allclose(P @ P, P)
    assert np.trace(P).real == pytest.approx(math.comb(n + d - 1, n))


def test_symmetric_projector_budget():
    with pytest.raises(BudgetError):
        symmetric_projector(4, 7)


def test_subsystem_action_matches_tensor_channel(rng):
    T = random_channel(2, 3, rng)
    I2 = unitary_channel(np.eye(2))
    rho = random_density_matrix(4, rng)
    left = apply_to_subsystem(T, rho, [2, 2], 1)
    assert np.allclose(left, tensor_channels([I2, T]).apply(rho), atol=1e-12)
    Y = random_density_matrix(6, rng)
    assert np.allclose(adjoint_on_subsystem(T, Y, [2, 3], 1), tensor_channels([I2, T]).adjoint(Y), atol=1e-12)


def test_compose_matches_sequential_application(rng):
    A, B = random_channel(2, 3, rng), random_channel(3, 2, rng)
    rho = random_density_matrix(2, rng)
    assert np.allclose(compose(B, A).apply(rho), B.apply(A.apply(rho)), atol=1e-12)
    with pytest.raises(DimensionError):
        compose(A, A)


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(1, 4))
def test_purification_reduces_to_state(seed, d):
    rng = np.random.default_rng(seed)
    rho = random_density_matrix(d, rng, rank=max(1, d - 1))
    psi = purify(rho)
    assert np.linalg.norm(psi) == pytest.approx(1.0)
    assert np.allclose(partial_trace(np.outer(psi, psi.conj()), [d, d], [0]), rho, atol=1e-10)
