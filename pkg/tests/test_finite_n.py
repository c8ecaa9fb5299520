import itertools
import math

import numpy as np
import pytest
from scipy.optimize import minimize

from oracles import bloch_grid, bloch_state
from qavcap.core import (
    kron_all,
    permutation_matrix,
    random_density_matrix,
    random_pure_state,
    tensor_channels,
    unitary_channel,
)
from qavcap.errors import BudgetError, DimensionError, InvariantError
from qavcap.finite_n import (
    CodingScheme,
    ErrorOperator,
    build_error_operator,
    coding_error,
    computational_scheme,
    conjugated_average,
    definetti_bound_check,
    definetti_state,
    permutation_covariance_check,
    random_scheme,
    superdense_scheme,
    symmetrize_scheme,
    symmetrize_state,
    tensor_power_sup,
    theorem3_bound_check,
    worst_case_jammer,
    xbasis_scheme,
)
from qavcap.models import cx_jammer, depolarizing, ignoring_jammer, random_jammer


def _transpose_factors(M, dims, order):
    """Reorder the tensor factors of an operator: new factor ``j`` is old factor ``order[j]``."""
    n = len(dims)
    t = M.reshape(list(dims) * 2)
    t = t.transpose(list(order) + [n + i for i in order])
    D = int(np.prod(dims))
    return t.reshape(D, D)


def brute_force_error(T, scheme, sigma):
    """Dense evaluation: build the whole state, send it, decode."""
    n, k, M = scheme.n, scheme.k, scheme.M
    dA, dS = T.d_A, T.d_S
    enc = tensor_channels([scheme.encoder, unitary_channel(np.eye(k))])
    uses = tensor_channels([T.map] * n + [unitary_channel(np.eye(k))])
    phi = np.outer(scheme.phi, scheme.phi.conj())
    success = 0.0
    for x in range(M):
        e = np.zeros((M, M))
        e[x, x] = 1
        omega = enc.apply(np.kron(e, phi))  # A^n K'
        joint = np.kron(omega, sigma)  # A^n K' S^n
        dims = [dA] * n + [k] + [dS] * n
        order = [f for i in range(n) for f in (i, n + 1 + i)] + [n]
        out = uses.apply(_transpose_factors(joint, dims, order))  # B^n K'
        success += np.real(scheme.decoder.apply(out)[x, x])
    return 1 - success / M


@pytest.mark.parametrize("make", [computational_scheme, xbasis_scheme, superdense_scheme])
@pytest.mark.parametrize("n", [1, 2])
def test_contractions_match_brute_force(make, n, rng):
    T = cx_jammer()
    scheme = make(n)
    op = build_error_operator(T, scheme)
    for _ in range(3):
        sigma = random_density_matrix(2 ** n, rng)
        ref = brute_force_error(T, scheme, sigma)
        assert coding_error(T, scheme, sigma) == pytest.approx(ref, abs=1e-12)
        assert op.error(sigma) == pytest.approx(ref, abs=1e-12)


def test_random_scheme_and_jammer_match_brute_force(rng):
    T = random_jammer(2, 2, 2, rng)
    scheme = random_scheme(2, 1, 2, 2, 2, rng)
    op = build_error_operator(T, scheme)
    sigma = random_density_matrix(4, rng)
    assert op.error(sigma) == pytest.approx(brute_force_error(T, scheme, sigma), abs=1e-12)


def test_ignoring_jammer_gives_scalar_operator(rng):
    T = ignoring_jammer(depolarizing(0.3))
    scheme = computational_scheme(2)
    op = build_error_operator(T, scheme)
    p0 = brute_force_error(T, scheme, np.eye(4) / 4)
    # each bit is flipped with probability 0.15
    assert p0 == pytest.approx(1 - 0.85**2, abs=1e-12)
    assert np.allclose(op.F, p0 * np.eye(4), atol=1e-12)


def test_cx_jammer_operators_single_use():
    op = build_error_operator(cx_jammer(), computational_scheme(1))
    assert np.allclose(op.F, np.diag([0.0, 1.0]), atol=1e-12)
    op = build_error_operator(cx_jammer(), xbasis_scheme(1))
    assert np.allclose(op.F, 0, atol=1e-12)


def test_worst_jammer_dominates_random_states(rng):
    T = random_jammer(2, 2, 2, rng)
    op = build_error_operator(T, random_scheme(2, 1, 1, 2, 2, rng))
    value, sigma = worst_case_jammer(op)
    assert op.error(sigma) == pytest.approx(value, abs=1e-12)
    for _ in range(1000):
        assert op.error(random_density_matrix(4, rng)) <= value + 1e-12


def _product_max(F):
    """``max Tr[F (s1 (x) s2)]``: exact inner maximum over ``s2``, grid plus polish over ``s1``."""

    def neg(v):
        G = np.einsum("ab,aibj->ij", bloch_state(v), F.reshape(2, 2, 2, 2))
        return -np.linalg.eigvalsh(G)[-1]

    # points inside the ball are pushed onto the same radius by bloch_state's tanh
    starts = sorted((2 * r for r in bloch_grid(0.1)), key=neg)[:5]
    opts = {"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000}
    return max(-minimize(neg, v0, method="Nelder-Mead", options=opts).fun for v0 in starts)


def test_entangled_jammer_beats_product_jammers():
    rng = np.random.default_rng(5)
    T = random_jammer(2, 2, 2, rng)
    op = build_error_operator(T, random_scheme(2, 1, 1, 2, 2, rng))
    value, sigma = worst_case_jammer(op)
    # Schmidt coefficients of the worst state show it is entangled
    psi = np.linalg.eigh(sigma)[1][:, -1].reshape(2, 2)
    assert np.linalg.svd(psi, compute_uv=False)[1] > 0.1
    assert value > _product_max(op.F) + 1e-3


def test_error_is_affine_in_jammer_state(rng):
    T = random_jammer(2, 2, 2, rng)
    scheme = random_scheme(2, 1, 1, 2, 2, rng)
    a, b = random_density_matrix(4, rng), random_density_matrix(4, rng)
    lhs = coding_error(T, scheme, 0.3 * a + 0.7 * b)
    assert lhs == pytest.approx(0.3 * coding_error(T, scheme, a) + 0.7 * coding_error(T, scheme, b), abs=1e-12)


def test_error_operator_validation():
    with pytest.raises(InvariantError) as exc:
        ErrorOperator(1, 2, np.diag([0.0, 1.5]))
    assert exc.value.invariant == "0<=F<=I"
    with pytest.raises(InvariantError):
        ErrorOperator(1, 2, np.array([[0.5, 0.1], [0.0, 0.5]]))
    with pytest.raises(DimensionError):
        ErrorOperator(2, 2, np.eye(2))


def test_scheme_validation():
    s = computational_scheme(1)
    with pytest.raises(DimensionError):
        CodingScheme(1, 2, 1, np.ones(1), s.encoder, s.decoder)
    one_use = CodingScheme(2, 1, 1, np.ones(1), unitary_channel(np.eye(2)), unitary_channel(np.eye(2)))
    with pytest.raises(DimensionError) as exc:
        build_error_operator(cx_jammer(), one_use)
    assert exc.value.axis == "encoder.d_out"


def test_budget_errors():
    with pytest.raises(BudgetError):
        build_error_operator(cx_jammer(), computational_scheme(2), budget=8)
    with pytest.raises(BudgetError):
        symmetrize_scheme(cx_jammer(), computational_scheme(6))
    with pytest.raises(BudgetError):
        definetti_state(2, 6, budget=64)


def test_symmetrize_single_use_is_identity():
    T = cx_jammer()
    base = build_error_operator(T, computational_scheme(1))
    assert np.allclose(symmetrize_scheme(T, computational_scheme(1)).F, base.F)


def test_symmetrize_two_uses_explicit_swap(rng):
    T = random_jammer(2, 2, 2, rng)
    scheme = random_scheme(2, 1, 1, 2, 2, rng)
    F = build_error_operator(T, scheme).F
    swap = np.zeros((4, 4))
    for i, j in itertools.product(range(2), repeat=2):
        swap[2 * j + i, 2 * i + j] = 1
    expected = (F + swap @ F @ swap) / 2
    assert np.allclose(symmetrize_scheme(T, scheme).F, expected, atol=1e-12)
    assert np.allclose(conjugated_average(build_error_operator(T, scheme)), expected, atol=1e-12)


@pytest.mark.parametrize("make", [computational_scheme, xbasis_scheme])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_covariance_builtin(make, n):
    res = permutation_covariance_check(cx_jammer(), make(n), trials=20)
    assert res.passed and res.max_deviation <= 1e-10


def test_covariance_random_three_uses_and_wrong_direction(rng):
    T = random_jammer(2, 2, 2, rng)
    scheme = random_scheme(3, 1, 1, 2, 2, rng)
    res = permutation_covariance_check(T, scheme, trials=30, seed=3)
    assert res.passed
    # negative control: a 3-cycle is not self-inverse, so conjugating the
    # jammer state the other way must give a different error
    perm = [1, 2, 0]
    P = permutation_matrix(2, 3, perm)
    sigma = random_density_matrix(8, rng)
    permuted = coding_error(T, scheme.permuted(perm, 2, 2), sigma)
    assert permuted == pytest.approx(coding_error(T, scheme, P.T @ sigma @ P), abs=1e-12)
    assert abs(permuted - coding_error(T, scheme, P @ sigma @ P.T)) > 1e-6


def _cycles(perm):
    seen, count = set(), 0
    for i in range(len(perm)):
        if i not in seen:
            count += 1
            while i not in seen:
                seen.add(i)
                i = perm[i]
    return count


@pytest.mark.parametrize("d,n", [(2, 1), (2, 2), (2, 3), (3, 2)])
def test_definetti_state_cycle_formula(d, n):
    perms = list(itertools.permutations(range(n)))
    acc = sum(d ** _cycles(p) * permutation_matrix(d, n, p) for p in perms)
    expected = acc / (len(perms) * math.comb(n + d * d - 1, n))
    tau = definetti_state(d, n)
    assert np.allclose(tau, expected, atol=1e-12)
    assert np.trace(tau).real == pytest.approx(1.0)


def test_definetti_state_small_cases():
    assert np.allclose(definetti_state(3, 1), np.eye(3) / 3)
    assert np.allclose(definetti_state(1, 4), np.ones((1, 1)))


def test_definetti_state_matches_monte_carlo():
    rng = np.random.default_rng(2)
    N = 100_000
    G = rng.normal(size=(N, 2, 2)) + 1j * rng.normal(size=(N, 2, 2))
    s = G @ G.conj().transpose(0, 2, 1)
    s /= np.trace(s, axis1=1, axis2=2).real[:, None, None]
    mc = np.einsum("nab,ncd->acbd", s, s).reshape(4, 4) / N
    diff = np.linalg.eigvalsh(mc - definetti_state(2, 2))
    assert 0.5 * np.abs(diff).sum() < 2e-3


def test_definetti_bound_cases(rng):
    tau = definetti_state(2, 3)
    assert definetti_bound_check(tau, 2).holds
    for _ in range(50):
        s = random_density_matrix(2, rng)
        chk = definetti_bound_check(kron_all([s] * 3), 2)
        assert chk.holds and chk.sharper_margin >= -1e-9
    ghz = np.zeros(8)
    ghz[[0, 7]] = 1 / np.sqrt(2)
    chk = definetti_bound_check(np.outer(ghz, ghz), 2, 3)
    assert chk.holds and chk.constant == 4.0**4 and chk.sharper_constant == 20
    w = random_pure_state(8, rng)
    with pytest.raises(InvariantError) as exc:
        definetti_bound_check(np.outer(w, w.conj()), 2, 3)
    assert exc.value.invariant == "permutation_invariance"


def test_symmetrize_state_is_invariant(rng):
    rho = symmetrize_state(random_density_matrix(8, rng), 2, 3)
    for p in itertools.permutations(range(3)):
        P = permutation_matrix(2, 3, p)
        assert np.allclose(P @ rho @ P.T, rho, atol=1e-12)


def test_tensor_power_sup_computational():
    op = build_error_operator(cx_jammer(), computational_scheme(2))
    value, sigma = tensor_power_sup(op)
    # a flipped bit anywhere is an error: 1 - (1-q)^2 with q = <1|s|1> maximal at q = 1
    assert value == pytest.approx(1.0, abs=1e-9)
    assert op.error(np.kron(sigma, sigma)) == pytest.approx(value, abs=1e-12)


@pytest.mark.parametrize("n", [1, 2])
def test_theorem3_report(n, rng):
    rep = theorem3_bound_check(cx_jammer(), computational_scheme(n))
    assert rep.holds and rep.lhs_le_rhs and rep.tau_le_comp
    assert rep.constant == (n + 1) ** 4
    assert rep.lhs <= rep.base_worst + 1e-12
    T = random_jammer(2, 2, 2, rng)
    rep = theorem3_bound_check(T, random_scheme(n, 1, 1, 2, 2, rng))
    assert rep.holds
    assert rep.trace_F_tau <= rep.eps_comp + 1e-9


def test_theorem3_xbasis_all_zero():
    rep = theorem3_bound_check(cx_jammer(), xbasis_scheme(2))
    assert rep.lhs == pytest.approx(0, abs=1e-12) and rep.eps_comp == pytest.approx(0, abs=1e-12)
    assert rep.holds
