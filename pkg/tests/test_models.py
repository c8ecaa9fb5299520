import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qavcap.core import random_density_matrix
from qavcap.errors import DimensionError, InvariantError
from qavcap.models import (
    PAULI_X,
    AvcKernel,
    ChannelSet,
    adder_avc,
    classical_embedding,
    classical_readout,
    controlled_jammer,
    convex_mix,
    cx_jammer,
    dephasing,
    depolarizing,
    erasure,
    identity_channel,
    ignoring_jammer,
    jammer_from_slices,
    jammer_output,
    random_jammer,
    slice_channel,
    slice_choi,
    standard_channel,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_standard_channel_actions(rng):
    rho = random_density_matrix(2, rng)
    assert np.allclose(depolarizing(0.4).apply(rho), 0.6 * rho + 0.4 * np.eye(2) / 2)
    assert np.allclose(dephasing(0.3).apply(rho), 0.7 * rho + 0.3 * np.diag(np.diag(rho)))
    out = erasure(0.25).apply(rho)
    assert out.shape == (3, 3)
    assert np.allclose(out[:2, :2], 0.75 * rho)
    assert out[2, 2] == pytest.approx(0.25)


def test_qudit_depolarizing_is_unital_and_contracting(rng):
    rho = random_density_matrix(3, rng)
    T = depolarizing(0.7, d=3)
    assert np.allclose(T.apply(np.eye(3) / 3), np.eye(3) / 3)
    assert np.allclose(T.apply(rho), 0.3 * rho + 0.7 * np.eye(3) / 3)


def test_parameter_range_and_unitary_checks():
    with pytest.raises(InvariantError):
        depolarizing(1.2)
    with pytest.raises(InvariantError):
        standard_channel("unitary", unitary=np.array([[1, 1], [0, 1]]))
    with pytest.raises(ValueError):
        standard_channel("bogus")


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_slice_channel_matches_slice_choi_and_direct_action(seed):
    rng = np.random.default_rng(seed)
    T = random_jammer(2, 2, 2, rng)
    sigma = random_density_matrix(2, rng)
    rho = random_density_matrix(2, rng)
    S = slice_channel(T, sigma)
    assert np.allclose(S.choi, slice_choi(T, sigma), atol=1e-12)
    assert np.allclose(S.apply(rho), jammer_output(T, rho, sigma), atol=1e-12)


def test_slice_dimension_error(rng):
    with pytest.raises(DimensionError) as exc:
        slice_channel(cx_jammer(), np.eye(3) / 3)
    assert exc.value.axis == "d_S"


def test_controlled_jammer_basis_slices(rng):
    T = cx_jammer()
    rho = random_density_matrix(2, rng)
    e0, e1 = np.diag([1.0, 0]), np.diag([0, 1.0])
    assert np.allclose(slice_channel(T, e0).apply(rho), rho)
    assert np.allclose(slice_channel(T, e1).apply(rho), PAULI_X @ rho @ PAULI_X)
    with pytest.raises(DimensionError):
        controlled_jammer([np.eye(2), np.eye(3)])


def test_ignoring_jammer_and_slices(rng):
    T0 = depolarizing(0.3)
    T = ignoring_jammer(T0)
    rho, sigma = random_density_matrix(2, rng), random_density_matrix(2, rng)
    assert np.allclose(jammer_output(T, rho, sigma), T0.apply(rho))
    J = jammer_from_slices([identity_channel(), T0])
    assert np.allclose(slice_channel(J, np.diag([0.5, 0.5])).apply(rho), 0.5 * rho + 0.5 * T0.apply(rho))


def test_convex_mix(rng):
    A, B = identity_channel(), depolarizing(1.0)
    rho = random_density_matrix(2, rng)
    assert np.allclose(convex_mix([A, B], [0.25, 0.75]).apply(rho), 0.25 * rho + 0.75 * np.eye(2) / 2)
    with pytest.raises(InvariantError):
        convex_mix([A, B], [0.5, 0.6])
    with pytest.raises(DimensionError):
        convex_mix([A, B], [1.0])


def test_channel_set_dimension_check():
    with pytest.raises(DimensionError) as exc:
        ChannelSet([identity_channel(2), identity_channel(3)])
    assert exc.value.axis == "members[1]"


def test_adder_kernel_and_embedding_readout():
    K = adder_avc()
    assert K.W.shape == (3, 2, 2)
    assert np.allclose(K.column(0), [[1, 0], [0, 1], [0, 0]])
    assert np.allclose(K.averaged([0.5, 0.5]), [[0.5, 0], [0.5, 0.5], [0, 0.5]])
    J = classical_embedding(K)
    assert (J.d_A, J.d_S, J.d_B) == (2, 2, 3)
    for s in range(2):
        sigma = np.zeros((2, 2))
        sigma[s, s] = 1
        assert np.allclose(classical_readout(slice_channel(J, sigma)), K.column(s))


def test_kernel_validation():
    with pytest.raises(InvariantError):
        AvcKernel(np.full((2, 2, 2), 0.6))
    with pytest.raises(DimensionError):
        AvcKernel(np.eye(2))
