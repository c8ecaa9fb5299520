import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qavcap.core import random_channel, random_density_matrix
from qavcap.errors import DimensionError, InvariantError
from qavcap.measures import (
    classical_mutual_information,
    mi_gradient,
    mi_of_input,
    mi_of_input_purified,
    shannon_entropy,
    von_neumann_entropy,
)
from qavcap.models import depolarizing, identity_channel

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_entropy_values():
    assert von_neumann_entropy(np.eye(4) / 4) == pytest.approx(2.0)
    assert von_neumann_entropy(np.diag([1.0, 0.0])) == 0.0
    assert shannon_entropy([0.5, 0.25, 0.25]) == pytest.approx(1.5)


def test_entropy_rejects_negative_eigenvalue():
    with pytest.raises(InvariantError) as exc:
        von_neumann_entropy(np.diag([1.1, -0.1]))
    assert exc.value.invariant == "positive_semidefinite"


def test_identity_channel_doubles_input_entropy():
    rho = np.diag([0.7, 0.3]).astype(complex)
    h = shannon_entropy([0.7, 0.3])
    assert mi_of_input(rho, identity_channel(2)) == pytest.approx(2 * h, abs=1e-12)


def test_fully_depolarizing_carries_nothing(rng):
    rho = random_density_matrix(2, rng)
    assert mi_of_input(rho, depolarizing(1.0)) == pytest.approx(0.0, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(1, 3), st.integers(1, 3))
def test_purified_form_matches_explicit_purification(seed, d_in, d_out):
    rng = np.random.default_rng(seed)
    T = random_channel(d_in, d_out, rng)
    rho = random_density_matrix(d_in, rng)
    assert mi_of_input(rho, T) == pytest.approx(mi_of_input_purified(rho, T), abs=1e-9)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_mi_bounds(seed):
    rng = np.random.default_rng(seed)
    T = random_channel(2, 3, rng)
    rho = random_density_matrix(2, rng)
    v = mi_of_input(rho, T)
    assert -1e-12 <= v <= 2 * von_neumann_entropy(rho) + 1e-12


def test_gradient_matches_central_differences(rng):
    for _ in range(5):
        T = random_channel(2, 2, rng)
        rho = random_density_matrix(2, rng)
        G = mi_gradient(rho, T)
        D = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        D = D + D.conj().T
        D -= np.trace(D) / 2 * np.eye(2)
        h = 1e-5
        fd = (mi_of_input(rho + h * D, T) - mi_of_input(rho - h * D, T)) / (2 * h)
        assert np.real(np.trace(G @ D)) == pytest.approx(fd, rel=1e-5, abs=1e-8)


def test_gradient_dimension_check(rng):
    with pytest.raises(DimensionError):
        mi_gradient(np.eye(3) / 3, random_channel(2, 2, rng))


def test_classical_mi():
    bsc = np.array([[0.9, 0.1], [0.1, 0.9]])
    h = shannon_entropy([0.9, 0.1])
    assert classical_mutual_information([0.5, 0.5], bsc) == pytest.approx(1 - h)
    with pytest.raises(InvariantError):
        classical_mutual_information([0.5, 0.6], bsc)
    with pytest.raises(DimensionError):
        classical_mutual_information([1.0], bsc)
