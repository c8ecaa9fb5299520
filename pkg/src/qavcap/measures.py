"""Entropic quantities in bits."""

from __future__ import annotations

import numpy as np

from .core import (
    QuantumChannel,
    as_density_matrix,
    complementary_channel,
    partial_trace,
    purify,
)
from .errors import DimensionError, InvariantError

NEG_EIG_TOL = 1e-10
SUPPORT_CUTOFF = 1e-15
REGULARIZATION = 1e-9


def _spectrum(M: np.ndarray) -> np.ndarray:
    w = np.linalg.eigvalsh((M + M.conj().T) / 2)
    if w[0] < -NEG_EIG_TOL:
        raise InvariantError(f"negative eigenvalue {w[0]:.3e} in entropy argument", "positive_semidefinite", -w[0])
    return np.clip(w, 0.0, None)


def entropy_of_spectrum(w) -> float:
    w = np.asarray(w, dtype=float)
    w = w[w > 0]
    return float(-np.sum(w * np.log2(w)))


def _entropy(M: np.ndarray) -> float:
    return entropy_of_spectrum(_spectrum(M))


def von_neumann_entropy(rho) -> float:
    """``S(rho) = -sum l log2 l``, clamped to ``[0, log2 d]``."""
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    return float(min(max(_entropy(rho), 0.0), np.log2(d)))


def shannon_entropy(p) -> float:
    p = np.asarray(p, dtype=float)
    return entropy_of_spectrum(p)


def log2_psd(M: np.ndarray) -> np.ndarray:
    """Matrix ``log2`` restricted to the support; zero on the kernel."""
    w, v = np.linalg.eigh((M + M.conj().T) / 2)
    lw = np.where(w > SUPPORT_CUTOFF, np.log2(np.where(w > SUPPORT_CUTOFF, w, 1.0)), 0.0)
    return (v * lw) @ v.conj().T


def mutual_information(rho, T: QuantumChannel) -> float:
    """``I(A':B)`` of ``(id (x) T) rho`` for ``rho`` on ``A' (x) A``."""
    rho = np.asarray(rho, dtype=complex)
    D = rho.shape[0]
    if D % T.d_in:
        raise DimensionError(f"state dimension {D} is not a multiple of channel input {T.d_in}", axis="d_in")
    d_ref = D // T.d_in
    kraus = np.stack([np.kron(np.eye(d_ref), K) for K in T.kraus])
    omega = np.einsum("kij,jl,kml->im", kraus, rho, kraus.conj(), optimize=True)
    dims = [d_ref, T.d_out]
    return (
        _entropy(partial_trace(omega, dims, [0]))
        + _entropy(partial_trace(omega, dims, [1]))
        - _entropy(omega)
    )


def mi_of_input(rho_A, T: QuantumChannel, Tc: QuantumChannel | None = None) -> float:
    """Mutual information with input marginal ``rho_A`` in purified form.

    ``S(rho) + S(T(rho)) - S(T_c(rho))``.
    """
    rho_A = np.asarray(rho_A, dtype=complex)
    if rho_A.shape[0] != T.d_in:
        raise DimensionError(f"state dimension {rho_A.shape[0]} != channel input {T.d_in}", axis="d_in")
    if Tc is None:
        Tc = complementary_channel(T)
    return _entropy(rho_A) + _entropy(T.apply(rho_A)) - _entropy(Tc.apply(rho_A))


def mi_of_input_purified(rho_A, T: QuantumChannel) -> float:
    """Same quantity via the explicit purification (independent route)."""
    psi = purify(rho_A)
    d = T.d_in
    # purify() puts the system first; mutual_information wants the reference first.
    swapped = psi.reshape(d, d).T.reshape(-1)
    return mutual_information(np.outer(swapped, swapped.conj()), T)


def _regularize(rho: np.ndarray) -> np.ndarray:
    d = rho.shape[0]
    if np.linalg.eigvalsh((rho + rho.conj().T) / 2)[0] < REGULARIZATION / d:
        rho = (1 - REGULARIZATION) * rho + REGULARIZATION * np.eye(d) / d
    return rho


def mi_value_and_gradient(rho, T: QuantumChannel, Tc: QuantumChannel) -> tuple[float, np.ndarray]:
    """Objective and gradient sharing one eigendecomposition per term."""
    terms = []
    for M in (rho, T.apply(rho), Tc.apply(rho)):
        w, v = np.linalg.eigh((M + M.conj().T) / 2)
        w = np.clip(w, 0.0, None)
        lw = np.where(w > SUPPORT_CUTOFF, np.log2(np.where(w > SUPPORT_CUTOFF, w, 1.0)), 0.0)
        terms.append((entropy_of_spectrum(w), (v * -lw) @ v.conj().T))
    (s0, g0), (s1, g1), (s2, g2) = terms
    G = g0 + T.adjoint(g1) - Tc.adjoint(g2)
    return s0 + s1 - s2, (G + G.conj().T) / 2


def mi_gradient(rho_A, T: QuantumChannel) -> np.ndarray:
    """Gradient of ``rho -> mi_of_input(rho, T)`` as a Hermitian matrix.

    ``G = -log2 rho + T^dag(-log2 T(rho)) - T_c^dag(-log2 T_c(rho))``; the
    directional derivative along a traceless Hermitian ``D`` is ``Tr[G D]``.
    Rank-deficient inputs are mixed with ``1e-9 * I/d`` first.
    """
    rho_A = as_density_matrix(rho_A)
    if rho_A.shape[0] != T.d_in:
        raise DimensionError(f"state dimension {rho_A.shape[0]} != channel input {T.d_in}", axis="d_in")
    _, G = mi_value_and_gradient(_regularize(rho_A), T, complementary_channel(T))
    assert np.allclose(G, G.conj().T, atol=1e-10)
    return G


def classical_mutual_information(p, W) -> float:
    """``I(p; W) = H(Wp) - sum_x p_x H(W(.|x))`` with ``W[y, x]``."""
    p = np.asarray(p, dtype=float)
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or W.shape[1] != p.size:
        raise DimensionError(f"kernel shape {W.shape} incompatible with {p.size} inputs", axis="x")
    if abs(p.sum() - 1) > 1e-12 or np.any(p < -1e-12):
        raise InvariantError(f"input distribution sums to {p.sum():.15g}", "normalization", abs(p.sum() - 1))
    colsum = W.sum(axis=0)
    dev = np.max(np.abs(colsum - 1))
    if dev > 1e-12 or np.any(W < -1e-12):
        raise InvariantError(f"kernel columns deviate from normalization by {dev:.3e}", "normalization", dev)
    return max(_classical_mi(np.clip(p, 0, None), W), 0.0)


def _classical_mi(p: np.ndarray, W: np.ndarray) -> float:
    cond = sum(p[x] * shannon_entropy(W[:, x]) for x in range(p.size))
    return shannon_entropy(W @ p) - cond
