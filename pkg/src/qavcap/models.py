"""Channel families: standard channels, jammer channels, slices, mixtures,
classical arbitrarily varying kernels and their quantum embeddings."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import (
    JammerChannel,
    QuantumChannel,
    as_density_matrix,
    ket,
)
from .errors import DimensionError, InvariantError

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
KERNEL_TOL = 1e-12


@dataclass
class ChannelSet:
    members: list[QuantumChannel]
    labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.members:
            raise DimensionError("channel set must be nonempty", axis="members")
        d_in, d_out = self.members[0].d_in, self.members[0].d_out
        for i, ch in enumerate(self.members):
            if (ch.d_in, ch.d_out) != (d_in, d_out):
                raise DimensionError(
                    f"member {i} has dimensions {(ch.d_in, ch.d_out)}, expected {(d_in, d_out)}",
                    axis=f"members[{i}]",
                )
        if not self.labels:
            self.labels = [f"T{i}" for i in range(len(self.members))]
        if len(self.labels) != len(self.members):
            raise DimensionError("one label per member required", axis="labels")

    def __len__(self) -> int:
        return len(self.members)

    @property
    def d_in(self) -> int:
        return self.members[0].d_in

    @property
    def d_out(self) -> int:
        return self.members[0].d_out


def as_stochastic(W, tol: float = KERNEL_TOL) -> np.ndarray:
    """Validate a column-stochastic matrix ``W[y, x]``."""
    W = np.asarray(W, dtype=float)
    if W.ndim != 2:
        raise DimensionError(f"kernel must be a matrix, got shape {W.shape}", axis="W")
    if np.any(W < -tol):
        raise InvariantError(f"negative kernel entry {W.min():.3e}", "nonnegative", -W.min())
    dev = np.max(np.abs(W.sum(axis=0) - 1))
    if dev > tol:
        raise InvariantError(f"kernel columns deviate from normalization by {dev:.3e}", "normalization", dev)
    return np.clip(W, 0.0, None)


class AvcKernel:
    """Classical jammer-controlled channel ``W(y|x,s)`` stored as ``W[y, x, s]``."""

    def __init__(self, W, tol: float = KERNEL_TOL):
        W = np.asarray(W, dtype=float)
        if W.ndim != 3:
            raise DimensionError(f"AVC kernel must be indexed W[y][x][s], got shape {W.shape}", axis="W")
        as_stochastic(W.reshape(W.shape[0], -1), tol)
        self.W = np.clip(W, 0.0, None)
        self.W.setflags(write=False)

    @property
    def X(self) -> int:
        return self.W.shape[1]

    @property
    def S(self) -> int:
        return self.W.shape[2]

    @property
    def Y(self) -> int:
        return self.W.shape[0]

    def column(self, s: int) -> np.ndarray:
        """Kernel ``W(.|., s)`` for a fixed jammer symbol."""
        return np.array(self.W[:, :, s])

    def columns(self) -> list[np.ndarray]:
        return [self.column(s) for s in range(self.S)]

    def averaged(self, q) -> np.ndarray:
        """Kernel ``sum_s q(s) W(.|., s)``."""
        return np.einsum("yxs,s->yx", self.W, np.asarray(q, dtype=float))

    def __repr__(self) -> str:
        return f"AvcKernel(X={self.X}, S={self.S}, Y={self.Y})"


# ----------------------------------------------------------------------------
# standard channels
# ----------------------------------------------------------------------------

def _check_prob(p: float, name: str = "p") -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise InvariantError(f"parameter {name}={p} outside [0, 1]", "parameter_range", p)
    return p


def weyl_operators(d: int) -> list[np.ndarray]:
    """The ``d^2`` generalized Pauli operators ``X^a Z^b``."""
    shift = np.roll(np.eye(d), 1, axis=0).astype(complex)
    clock = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return [
        np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
        for a in range(d)
        for b in range(d)
    ]


def standard_channel(kind: str, d: int = 2, p: float = 0.0, unitary=None) -> QuantumChannel:
    """Build one of ``identity | depolarizing | erasure | dephasing | unitary``.

    * depolarizing: ``rho -> (1-p) rho + p I/d``
    * erasure: output dimension ``d+1``; the flag ``|e>`` is the last basis vector
    * dephasing: ``rho -> (1-p) rho + p diag(rho)``
    """
    if kind == "unitary":
        U = np.asarray(unitary, dtype=complex)
        if U.ndim != 2 or U.shape[0] != U.shape[1]:
            raise DimensionError("unitary must be square", axis="unitary")
        dev = np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0])))
        if dev > 1e-10:
            raise InvariantError(f"matrix is not unitary (deviation {dev:.3e})", "unitary", dev)
        return QuantumChannel(U[None])
    if d < 2:
        raise DimensionError(f"dimension must be >= 2, got {d}", axis="d")
    I = np.eye(d, dtype=complex)
    if kind == "identity":
        return QuantumChannel(I[None])
    p = _check_prob(p)
    if kind == "depolarizing":
        ops = weyl_operators(d)
        kraus = [np.sqrt(1 - p + p / d**2) * ops[0]] + [np.sqrt(p) / d * W for W in ops[1:]]
        return QuantumChannel(np.array(kraus))
    if kind == "erasure":
        keep = np.vstack([I, np.zeros((1, d))]) * np.sqrt(1 - p)
        flags = [np.sqrt(p) * np.outer(ket(d, d + 1), ket(i, d)) for i in range(d)]
        return QuantumChannel(np.array([keep] + flags))
    if kind == "dephasing":
        kraus = [np.sqrt(1 - p) * I] + [np.sqrt(p) * np.outer(ket(i, d), ket(i, d)) for i in range(d)]
        return QuantumChannel(np.array(kraus))
    raise ValueError(f"unknown channel kind {kind!r}")


def depolarizing(p: float, d: int = 2) -> QuantumChannel:
    return standard_channel("depolarizing", d, p)


def erasure(p: float, d: int = 2) -> QuantumChannel:
    return standard_channel("erasure", d, p)


def dephasing(p: float = 1.0, d: int = 2) -> QuantumChannel:
    return standard_channel("dephasing", d, p)


def identity_channel(d: int = 2) -> QuantumChannel:
    return standard_channel("identity", d)


# ----------------------------------------------------------------------------
# jammer channels and slices
# ----------------------------------------------------------------------------

def controlled_jammer(unitaries: Sequence[np.ndarray]) -> JammerChannel:
    """``T(X) = Tr_S[U (X) U^dag]`` with ``U = sum_s V_s (x) |s><s|``.

    The jammer state selects (coherently) which unitary hits the sender's
    system; on a basis state ``|s><s|`` the slice is conjugation by ``V_s``.
    """
    Vs = [np.asarray(V, dtype=complex) for V in unitaries]
    if not Vs:
        raise DimensionError("need at least one unitary", axis="unitaries")
    d_A = Vs[0].shape[0]
    for i, V in enumerate(Vs):
        if V.shape != (d_A, d_A):
            raise DimensionError(f"unitary {i} has shape {V.shape}, expected {(d_A, d_A)}", axis=f"unitaries[{i}]")
        dev = np.max(np.abs(V.conj().T @ V - np.eye(d_A)))
        if dev > 1e-10:
            raise InvariantError(f"unitary {i} deviates from unitarity by {dev:.3e}", "unitary", dev)
    d_S = len(Vs)
    kraus = [np.kron(V, ket(s, d_S)[None, :]) for s, V in enumerate(Vs)]
    return JammerChannel(QuantumChannel(np.array(kraus)), d_A, d_S)


def cx_jammer() -> JammerChannel:
    """Controlled-X jammer: ``V = {I, X}`` on a qubit."""
    return controlled_jammer([np.eye(2), PAULI_X])


def ignoring_jammer(T0: QuantumChannel, d_S: int = 2) -> JammerChannel:
    """``T(rho (x) sigma) = T0(rho) Tr[sigma]``."""
    kraus = [np.kron(K, ket(s, d_S)[None, :]) for K in T0.kraus for s in range(d_S)]
    return JammerChannel(QuantumChannel(np.array(kraus)), T0.d_in, d_S)


def jammer_from_slices(channels: Sequence[QuantumChannel]) -> JammerChannel:
    """Classically controlled jammer: measures ``S`` in the basis, applies ``T_s``."""
    d_S = len(channels)
    d_A = channels[0].d_in
    kraus = [np.kron(K, ket(s, d_S)[None, :]) for s, ch in enumerate(channels) for K in ch.kraus]
    return JammerChannel(QuantumChannel(np.array(kraus)), d_A, d_S)


def random_jammer(d_A: int, d_S: int, d_B: int, rng: np.random.Generator, rank: int | None = None) -> JammerChannel:
    from .core import random_channel

    return JammerChannel(random_channel(d_A * d_S, d_B, rng, rank), d_A, d_S)


def slice_channel(T: JammerChannel, sigma) -> QuantumChannel:
    """``T_sigma(rho) = T(rho (x) sigma)``.

    Kraus operators ``sqrt(mu_i) K_k (I (x) |v_i>)`` from the spectral
    decomposition of ``sigma``.
    """
    sigma = as_density_matrix(sigma)
    if sigma.shape[0] != T.d_S:
        raise DimensionError(f"jammer state has dimension {sigma.shape[0]}, expected d_S={T.d_S}", axis="d_S")
    mu, v = np.linalg.eigh((sigma + sigma.conj().T) / 2)
    I = np.eye(T.d_A)
    kraus = [
        np.sqrt(m) * K @ np.kron(I, v[:, i][:, None])
        for i, m in enumerate(mu)
        if m > 1e-15
        for K in T.map.kraus
    ]
    return QuantumChannel(np.array(kraus))


def slice_choi(T: JammerChannel, sigma) -> np.ndarray:
    """Choi matrix of the slice by contracting ``Choi(T)`` against ``sigma^T`` on ``S``."""
    sigma = np.asarray(sigma, dtype=complex)
    dA, dS, dB = T.d_A, T.d_S, T.d_B
    c = T.map.choi.reshape(dA, dS, dB, dA, dS, dB)
    return np.einsum("asbcte,st->abce", c, sigma).reshape(dA * dB, dA * dB)


def convex_mix(channels: ChannelSet | Sequence[QuantumChannel], weights) -> QuantumChannel:
    """Channel ``sum_j w_j T_j`` (Kraus operators ``sqrt(w_j) K_jk``)."""
    members = channels.members if isinstance(channels, ChannelSet) else list(channels)
    w = np.asarray(weights, dtype=float)
    if w.shape != (len(members),):
        raise DimensionError(f"{w.size} weights for {len(members)} channels", axis="weights")
    if np.any(w < -1e-12) or abs(w.sum() - 1) > 1e-9:
        raise InvariantError(f"weights must form a probability vector (sum {w.sum():.15g})", "normalization", abs(w.sum() - 1))
    w = np.clip(w, 0.0, None)
    kraus = [np.sqrt(wj) * K for wj, ch in zip(w, members) if wj > 0 for K in ch.kraus]
    return QuantumChannel(np.array(kraus))


# ----------------------------------------------------------------------------
# classical kernels
# ----------------------------------------------------------------------------

def adder_avc() -> AvcKernel:
    """Binary adder: ``y = x + s`` over the integers, ``|X|=|S|=2``, ``|Y|=3``."""
    W = np.zeros((3, 2, 2))
    for x in range(2):
        for s in range(2):
            W[x + s, x, s] = 1.0
    return AvcKernel(W)


def noiseless_avc() -> AvcKernel:
    """Jammer-independent noiseless bit: ``W(y|x,s) = delta_{y,x}``."""
    W = np.zeros((2, 2, 2))
    for x in range(2):
        W[x, x, :] = 1.0
    return AvcKernel(W)


def constant_avc(X: int = 2, S: int = 2, Y: int = 2) -> AvcKernel:
    return AvcKernel(np.full((Y, X, S), 1.0 / Y))


def _embed(W: np.ndarray) -> QuantumChannel:
    Y, X = W.shape
    kraus = [
        np.sqrt(W[y, x]) * np.outer(ket(y, Y), ket(x, X))
        for x in range(X)
        for y in range(Y)
        if W[y, x] > 0
    ]
    return QuantumChannel(np.array(kraus))


def classical_embedding(W):
    """Measure-and-prepare embedding of a classical kernel.

    A stochastic matrix ``W[y, x]`` becomes a :class:`QuantumChannel`; an
    :class:`AvcKernel` becomes a :class:`JammerChannel` with ``d_A=|X|``,
    ``d_S=|S|``, ``d_B=|Y|``.
    """
    if isinstance(W, AvcKernel):
        flat = W.W.reshape(W.Y, W.X * W.S)
        return JammerChannel(_embed(flat), W.X, W.S)
    return _embed(as_stochastic(W))


def classical_readout(T: QuantumChannel) -> np.ndarray:
    """``W[y, x] = <y| T(|x><x|) |y>``."""
    W = np.empty((T.d_out, T.d_in))
    for x in range(T.d_in):
        e = np.zeros((T.d_in, T.d_in), dtype=complex)
        e[x, x] = 1
        W[:, x] = np.real(np.diag(T.apply(e)))
    return W


def jammer_output(T: JammerChannel, rho, sigma) -> np.ndarray:
    """``T(rho (x) sigma)`` evaluated directly on the composite input."""
    return T.map.apply(np.kron(rho, sigma))


__all__ = [
    "AvcKernel",
    "ChannelSet",
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
    "adder_avc",
    "as_stochastic",
    "classical_embedding",
    "classical_readout",
    "constant_avc",
    "controlled_jammer",
    "convex_mix",
    "cx_jammer",
    "dephasing",
    "depolarizing",
    "erasure",
    "identity_channel",
    "ignoring_jammer",
    "jammer_from_slices",
    "jammer_output",
    "noiseless_avc",
    "random_jammer",
    "slice_channel",
    "slice_choi",
    "standard_channel",
    "weyl_operators",
]
