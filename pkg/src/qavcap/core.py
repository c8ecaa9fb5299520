"""Dense finite-dimensional quantum linear algebra.

States are plain complex ``numpy`` arrays validated at the boundaries
(:func:`as_density_matrix`, :func:`as_pure_state`).  Channels carry their
Kraus operators and a lazily cached Choi matrix.

Conventions
-----------
* Choi matrix: ``C = sum_ij |i><j| (x) T(|i><j|)`` with the *input* factor
  first, so ``T(rho) = Tr_in[(rho^T (x) I) C]`` and ``Tr_out C = I``.
* Composite indices are row-major: on ``A (x) S`` the basis vector
  ``|a>|s>`` has index ``a * d_S + s``.
"""

from __future__ import annotations

import itertools
import math
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import BudgetError, DimensionError, InvariantError

STATE_TOL = 1e-10
PURE_TOL = 1e-12
CHANNEL_TOL = 1e-9
KRAUS_CUTOFF = 1e-10
DEFAULT_BUDGET = 4096


# ----------------------------------------------------------------------------
# states
# ----------------------------------------------------------------------------

def as_density_matrix(rho, tol: float = STATE_TOL) -> np.ndarray:
    """Validate ``rho`` as a density matrix and return it as a complex array.

    Raises :class:`InvariantError` when Hermiticity, positivity or unit trace
    fails by more than ``tol``.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] == 0:
        raise DimensionError(f"density matrix must be square, got shape {rho.shape}", axis="rho")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > tol:
        raise InvariantError(f"matrix is not Hermitian (deviation {herm:.3e})", "hermitian", herm)
    tr = np.trace(rho).real
    if abs(tr - 1) > tol:
        raise InvariantError(f"trace is {tr:.12g}, expected 1", "unit_trace", abs(tr - 1))
    lmin = np.linalg.eigvalsh((rho + rho.conj().T) / 2)[0]
    if lmin < -tol:
        raise InvariantError(f"negative eigenvalue {lmin:.3e}", "positive_semidefinite", -lmin)
    return rho


def as_pure_state(psi, tol: float = PURE_TOL) -> np.ndarray:
    """Validate a state vector (unit Euclidean norm) and return it."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    norm = np.linalg.norm(psi)
    if abs(norm - 1) > tol:
        raise InvariantError(f"state vector norm is {norm:.15g}", "unit_norm", abs(norm - 1))
    return psi


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1
    return v


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    return np.outer(psi, psi.conj())


def maximally_mixed(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex) / d


def max_entangled(d: int) -> np.ndarray:
    """Normalized ``sum_i |ii> / sqrt(d)``."""
    return np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)


def kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


# ----------------------------------------------------------------------------
# random objects (tests and finite-n checks)
# ----------------------------------------------------------------------------

def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a Ginibre matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_pure_state(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_density_matrix(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random state ``G G^dag / Tr`` with ``G`` Ginibre of shape ``(d, rank)``.

    ``rank=None`` (``rank = d``) samples the Hilbert-Schmidt measure.
    """
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_isometry(d_in: int, d_out: int, rng: np.random.Generator) -> np.ndarray:
    if d_out < d_in:
        raise DimensionError("isometry needs d_out >= d_in")
    z = rng.standard_normal((d_out, d_in)) + 1j * rng.standard_normal((d_out, d_in))
    q, _ = np.linalg.qr(z)
    return q


def random_channel(d_in: int, d_out: int, rng: np.random.Generator, rank: int | None = None) -> "QuantumChannel":
    """Channel from a random Stinespring isometry with ``rank`` Kraus operators."""
    r = rank if rank is not None else d_in * d_out
    v = random_isometry(d_in, d_out * r, rng)
    kraus = v.reshape(d_out, r, d_in).transpose(1, 0, 2)
    return QuantumChannel(kraus)


# ----------------------------------------------------------------------------
# channels
# ----------------------------------------------------------------------------

class QuantumChannel:
    """CPTP map given by Kraus operators ``K_k`` of shape ``(d_out, d_in)``.

    Trace preservation is checked on construction; complete positivity is
    automatic for a Kraus list and re-verified on the Choi matrix by
    :meth:`validate`.
    """

    def __init__(self, kraus, tol: float = CHANNEL_TOL, check: bool = True):
        k = np.asarray(kraus, dtype=complex)
        if k.ndim == 2:
            k = k[None]
        if k.ndim != 3 or k.shape[0] == 0:
            raise DimensionError(f"kraus must be a nonempty list of matrices, got shape {k.shape}", axis="kraus")
        self.kraus = k
        self.kraus.setflags(write=False)
        if check:
            dev = np.max(np.abs(self.kraus_sum() - np.eye(self.d_in)))
            if dev > tol:
                raise InvariantError(
                    f"Kraus operators violate trace preservation by {dev:.3e}",
                    "trace_preservation",
                    dev,
                )

    @property
    def d_in(self) -> int:
        return self.kraus.shape[2]

    @property
    def d_out(self) -> int:
        return self.kraus.shape[1]

    @property
    def rank(self) -> int:
        return self.kraus.shape[0]

    def kraus_sum(self) -> np.ndarray:
        flat = self.kraus.reshape(-1, self.d_in)
        return flat.conj().T @ flat

    @cached_property
    def choi(self) -> np.ndarray:
        vecs = self.kraus.transpose(0, 2, 1).reshape(self.rank, -1)
        c = vecs.T @ vecs.conj()
        c.setflags(write=False)
        return c

    def apply(self, rho: np.ndarray) -> np.ndarray:
        k = self.kraus
        return (k @ np.asarray(rho) @ k.conj().transpose(0, 2, 1)).sum(axis=0)

    __call__ = apply

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        """Heisenberg picture ``Y -> sum_k K_k^dag Y K_k``."""
        k = self.kraus
        return (k.conj().transpose(0, 2, 1) @ np.asarray(y) @ k).sum(axis=0)

    def validate(self, tol: float = CHANNEL_TOL) -> None:
        """Full CPTP check on the Kraus list and the Choi matrix."""
        dev = np.max(np.abs(self.kraus_sum() - np.eye(self.d_in)))
        if dev > tol:
            raise InvariantError(f"trace preservation violated by {dev:.3e}", "trace_preservation", dev)
        c = self.choi
        lmin = np.linalg.eigvalsh(c)[0]
        if lmin < -tol:
            raise InvariantError(f"Choi matrix has eigenvalue {lmin:.3e}", "choi_psd", -lmin)
        marg = partial_trace(c, [self.d_in, self.d_out], [0])
        dev = np.max(np.abs(marg - np.eye(self.d_in)))
        if dev > tol:
            raise InvariantError(f"Choi marginal deviates from identity by {dev:.3e}", "choi_marginal", dev)

    def __repr__(self) -> str:
        return f"QuantumChannel(d_in={self.d_in}, d_out={self.d_out}, rank={self.rank})"


class JammerChannel:
    """Channel ``T: A (x) S -> B`` whose ``S`` input is held by a jammer.

    The composite input index is ``a * d_S + s``.
    """

    def __init__(self, channel: QuantumChannel, d_A: int, d_S: int):
        if d_A < 1 or d_S < 1:
            raise DimensionError("d_A and d_S must be positive", axis="d_A/d_S")
        if d_A * d_S != channel.d_in:
            raise DimensionError(
                f"d_A * d_S = {d_A}*{d_S} = {d_A * d_S} does not match channel input dimension {channel.d_in}",
                axis="d_in",
            )
        self.map = channel
        self.d_A = int(d_A)
        self.d_S = int(d_S)

    @property
    def d_B(self) -> int:
        return self.map.d_out

    def __repr__(self) -> str:
        return f"JammerChannel(d_A={self.d_A}, d_S={self.d_S}, d_B={self.d_B})"


def apply_channel(T: QuantumChannel, rho) -> np.ndarray:
    rho = as_density_matrix(rho)
    if rho.shape[0] != T.d_in:
        raise DimensionError(f"state has dimension {rho.shape[0]}, channel expects {T.d_in}", axis="d_in")
    return T.apply(rho)


def apply_via_choi(choi: np.ndarray, rho: np.ndarray, d_in: int, d_out: int) -> np.ndarray:
    """``Tr_in[(rho^T (x) I) C]``; independent route to the channel action."""
    c = np.asarray(choi).reshape(d_in, d_out, d_in, d_out)
    return np.einsum("ij,iajb->ab", np.asarray(rho), c)


def choi_from_kraus(T: QuantumChannel) -> np.ndarray:
    return np.array(T.choi)


def kraus_from_choi(choi, d_in: int, d_out: int, tol: float = CHANNEL_TOL) -> QuantumChannel:
    """Kraus decomposition from the eigenvectors of a Choi matrix.

    Eigenvalues below ``1e-10`` are dropped.
    """
    c = np.asarray(choi, dtype=complex)
    n = d_in * d_out
    if c.shape != (n, n):
        raise DimensionError(f"Choi matrix has shape {c.shape}, expected {(n, n)}", axis="choi")
    c = (c + c.conj().T) / 2
    w, v = np.linalg.eigh(c)
    if w[0] < -tol:
        raise InvariantError(f"Choi matrix not PSD: most negative eigenvalue {w[0]:.3e}", "choi_psd", -w[0])
    marg = partial_trace(c, [d_in, d_out], [0])
    dev = np.max(np.abs(marg - np.eye(d_in)))
    if dev > tol:
        raise InvariantError(f"Choi marginal deviates from identity by {dev:.3e}", "choi_marginal", dev)
    keep = w > KRAUS_CUTOFF
    kraus = [np.sqrt(lam) * vec.reshape(d_in, d_out).T for lam, vec in zip(w[keep][::-1], v[:, keep].T[::-1])]
    return QuantumChannel(np.array(kraus), tol=tol)


def complementary_channel(T: QuantumChannel) -> QuantumChannel:
    """Map to the environment of the Stinespring dilation ``V = sum_k K_k (x) |k>``.

    ``[T_c(rho)]_{jk} = Tr[K_j rho K_k^dag]``.
    """
    return QuantumChannel(T.kraus.transpose(1, 0, 2), check=False)


def compose(outer: QuantumChannel, inner: QuantumChannel) -> QuantumChannel:
    """``outer o inner``."""
    if outer.d_in != inner.d_out:
        raise DimensionError("composition dimension mismatch", axis="d_in")
    k = np.einsum("aij,bjk->abik", outer.kraus, inner.kraus).reshape(-1, outer.d_out, inner.d_in)
    return QuantumChannel(k, check=False)


def unitary_channel(u) -> QuantumChannel:
    return QuantumChannel(np.asarray(u, dtype=complex)[None])


def tensor_channels(channels: Sequence[QuantumChannel]) -> QuantumChannel:
    kraus = channels[0].kraus
    for ch in channels[1:]:
        kraus = np.einsum("aij,bkl->abikjl", kraus, ch.kraus).reshape(
            kraus.shape[0] * ch.rank, kraus.shape[1] * ch.d_out, kraus.shape[2] * ch.d_in
        )
    return QuantumChannel(kraus, check=False)


# ----------------------------------------------------------------------------
# subsystems
# ----------------------------------------------------------------------------

def _check_dims(M: np.ndarray, dims: Sequence[int]) -> None:
    D = math.prod(dims)
    if M.ndim != 2 or M.shape != (D, D):
        raise DimensionError(
            f"matrix shape {M.shape} does not match subsystem dimensions {list(dims)} (product {D})",
            axis="dims",
        )


def partial_trace(M, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Reduce ``M`` on ``(x)_i C^{dims[i]}`` to the subsystems in ``keep``."""
    M = np.asarray(M)
    dims = [int(d) for d in dims]
    _check_dims(M, dims)
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise DimensionError("keep must be nonempty", axis="keep")
    for k in keep:
        if not 0 <= k < n:
            raise DimensionError(f"subsystem index {k} out of range for {n} subsystems", axis=f"keep[{k}]")
    t = M.reshape(dims + dims)
    rows = list(range(n))
    cols = [i if i not in keep else n + i for i in range(n)]
    out = keep + [n + k for k in keep]
    d_keep = math.prod(dims[k] for k in keep)
    return np.einsum(t, rows + cols, out).reshape(d_keep, d_keep)


def _inverse(perm: Sequence[int]) -> list[int]:
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(len(perm))):
        raise DimensionError(f"{perm} is not a permutation", axis="perm")
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p] = i
    return inv


def _power_exponent(D: int, d: int, n: int) -> None:
    if d ** n != D:
        raise DimensionError(f"dimension {D} is not {d}**{n}", axis="dims")


def permute_subsystems(M, d: int, n: int, perm: Sequence[int]) -> np.ndarray:
    """``U_pi M U_pi^dag``: input subsystem ``i`` moves to position ``perm[i]``."""
    M = np.asarray(M)
    _power_exponent(M.shape[0], d, n)
    if len(perm) != n:
        raise DimensionError(f"permutation of length {len(perm)} for {n} subsystems", axis="perm")
    inv = _inverse(perm)
    t = M.reshape((d,) * (2 * n)).transpose(inv + [n + i for i in inv])
    return t.reshape(d ** n, d ** n)


def permutation_matrix(d: int, n: int, perm: Sequence[int]) -> np.ndarray:
    """Unitary ``U_pi`` with ``U_pi M U_pi^dag == permute_subsystems(M, d, n, perm)``."""
    inv = _inverse(perm)
    D = d ** n
    src = np.arange(D).reshape((d,) * n).transpose(inv).reshape(-1)
    P = np.zeros((D, D))
    P[np.arange(D), src] = 1.0
    return P


def compose_perm(p2: Sequence[int], p1: Sequence[int]) -> list[int]:
    """Permutation ``p2 o p1`` (apply ``p1`` first)."""
    return [int(p2[p1[i]]) for i in range(len(p1))]


def symmetric_projector(d: int, n: int, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Projector ``(1/n!) sum_pi P_pi`` onto the symmetric subspace of ``(C^d)^n``."""
    D = d ** n
    if D > budget:
        raise BudgetError(f"symmetric projector of dimension {d}**{n} = {D} exceeds budget {budget}")
    P = np.zeros((D, D))
    idx = np.arange(D).reshape((d,) * n)
    rows = np.arange(D)
    for perm in itertools.permutations(range(n)):
        np.add.at(P, (rows, idx.transpose(perm).reshape(-1)), 1.0)
    return (P / math.factorial(n)).astype(complex)


def apply_kraus_to_subsystem(kraus, M: np.ndarray, dims: Sequence[int], site: int) -> np.ndarray:
    """``sum_k (I (x) K_k (x) I) M (I (x) K_k (x) I)^dag`` with ``K_k`` on ``site``.

    The Kraus operators need not be trace preserving, so the same routine
    serves Heisenberg-picture adjoints (pass ``K_k^dag``).
    """
    kraus = np.asarray(kraus)
    dims = list(dims)
    n = len(dims)
    _check_dims(M, dims)
    if kraus.shape[2] != dims[site]:
        raise DimensionError(
            f"operator acts on dimension {kraus.shape[2]}, subsystem {site} has dimension {dims[site]}",
            axis=f"site[{site}]",
        )
    t = M.reshape(dims + dims)
    out = None
    for K in kraus:
        r = np.moveaxis(np.tensordot(K, t, axes=([1], [site])), 0, site)
        r = np.moveaxis(np.tensordot(r, K.conj(), axes=([n + site], [1])), -1, n + site)
        out = r if out is None else out + r
    new = dims.copy()
    new[site] = kraus.shape[1]
    D = math.prod(new)
    return out.reshape(D, D)


def apply_to_subsystem(T: QuantumChannel, M: np.ndarray, dims: Sequence[int], site: int) -> np.ndarray:
    return apply_kraus_to_subsystem(T.kraus, M, dims, site)


def adjoint_on_subsystem(T: QuantumChannel, Y: np.ndarray, dims: Sequence[int], site: int) -> np.ndarray:
    """Heisenberg action of ``T`` on ``site``; ``dims`` are the *output* dimensions."""
    return apply_kraus_to_subsystem(T.kraus.conj().transpose(0, 2, 1), Y, dims, site)


def purify(rho) -> np.ndarray:
    """Canonical purification ``sum_i sqrt(l_i) |v_i> (x) |i>`` (system first).

    Eigenvalues are sorted descending and each eigenvector's first nonzero
    amplitude is made real positive.
    """
    rho = as_density_matrix(rho)
    w, v = np.linalg.eigh((rho + rho.conj().T) / 2)
    w, v = w[::-1], v[:, ::-1]
    for i in range(v.shape[1]):
        nz = np.flatnonzero(np.abs(v[:, i]) > 1e-12)
        if nz.size:
            a = v[nz[0], i]
            v[:, i] *= np.conj(a) / abs(a)
    psi = (v * np.sqrt(np.clip(w, 0, None))).reshape(-1)
    return psi / np.linalg.norm(psi)
