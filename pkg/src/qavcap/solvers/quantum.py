"""Entanglement-assisted capacities of single channels, compound sets,
arbitrarily varying sets (convex hulls) and jammer channels.

All four problems share the objective ``f(rho, T) = I(A':B)`` written in the
purified form ``S(rho) + S(T(rho)) - S(T_c(rho))``, which is concave in the
input ``rho`` and convex in the channel ``T``.  Every report carries a
certified interval: a lower bound from evaluating the optimizer against
the adversary found, and an upper bound from a concavity (Frank-Wolfe)
certificate.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from ..core import (
    JammerChannel,
    QuantumChannel,
    apply_kraus_to_subsystem,
    complementary_channel,
    purify,
    random_density_matrix,
)
from ..errors import DimensionError, SolverError
from ..measures import entropy_of_spectrum, log2_psd, mi_of_input, mi_value_and_gradient
from ..models import ChannelSet, convex_mix, slice_channel
from ..optimize import SIMPLEX, SPECTRAPLEX, duality_gap, interior, maximize, minimize
from .base import SolverConfig, SolverReport, zero_report

log = logging.getLogger(__name__)

MAX_ACTIVE = 64
SOFTMIN_START = 10.0
SOFTMIN_END = 1e-3
SOFTMIN_FACTOR = 0.5
SOFTMIN_STEPS = 25


def _entropy(M: np.ndarray) -> float:
    w = np.linalg.eigvalsh((M + M.conj().T) / 2)
    return entropy_of_spectrum(np.clip(w, 0.0, None))


class _Member:
    __slots__ = ("T", "Tc")

    def __init__(self, T: QuantumChannel):
        self.T = T
        self.Tc = complementary_channel(T)

    def value(self, rho):
        return mi_of_input(rho, self.T, self.Tc)

    def value_grad(self, rho):
        return mi_value_and_gradient(rho, self.T, self.Tc)


def _weighted(members: list[_Member], weights) -> callable:
    active = [(float(w), m) for w, m in zip(weights, members) if w > 0]

    def fun(rho, grad):
        if not grad:
            return sum(w * m.value(rho) for w, m in active)
        val, G = 0.0, 0.0
        for w, m in active:
            v, g = m.value_grad(rho)
            val += w * v
            G = G + w * g
        return val, G

    return fun


def _softmin(members: list[_Member], mu: float) -> callable:
    def fun(rho, grad):
        if not grad:
            vals = np.array([m.value(rho) for m in members])
            lo = vals.min()
            return lo - mu * np.log(np.sum(np.exp(-(vals - lo) / mu)))
        pairs = [m.value_grad(rho) for m in members]
        vals = np.array([p[0] for p in pairs])
        lo = vals.min()
        e = np.exp(-(vals - lo) / mu)
        w = e / e.sum()
        G = sum(wj * p[1] for wj, p in zip(w, pairs))
        return lo - mu * np.log(e.sum()), G

    return fun


def _degenerate(d_in: int, d_out: int) -> bool:
    return d_in == 1 or d_out == 1


def _start_states(d: int, cfg: SolverConfig) -> list[np.ndarray]:
    rng = np.random.default_rng(cfg.seed)
    starts = [np.eye(d, dtype=complex) / d]
    for _ in range(cfg.restarts - 1):
        starts.append(0.5 * random_density_matrix(d, rng) + 0.5 * np.eye(d) / d)
    return starts


# ----------------------------------------------------------------------------
# single channel
# ----------------------------------------------------------------------------

def ea_capacity(T: QuantumChannel, cfg: SolverConfig | None = None) -> SolverReport:
    """Entanglement-assisted capacity ``max_rho I(A':B)`` of one channel.

    Conditional-gradient ascent from ``cfg.restarts`` starting points (the
    maximally mixed state first, then seeded random states); the best run is
    reported with its duality gap.
    """
    cfg = cfg or SolverConfig()
    if _degenerate(T.d_in, T.d_out):
        return zero_report("trivial input or output dimension", T.d_in)
    fun = _weighted([_Member(T)], [1.0])
    best, values = None, []
    for x0 in _start_states(T.d_in, cfg):
        res = maximize(fun, x0, SPECTRAPLEX, cfg.tol, cfg.max_iter)
        values.append(res.value)
        if best is None or res.value > best.value + 1e-12:
            best = res
    return SolverReport(
        value=best.value,
        gap=best.gap,
        iterations=best.iterations,
        converged=best.converged,
        optimizer=best.x,
        details={"restart_values": values},
        history=best.history,
    )


# ----------------------------------------------------------------------------
# compound sets
# ----------------------------------------------------------------------------

@dataclass
class _Bounds:
    """Best certified lower and upper bounds seen so far."""

    lower: float = -np.inf
    upper: float = np.inf
    rho: np.ndarray | None = None
    lam: np.ndarray | None = None
    member_values: np.ndarray | None = None
    history: list[float] = field(default_factory=list)

    def offer_lower(self, value, rho, member_values=None):
        if value > self.lower + 1e-15:
            self.lower, self.rho, self.member_values = value, rho, member_values
        self.history.append(self.lower)

    def offer_upper(self, value, lam):
        if value < self.upper:
            self.upper, self.lam = value, np.asarray(lam, dtype=float)


def _certificate(members, rho, lam) -> float:
    """``min``-linearization bound on ``sup f - f(rho)`` for ``f = min_j f_j``.

    For any weights ``lam``: ``f(s) <= sum_j lam_j [f_j(rho) + Tr G_j (s - rho)]``.
    """
    pairs = [m.value_grad(rho) for m in members]
    vals = np.array([p[0] for p in pairs])
    G = sum(l * p[1] for l, p in zip(lam, pairs))
    lin = float(np.dot(lam, vals))
    return duality_gap(SPECTRAPLEX, G, rho) + lin - vals.min()


def _simplex_point(t: float) -> np.ndarray:
    return np.array([1.0 - t, t])


def _compound_core(channels: list[QuantumChannel], cfg: SolverConfig, rho0=None) -> dict:
    members = [_Member(T) for T in channels]
    J = len(members)
    d = channels[0].d_in
    bounds = _Bounds()
    rho = np.eye(d, dtype=complex) / d if rho0 is None else rho0
    sub_tol = cfg.sub_tol
    iterations = 0

    def member_values(r):
        return np.array([m.value(r) for m in members])

    # smoothed minimum, temperature 10 -> 1e-3; provides a warm start
    mu = SOFTMIN_START
    while mu >= SOFTMIN_END * (1 - 1e-12):
        res = maximize(_softmin(members, mu), rho, SPECTRAPLEX, sub_tol, SOFTMIN_STEPS)
        iterations += res.iterations
        rho = res.x
        vals = member_values(rho)
        bounds.offer_lower(vals.min(), rho, vals)
        mu *= SOFTMIN_FACTOR
    w = np.exp(-(vals - vals.min()) / (mu / SOFTMIN_FACTOR))
    lam0 = w / w.sum()

    # dual: minimize g(lam) = max_rho sum_j lam_j f_j(rho), convex in lam
    state = {"rho": rho}

    def g(lam, grad):
        nonlocal iterations
        res = maximize(_weighted(members, lam), state["rho"], SPECTRAPLEX, sub_tol, cfg.max_iter)
        iterations += res.iterations
        state["rho"] = res.x
        vals = member_values(res.x)
        bounds.offer_lower(vals.min(), res.x, vals)
        bounds.offer_upper(res.value + res.gap, lam)
        return (res.value, vals) if grad else res.value

    if J == 2:
        minimize_scalar(
            lambda t: g(_simplex_point(t), False),
            bounds=(0.0, 1.0),
            method="bounded",
            options={"xatol": 1e-10},
        )
    else:
        minimize(g, interior(lam0, 1e-6), SIMPLEX, sub_tol, cfg.max_iter)

    cert = _certificate(members, bounds.rho, bounds.lam)
    gap = max(min(bounds.upper - bounds.lower, cert), 0.0)
    vals = bounds.member_values
    return {
        "value": bounds.lower,
        "gap": gap,
        "upper": bounds.lower + gap,
        "rho": bounds.rho,
        "lam": bounds.lam,
        "member_values": vals,
        "iterations": iterations,
        "history": bounds.history,
    }


def compound_ea_capacity(channels: ChannelSet | list[QuantumChannel], cfg: SolverConfig | None = None) -> SolverReport:
    """``sup_rho min_j I(A':B)_j`` over a finite set of channels."""
    cfg = cfg or SolverConfig()
    cset = channels if isinstance(channels, ChannelSet) else ChannelSet(list(channels))
    if _degenerate(cset.d_in, cset.d_out):
        return zero_report("trivial input or output dimension", cset.d_in)
    if len(cset) == 1:
        rep = ea_capacity(cset.members[0], cfg)
        rep.adversary = {"weights": [1.0], "minimizers": [0], "labels": cset.labels}
        return rep
    out = _compound_core(cset.members, cfg)
    vals = out["member_values"]
    active = [int(j) for j in np.flatnonzero(vals <= vals.min() + cfg.tol)]
    return SolverReport(
        value=out["value"],
        gap=out["gap"],
        iterations=out["iterations"],
        converged=out["gap"] <= cfg.tol,
        optimizer=out["rho"],
        adversary={
            "weights": out["lam"].tolist(),
            "minimizers": active,
            "member_values": vals.tolist(),
            "labels": cset.labels,
        },
        history=out["history"],
    )


# ----------------------------------------------------------------------------
# affine channel families: convex hulls and jammer slices
# ----------------------------------------------------------------------------

def _purified_projector(rho: np.ndarray) -> np.ndarray:
    psi = purify(rho)
    return np.outer(psi, psi.conj())


def mixture_basis(channels: list[QuantumChannel], rho: np.ndarray):
    """Outputs ``T_j(rho)`` and ``(T_j (x) id)(psi_rho)`` for every member."""
    d = rho.shape[0]
    P = _purified_projector(rho)
    M1 = np.array([T.apply(rho) for T in channels])
    M2 = np.array([apply_kraus_to_subsystem(T.kraus, P, [d, d], 0) for T in channels])
    return M1, M2


def jammer_basis(T: JammerChannel, rho: np.ndarray):
    """Outputs of ``sigma -> T(rho (x) sigma)`` and its purified version on ``|s><t|``.

    Returns arrays indexed ``[s, t, ...]``.
    """
    dA, dS, dB = T.d_A, T.d_S, T.d_B
    K = T.map.kraus.reshape(-1, dB, dA, dS)
    psi = purify(rho).reshape(dA, dA)
    M1 = np.einsum("kbas,ac,kect->stbe", K, rho, K.conj(), optimize=True)
    A = np.einsum("kbas,ar->ksbr", K, psi, optimize=True)
    M2 = np.einsum("ksbr,ktcq->stbrcq", A, A.conj(), optimize=True).reshape(dS, dS, dB * dA, dB * dA)
    return M1, M2


def _family_objective(S0: float, M1: np.ndarray, M2: np.ndarray, kind: str) -> callable:
    """``theta -> S0 + S(M1(theta)) - S(M2(theta))`` with its gradient in ``theta``.

    ``kind='simplex'``: ``theta`` is a weight vector; ``kind='states'``:
    ``theta`` is a density matrix and the gradient a Hermitian matrix ``G``
    with directional derivative ``Tr[G D]``.
    """
    if kind == "simplex":
        contract, back = "j,jab->ab", "jab,ba->j"
    else:
        contract, back = "st,stab->ab", "stab,ba->ts"

    def fun(theta, grad):
        A = np.einsum(contract, theta, M1)
        B = np.einsum(contract, theta, M2)
        val = S0 + _entropy(A) - _entropy(B)
        if not grad:
            return val
        G = -np.einsum(back, M1, log2_psd(A)) + np.einsum(back, M2, log2_psd(B))
        if kind == "simplex":
            return val, np.real(G)
        return val, (G + G.conj().T) / 2

    return fun


def _certified_min(fun, x, domain) -> tuple[float, float, np.ndarray]:
    """Value at ``x`` and a certified lower bound on the minimum (convex ``fun``)."""
    x = interior(x)
    v, G = fun(x, True)
    _, top = domain.lmo(-G)
    gap = max(top - domain.inner(-G, x), 0.0)
    return v, v - gap, x


def inner_min_mixture(channels: list[QuantumChannel], rho: np.ndarray, cfg: SolverConfig) -> dict:
    """``min_lam f(rho, sum_j lam_j T_j)`` with a certified lower bound."""
    M1, M2 = mixture_basis(channels, rho)
    fun = _family_objective(_entropy(rho), M1, M2, "simplex")
    J = len(channels)
    if J == 1:
        lam = np.ones(1)
    elif J == 2:
        res = minimize_scalar(lambda t: fun(_simplex_point(t), False), bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-12})
        lam = _simplex_point(res.x)
        ends = [fun(_simplex_point(0.0), False), fun(_simplex_point(1.0), False)]
        if min(ends) < res.fun:
            lam = _simplex_point(float(np.argmin(ends)))
    else:
        lam = minimize(fun, SIMPLEX.center(J), SIMPLEX, cfg.inner_tol * 1e-2, cfg.max_iter).x
    value, lower, lam = _certified_min(fun, lam, SIMPLEX)
    return {"value": value, "lower": lower, "weights": lam}


def inner_min_jammer(T: JammerChannel, rho: np.ndarray, cfg: SolverConfig) -> dict:
    """``min_sigma f(rho, T_sigma)`` over all jammer states, certified.

    Conditional-gradient descent on the state space followed by an
    extreme-point polish: each eigenvector of the minimizer is tried as a
    pure jammer state.
    """
    M1, M2 = jammer_basis(T, rho)
    fun = _family_objective(_entropy(rho), M1, M2, "states")
    res = minimize(fun, SPECTRAPLEX.center(T.d_S), SPECTRAPLEX, cfg.inner_tol * 1e-2, cfg.max_iter)
    sigma = res.x
    best = fun(interior(sigma), False)
    _, vecs = np.linalg.eigh(sigma)
    for i in range(T.d_S - 1, -1, -1):
        pure = np.outer(vecs[:, i], vecs[:, i].conj())
        v = fun(interior(pure), False)
        if v < best - 1e-12:
            sigma, best = pure, v
    value, lower, sigma = _certified_min(fun, sigma, SPECTRAPLEX)
    return {"value": value, "lower": lower, "sigma": sigma, "iterations": res.iterations}


def _is_mixed(sigma: np.ndarray, tol: float = 1e-6) -> bool:
    w = np.linalg.eigvalsh(sigma)
    return bool(w[-2] > tol) if w.size > 1 else False


# ----------------------------------------------------------------------------
# arbitrarily varying sets
# ----------------------------------------------------------------------------

def avqc_ea_capacity(channels: ChannelSet | list[QuantumChannel], cfg: SolverConfig | None = None) -> SolverReport:
    """``sup_rho inf_{T in conv(set)} I(A':B)``.

    The concave-convex saddle is approached from the hull side: the convex
    function ``phi(lam) = max_rho f(rho, T_lam)`` is minimized over the
    weights (exact bounded search for two members, conditional gradient on
    the simplex otherwise) and the resulting input is cross-evaluated against
    its own inner minimizer.
    """
    cfg = cfg or SolverConfig()
    cset = channels if isinstance(channels, ChannelSet) else ChannelSet(list(channels))
    if _degenerate(cset.d_in, cset.d_out):
        return zero_report("trivial input or output dimension", cset.d_in)
    if len(cset) == 1:
        rep = ea_capacity(cset.members[0], cfg)
        rep.adversary = {"weights": [1.0], "labels": cset.labels}
        return rep
    J = len(cset)
    d = cset.d_in
    sub_tol = cfg.sub_tol
    state = {"rho": np.eye(d, dtype=complex) / d, "upper": np.inf, "lam": None, "rho_at": None, "phi": np.inf}
    iterations = 0

    def phi(lam, grad):
        nonlocal iterations
        lam = np.clip(lam, 0.0, None)
        lam = lam / lam.sum()
        res = maximize(_weighted([_Member(convex_mix(cset, lam))], [1.0]), state["rho"], SPECTRAPLEX, sub_tol, cfg.max_iter)
        iterations += res.iterations
        state["rho"] = res.x
        state["upper"] = min(state["upper"], res.value + res.gap)
        if res.value < state["phi"]:
            state.update(phi=res.value, lam=lam, rho_at=res.x)
        if not grad:
            return res.value
        M1, M2 = mixture_basis(cset.members, res.x)
        _, g = _family_objective(_entropy(res.x), M1, M2, "simplex")(lam, True)
        return res.value, g

    if J == 2:
        minimize_scalar(lambda t: phi(_simplex_point(t), False), bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-10})
    else:
        minimize(phi, SIMPLEX.center(J), SIMPLEX, sub_tol, cfg.max_iter)

    rho = state["rho_at"]
    inner = inner_min_mixture(cset.members, rho, cfg)
    gap = max(state["upper"] - inner["lower"], 0.0)
    return SolverReport(
        value=inner["value"],
        gap=gap,
        iterations=iterations,
        converged=gap <= cfg.tol,
        optimizer=rho,
        adversary={
            "weights": state["lam"].tolist(),
            "inner_weights": inner["weights"].tolist(),
            "labels": cset.labels,
        },
        details={"hull_value": state["phi"], "cross_value": inner["value"]},
    )


# ----------------------------------------------------------------------------
# jammer channels
# ----------------------------------------------------------------------------

def fqavc_ea_capacity(T: JammerChannel, cfg: SolverConfig | None = None) -> SolverReport:
    """``sup_rho inf_sigma I(A':B)`` over slices ``T_sigma`` of a jammer channel.

    Exchange method: keep a finite active set of jammer states, solve the
    compound problem over their slices (an upper bound), find the worst
    jammer state against that input (a lower bound) and add it, until the
    two bounds meet within ``cfg.tol``.
    """
    cfg = cfg or SolverConfig()
    if not isinstance(T, JammerChannel):
        raise DimensionError("fqavc_ea_capacity expects a JammerChannel", axis="channel")
    if _degenerate(T.d_A, T.d_B):
        return zero_report("trivial input or output dimension", T.d_A)
    rho = np.eye(T.d_A, dtype=complex) / T.d_A
    first = inner_min_jammer(T, rho, cfg)
    active = [first["sigma"]]
    best = {"lower": first["lower"], "value": first["value"], "rho": rho, "sigma": first["sigma"]}
    upper, lam, iterations, rounds = np.inf, np.ones(1), 0, 0
    history = [best["lower"]]
    converged = False
    while True:
        rounds += 1
        slices = [slice_channel(T, s) for s in active]
        if len(slices) == 1:
            rep = ea_capacity(slices[0], cfg.replace(tol=cfg.sub_tol, restarts=1))
            comp = {"value": rep.value, "upper": rep.value + rep.gap, "rho": rep.optimizer, "lam": np.ones(1)}
            iterations += rep.iterations
        else:
            comp = _compound_core(slices, cfg, rho)
            iterations += comp["iterations"]
        rho = comp["rho"]
        if comp["upper"] < upper:
            upper, lam = comp["upper"], comp["lam"]
        inner = inner_min_jammer(T, rho, cfg)
        if inner["lower"] > best["lower"]:
            best = {"lower": inner["lower"], "value": inner["value"], "rho": rho, "sigma": inner["sigma"]}
        history.append(best["lower"])
        log.debug("exchange round %d: upper %.10f lower %.10f", rounds, upper, best["lower"])
        if upper - best["lower"] <= cfg.tol:
            converged = True
            break
        if rounds >= cfg.max_iter:
            break
        if len(active) >= MAX_ACTIVE:
            raise SolverError(
                f"active jammer set reached {MAX_ACTIVE} states before convergence "
                f"(upper {upper:.6g}, lower {best['lower']:.6g})"
            )
        active.append(inner["sigma"])
    gap = max(upper - best["lower"], 0.0)
    return SolverReport(
        value=best["value"],
        gap=gap,
        iterations=iterations,
        converged=converged,
        optimizer=best["rho"],
        adversary={
            "active_states": active,
            "weights": np.asarray(lam).tolist(),
            "worst_state": best["sigma"],
            "worst_state_mixed": _is_mixed(best["sigma"]),
        },
        details={"rounds": rounds, "upper": upper, "lower": best["lower"]},
        history=history,
    )
