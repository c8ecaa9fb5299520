"""Classical channel quantities: Blahut-Arimoto capacity, compound capacity
over the convex hull of a kernel set, symmetrizability of an arbitrarily
varying kernel, and the classical-versus-assisted separation report."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np
from scipy.optimize import linprog, minimize_scalar

from ..errors import DimensionError, SolverError
from ..measures import _classical_mi
from ..models import AvcKernel, as_stochastic, classical_embedding
from ..optimize import SIMPLEX, interior, minimize
from .base import SolverConfig, SolverReport
from .quantum import fqavc_ea_capacity

LP_TOL = 1e-9


def _divergences(W: np.ndarray, q: np.ndarray) -> np.ndarray:
    """``D(W(.|x) || q)`` in bits for every input ``x``."""
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(W > 0, W * np.log2(W / q[:, None]), 0.0)
    return terms.sum(axis=0)


def _blahut_arimoto(W: np.ndarray, p0: np.ndarray, tol: float, max_iter: int):
    p = p0.copy()
    history = []
    it = 0
    while True:
        D = _divergences(W, W @ p)
        value = float(p @ D)
        history.append(value)
        gap = float(D.max() - value)
        if gap <= tol or it >= max_iter:
            break
        p = p * np.exp2(D - D.max())
        p /= p.sum()
        it += 1
    return p, value, max(gap, 0.0), it, history


def classical_ba_capacity(W, cfg: SolverConfig | None = None) -> SolverReport:
    """Capacity ``max_p I(p; W)`` of a stochastic matrix ``W[y, x]``.

    The gap ``max_x D(W(.|x) || Wp) - I(p; W)`` is the standard upper
    certificate.
    """
    cfg = cfg or SolverConfig()
    W = as_stochastic(W)
    Y, X = W.shape
    if X == 1 or Y == 1:
        return SolverReport(0.0, 0.0, 0, True, np.ones(X) / X, details={"degenerate": "single symbol"})
    p, value, gap, it, history = _blahut_arimoto(W, np.full(X, 1.0 / X), cfg.tol, cfg.max_iter)
    return SolverReport(value, gap, it, gap <= cfg.tol, p, history=history)


def _hull_gradient(kernels: Sequence[np.ndarray], lam: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Gradient of ``lam -> I(p; sum_j lam_j W_j)``."""
    W = np.einsum("j,jyx->yx", lam, kernels)
    q = W @ p
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.where(W > 0, np.log2(W / q[:, None]), 0.0)
    return np.einsum("jyx,yx,x->j", kernels, logs, p)


def _inner_min_hull(kernels: np.ndarray, p: np.ndarray, cfg: SolverConfig):
    """``min_lam I(p; W_lam)`` with a certified lower bound."""
    J = len(kernels)

    def fun(lam, grad):
        v = _classical_mi(p, np.einsum("j,jyx->yx", lam, kernels))
        return (v, _hull_gradient(kernels, lam, p)) if grad else v

    if J == 2:
        res = minimize_scalar(lambda t: fun(np.array([1 - t, t]), False), bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-12})
        lam = np.array([1 - res.x, res.x])
    else:
        lam = minimize(fun, SIMPLEX.center(J), SIMPLEX, cfg.inner_tol * 1e-2, cfg.max_iter).x
    lam = interior(lam)
    v, g = fun(lam, True)
    lower = v - max(float(g @ lam - g.min()), 0.0)
    return v, lower, lam


def classical_compound_capacity(kernels: Sequence, cfg: SolverConfig | None = None) -> SolverReport:
    """``max_p min_{W in conv(kernels)} I(p; W)``, single-letter.

    Solved from the hull side, ``min_lam C(W_lam)``, with Blahut-Arimoto
    for each hull point; the optimal input is cross-evaluated against its
    own worst hull point to close the certified interval.
    """
    cfg = cfg or SolverConfig()
    Ws = np.array([as_stochastic(W) for W in kernels])
    if Ws.ndim != 3:
        raise DimensionError("kernels must share one shape", axis="kernels")
    J, Y, X = Ws.shape
    if J == 1:
        rep = classical_ba_capacity(Ws[0], cfg)
        rep.adversary = {"weights": [1.0]}
        rep.details["label"] = "single-letter lower bound"
        return rep
    if X == 1 or Y == 1:
        return SolverReport(0.0, 0.0, 0, True, np.ones(X) / X, {"weights": [1.0 / J] * J}, {"degenerate": "single symbol"})
    sub_tol = cfg.sub_tol
    state = {"p": np.full(X, 1.0 / X), "upper": np.inf, "phi": np.inf, "lam": None, "p_at": None, "iterations": 0}

    def phi(lam, grad):
        lam = np.clip(lam, 0.0, None)
        lam = lam / lam.sum()
        p, value, gap, it, _ = _blahut_arimoto(np.einsum("j,jyx->yx", lam, Ws), state["p"], sub_tol, cfg.max_iter)
        state["iterations"] += it
        state["p"] = p
        state["upper"] = min(state["upper"], value + gap)
        if value < state["phi"]:
            state.update(phi=value, lam=lam, p_at=p)
        return (value, _hull_gradient(Ws, lam, p)) if grad else value

    if J == 2:
        minimize_scalar(lambda t: phi(np.array([1 - t, t]), False), bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-10})
    else:
        minimize(phi, SIMPLEX.center(J), SIMPLEX, sub_tol, cfg.max_iter)
    p = state["p_at"]
    value, lower, inner_lam = _inner_min_hull(Ws, p, cfg)
    gap = max(state["upper"] - lower, 0.0)
    return SolverReport(
        value=value,
        gap=gap,
        iterations=state["iterations"],
        converged=gap <= cfg.tol,
        optimizer=p,
        adversary={"weights": state["lam"].tolist(), "inner_weights": inner_lam.tolist()},
        details={"label": "single-letter lower bound", "hull_value": state["phi"]},
    )


# ----------------------------------------------------------------------------
# symmetrizability
# ----------------------------------------------------------------------------

@dataclass
class SymmetrizabilityResult:
    symmetrizable: bool
    certificate: np.ndarray  # U[s, x] = U(s|x) if symmetrizable, else Farkas vector
    residual: float

    def to_dict(self) -> dict[str, Any]:
        key = "certificate" if self.symmetrizable else "witness"
        return {"symmetrizable": self.symmetrizable, key: self.certificate, "residual": self.residual}


def _symmetrizability_system(W: np.ndarray):
    Y, X, S = W.shape
    rows, rhs = [], []
    # unknown u[x, s] = U(s|x) at column x * S + s
    for x in range(X):
        for xp in range(x + 1, X):
            for y in range(Y):
                r = np.zeros(X * S)
                r[xp * S:(xp + 1) * S] += W[y, x, :]
                r[x * S:(x + 1) * S] -= W[y, xp, :]
                rows.append(r)
                rhs.append(0.0)
    for x in range(X):
        r = np.zeros(X * S)
        r[x * S:(x + 1) * S] = 1.0
        rows.append(r)
        rhs.append(1.0)
    return np.array(rows), np.array(rhs)


def symmetrizability_check(kernel: AvcKernel) -> SymmetrizabilityResult:
    """Decide whether some ``U(s|x)`` makes ``sum_s W(y|x,s) U(s|x')`` symmetric in ``(x, x')``.

    Feasible: the certificate is ``U[s, x]``.  Infeasible: a Farkas vector
    ``y`` with ``A^T y >= 0`` and ``b^T y < 0`` is returned.  Any numerical
    outcome that cannot be verified to ``1e-9`` raises :class:`SolverError`.
    """
    W = kernel.W
    _, X, S = W.shape
    A, b = _symmetrizability_system(W)
    res = linprog(np.zeros(A.shape[1]), A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    if res.status == 0:
        u = res.x
        residual = float(np.max(np.abs(A @ u - b)))
        if residual > LP_TOL or u.min() < -LP_TOL:
            raise SolverError(f"LP returned an unverifiable symmetrizer (residual {residual:.3e})")
        U = np.clip(u, 0.0, None).reshape(X, S).T
        return SymmetrizabilityResult(True, U, residual)
    if res.status != 2:
        raise SolverError(f"symmetrizability LP failed: {res.message}")
    # Farkas alternative: min b.y  s.t.  A^T y >= 0,  b.y >= -1
    m = A.shape[0]
    far = linprog(
        b,
        A_ub=np.vstack([-A.T, -b[None, :]]),
        b_ub=np.concatenate([np.zeros(A.shape[1]), [1.0]]),
        bounds=(None, None),
        method="highs",
    )
    if far.status != 0 or far.fun > -LP_TOL:
        raise SolverError("symmetrizability LP reported infeasible but no separating witness was found")
    y = far.x
    slack = float((A.T @ y).min())
    if slack < -LP_TOL:
        raise SolverError(f"Farkas witness violates A^T y >= 0 by {-slack:.3e}")
    return SymmetrizabilityResult(False, y.reshape(m), float(b @ y))


# ----------------------------------------------------------------------------
# separation
# ----------------------------------------------------------------------------

@dataclass
class SeparationReport:
    symmetrizable: bool
    certificate: np.ndarray
    classical_avc_value: float | None
    compound_value: float
    compound_gap: float
    fqavc_ea_value: float
    fqavc_ea_gap: float
    separation: bool
    artifacts: dict[str, Any]

    def to_dict(self) -> dict[str, Any]:
        return {
            "symmetrizable": self.symmetrizable,
            "certificate" if self.symmetrizable else "witness": self.certificate,
            "classical_avc_value": self.classical_avc_value,
            "compound_value": self.compound_value,
            "compound_gap": self.compound_gap,
            "compound_label": "single-letter lower bound",
            "fqavc_ea_value": self.fqavc_ea_value,
            "fqavc_ea_gap": self.fqavc_ea_gap,
            "separation": self.separation,
        }


def separation_report(kernel: AvcKernel, cfg: SolverConfig | None = None) -> SeparationReport:
    """Zero deterministic classical capacity next to positive assisted capacity.

    Symmetrizability forces the deterministic-code classical AVC capacity to
    zero; the compound value over the hull of jammer columns is a lower bound
    on the random-code classical capacity, which in turn bounds the
    entanglement-assisted capacity of the embedded jammer channel from below.
    """
    cfg = cfg or SolverConfig()
    sym = symmetrizability_check(kernel)
    comp = classical_compound_capacity(kernel.columns(), cfg)
    fq = fqavc_ea_capacity(classical_embedding(kernel), cfg)
    return SeparationReport(
        symmetrizable=sym.symmetrizable,
        certificate=sym.certificate,
        classical_avc_value=0.0 if sym.symmetrizable else None,
        compound_value=comp.value,
        compound_gap=comp.gap,
        fqavc_ea_value=fq.value,
        fqavc_ea_gap=fq.gap,
        separation=bool(sym.symmetrizable and comp.value > cfg.tol),
        artifacts={
            "compound_input": comp.optimizer,
            "compound_weights": comp.adversary.get("weights"),
            "fqavc_input": fq.optimizer,
            "fqavc_worst_state": fq.adversary.get("worst_state"),
            "fqavc_active_states": fq.adversary.get("active_states"),
        },
    )
