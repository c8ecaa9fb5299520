"""Certified first-order ascent over density matrices and probability simplices.

Every routine here maximizes a concave function ``f`` given an oracle
``fun(x, grad) -> value`` or ``(value, gradient)``.  The duality gap of the
linear maximization oracle,

    gap(x) = max_s <G(x), s> - <G(x), x>,

bounds ``sup f - f(x)`` from above by concavity; it is the stopping rule
and the certificate reported to callers.  Steps alternate between an
entropic mirror step (multiplicative, keeps iterates full rank) and a
conditional-gradient step with exact line search; a step is taken only if
it increases ``f``, so the iterate values are non-decreasing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

# Iterates never land exactly on a face: the line search stops short of 1.
GAMMA_MAX = 1.0 - 1e-10
LOG_FLOOR = 1e-300


class Spectraplex:
    """Density matrices of a fixed dimension."""

    def lmo(self, G):
        w, v = np.linalg.eigh(G)
        top = v[:, -1]
        return np.outer(top, top.conj()), w[-1]

    @staticmethod
    def inner(G, x) -> float:
        return float(np.real(np.vdot(G, x)))

    @staticmethod
    def mirror(x, G, eta):
        w, v = np.linalg.eigh((x + x.conj().T) / 2)
        logx = (v * np.log(np.clip(w, LOG_FLOOR, None))) @ v.conj().T
        h = logx + eta * G
        h = (h + h.conj().T) / 2
        w, v = np.linalg.eigh(h)
        e = np.exp(w - w.max())
        y = (v * (e / e.sum())) @ v.conj().T
        return (y + y.conj().T) / 2

    @staticmethod
    def center(d):
        return np.eye(d, dtype=complex) / d


class Simplex:
    """Probability vectors, the commutative special case."""

    def lmo(self, g):
        j = int(np.argmax(g))
        s = np.zeros_like(g)
        s[j] = 1.0
        return s, float(g[j])

    @staticmethod
    def inner(g, x) -> float:
        return float(np.dot(g, x))

    @staticmethod
    def mirror(x, g, eta):
        h = np.log(np.clip(x, LOG_FLOOR, None)) + eta * g
        e = np.exp(h - h.max())
        return e / e.sum()

    @staticmethod
    def center(d):
        return np.full(d, 1.0 / d)


SPECTRAPLEX = Spectraplex()
SIMPLEX = Simplex()


@dataclass
class AscentResult:
    x: np.ndarray
    value: float
    gap: float
    iterations: int
    converged: bool
    grad: np.ndarray | None = None
    history: list[float] = field(default_factory=list)


def duality_gap(domain, G, x) -> float:
    _, top = domain.lmo(G)
    return max(top - domain.inner(G, x), 0.0)


def maximize(
    fun: Callable,
    x0: np.ndarray,
    domain=SPECTRAPLEX,
    tol: float = 1e-6,
    max_iter: int = 5000,
    eta0: float = np.log(2.0),
) -> AscentResult:
    """Maximize a concave ``fun`` over ``domain`` starting at ``x0``."""
    x = x0
    f, G = fun(x, True)
    history = [f]
    eta = eta0
    gap = duality_gap(domain, G, x)
    it = 0
    while it < max_iter and gap > tol:
        it += 1
        moved = False
        # entropic mirror step with backtracking on the step size
        for _ in range(6):
            y = domain.mirror(x, G, eta)
            fy = fun(y, False)
            if fy > f:
                x, f = y, fy
                eta = min(eta * 1.6, 1e6)
                moved = True
                break
            eta *= 0.25
        if not moved or it % 5 == 0:
            s, _ = domain.lmo(G)
            d = s - x
            res = minimize_scalar(
                lambda t: -fun(x + t * d, False),
                bounds=(0.0, GAMMA_MAX),
                method="bounded",
                options={"xatol": 1e-12},
            )
            if -res.fun > f:
                x, f = x + res.x * d, -res.fun
                moved = True
        if not moved:
            break
        f, G = fun(x, True)
        history.append(f)
        gap = duality_gap(domain, G, x)
    return AscentResult(x, f, gap, it, gap <= tol, G, history)


def minimize(fun: Callable, x0, domain=SPECTRAPLEX, tol: float = 1e-6, max_iter: int = 5000, eta0: float = np.log(2.0)) -> AscentResult:
    """Minimize a convex ``fun``; ``value`` and ``history`` are reported un-negated."""

    def neg(x, grad):
        if grad:
            v, g = fun(x, True)
            return -v, -g
        return -fun(x, False)

    res = maximize(neg, x0, domain, tol, max_iter, eta0)
    res.value = -res.value
    res.history = [-h for h in res.history]
    if res.grad is not None:
        res.grad = -res.grad
    return res


def interior(x: np.ndarray, eps: float = 1e-9) -> np.ndarray:
    """Mix ``x`` with the domain center so every gradient is finite."""
    if x.ndim == 1:
        return (1 - eps) * x + eps / x.size
    return (1 - eps) * x + eps * np.eye(x.shape[0]) / x.shape[0]
