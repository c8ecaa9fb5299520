"""Configuration and report types shared by the capacity solvers."""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Any

import numpy as np

from ..errors import InvariantError


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-4
    max_iter: int = 5000
    inner_tol: float = 1e-6
    seed: int = 0
    restarts: int = 3

    def __post_init__(self):
        if not self.tol > 0:
            raise InvariantError(f"tol must be positive, got {self.tol}", "tol", self.tol)
        if self.max_iter < 1:
            raise InvariantError(f"max_iter must be >= 1, got {self.max_iter}", "max_iter", self.max_iter)
        if not self.inner_tol > 0:
            raise InvariantError(f"inner_tol must be positive, got {self.inner_tol}", "inner_tol", self.inner_tol)
        if self.restarts < 1:
            raise InvariantError(f"restarts must be >= 1, got {self.restarts}", "restarts", self.restarts)

    @classmethod
    def from_mapping(cls, data: dict) -> "SolverConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise InvariantError(f"unknown solver settings: {sorted(unknown)}", "config_keys")
        return cls(**data)

    def replace(self, **kw) -> "SolverConfig":
        return SolverConfig(**{**self.__dict__, **kw})

    @property
    def sub_tol(self) -> float:
        """Accuracy for nested maximizations, kept well below ``tol``."""
        return max(min(self.inner_tol, self.tol * 1e-2), 1e-7)


@dataclass
class SolverReport:
    """Outcome of a capacity computation.

    ``value`` is the objective achieved by ``optimizer`` against the
    adversary found; ``gap`` bounds ``|value - true optimum|`` (both the
    value and the optimum lie in a certified interval of that width).
    """

    value: float
    gap: float
    iterations: int
    converged: bool
    optimizer: np.ndarray | None = None
    adversary: dict[str, Any] = field(default_factory=dict)
    details: dict[str, Any] = field(default_factory=dict)
    history: list[float] = field(default_factory=list, repr=False)

    def __post_init__(self):
        if self.gap < -1e-12:
            raise InvariantError(f"negative certified gap {self.gap:.3e}", "gap", -self.gap)
        self.value = float(self.value)
        self.gap = max(float(self.gap), 0.0)
        self.converged = bool(self.converged)
        self.iterations = int(self.iterations)

    def to_dict(self) -> dict[str, Any]:
        out = {
            "value": float(self.value),
            "gap": float(self.gap),
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
            "optimizer": self.optimizer,
            "adversary": self.adversary,
        }
        if self.details:
            out["details"] = self.details
        return out


def zero_report(reason: str, d: int = 1) -> SolverReport:
    return SolverReport(0.0, 0.0, 0, True, np.eye(d, dtype=complex) / d, {}, {"degenerate": reason})
