"""Problem, result and residual-summary types for the prescribed tensor solver."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import PrescurvError
from ..exprlang import ScalarExpr
from ..grid import Grid
from ..tensors import DiagonalTensorField

__all__ = [
    "Thresholds", "ResidualStat", "PrescribedProblem", "NonExistence", "Indeterminate",
    "NoSolution",
]


@dataclass(frozen=True)
class Thresholds:
    """Residuals ``<= accept`` pass, ``>= reject`` fail, anything between is indeterminate."""

    accept: float = 1e-8
    reject: float = 1e-4
    quadrature: float = 1e-10

    def __post_init__(self):
        if not 0 < self.accept < self.reject:
            raise ValueError("need 0 < accept < reject")
        if self.quadrature <= 0:
            raise ValueError("quadrature tolerance must be positive")

    def judge(self, value: float) -> str:
        if not np.isfinite(value):
            return "fail"
        if value <= self.accept:
            return "pass"
        if value >= self.reject:
            return "fail"
        return "indeterminate"


@dataclass(frozen=True)
class ResidualStat:
    max: float
    mean: float
    argmax: tuple[float, ...] | None
    count: int

    @classmethod
    def from_values(cls, values, P) -> "ResidualStat":
        values = np.asarray(values, dtype=float)
        P = np.atleast_2d(P)
        ok = ~np.isnan(values)
        if not ok.any():
            return cls(0.0, 0.0, None, 0)
        v = np.where(ok, values, -np.inf)
        i = int(np.argmax(v))
        return cls(float(values[i]), float(values[ok].mean()), tuple(float(x) for x in P[i]),
                   int(ok.sum()))

    def as_dict(self) -> dict:
        return {"max": self.max, "mean": self.mean,
                "argmax": None if self.argmax is None else list(self.argmax), "count": self.count}


@dataclass(frozen=True)
class PrescribedProblem:
    """Find ``u`` with ``A(delta/u^2) = u^2 T`` (plus a background factor ``F``).

    With a background, ``T`` is measured against ``g = delta / F^2``.
    """

    T: DiagonalTensorField
    base_point: tuple[float, ...]
    grid: Grid
    thresholds: Thresholds = field(default_factory=Thresholds)
    F: ScalarExpr | None = None

    def __post_init__(self):
        object.__setattr__(self, "base_point", tuple(float(x) for x in self.base_point))
        if len(self.base_point) != self.T.n or self.grid.n != self.T.n:
            raise ValueError("base point, grid and tensor dimensions differ")
        if self.T.n < 3:
            raise ValueError("dimension must be at least 3")

    @property
    def n(self) -> int:
        return self.T.n


@dataclass(frozen=True)
class NonExistence:
    """Certificate that no conformal metric realises the tensor.

    ``witness`` names the failed condition: ``"separable"``, ``"family-1"`` ..
    ``"family-5"``, ``"scale-sign"``, ``"single-variable-components"``,
    ``"single-variable-eq1"`` or ``"single-variable-eq2"``.
    """

    witness: str
    location: tuple[float, ...] | None
    magnitude: float
    detail: str = ""


@dataclass(frozen=True)
class Indeterminate:
    """A residual fell between the accept and reject thresholds (or input was degenerate)."""

    reason: str
    location: tuple[float, ...] | None
    magnitude: float
    detail: str = ""


class NoSolution(PrescurvError):
    """Raised by helpers whose contract returns a value; carries the certificate."""

    def __init__(self, result: NonExistence):
        self.result = result
        super().__init__(f"no solution ({result.witness}, magnitude {result.magnitude:.3e})"
                         + (f": {result.detail}" if result.detail else ""))
