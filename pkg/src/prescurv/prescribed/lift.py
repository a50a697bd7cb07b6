"""Locally conformally flat backgrounds ``g = delta / F^2``.

Since ``T (.) (delta/F^2) = (T/F^2) (.) delta``, prescribing ``T`` against
``g`` is the flat problem for ``T_eff = T / F^2``; its factor ``u`` gives
``gbar = g / phi_rel^2`` with ``phi_rel = u / F``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ..curvature import ConformalMetric, riemann_oracle
from ..exprlang import ScalarExpr, diff, evaluate_many
from ..grid import Grid
from ..jets import jet_batch
from ..tensors import DiagonalTensorField, kulkarni_nomizu, SymBilinear
from .problem import PrescribedProblem, Thresholds
from .solve import Solution, solve

__all__ = [
    "LiftResult", "LiftedFactor", "lift_to_background", "effective_tensor", "required_tensor",
    "required_tensor_values", "tensor_from_riemann", "oracle_tensor", "pairing_check", "Pairing",
]


def _is_one(F: ScalarExpr) -> bool:
    return F.is_constant() and str(F) == "1.0"


def effective_tensor(F: ScalarExpr, T: DiagonalTensorField) -> DiagonalTensorField:
    return T if _is_one(F) else T.divided_by(F ** 2)


@dataclass(frozen=True)
class LiftedFactor:
    """``phi_rel = u / F`` for a flat-space solution ``u``."""

    solution: Solution
    F: ScalarExpr

    @property
    def dim(self) -> int:
        return self.F.dim

    def values(self, P) -> np.ndarray:
        P = np.atleast_2d(np.asarray(P, dtype=float))
        return self.solution.values(P) / evaluate_many(self.F, P)

    def phi_at(self, p) -> float:
        return float(self.values(np.asarray(p, dtype=float)[None])[0])


@dataclass(frozen=True)
class LiftResult:
    problem: PrescribedProblem
    result: object
    phi_rel: LiftedFactor | None


def lift_to_background(F: ScalarExpr, T: DiagonalTensorField, base_point, grid: Grid,
                       thresholds: Thresholds | None = None, workers: int | None = None) -> LiftResult:
    P = grid.points()
    Fv = evaluate_many(F, P)
    if np.any(Fv == 0):
        k = int(np.flatnonzero(Fv == 0)[0])
        raise ValueError(f"background factor vanishes at grid point {tuple(P[k])}")
    problem = PrescribedProblem(effective_tensor(F, T), base_point, grid,
                                thresholds or Thresholds(), F)
    result = solve(problem, workers)
    phi = LiftedFactor(result, F) if isinstance(result, Solution) else None
    return LiftResult(problem, result, phi)


def required_tensor(F: ScalarExpr, phi_rel: ScalarExpr) -> DiagonalTensorField:
    """Diagonal ``T`` with ``R(g/phi_rel^2) = T (.) g`` for ``g = delta/F^2``.

    ``T_i = (F/u)^2 (u_ii/u - |grad u|^2/(2u^2))`` with ``u = phi_rel F``,
    built symbolically.  Only meaningful when ``Hess u`` is diagonal.
    """
    n = F.dim
    u = phi_rel if _is_one(F) else phi_rel * F
    grads = [diff(u, a + 1) for a in range(n)]
    g2 = grads[0] * grads[0]
    for g in grads[1:]:
        g2 = g2 + g * g
    pref = (F / u) ** 2 if not _is_one(F) else 1 / u ** 2
    comps = tuple(pref * (diff(grads[i], i + 1) / u - g2 / (2 * u ** 2)) for i in range(n))
    return DiagonalTensorField(comps)


def required_tensor_values(F: ScalarExpr, phi_rel: ScalarExpr, P) -> tuple[np.ndarray, np.ndarray]:
    """Numerical ``T_i`` from jets, plus the max ``|u_ij|`` (i != j) per point."""
    n = F.dim
    m = ConformalMetric(F, phi_rel)
    u, g, H = jet_batch(m.u, P)
    Fv = evaluate_many(F, P)
    g2 = (g * g).sum(axis=1)
    A = np.diagonal(H, axis1=1, axis2=2) / u[:, None] - (g2 / (2 * u * u))[:, None]
    off = np.abs(H * ~np.eye(n, dtype=bool)).max(axis=(1, 2))
    return (Fv / u)[:, None] ** 2 * A, off


def tensor_from_riemann(R, g_diag) -> np.ndarray:
    """Least-squares diagonal ``T`` with ``(T (.) g)_ijij = R_ijij`` for diagonal ``g``."""
    c = R.components
    n = c.shape[0]
    pairs = list(combinations(range(n), 2))
    M = np.zeros((len(pairs), n))
    rhs = np.zeros(len(pairs))
    for r, (i, j) in enumerate(pairs):
        M[r, i] = g_diag[j]
        M[r, j] = g_diag[i]
        rhs[r] = c[i, j, i, j]
    T, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    return T


def oracle_tensor(F: ScalarExpr, phi_rel: ScalarExpr, p) -> tuple[np.ndarray, float]:
    """``T`` recovered from the Christoffel-route Riemann tensor and the
    max-norm gap ``|R - T (.) g|`` (zero iff the metric is realised by a diagonal T)."""
    m = ConformalMetric(F, phi_rel)
    R = riemann_oracle(m, p)
    Fv = float(evaluate_many(F, np.asarray(p, dtype=float)[None])[0])
    g = np.full(F.dim, 1.0 / Fv ** 2)
    T = tensor_from_riemann(R, g)
    gap = float(np.abs((kulkarni_nomizu(SymBilinear.diagonal(T), SymBilinear.diagonal(g))
                        - R).components).max())
    return T, gap


@dataclass(frozen=True)
class Pairing:
    """How a candidate ``T`` relates to the tensor a metric actually requires.

    ``background`` compares against ``T (.) g``, ``flat`` against
    ``T (.) delta``.  The spreads are those of ``T / T_required`` and of
    ``F^2 T / T_required``; the second is zero when ``T`` is off by ``F^-2``.
    """

    background_deviation: float
    flat_deviation: float
    confirmed: str
    ratio_spread: float
    ratio_times_F2_spread: float

    def as_dict(self) -> dict:
        return {"background_deviation": self.background_deviation,
                "flat_deviation": self.flat_deviation, "confirmed": self.confirmed,
                "ratio_spread": self.ratio_spread,
                "ratio_times_F2_spread": self.ratio_times_F2_spread}


def pairing_check(F: ScalarExpr, T: DiagonalTensorField, phi_rel: ScalarExpr, P,
                  tol: float = 1e-8) -> Pairing:
    """Which pairing, ``T (.) g`` or ``T (.) delta``, makes ``phi_rel`` a solution."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    req, _ = required_tensor_values(F, phi_rel, P)
    Fv = evaluate_many(F, P)
    given = T.values(P)
    scale = 1.0 + np.abs(req)
    dev_bg = float((np.abs(given - req) / scale).max())
    flat = req / (Fv * Fv)[:, None]
    dev_flat = float((np.abs(given - flat) / (1.0 + np.abs(flat))).max())
    if dev_bg <= tol:
        confirmed = "background"
    elif dev_flat <= tol:
        confirmed = "flat"
    else:
        confirmed = "neither"
    with np.errstate(all="ignore"):
        ratio = given / req
    ok = np.isfinite(ratio) & (np.abs(req) > 1e-12)
    r = ratio[ok]
    r2 = (ratio * (Fv * Fv)[:, None])[ok]
    spread = float(r.max() - r.min()) if r.size else 0.0
    spread2 = float(r2.max() - r2.min()) if r2.size else 0.0
    return Pairing(dev_bg, dev_flat, confirmed, spread, spread2)
