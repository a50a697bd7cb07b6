"""Reconstruction of the conformal factor and the end-to-end solver.

``ln u`` is recovered as the line integral of ``G`` (see :mod:`.gradient`)
along an axis-aligned polyline from the base point; its multiplicative
constant comes from the diagonal equations at the base point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import Degenerate, ScaleInconsistent
from ..grid import Grid, map_chunks
from ..quadrature import adaptive_simpson
from ..tensors import DiagonalTensorField
from .gradient import (DEN_EPS, diagonal_terms, family_residuals, governing_residuals,
                    gradient_data)
from .problem import (Indeterminate, NonExistence, NoSolution, PrescribedProblem,
                      ResidualStat, Thresholds)

__all__ = [
    "reconstruct_log", "reconstruct_phi", "determine_scale", "scale_ratios", "Solution",
    "solve", "is_separable", "separable_nonexistence", "sweep_families",
]

FAMILIES = ("family-1", "family-2", "family-3", "family-5")


def _leg_order(n: int, order: str) -> list[int]:
    if order == "forward":
        return list(range(n))
    if order == "reversed":
        return list(range(n - 1, -1, -1))
    raise ValueError(f"order must be 'forward' or 'reversed', got {order!r}")


def reconstruct_log(T: DiagonalTensorField, base, Q, tol: float = 1e-10,
                    order: str = "forward") -> np.ndarray:
    """``ln u(q) - ln u(base)`` for each row of ``Q``.

    The path moves one coordinate at a time, in index order (or reversed),
    and each leg is integrated by adaptive Simpson to absolute ``tol``.
    """
    base = np.asarray(base, dtype=float)
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    m, n = Q.shape
    total = np.zeros(m)
    cur = np.tile(base, (m, 1))
    for a in _leg_order(n, order):
        start = cur.copy()

        def integrand(seg, t, a=a, start=start):
            P = start[seg]
            P[:, a] = t
            return gradient_data(T, P, order=1).G[:, a]

        total += adaptive_simpson(integrand, start[:, a], Q[:, a], tol)
        cur[:, a] = Q[:, a]
    return total


def reconstruct_phi(T: DiagonalTensorField, base_point, query_point, quad_tol: float = 1e-10,
                    order: str = "forward") -> float:
    """``u(query) / u(base)``; exactly 1 when the two points coincide."""
    L = reconstruct_log(T, base_point, np.asarray(query_point, dtype=float)[None], quad_tol, order)
    return float(np.exp(L[0]))


def scale_ratios(T: DiagonalTensorField, base_point) -> tuple[np.ndarray, np.ndarray]:
    """Candidate ``C^2 = S_i / f_i`` at the base point and the mask of usable ``i``."""
    ld = gradient_data(T, np.asarray(base_point, dtype=float)[None])
    S = diagonal_terms(ld)[0]
    F = ld.F[0]
    usable = np.abs(F) > DEN_EPS * np.abs(F).max()
    with np.errstate(all="ignore"):
        ratios = np.where(usable, S / np.where(usable, F, 1.0), np.nan)
    return ratios, usable


def determine_scale(T: DiagonalTensorField, base_point, tol: float | None = 1e-8) -> float:
    """The constant ``C = u(base)`` fixed by the diagonal equations.

    Uses the first index with maximal ``|f_i(base)|``.  With ``tol`` set, all
    usable indices must agree to ``tol`` relative, else ScaleInconsistent.
    A nonpositive ratio raises :class:`NoSolution` (witness ``scale-sign``).
    """
    base = tuple(float(x) for x in base_point)
    ld = gradient_data(T, np.asarray(base)[None])
    S = diagonal_terms(ld)[0]
    F = ld.F[0]
    i = int(np.argmax(np.abs(F)))
    if F[i] == 0:
        raise Degenerate("every f_i vanishes at the base point", point=base)
    ratio = S[i] / F[i]
    if not ratio > 0:
        raise NoSolution(NonExistence(
            "scale-sign", base, float(abs(S[i]) + abs(F[i])),
            f"C^2 = S_{i + 1}/f_{i + 1} = {ratio!r} is not positive"))
    if tol is not None:
        ratios, usable = scale_ratios(T, base)
        r = ratios[usable]
        spread = float(r.max() - r.min())
        if spread > tol * max(1.0, abs(ratio)):
            raise ScaleInconsistent(tuple(float(x) for x in ratios), spread)
    return float(np.sqrt(ratio))


def is_separable(T: DiagonalTensorField, grid: Grid | None = None) -> bool:
    """True when each ``f_i`` depends on ``x_i`` alone and not all vanish.

    Structural (free variables) with a numerical confirmation on ``grid``
    that ``d_j f_i = 0`` for ``j != i``.
    """
    return separable_nonexistence(T, grid) is not None


def separable_nonexistence(T: DiagonalTensorField, grid: Grid | None = None) -> NonExistence | None:
    """Certificate when ``f_i = f_i(x_i)``: then ``G = 0``, ``u`` is constant and
    the diagonal equations force every ``f_i`` to vanish."""
    n = T.n
    if not all(fi.variables() <= {i + 1} for i, fi in enumerate(T.f)):
        return None
    grid = grid or Grid.cube(n)
    P = grid.points()
    F, DF, _ = T.jets(P, 1)
    off = DF * ~np.eye(n, dtype=bool)[None]
    if np.abs(off).max(initial=0.0) > 0:
        return None
    mags = np.abs(F).max(axis=1)
    k = int(np.argmax(mags))
    if mags[k] == 0:
        return None
    return NonExistence("separable", tuple(float(x) for x in P[k]), float(mags[k]),
                        "each f_i depends on x_i only, which forces u constant and T = 0")


def sweep_families(T: DiagonalTensorField, P, u=None, workers: int | None = None):
    """Per-point family residuals over ``P`` plus the degenerate-point mask."""
    P = np.atleast_2d(np.asarray(P, dtype=float))

    def chunk(Pc):
        ld = gradient_data(T, Pc, strict=False)
        res = family_residuals(ld)
        return tuple(res[k] for k in FAMILIES) + (ld.degenerate,)

    out = map_chunks(chunk, P, workers)
    fams = dict(zip(FAMILIES, out[:-1]))
    return fams, out[-1]


@dataclass
class Solution:
    """A reconstructed conformal factor ``u`` with ``u(base) = scale``.

    Acts as a scalar field (``dim``, ``variables``, ``jet_batch``) so it can
    be fed back into residual and curvature routines; derivatives come from
    ``grad u = u G`` and ``Hess u = u (dG + G G^T)``.
    """

    T: DiagonalTensorField
    base_point: tuple[float, ...]
    scale: float
    quad_tol: float = 1e-10
    residual_summary: dict[str, ResidualStat] = field(default_factory=dict)
    order: str = "forward"

    @property
    def dim(self) -> int:
        return self.T.n

    def variables(self) -> frozenset[int]:
        return frozenset(range(1, self.T.n + 1))

    def log_phi_grad(self, P) -> np.ndarray:
        return gradient_data(self.T, np.atleast_2d(P), order=1).G

    def values(self, P, order: str | None = None) -> np.ndarray:
        L = reconstruct_log(self.T, self.base_point, P, self.quad_tol, order or self.order)
        return self.scale * np.exp(L)

    def phi_at(self, p) -> float:
        return float(self.values(np.asarray(p, dtype=float)[None])[0])

    def jet_batch(self, P, order: int = 2):
        P = np.atleast_2d(np.asarray(P, dtype=float))
        v = self.values(P)
        if order == 0:
            return v, None, None
        ld = gradient_data(self.T, P, order=min(order, 2))
        G = ld.G
        g = v[:, None] * G
        H = None
        if order >= 2:
            sym = 0.5 * (ld.dG + np.swapaxes(ld.dG, 1, 2))
            H = v[:, None, None] * (sym + G[:, :, None] * G[:, None, :])
        return v, g, H

    def max_residual(self) -> float:
        return max((s.max for s in self.residual_summary.values()), default=0.0)


def _stat(values, P) -> ResidualStat:
    return ResidualStat.from_values(values, P)


def solve(problem: PrescribedProblem, workers: int | None = None):
    """Run the full pipeline and return a Solution, NonExistence or Indeterminate.

    Stages: separability screen, compatibility families on the grid, scale
    at the base point, reconstruction, then an audit of the full
    second-order system on the grid with the reconstructed factor.
    """
    T, th = problem.T, problem.thresholds
    P = problem.grid.points()
    base = problem.base_point

    cert = separable_nonexistence(T, problem.grid)
    if cert is not None:
        return cert

    fams, degenerate = sweep_families(T, P, workers=workers)
    if degenerate.any():
        k = int(np.flatnonzero(degenerate)[0])
        raise Degenerate("some G_j has no usable denominator 3 f_i + f_j", point=P[k])
    summary = {name: _stat(v, P) for name, v in fams.items()}
    failing = [(s.max, name) for name, s in summary.items() if th.judge(s.max) == "fail"]
    if failing:
        mag, name = max(failing)
        s = summary[name]
        return NonExistence(name, s.argmax, s.max, "compatibility condition violated")
    pending = [name for name, s in summary.items() if th.judge(s.max) == "indeterminate"]

    try:
        C = determine_scale(T, base, tol=None)
    except NoSolution as exc:
        return exc.result

    sol = Solution(T, base, C, th.quadrature)

    def audit(Pc):
        return np.abs(governing_residuals(sol, T, Pc))

    R = map_chunks(audit, P, workers)
    n = T.n
    summary["diagonal"] = _stat(R[:, :n].max(axis=1), P)
    summary["cross"] = _stat(R[:, n:].max(axis=1, initial=0.0), P)
    sol.residual_summary = summary
    worst = max(summary["diagonal"].max, summary["cross"].max)
    verdict = th.judge(worst)
    if verdict == "fail":
        key = "diagonal" if summary["diagonal"].max >= summary["cross"].max else "cross"
        s = summary[key]
        witness = "family-4" if key == "diagonal" else "family-5"
        return NonExistence(witness, s.argmax, s.max,
                            "reconstructed factor fails the second-order system")
    if verdict == "indeterminate" or pending:
        name = pending[0] if pending and verdict == "pass" else "diagonal"
        s = summary[name] if name in summary else summary["diagonal"]
        return Indeterminate(f"{name} residual between accept and reject thresholds",
                             s.argmax, s.max, "refine the grid or tighten the quadrature tolerance")
    return sol
