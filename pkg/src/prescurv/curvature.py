"""Curvature of conformally flat metrics, computed two independent ways.

The metric is ``gbar = delta / u^2`` with ``u = phi_rel * F``: ``F`` is the
background factor (``g = delta / F^2``, ``F = 1`` for euclidean space) and
``phi_rel`` the relative factor (``gbar = g / phi_rel^2``).

*Formula route*: Ricci, scalar and Schouten tensors from closed forms in
the euclidean jet of ``u``, and Riemann as ``A o gbar``.

*Oracle route*: Christoffel symbols and their derivatives from the metric
and its first two derivatives, then the Riemann tensor from its definition.
No finite differences are involved, so the two routes agree to rounding.

Sign convention: ``R[i, j, k, l] = <R(d_i, d_j) d_l, d_k>`` with
``R(X, Y) = [nabla_X, nabla_Y] - nabla_[X,Y]``; the round sphere has
``R[i, j, i, j] > 0``.  Indices are 0-based throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import SingularMetric
from .exprlang import ScalarExpr, const, parse
from .jets import jet_batch
from .tensors import CurvTensor, SymBilinear, kulkarni_nomizu, tensor_max_norm

__all__ = [
    "ConformalMetric", "metric", "ricci", "scalar_curv", "schouten", "schouten_definitional",
    "riemann_decomp", "riemann_oracle", "christoffel_riemann", "ricci_oracle", "sectional",
    "weyl_residual", "curvature_table",
]


@dataclass(frozen=True)
class ConformalMetric:
    F: ScalarExpr
    phi_rel: ScalarExpr

    def __post_init__(self):
        if self.F.dim != self.phi_rel.dim:
            raise ValueError("F and phi_rel must share a dimension")
        if self.F.dim < 3:
            raise ValueError("dimension must be at least 3")

    @classmethod
    def euclidean(cls, u: ScalarExpr | str, n: int | None = None) -> "ConformalMetric":
        """``gbar = delta / u^2`` over flat space."""
        if isinstance(u, str):
            u = parse(u, n)
        return cls(const(1.0, u.dim), u)

    @classmethod
    def from_texts(cls, F: str, phi_rel: str, n: int) -> "ConformalMetric":
        return cls(parse(F, n), parse(phi_rel, n))

    @property
    def n(self) -> int:
        return self.F.dim

    @property
    def u(self) -> ScalarExpr:
        """Total factor, ``gbar = delta / u^2``."""
        if self.F.is_constant() and str(self.F) == "1.0":
            return self.phi_rel
        return self.phi_rel * self.F

    def scaled(self, c: float) -> "ConformalMetric":
        return ConformalMetric(self.F, self.phi_rel * c)

    def u_jets(self, P):
        P = np.asarray(P, dtype=float)
        v, g, H = jet_batch(self.u, P)
        zero = v == 0
        if zero.any():
            raise SingularMetric(P[np.flatnonzero(zero)[0]] if P.ndim == 2 else P)
        return v, g, H


def _jet1(m: ConformalMetric, p):
    p = np.asarray(p, dtype=float)
    v, g, H = m.u_jets(p[None, :])
    return v[0], g[0], H[0]


# ----------------------------------------------------------- formula route

def _ricci_b(n, u, g, H):
    lap = np.trace(H, axis1=1, axis2=2)
    g2 = np.einsum("ma,ma->m", g, g)
    eye = np.eye(n)
    return ((n - 2) * u[:, None, None] * H
            + (u * lap - (n - 1) * g2)[:, None, None] * eye) / (u * u)[:, None, None]


def _scalar_b(n, u, g, H):
    lap = np.trace(H, axis1=1, axis2=2)
    g2 = np.einsum("ma,ma->m", g, g)
    return (n - 1) * (2 * u * lap - n * g2)


def _schouten_b(n, u, g, H):
    g2 = np.einsum("ma,ma->m", g, g)
    return H / u[:, None, None] - (g2 / (2 * u * u))[:, None, None] * np.eye(n)


def metric(m: ConformalMetric, p) -> SymBilinear:
    u, _, _ = _jet1(m, p)
    return SymBilinear(np.eye(m.n) / (u * u))


def ricci(m: ConformalMetric, p) -> SymBilinear:
    u, g, H = _jet1(m, p)
    return SymBilinear(_ricci_b(m.n, u[None], g[None], H[None])[0])


def scalar_curv(m: ConformalMetric, p) -> float:
    u, g, H = _jet1(m, p)
    return float(_scalar_b(m.n, u[None], g[None], H[None])[0])


def schouten(m: ConformalMetric, p) -> SymBilinear:
    u, g, H = _jet1(m, p)
    return SymBilinear(_schouten_b(m.n, u[None], g[None], H[None])[0])


def schouten_definitional(m: ConformalMetric, p) -> SymBilinear:
    """(Ric - K / (2(n-1)) gbar) / (n-2), for cross-checking :func:`schouten`."""
    n = m.n
    ric = ricci(m, p).entries
    K = scalar_curv(m, p)
    gbar = metric(m, p).entries
    return SymBilinear.symmetrized((ric - K / (2 * (n - 1)) * gbar) / (n - 2))


def riemann_decomp(m: ConformalMetric, p) -> CurvTensor:
    """Riemann tensor as the Kulkarni-Nomizu product of Schouten and metric."""
    return kulkarni_nomizu(schouten(m, p), metric(m, p))


# ------------------------------------------------------------ oracle route

def christoffel_riemann(g, dg, ddg) -> np.ndarray:
    """(0,4) Riemann components from a metric and its derivatives at a point.

    ``g[i, j]``, ``dg[a, i, j] = d_a g_ij`` and ``ddg[a, b, i, j] = d_a d_b g_ij``.
    """
    g = np.asarray(g, dtype=float)
    ginv = np.linalg.inv(g)
    # first-kind symbols G[m, j, k] and their derivatives dG[a, m, j, k]
    G1 = 0.5 * (np.einsum("jmk->mjk", dg) + np.einsum("kmj->mjk", dg) - dg)
    dG1 = 0.5 * (np.einsum("ajmk->amjk", ddg) + np.einsum("akmj->amjk", ddg)
                 - ddg)
    gam = np.einsum("lm,mjk->ljk", ginv, G1)
    dginv = -np.einsum("lp,apq,qm->alm", ginv, dg, ginv)
    dgam = np.einsum("alm,mjk->aljk", dginv, G1) + np.einsum("lm,amjk->aljk", ginv, dG1)
    # R^l_{ijk} = d_i Gam^l_jk - d_j Gam^l_ik + Gam^l_im Gam^m_jk - Gam^l_jm Gam^m_ik
    d_term = np.einsum("iljk->lijk", dgam)
    R13 = (d_term - np.einsum("lijk->ljik", d_term)
           + np.einsum("lim,mjk->lijk", gam, gam) - np.einsum("ljm,mik->lijk", gam, gam))
    # R_ijkl = g_km R^m_{ijl}
    return np.einsum("km,mijl->ijkl", g, R13)


def _conformal_metric_derivs(n, u, gu, Hu):
    w = u ** -2.0
    dw = -2.0 * u ** -3.0 * gu
    ddw = 6.0 * u ** -4.0 * np.outer(gu, gu) - 2.0 * u ** -3.0 * Hu
    eye = np.eye(n)
    g = w * eye
    dg = dw[:, None, None] * eye
    ddg = ddw[:, :, None, None] * eye
    return g, dg, ddg


def riemann_oracle(m: ConformalMetric, p) -> CurvTensor:
    u, gu, Hu = _jet1(m, p)
    return CurvTensor(christoffel_riemann(*_conformal_metric_derivs(m.n, u, gu, Hu)))


def ricci_oracle(m: ConformalMetric, p) -> SymBilinear:
    R = riemann_oracle(m, p).components
    ginv = np.linalg.inv(metric(m, p).entries)
    return SymBilinear.symmetrized(np.einsum("ab,ajbk->jk", ginv, R))


def sectional(m: ConformalMetric, p, i: int, j: int, route: str = "oracle") -> float:
    """Sectional curvature of the coordinate plane (d_i, d_j), 0-based."""
    if i == j:
        raise ValueError("sectional curvature needs two distinct directions")
    R = riemann_oracle(m, p) if route == "oracle" else riemann_decomp(m, p)
    g = metric(m, p).entries
    return float(R[i, j, i, j] / (g[i, i] * g[j, j] - g[i, j] ** 2))


def weyl_residual(m: ConformalMetric, p) -> float:
    """Max-norm gap between the two routes; zero for conformally flat metrics."""
    return tensor_max_norm(riemann_oracle(m, p) - riemann_decomp(m, p))


# ------------------------------------------------------------------ tables

def curvature_table(m: ConformalMetric, P) -> dict[str, np.ndarray]:
    """Scalar, diagonal Ricci and coordinate sectional curvatures over points.

    Columns follow the CSV layout: ``scalar``, ``ric_ii`` for each i, and
    ``K_ij`` for each pair i<j (1-based names).
    """
    P = np.asarray(P, dtype=float)
    n = m.n
    u, g, H = m.u_jets(P)
    ric = _ricci_b(n, u, g, H)
    A = _schouten_b(n, u, g, H)
    cols = {"scalar": _scalar_b(n, u, g, H)}
    for i in range(n):
        cols[f"ric_{i + 1}{i + 1}"] = ric[:, i, i]
    for i, j in combinations(range(n), 2):
        # gbar is diagonal: K = u^2 (A_ii + A_jj)
        cols[f"K_{i + 1}{j + 1}"] = u * u * (A[:, i, i] + A[:, j, j])
    return cols
