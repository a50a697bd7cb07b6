"""Gradient of log u from the tensor alone, and the compatibility residuals.

For a solution ``u`` every ordered pair ``i != j`` satisfies
``u_j / u = -H_ij`` with ``H_ij = d_j f_i / (3 f_i + f_j)``.  The field
``G_j = -H_ij`` is therefore known without solving anything; existence
reduces to ``G`` being well defined (family 1), closed (families 2-3),
compatible with ``u_ij = 0`` (family 5), and to the diagonal equations
holding for ``u = C exp(int G)`` (family 4).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import Degenerate, SingularMetric
from ..fields import field_jets
from ..tensors import DiagonalTensorField

__all__ = [
    "DEN_EPS", "GradientData", "gradient_data", "family_residuals", "diagonal_terms",
    "governing_residuals", "gradient_field", "integrability_residuals", "governing_residual",
]

# A denominator counts as zero below this fraction of max_i |f_i| at the point.
DEN_EPS = 1e-8


@dataclass(frozen=True)
class GradientData:
    F: np.ndarray          # (m, n)       f_i
    D: np.ndarray          # (m, n, n)    3 f_i + f_j
    admissible: np.ndarray  # (m, n, n)   usable denominators, i != j
    H: np.ndarray          # (m, n, n)    H_ij, NaN where not admissible
    dH: np.ndarray | None  # (m, n, n, n) d_a H_ij
    choice: np.ndarray     # (m, n)       i used for G_j, -1 if none
    G: np.ndarray          # (m, n)
    dG: np.ndarray | None  # (m, n, n)    dG[m, j, a] = d_a G_j

    @property
    def degenerate(self) -> np.ndarray:
        """(m,) mask of points where some G_j has no admissible denominator."""
        return (self.choice < 0).any(axis=1)


def gradient_data(T: DiagonalTensorField, P, order: int = 2, strict: bool = True) -> GradientData:
    P = np.atleast_2d(np.asarray(P, dtype=float))
    F, DF, HF = T.jets(P, order)
    m, n = F.shape
    D = 3.0 * F[:, :, None] + F[:, None, :]
    scale = np.abs(F).max(axis=1)
    adm = (np.abs(D) > DEN_EPS * scale[:, None, None]) & ~np.eye(n, dtype=bool)
    Ds = np.where(adm, D, 1.0)
    with np.errstate(all="ignore"):
        H = np.where(adm, DF / Ds, np.nan)
        dH = None
        if order >= 2:
            dD = 3.0 * DF[:, :, None, :] + DF[:, None, :, :]
            dH = np.where(adm[..., None], (HF - H[..., None] * dD) / Ds[..., None], np.nan)

    # G_j uses the best-conditioned admissible denominator (first on ties)
    mag = np.where(adm, np.abs(D), -np.inf)
    choice = np.argmax(mag, axis=1)
    has = adm.any(axis=1)
    choice = np.where(has, choice, -1)
    if strict and not has.all():
        bad_m, bad_j = np.argwhere(~has)[0]
        raise Degenerate(f"3 f_i + f_j vanishes for every i != {bad_j + 1}",
                         point=P[bad_m], direction=int(bad_j) + 1)
    rows = np.arange(m)[:, None]
    cols = np.arange(n)[None, :]
    ci = np.where(choice >= 0, choice, 0)
    G = np.where(has, -H[rows, ci, cols], np.nan)
    dG = None
    if dH is not None:
        dG = np.where(has[..., None], -dH[rows, ci, cols], np.nan)
    return GradientData(F, D, adm, H, dH, choice, G, dG)


def _masked_max(values, mask, axes):
    return np.where(mask, values, -np.inf).max(axis=axes, initial=-np.inf)


def family_residuals(ld: GradientData, u=None) -> dict[str, np.ndarray]:
    """Per-point residuals of the compatibility families.

    ``u`` (values of a candidate factor at the same points) enables family 4.
    Points where a family has no admissible terms report 0 for it.
    """
    adm, H, dH = ld.admissible, ld.H, ld.dH
    m, n = ld.F.shape
    out = {}
    with np.errstate(invalid="ignore"):
        hi = _masked_max(H, adm, 1)
        lo = -_masked_max(-H, adm, 1)
        spread = np.where(np.isfinite(hi) & np.isfinite(lo), hi - lo, 0.0)
        out["family-1"] = spread.max(axis=1)
    if dH is not None:
        # family 2: d_k H_ji = d_i H_jk for i, k != j
        a = dH                                  # [m, j, i, k] = d_k H_ji
        b = np.swapaxes(dH, 2, 3)               # [m, j, i, k] = d_i H_jk
        mask2 = adm[:, :, :, None] & adm[:, :, None, :]
        mask2 &= ~np.eye(n, dtype=bool)[None, None, :, :]
        r2 = _masked_max(np.abs(a - b), mask2, (1, 2, 3))
        out["family-2"] = np.maximum(r2, 0.0)
        both = adm & np.swapaxes(adm, 1, 2)
        idx = np.arange(n)
        # d_i H_ij at [m, i, j]
        di_Hij = dH[:, idx[:, None], idx[None, :], idx[:, None]]
        # family 3: d_i H_ij = d_j H_ji
        r3 = np.abs(di_Hij - np.swapaxes(di_Hij, 1, 2))
        out["family-3"] = np.maximum(_masked_max(r3, both, (1, 2)), 0.0)
        # family 5: H_ji H_ij = d_i H_ij
        r5 = np.abs(np.swapaxes(H, 1, 2) * H - di_Hij)
        out["family-5"] = np.maximum(_masked_max(r5, both, (1, 2)), 0.0)
        if u is not None:
            S = diagonal_terms(ld)
            u = np.asarray(u, dtype=float)
            out["family-4"] = np.abs(S - (u * u)[:, None] * ld.F).max(axis=1)
    return out


def diagonal_terms(ld: GradientData) -> np.ndarray:
    """``S_i = d_i G_i + G_i^2 - |G|^2 / 2``, which must equal ``u^2 f_i``."""
    G = ld.G
    d = np.diagonal(ld.dG, axis1=1, axis2=2)
    return d + G * G - 0.5 * (G * G).sum(axis=1)[:, None]


def governing_residuals(u, T: DiagonalTensorField, P) -> np.ndarray:
    """Residuals of the second-order system for a candidate factor ``u``.

    Columns: ``n`` diagonal residuals ``u_ii/u - |grad u|^2/(2u^2) - u^2 f_i``
    followed by the cross terms ``u_ij`` for ``i < j`` in lexicographic order.
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    v, g, Hs = field_jets(u, P, 2)
    zero = v == 0
    if zero.any():
        raise SingularMetric(P[np.flatnonzero(zero)[0]])
    F = T.values(P)
    g2 = (g * g).sum(axis=1)
    diag = (np.diagonal(Hs, axis1=1, axis2=2) / v[:, None]
            - (g2 / (2 * v * v))[:, None] - (v * v)[:, None] * F)
    iu, ju = np.triu_indices(T.n, 1)
    return np.concatenate([diag, Hs[:, iu, ju]], axis=1)


def governing_residual(u, T: DiagonalTensorField, p) -> np.ndarray:
    return governing_residuals(u, T, np.asarray(p, dtype=float)[None])[0]


def gradient_field(T: DiagonalTensorField, p) -> tuple[np.ndarray, float]:
    """``G = grad log u`` implied by ``T`` at ``p`` and its consistency spread."""
    ld = gradient_data(T, np.asarray(p, dtype=float)[None], order=1)
    spread = family_residuals(ld)["family-1"][0]
    return ld.G[0], float(spread)


def integrability_residuals(T: DiagonalTensorField, p, u=None) -> dict[str, float]:
    """Compatibility residuals at one point; ``u`` is a field enabling family 4."""
    P = np.asarray(p, dtype=float)[None]
    ld = gradient_data(T, P)
    uv = None if u is None else field_jets(u, P, 0)[0]
    return {k: float(v[0]) for k, v in sorted(family_residuals(ld, uv).items())}
