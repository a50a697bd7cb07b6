"""Scalar fields beyond plain expressions.

Anything with ``dim``, ``variables()`` and ``jet_batch(P, order)`` can stand
in for a :class:`~prescurv.exprlang.ScalarExpr` as a tensor component or a
conformal factor.  :class:`ExpIntegralField` covers factors of the form
``coef(x) * exp(w * H(x_k))`` where ``H`` is the antiderivative of an
expression ``h(x_k)``, anchored at a fixed abscissa and computed by
adaptive quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exprlang import ScalarExpr, as_points, evaluate_many
from .jets import jet_batch
from .quadrature import adaptive_simpson

__all__ = ["field_jets", "field_values", "ExpIntegralField", "antiderivative"]


def field_jets(f, P, order: int = 2):
    if isinstance(f, ScalarExpr):
        return jet_batch(f, P, order)
    return f.jet_batch(P, order)


def field_values(f, P) -> np.ndarray:
    if isinstance(f, ScalarExpr):
        return evaluate_many(f, P)
    return f.jet_batch(P, 0)[0]


def antiderivative(h, k: int, t, anchor: float = 0.0, tol: float = 1e-10) -> np.ndarray:
    """``int_anchor^t h`` along ``x_k`` (other coordinates zero), for each t.

    ``h`` is an expression or any field depending on ``x_k`` alone.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    n = h.dim

    def integrand(seg, s):
        P = np.zeros((s.size, n))
        P[:, k - 1] = s
        return field_values(h, P)

    return adaptive_simpson(integrand, np.full(t.shape, float(anchor)), t, tol)


@dataclass(frozen=True)
class ExpIntegralField:
    """``coef(x) * exp(weight * int_anchor^{x_k} h)`` with ``h = h(x_k)``.

    ``h`` needs first-order jets only, so it may itself be a non-expression field.
    """

    coef: ScalarExpr
    h: object
    k: int
    weight: float
    anchor: float = 0.0
    tol: float = 1e-10

    def __post_init__(self):
        if self.h.variables() - {self.k}:
            raise ValueError(f"h must depend on x{self.k} only")
        if self.coef.dim != self.h.dim:
            raise ValueError("coef and h must share a dimension")

    @property
    def dim(self) -> int:
        return self.h.dim

    def variables(self) -> frozenset[int]:
        return self.coef.variables() | {self.k}

    def __mul__(self, c: float) -> "ExpIntegralField":
        return ExpIntegralField(self.coef * c, self.h, self.k, self.weight, self.anchor, self.tol)

    __rmul__ = __mul__

    def __str__(self) -> str:
        return (f"{self.coef} * exp({self.weight!r} * int_{self.anchor!r}^x{self.k} {self.h})")

    def jet_batch(self, P, order: int = 2):
        P = as_points(P, self.dim)
        k = self.k - 1
        w = self.weight
        H = antiderivative(self.h, self.k, P[:, k], self.anchor, self.tol)
        E = np.exp(w * H)
        c, gc, Hc = jet_batch(self.coef, P, max(order, 0))
        if order == 0:
            return c * E, None, None
        hv, gh, _ = field_jets(self.h, P, 1)
        m, n = P.shape
        gE = np.zeros((m, n))
        gE[:, k] = w * hv * E
        v = c * E
        g = gc * E[:, None] + c[:, None] * gE
        HH = None
        if order >= 2:
            HE = np.zeros((m, n, n))
            HE[:, k, k] = (w * gh[:, k] + w * w * hv * hv) * E
            cross = gc[:, :, None] * gE[:, None, :]
            HH = Hc * E[:, None, None] + c[:, None, None] * HE + cross + np.swapaxes(cross, 1, 2)
        return v, g, HH
