"""The isotropic case ``f_i = f``: quadratic conformal factors.

Every solution is ``u = a|x|^2 + b.x + c`` with ``f = -lam / (2 u^4)`` and
``lam = |b|^2 - 4ac``; the factor is unique up to homothety.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateFamily, Mismatch, NegativeRadicand
from ..exprlang import ScalarExpr, const, var
from ..fields import field_values
from ..grid import Grid

__all__ = [
    "QuadraticFamily", "SingularSet", "construct_quadratic_family", "classify_singular_set",
    "detect_quadratic_family", "quadratic_stencil",
]


@dataclass(frozen=True)
class QuadraticFamily:
    a: float
    b: tuple[float, ...]
    c: float
    lam: float

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(float(x) for x in self.b))
        if self.lam != _lam(self.a, self.b, self.c):
            raise ValueError("lam must equal |b|^2 - 4ac")

    @classmethod
    def of(cls, a: float, b, c: float) -> "QuadraticFamily":
        a, c, b = float(a), float(c), tuple(float(x) for x in b)
        return cls(a, b, c, _lam(a, b, c))

    @property
    def n(self) -> int:
        return len(self.b)

    def u(self) -> ScalarExpr:
        n = self.n
        terms = []
        for i in range(n):
            x = var(i + 1, n)
            if self.a != 0:
                terms.append(self.a * x ** 2)
            if self.b[i] != 0:
                terms.append(self.b[i] * x)
        if self.c != 0 or not terms:
            terms.append(const(self.c, n))
        out = terms[0]
        for t in terms[1:]:
            out = out + t
        return out

    def f(self) -> ScalarExpr:
        return const(-self.lam / 2.0, self.n) / self.u() ** 4

    def u_values(self, P) -> np.ndarray:
        P = np.atleast_2d(P)
        return self.a * (P * P).sum(axis=1) + P @ np.asarray(self.b) + self.c

    def as_dict(self) -> dict:
        return {"a": self.a, "b": list(self.b), "c": self.c, "lambda": self.lam}


def _lam(a, b, c) -> float:
    return float(sum(x * x for x in b) - 4.0 * a * c)


@dataclass(frozen=True)
class SingularSet:
    """Zero set of ``u``: ``empty``, ``point``, ``hyperplane`` or ``sphere``."""

    kind: str
    center: tuple[float, ...] | None = None
    radius: float | None = None
    normal: tuple[float, ...] | None = None
    offset: float | None = None

    def as_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.center is not None:
            out["center"] = list(self.center)
        if self.radius is not None:
            out["radius"] = self.radius
        if self.normal is not None:
            out["normal"] = list(self.normal)
            out["offset"] = self.offset
        return out


def construct_quadratic_family(a: float, b, c: float, n: int | None = None):
    """``(f, u, lam)`` for the given coefficients; ``b`` may be a scalar 0."""
    if np.isscalar(b):
        if n is None:
            raise ValueError("n is required when b is a scalar")
        b = (float(b),) * n
    b = tuple(float(x) for x in b)
    if n is not None and len(b) != n:
        raise ValueError(f"b has {len(b)} entries, expected {n}")
    if a == 0 and c == 0 and not any(b):
        raise DegenerateFamily("a, b and c all vanish, so u is identically zero")
    fam = QuadraticFamily.of(a, b, c)
    return fam.f(), fam.u(), fam.lam


def classify_singular_set(fam: QuadraticFamily, tol: float = 0.0) -> SingularSet:
    lam, a = fam.lam, fam.a
    b = np.asarray(fam.b)
    if lam < -tol:
        return SingularSet("empty")
    if abs(lam) <= tol:
        if abs(a) <= tol:
            return SingularSet("empty")
        return SingularSet("point", center=tuple(float(x) for x in -b / (2 * a)))
    if abs(a) <= tol:
        return SingularSet("hyperplane", normal=fam.b, offset=fam.c)
    return SingularSet("sphere", center=tuple(float(x) for x in -b / (2 * a)),
                       radius=float(np.sqrt(lam) / (2 * abs(a))))


def quadratic_stencil(grid: Grid) -> tuple[np.ndarray, float]:
    """``{x0, x0 +- s e_i}`` with ``s = 1`` halved until inside the grid box."""
    x0 = np.asarray(grid.center)
    n = grid.n
    s = 1.0
    while s > grid.half_width:
        s *= 0.5
    pts = [x0]
    for i in range(n):
        for sign in (1.0, -1.0):
            p = x0.copy()
            p[i] += sign * s
            pts.append(p)
    return np.array(pts), s


def _design(P) -> np.ndarray:
    return np.column_stack([(P * P).sum(axis=1), P, np.ones(len(P))])


def detect_quadratic_family(f, grid: Grid, tol: float = 1e-8) -> QuadraticFamily:
    """Recover ``(a, b, c)`` from an isotropic component ``f``.

    ``(f(x0)/f(x))^(1/4) = |u(x)/u(x0)|`` is fitted by a quadratic on the
    stencil, the scale fixed by ``f(x0) = -lam/(2 u(x0)^4)``, and the
    prediction checked on the whole grid (relative deviation <= ``tol``).
    The representative has ``u(x0) > 0``.
    """
    P = grid.points()
    S, _ = quadratic_stencil(grid)
    values = field_values(f, np.vstack([S, P]))
    fs, fg = values[:len(S)], values[len(S):]
    f0 = fs[0]
    if f0 == 0 or not np.all(np.isfinite(values)):
        k = int(np.flatnonzero((values == 0) | ~np.isfinite(values))[0]) if f0 != 0 else 0
        pt = np.vstack([S, P])[k]
        raise Mismatch("f vanishes or is not finite, so it cannot be -lam/(2u^4)",
                       float("inf"), tuple(float(x) for x in pt))
    with np.errstate(divide="ignore"):
        ratio = f0 / values
    if (ratio < 0).any():
        k = int(np.flatnonzero(ratio < 0)[0])
        pt = np.vstack([S, P])[k]
        raise NegativeRadicand("f changes sign", float(-ratio[k]), tuple(float(x) for x in pt))
    r = ratio[:len(S)] ** 0.25
    A = _design(S)
    coef = np.linalg.solve(A.T @ A, A.T @ r)
    aq, bq, cq = coef[0], coef[1:-1], coef[-1]
    lam_q = float(bq @ bq - 4 * aq * cq)
    q0 = float(A[0] @ coef)
    s2 = float(-lam_q / (2 * f0 * q0 ** 4))
    if not s2 > 0:
        raise Mismatch(f"scale s^2 = {s2!r} is not positive", float(abs(f0)),
                       tuple(float(x) for x in S[0]))
    s = float(np.sqrt(s2))
    fam = QuadraticFamily.of(s * aq, s * bq, s * cq)
    u = fam.u_values(P)
    with np.errstate(all="ignore"):
        pred = -fam.lam / (2 * u ** 4)
        dev = np.abs(pred - fg) / np.abs(fg)
    dev = np.where(np.isfinite(dev), dev, np.inf)
    k = int(np.argmax(dev))
    if dev[k] > tol:
        raise Mismatch("f is not of the form -lam/(2u^4) with quadratic u",
                       float(dev[k]), tuple(float(x) for x in P[k]))
    return fam
