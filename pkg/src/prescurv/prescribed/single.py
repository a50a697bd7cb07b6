"""Tensors depending on a single coordinate ``x_k``.

Here ``u = u(x_k)``, all ``f_i`` with ``i != k`` coincide (call it ``f``),
and with ``h = f' / (3f + f_k)`` and ``v = exp(-2 int h)`` the problem is
equivalent to the pair

    h^2 / 2 - h' = C^2 f_k v,        -h^2 = 2 C^2 f v,

with solution ``u = C exp(-int h)``.  Conversely any ``h`` yields a tensor
through these two equations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import Degenerate, DegenerateTensor
from ..exprlang import ScalarExpr, const, diff, parse
from ..fields import ExpIntegralField, antiderivative, field_jets, field_values
from ..grid import Grid
from ..tensors import DiagonalTensorField
from .problem import Indeterminate, NonExistence, ResidualStat, Thresholds

__all__ = [
    "LogSlopeField", "SingleVariableSolution", "Completeness", "log_slope",
    "solve_single_variable", "construct_from_h", "completeness_flag", "single_axis",
]


@dataclass(frozen=True)
class LogSlopeField:
    """``h = d_k f / (3 f + f_k)`` for component fields without symbolic derivatives."""

    f: object
    fk: object
    k: int

    @property
    def dim(self) -> int:
        return self.f.dim

    def variables(self) -> frozenset[int]:
        return frozenset({self.k})

    def jet_batch(self, P, order: int = 1):
        if order > 1:
            raise ValueError("only first-order jets of h are available")
        k = self.k - 1
        f, gf, Hf = field_jets(self.f, P, order + 1)
        g, gg, Hg = field_jets(self.fk, P, order + 1)
        D = 3 * f + g
        h = gf[:, k] / D
        if order == 0:
            return h, None, None
        dD = 3 * gf[:, k] + gg[:, k]
        grad = np.zeros_like(gf)
        grad[:, k] = (Hf[:, k, k] - h * dD) / D
        return h, grad, None


def single_axis(T: DiagonalTensorField, k: int | None = None) -> int:
    """The coordinate the tensor depends on (1-based); constants default to 1."""
    used = set().union(*(fi.variables() for fi in T.f))
    if k is None:
        k = T.k if T.structure == "single" else (next(iter(used)) if len(used) == 1 else None)
        if k is None and not used:
            k = 1
    if k is None or used - {k}:
        raise ValueError(f"tensor depends on {sorted(used)}, not on a single coordinate")
    return int(k)


def log_slope(f, fk, k: int):
    """``h`` as an expression when possible, else as a :class:`LogSlopeField`."""
    if isinstance(f, ScalarExpr) and isinstance(fk, ScalarExpr):
        return diff(f, k) / (3 * f + fk)
    return LogSlopeField(f, fk, k)


@dataclass
class SingleVariableSolution:
    """``u(x) = C exp(-int_anchor^{x_k} h)``."""

    k: int
    scale: float
    h: object
    u: ExpIntegralField
    anchor: float = 0.0
    residual_summary: dict[str, ResidualStat] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.u.dim

    def variables(self) -> frozenset[int]:
        return frozenset({self.k})

    def values(self, P) -> np.ndarray:
        return field_values(self.u, P)

    def phi_at(self, p) -> float:
        return float(self.values(np.asarray(p, dtype=float)[None])[0])

    def jet_batch(self, P, order: int = 2):
        return self.u.jet_batch(P, order)

    def max_residual(self) -> float:
        return max((s.max for s in self.residual_summary.values()), default=0.0)


def _line(grid: Grid, k: int) -> np.ndarray:
    t = grid.nodes(k)
    P = np.tile(np.asarray(grid.center), (t.size, 1))
    P[:, k - 1] = t
    return P


def solve_single_variable(T: DiagonalTensorField, C: float | None = None, grid: Grid | None = None,
                          k: int | None = None, anchor: float = 0.0,
                          thresholds: Thresholds | None = None):
    """Solve the single-coordinate case on the 1-D node line of ``grid``.

    ``C`` fixes ``u(anchor)``; when omitted it is fitted from both equations.
    Returns a :class:`SingleVariableSolution`, :class:`NonExistence` or
    :class:`Indeterminate`.
    """
    th = thresholds or Thresholds()
    n = T.n
    k = single_axis(T, k)
    grid = grid or Grid.cube(n, axes=(k,))
    P = _line(grid, k)
    others = [i for i in range(n) if i != k - 1]
    F = T.values(P)
    base = F[:, others[0]]
    spread = np.abs(F[:, others] - base[:, None]).max(axis=1)
    if any(T.f[i] != T.f[others[0]] for i in others) and spread.max() > th.accept * (1 + np.abs(base).max()):
        j = int(np.argmax(spread))
        return NonExistence("single-variable-components", tuple(map(float, P[j])),
                            float(spread[j]), "the components f_i, i != k, differ")
    f, fk = T.f[others[0]], T.f[k - 1]
    D = 3 * F[:, others[0]] + F[:, k - 1]
    if np.any(D == 0):
        j = int(np.flatnonzero(D == 0)[0])
        raise Degenerate("3 f + f_k vanishes", point=P[j], direction=k)

    h = log_slope(f, fk, k)
    hv, gh, _ = field_jets(h, P, 1)
    dh = gh[:, k - 1]
    H = antiderivative(h, k, P[:, k - 1], anchor, th.quadrature)
    v = np.exp(-2 * H)
    lhs1, rhs1 = 0.5 * hv * hv - dh, F[:, k - 1] * v
    lhs2, rhs2 = -hv * hv, 2 * F[:, others[0]] * v

    if C is None:
        # least squares for C^2 over both equations
        num = float(lhs1 @ rhs1 + lhs2 @ rhs2)
        den = float(rhs1 @ rhs1 + rhs2 @ rhs2)
        C2 = num / den if den > 0 else 0.0
        if not C2 > 0:
            j = int(np.argmax(np.abs(rhs1) + np.abs(rhs2)))
            return NonExistence("scale-sign", tuple(map(float, P[j])),
                                float(abs(lhs1[j]) + abs(rhs1[j]) + abs(lhs2[j]) + abs(rhs2[j])),
                                f"fitted C^2 = {C2!r} is not positive")
        C = float(np.sqrt(C2))
    elif not C > 0:
        raise ValueError("C must be positive")

    r1 = np.abs(lhs1 - C * C * rhs1)
    r2 = np.abs(lhs2 - C * C * rhs2)
    summary = {"eq1": ResidualStat.from_values(r1, P), "eq2": ResidualStat.from_values(r2, P)}
    name = "eq1" if summary["eq1"].max >= summary["eq2"].max else "eq2"
    worst = summary[name]
    verdict = th.judge(worst.max)
    if verdict == "fail":
        return NonExistence(f"single-variable-{name}", worst.argmax, worst.max,
                            "the single-coordinate equations do not hold")
    if verdict == "indeterminate":
        return Indeterminate(f"single-variable {name} residual between thresholds",
                             worst.argmax, worst.max)
    u = ExpIntegralField(const(C, n), h, k, -1.0, anchor, th.quadrature)
    return SingleVariableSolution(k, C, h, u, anchor, summary)


def construct_from_h(h, k: int, C: float = 1.0, n: int | None = None, anchor: float = 0.0,
                     tol: float = 1e-10):
    """Tensor and factor generated by ``h(x_k)``.

    ``f_k = (h^2 - 2h') / (2C^2) e^{2 int h}``, ``f = -h^2 / (2C^2) e^{2 int h}``
    and ``u = C e^{-int h}``, the antiderivative anchored at ``anchor``.
    """
    if isinstance(h, str):
        if n is None:
            raise ValueError("n is required when h is given as text")
        h = parse(h, n)
    n = h.dim if n is None else n
    if h.dim != n:
        raise ValueError(f"h has dimension {h.dim}, expected {n}")
    if not C > 0:
        raise ValueError("C must be positive")
    if h.variables() - {k}:
        raise ValueError(f"h must depend on x{k} only")
    probe = np.zeros((33, n))
    probe[:, k - 1] = np.linspace(-4, 4, 33)
    if not np.any(field_values(h, probe)):
        raise DegenerateTensor("h vanishes identically, so f = f_k = 0")
    c2 = 2.0 * C * C
    fk = ExpIntegralField((h * h - 2 * diff(h, k)) / c2, h, k, 2.0, anchor, tol)
    f = ExpIntegralField(-(h * h) / c2, h, k, 2.0, anchor, tol)
    comps = tuple(fk if i == k - 1 else f for i in range(n))
    T = DiagonalTensorField(comps, structure="single", k=k)
    u = ExpIntegralField(const(C, n), h, k, -1.0, anchor, tol)
    return T, u


@dataclass(frozen=True)
class Completeness:
    status: str            # "Complete" or "Inconclusive"
    min_integral: float
    interval: tuple[float, float]
    bound: float | None
    asserted_global: bool
    reason: str = ""

    def as_dict(self) -> dict:
        return {"status": self.status, "min_integral": self.min_integral,
                "interval": list(self.interval), "bound": self.bound,
                "asserted_global": self.asserted_global, "reason": self.reason}


def completeness_flag(h, k: int, probe_interval=(-2.0, 2.0), L: float | None = None,
                      assert_global: bool = True, samples: int = 201,
                      tol: float = 1e-10) -> Completeness:
    """Sufficient completeness test for ``u = C exp(-int h)``.

    ``int_0^t h >= -L`` keeps ``u`` bounded above, so ``gbar >= g / sup u^2``
    and the metric is complete.  On a finite probe interval this is checked
    by sampling; the running integral must also not be decreasing at either
    end (else it is heading below any bound) and the caller must assert that
    the bound holds globally.  Failing any of these gives ``Inconclusive``.
    """
    a, b = map(float, probe_interval)
    if not a < b:
        raise ValueError("probe interval must satisfy a < b")
    t = np.linspace(a, b, samples)
    Hs = antiderivative(h, k, t, 0.0, tol)
    lo = float(Hs.min())
    n = h.dim
    ends = np.zeros((2, n))
    ends[:, k - 1] = (a, b)
    ha, hb = field_values(h, ends)
    bound = -lo if L is None else float(L)
    reason = ""
    if lo < -bound:
        reason = f"int h reaches {lo!r} < -L"
    elif hb < 0 or ha > 0:
        reason = "int h decreases towards an end of the probe interval"
    elif not assert_global:
        reason = "bound not asserted beyond the probe interval"
    status = "Inconclusive" if reason else "Complete"
    return Completeness(status, lo, (a, b), None if L is None else float(L), assert_global, reason)
