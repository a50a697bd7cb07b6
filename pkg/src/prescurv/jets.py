"""Second-order forward-mode differentiation of expression trees.

Every node carries its value, gradient and Hessian over a batch of points,
so a single tree walk yields all derivatives the curvature formulas need.
Hessians are assembled only from exactly symmetric pieces (``M + M.T`` and
``outer(v, v)``), so symmetry holds bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exprlang import (
    BinOp, Call, Const, Neg, ScalarExpr, Var, _free_vars, as_points,
    check_div, check_log, check_pow, check_sqrt, evaluate_many,
)

__all__ = ["Jet2", "jet_batch", "eval_jet2", "finite_diff_check"]


@dataclass(frozen=True)
class Jet2:
    """Value, gradient and symmetric Hessian of a scalar field at one point."""

    value: float
    gradient: np.ndarray
    hessian: np.ndarray

    @property
    def laplacian(self) -> float:
        return float(np.trace(self.hessian))


def _sym_outer(a, b):
    m = a[:, :, None] * b[:, None, :]
    return m + np.swapaxes(m, 1, 2)


def _outer(a):
    return a[:, :, None] * a[:, None, :]


def _chain(d0, d1, d2, g, H, order):
    """Compose a scalar function with derivatives d0, d1, d2 onto a jet."""
    gg = d1[:, None] * g if order >= 1 else None
    HH = None
    if order >= 2:
        HH = d1[:, None, None] * H + d2[:, None, None] * _outer(g)
    return d0, gg, HH


def _unary(name, a):
    """Value and first two derivatives of a named function at ``a``."""
    if name == "exp":
        e = np.exp(a)
        return e, e, e
    if name == "log":
        return np.log(a), 1.0 / a, -1.0 / (a * a)
    if name == "sin":
        s, c = np.sin(a), np.cos(a)
        return s, c, -s
    if name == "cos":
        s, c = np.sin(a), np.cos(a)
        return c, -s, -c
    if name == "sinh":
        s, c = np.sinh(a), np.cosh(a)
        return s, c, s
    if name == "cosh":
        s, c = np.sinh(a), np.cosh(a)
        return c, s, c
    if name == "tanh":
        t = np.tanh(a)
        d = 1.0 - t * t
        return t, d, -2.0 * t * d
    if name == "sqrt":
        r = np.sqrt(a)
        return r, 0.5 / r, -0.25 / (r * a)
    if name == "abs":
        return np.abs(a), np.sign(a), np.zeros_like(a)
    raise ValueError(name)


def _pow_coeff(c, base, e):
    # c * base**e with the convention 0 * anything = 0 (keeps x^1, x^2 finite at 0)
    out = np.zeros_like(base)
    nz = c != 0
    out[nz] = c[nz] * np.power(base[nz], e[nz])
    return out


def _jet(node, P, order):
    m, n = P.shape
    if isinstance(node, Const):
        v = np.full(m, node.value)
        return v, np.zeros((m, n)), (np.zeros((m, n, n)) if order >= 2 else None)
    if isinstance(node, Var):
        g = np.zeros((m, n))
        g[:, node.index - 1] = 1.0
        return P[:, node.index - 1].copy(), g, (np.zeros((m, n, n)) if order >= 2 else None)
    if isinstance(node, Neg):
        v, g, H = _jet(node.operand, P, order)
        return -v, -g, (-H if H is not None else None)
    if isinstance(node, Call):
        a, ga, Ha = _jet(node.arg, P, order)
        if node.name == "log":
            check_log(a, P)
        elif node.name == "sqrt":
            check_sqrt(a, P)
        return _chain(*_unary(node.name, a), ga, Ha, order)

    a, ga, Ha = _jet(node.left, P, order)
    b, gb, Hb = _jet(node.right, P, order)
    op = node.op
    if op == "+":
        return a + b, ga + gb, (Ha + Hb if order >= 2 else None)
    if op == "-":
        return a - b, ga - gb, (Ha - Hb if order >= 2 else None)
    if op == "*":
        v = a * b
        g = ga * b[:, None] + gb * a[:, None]
        H = None
        if order >= 2:
            H = Ha * b[:, None, None] + Hb * a[:, None, None] + _sym_outer(ga, gb)
        return v, g, H
    if op == "/":
        check_div(b, P)
        v = a / b
        g = (ga - v[:, None] * gb) / b[:, None]
        H = None
        if order >= 2:
            H = (Ha - v[:, None, None] * Hb - _sym_outer(g, gb)) / b[:, None, None]
        return v, g, H
    # power
    check_pow(a, b, P)
    v = np.power(a, b)
    if not _free_vars(node.right, set()):
        # constant exponent: log-free power rule
        d1 = _pow_coeff(b, a, b - 1.0)
        d2 = _pow_coeff(b * (b - 1.0), a, b - 2.0)
        return _chain(v, d1, d2, ga, Ha, order)
    # variable exponent: a^b = exp(b log a) needs a > 0
    check_log(a, P)
    la = np.log(a)
    dl = la[:, None] * gb + b[:, None] * ga / a[:, None]  # gradient of b*log(a)
    g = v[:, None] * dl
    H = None
    if order >= 2:
        Hl = (la[:, None, None] * Hb + b[:, None, None] * Ha / a[:, None, None]
              + _sym_outer(gb, ga) / a[:, None, None]
              - b[:, None, None] * _outer(ga) / (a * a)[:, None, None])
        H = v[:, None, None] * (Hl + _outer(dl))
    return v, g, H


def jet_batch(expr: ScalarExpr, P, order: int = 2):
    """Batched jets over the rows of ``P``.

    Returns ``(value, gradient, hessian)`` with shapes ``(m,)``, ``(m, n)``
    and ``(m, n, n)``; ``hessian`` is ``None`` when ``order < 2`` and the
    gradient is ``None`` too when ``order == 0``.
    """
    P = as_points(P, expr.dim)
    if order <= 0:
        return evaluate_many(expr, P), None, None
    with np.errstate(all="ignore"):
        return _jet(expr.root, P, order)


def eval_jet2(expr: ScalarExpr, p) -> Jet2:
    p = np.asarray(p, dtype=float)
    if p.shape != (expr.dim,):
        raise ValueError(f"point has shape {p.shape}, expression needs ({expr.dim},)")
    v, g, H = jet_batch(expr, p[None, :])
    return Jet2(float(v[0]), g[0], H[0])


def finite_diff_check(expr: ScalarExpr, p, step: float = 1e-4) -> float:
    """Largest ``|jet - FD| / (1 + |jet|)`` over gradient and Hessian entries.

    Central differences: 2-point for the gradient, 3-point for diagonal and
    4-point for mixed second derivatives.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    p = np.asarray(p, dtype=float)
    n = expr.dim
    jet = eval_jet2(expr, p)
    E = np.eye(n) * step
    stencil = [p]
    for i in range(n):
        stencil += [p + E[i], p - E[i]]
    for i in range(n):
        for j in range(i + 1, n):
            stencil += [p + E[i] + E[j], p + E[i] - E[j], p - E[i] + E[j], p - E[i] - E[j]]
    vals = evaluate_many(expr, np.array(stencil))
    f0 = vals[0]
    grad = np.empty(n)
    hess = np.empty((n, n))
    for i in range(n):
        fp, fm = vals[1 + 2 * i], vals[2 + 2 * i]
        grad[i] = (fp - fm) / (2 * step)
        hess[i, i] = (fp - 2 * f0 + fm) / step**2
    k = 1 + 2 * n
    for i in range(n):
        for j in range(i + 1, n):
            fpp, fpm, fmp, fmm = vals[k:k + 4]
            k += 4
            hess[i, j] = hess[j, i] = (fpp - fpm - fmp + fmm) / (4 * step**2)
    dg = np.abs(jet.gradient - grad) / (1 + np.abs(jet.gradient))
    dh = np.abs(jet.hessian - hess) / (1 + np.abs(jet.hessian))
    return float(max(dg.max(initial=0.0), dh.max(initial=0.0)))
