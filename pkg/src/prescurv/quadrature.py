"""Adaptive Simpson quadrature over many intervals at once.

All live subintervals are refined level by level, so each level costs one
vectorised integrand call.  Results depend only on each interval's own
refinement history, never on which other intervals share the batch.
"""

from __future__ import annotations

import numpy as np

from .errors import QuadratureFailure

__all__ = ["adaptive_simpson", "integrate"]


def adaptive_simpson(fn, a, b, tol: float = 1e-10, max_depth: int = 40,
                     min_depth: int = 3, max_evals: int = 20_000_000) -> np.ndarray:
    """Integrate ``fn(seg, t)`` over ``[a[s], b[s]]`` for every segment ``s``.

    ``fn`` receives integer segment ids and abscissae (equal-length arrays)
    and returns integrand values.  ``tol`` is the absolute tolerance per
    segment, halved at each bisection (Richardson-corrected acceptance
    ``|S_l + S_r - S| <= 15 tol``).
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    out = np.zeros(a.shape[0])
    seg = np.flatnonzero(a != b)
    if seg.size == 0:
        return out

    def call(s, t):
        v = np.asarray(fn(s, t), dtype=float)
        if not np.all(np.isfinite(v)):
            bad = np.flatnonzero(~np.isfinite(v))[0]
            raise QuadratureFailure(f"non-finite integrand at t={t[bad]!r} (segment {s[bad]})")
        return v

    lo, hi = a[seg], b[seg]
    mid = 0.5 * (lo + hi)
    v = call(np.concatenate([seg, seg, seg]), np.concatenate([lo, mid, hi]))
    k = seg.size
    flo, fmid, fhi = v[:k], v[k:2 * k], v[2 * k:]
    whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)
    eps = np.full(k, float(tol))
    depth = 0
    evals = 3 * k

    while seg.size:
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        k = seg.size
        v = call(np.concatenate([seg, seg]), np.concatenate([lm, rm]))
        evals += 2 * k
        flm, frm = v[:k], v[k:]
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        delta = left + right - whole
        ok = np.abs(delta) <= 15.0 * eps
        if depth < min_depth:
            ok[:] = False
        if depth >= max_depth and not ok.all():
            worst = int(np.argmax(np.abs(delta) - 15.0 * eps))
            raise QuadratureFailure(
                f"tolerance {tol:g} not met at depth {max_depth} "
                f"on [{lo[worst]!r}, {hi[worst]!r}] (segment {seg[worst]})")
        if evals > max_evals:
            raise QuadratureFailure(f"evaluation budget {max_evals} exhausted")
        np.add.at(out, seg[ok], (left + right + delta / 15.0)[ok])
        r = ~ok
        seg = np.concatenate([seg[r], seg[r]])
        lo, mid, hi = (np.concatenate([lo[r], mid[r]]), np.concatenate([lm[r], rm[r]]),
                       np.concatenate([mid[r], hi[r]]))
        flo, fmid, fhi = (np.concatenate([flo[r], fmid[r]]), np.concatenate([flm[r], frm[r]]),
                          np.concatenate([fmid[r], fhi[r]]))
        whole = np.concatenate([left[r], right[r]])
        eps = np.concatenate([eps[r], eps[r]]) * 0.5
        depth += 1
    return out


def integrate(f, a: float, b: float, tol: float = 1e-10, max_depth: int = 40) -> float:
    """Scalar convenience wrapper: ``f`` maps an array of abscissae to values."""
    return float(adaptive_simpson(lambda s, t: f(t), [a], [b], tol, max_depth)[0])
