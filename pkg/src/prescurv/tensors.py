"""Pointwise algebra of symmetric bilinear forms and (0,4) curvature tensors."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .exprlang import ScalarExpr
from .fields import field_jets, field_values

__all__ = [
    "SymBilinear", "CurvTensor", "DiagonalTensorField", "kulkarni_nomizu",
    "validate_symmetries", "symmetry_defects", "tensor_max_norm", "tensor_difference",
]


@dataclass(frozen=True)
class SymBilinear:
    """A symmetric n x n form at a point."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        if not np.array_equal(a, a.T):
            raise ValueError("entries are not symmetric")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @classmethod
    def symmetrized(cls, m) -> "SymBilinear":
        m = np.asarray(m, dtype=float)
        return cls(0.5 * (m + m.T))

    @classmethod
    def diagonal(cls, d) -> "SymBilinear":
        return cls(np.diag(np.asarray(d, dtype=float)))

    @classmethod
    def identity(cls, n: int) -> "SymBilinear":
        return cls(np.eye(n))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __getitem__(self, idx):
        return self.entries[idx]

    def __add__(self, other):
        return SymBilinear(self.entries + _entries(other))

    def __sub__(self, other):
        return SymBilinear(self.entries - _entries(other))

    def __mul__(self, c: float):
        return SymBilinear(self.entries * float(c))

    __rmul__ = __mul__

    def trace_against(self, metric) -> float:
        """Trace with respect to ``metric`` (g^{ij} A_ij)."""
        return float(np.einsum("ij,ij->", np.linalg.inv(_entries(metric)), self.entries))


def _entries(x) -> np.ndarray:
    return x.entries if isinstance(x, SymBilinear) else np.asarray(x, dtype=float)


@dataclass(frozen=True)
class CurvTensor:
    """Components ``R[i, j, k, l]`` of a (0,4) tensor, 0-based indices.

    The full array is stored so that symmetry defects of externally computed
    tensors (the Christoffel route, perturbed inputs) stay observable.
    """

    components: np.ndarray

    def __post_init__(self):
        a = np.array(self.components, dtype=float)
        if a.ndim != 4 or len(set(a.shape)) != 1:
            raise ValueError(f"expected shape (n, n, n, n), got {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "components", a)

    @property
    def n(self) -> int:
        return self.components.shape[0]

    def __getitem__(self, idx):
        return self.components[idx]

    def __sub__(self, other: "CurvTensor") -> "CurvTensor":
        return tensor_difference(self, other)

    def __add__(self, other: "CurvTensor") -> "CurvTensor":
        _same_dim(self, other)
        return CurvTensor(self.components + other.components)

    def __mul__(self, c: float) -> "CurvTensor":
        return CurvTensor(self.components * float(c))

    __rmul__ = __mul__

    def max_norm(self) -> float:
        return tensor_max_norm(self)

    def pair_matrix(self) -> np.ndarray:
        """Components on the pair basis (i<j), (k<l), pairs in lexicographic order."""
        pairs = list(combinations(range(self.n), 2))
        idx = np.array(pairs)
        return self.components[idx[:, 0][:, None], idx[:, 1][:, None], idx[:, 0], idx[:, 1]]

    def perturbed(self, i, j, k, l, delta: float) -> "CurvTensor":
        """Copy with a single raw component shifted; used to probe validators."""
        a = self.components.copy()
        a[i, j, k, l] += delta
        return CurvTensor(a)


def _same_dim(a, b):
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} != {b.n}")


def kulkarni_nomizu(A, B) -> CurvTensor:
    """(A o B)_ijkl = A_ik B_jl + A_jl B_ik - A_il B_jk - A_jk B_il.

    Grouped as ``(p + q) - (r + s)`` so that antisymmetry and pair symmetry
    hold exactly in floating point for exactly symmetric inputs.
    """
    a, b = _entries(A), _entries(B)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    p = np.einsum("ik,jl->ijkl", a, b)
    q = np.einsum("jl,ik->ijkl", a, b)
    r = np.einsum("il,jk->ijkl", a, b)
    s = np.einsum("jk,il->ijkl", a, b)
    return CurvTensor((p + q) - (r + s))


def symmetry_defects(R: CurvTensor) -> dict[str, float]:
    """Max-norm defects of the antisymmetry, pair-symmetry and Bianchi identities.

    The Bianchi entry is reported net of a rounding allowance of a few ulps
    of the summed term magnitudes; the other two are exact comparisons.
    """
    c = R.components
    anti_ij = np.abs(c + c.transpose(1, 0, 2, 3)).max(initial=0.0)
    anti_kl = np.abs(c + c.transpose(0, 1, 3, 2)).max(initial=0.0)
    pair = np.abs(c - c.transpose(2, 3, 0, 1)).max(initial=0.0)
    # R_ijkl + R_iklj + R_iljk
    t1 = c
    t2 = c.transpose(0, 3, 1, 2)
    t3 = c.transpose(0, 2, 3, 1)
    bianchi = np.abs(t1 + t2 + t3)
    slack = 4 * np.finfo(float).eps * (np.abs(t1) + np.abs(t2) + np.abs(t3))
    return {
        "antisymmetry": float(max(anti_ij, anti_kl)),
        "pair_symmetry": float(pair),
        "bianchi": float(np.maximum(bianchi - slack, 0.0).max(initial=0.0)),
    }


def validate_symmetries(R: CurvTensor, tol: float = 0.0) -> bool:
    if tol < 0:
        raise ValueError("tol must be non-negative")
    return all(v <= tol for v in symmetry_defects(R).values())


def tensor_max_norm(R: CurvTensor) -> float:
    return float(np.abs(R.components).max(initial=0.0))


def tensor_difference(R1: CurvTensor, R2: CurvTensor) -> CurvTensor:
    _same_dim(R1, R2)
    return CurvTensor(R1.components - R2.components)


_STRUCTURES = ("general", "single", "isotropic")


def infer_structure(f) -> tuple[str, int | None]:
    """Classify a tuple of component expressions.

    ``("isotropic", None)`` when all components are the same tree,
    ``("single", k)`` when every component depends on at most ``x_k``,
    else ``("general", None)``.
    """
    if all(fi == f[0] for fi in f):
        return "isotropic", None
    used = set().union(*(fi.variables() for fi in f))
    if len(used) == 1:
        return "single", next(iter(used))
    return "general", None


@dataclass(frozen=True)
class DiagonalTensorField:
    """T = sum_i f_i(x) dx_i^2 with each f_i a field over n variables.

    Components are usually :class:`ScalarExpr`; any object following the
    field protocol of :mod:`prescurv.fields` is accepted too.

    ``k`` is 1-based and only meaningful for the ``"single"`` structure.
    """

    f: tuple[ScalarExpr, ...]
    structure: str = field(default="")
    k: int | None = None

    def __post_init__(self):
        f = tuple(self.f)
        object.__setattr__(self, "f", f)
        n = len(f)
        if n < 1 or any(fi.dim != n for fi in f):
            raise ValueError("need n component expressions, each over n variables")
        tag, k = infer_structure(f)
        if not self.structure:
            object.__setattr__(self, "structure", tag)
            object.__setattr__(self, "k", k)
            return
        if self.structure not in _STRUCTURES:
            raise ValueError(f"unknown structure {self.structure!r}")
        if self.structure == "isotropic" and tag != "isotropic":
            raise ValueError("structure 'isotropic' but components differ")
        if self.structure == "single":
            if self.k is None or not 1 <= self.k <= n:
                raise ValueError("structure 'single' needs k in 1..n")
            extra = set().union(*(fi.variables() for fi in f)) - {self.k}
            if extra:
                raise ValueError(f"structure 'single' in x{self.k} but components use {sorted(extra)}")

    @classmethod
    def from_texts(cls, texts, n: int | None = None, **kw) -> "DiagonalTensorField":
        from .exprlang import parse

        texts = list(texts)
        n = len(texts) if n is None else n
        if len(texts) != n:
            raise ValueError(f"expected {n} component expressions, got {len(texts)}")
        return cls(tuple(parse(t, n) for t in texts), **kw)

    @property
    def n(self) -> int:
        return len(self.f)

    def values(self, P) -> np.ndarray:
        """Component values, shape ``(m, n)``."""
        return np.stack([field_values(fi, P) for fi in self.f], axis=1)

    def jets(self, P, order: int = 2):
        """Batched jets of all components.

        Returns ``(F, DF, HF)`` with ``F[m, i] = f_i``, ``DF[m, i, a] =
        d_a f_i`` and ``HF[m, i, a, b] = d_a d_b f_i`` (``None`` if order < 2).
        """
        js = [field_jets(fi, P, order) for fi in self.f]
        F = np.stack([j[0] for j in js], axis=1)
        DF = np.stack([j[1] for j in js], axis=1)
        HF = np.stack([j[2] for j in js], axis=1) if order >= 2 else None
        return F, DF, HF

    def at(self, p) -> SymBilinear:
        return SymBilinear.diagonal(self.values(np.asarray(p, dtype=float)[None])[0])

    def scaled(self, c: float) -> "DiagonalTensorField":
        return DiagonalTensorField(tuple(fi * c for fi in self.f))

    def divided_by(self, e: ScalarExpr) -> "DiagonalTensorField":
        return DiagonalTensorField(tuple(fi / e for fi in self.f))

    def texts(self) -> list[str]:
        return [str(fi) for fi in self.f]
