"""Scenario files: strict JSON task descriptions.

A scenario names a task and the data it needs::

    {
      "schema_version": 1,
      "task": "solve",
      "n": 3,
      "background": "1",
      "tensor": ["4*x1^2-2", "-2*x1^2", "-2*x1^2"],
      "phi": "1/(1+x1^2)",
      "base_point": [0, 0, 0],
      "grid": {"center": [0, 0, 0], "half_width": 2, "points_per_axis": 9, "axes": [1]},
      "tolerances": {"accept": 1e-8, "reject": 1e-4, "quadrature": 1e-10},
      "example_id": null
    }

``tensor`` takes one of four forms: a list of ``n`` component expressions,
``{"f", "f_k", "k"}`` (single-coordinate tensor), ``{"h", "k", "C"}``
(tensor generated by ``h``) or ``{"a", "b", "c"}`` (quadratic family).  The
keys of the last three may also sit at the top level instead of under
``tensor``, but only one description may be present.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from ..errors import ParseError, SchemaError
from ..exprlang import ScalarExpr, parse
from ..grid import Grid
from ..prescribed.problem import Thresholds
from ..prescribed.quadratic import QuadraticFamily
from ..prescribed.single import construct_from_h
from ..tensors import DiagonalTensorField

__all__ = ["Scenario", "TensorForm", "SCHEMA_VERSION", "TASKS", "load_scenario",
           "parse_scenario", "scenario_to_dict"]

SCHEMA_VERSION = 1
TASKS = ("verify", "solve", "classify", "curvature", "example")
TOP_KEYS = ("schema_version", "task", "n", "background", "tensor", "phi", "base_point", "grid",
            "tolerances", "example_id")
FORM_KEYS = {
    "pair": ("f", "f_k", "k"),
    "generated": ("h", "k", "C"),
    "quadratic": ("a", "b", "c"),
}
GRID_KEYS = ("center", "half_width", "points_per_axis", "axes")
TOL_KEYS = ("accept", "reject", "quadrature")


@dataclass(frozen=True)
class TensorForm:
    """One tensor description; ``kind`` is list, pair, generated or quadratic."""

    kind: str
    data: dict

    def build(self, n: int) -> DiagonalTensorField:
        d = self.data
        if self.kind == "list":
            return DiagonalTensorField.from_texts(d["components"], n)
        if self.kind == "pair":
            k = d["k"]
            f, fk = parse(d["f"], n), parse(d["f_k"], n)
            return DiagonalTensorField(tuple(fk if i == k - 1 else f for i in range(n)))
        if self.kind == "generated":
            T, _ = construct_from_h(d["h"], d["k"], d["C"], n)
            return T
        fam = self.quadratic()
        return DiagonalTensorField((fam.f(),) * n)

    def quadratic(self) -> QuadraticFamily:
        d = self.data
        return QuadraticFamily.of(d["a"], d["b"], d["c"])

    def as_json(self):
        if self.kind == "list":
            return list(self.data["components"])
        return {k: self.data[k] for k in FORM_KEYS[self.kind]}


@dataclass(frozen=True)
class Scenario:
    task: str
    n: int
    tensor: TensorForm | None = None
    background: str = "1"
    phi: str | None = None
    base_point: tuple[float, ...] | None = None
    grid: Grid | None = None
    tolerances: Thresholds = field(default_factory=Thresholds)
    example_id: str | None = None
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        if self.base_point is None:
            object.__setattr__(self, "base_point", (0.0,) * self.n)
        if self.grid is None:
            object.__setattr__(self, "grid", Grid.cube(self.n))

    def tensor_field(self) -> DiagonalTensorField:
        if self.tensor is None:
            raise SchemaError("tensor", "this task needs a tensor description")
        return self.tensor.build(self.n)

    def background_expr(self) -> ScalarExpr:
        return parse(self.background, self.n)

    def phi_expr(self) -> ScalarExpr:
        if self.phi is None:
            raise SchemaError("phi", f"task {self.task!r} needs phi")
        return parse(self.phi, self.n)

    def with_overrides(self, task=None, points_per_axis=None, accept=None, reject=None) -> "Scenario":
        out = self
        if task is not None and task != self.task:
            out = replace(out, task=task)
        if points_per_axis is not None:
            out = replace(out, grid=out.grid.with_points(points_per_axis))
        if accept is not None or reject is not None:
            t = out.tolerances
            out = replace(out, tolerances=Thresholds(
                t.accept if accept is None else accept, t.reject if reject is None else reject,
                t.quadrature))
        return out


def _err(path: str, msg: str):
    raise SchemaError(path, msg)


def _num(v, path: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        _err(path, f"expected a number, got {type(v).__name__}")
    return float(v)


def _int(v, path: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        _err(path, f"expected an integer, got {v!r}")
    return v


def _vector(v, n: int, path: str) -> tuple[float, ...]:
    if not isinstance(v, list) or len(v) != n:
        _err(path, f"expected a list of {n} numbers")
    return tuple(_num(x, f"{path}[{i}]") for i, x in enumerate(v))


def _expr(text, n: int, path: str) -> str:
    if not isinstance(text, str):
        _err(path, "expected an expression string")
    try:
        parse(text, n)
    except ParseError as exc:
        _err(path, str(exc))
    return text


def _only(d: dict, allowed, path: str):
    extra = sorted(set(d) - set(allowed))
    if extra:
        _err(f"{path}.{extra[0]}" if path else extra[0], "unknown key")


def _tensor_form(raw, n: int, path: str) -> TensorForm:
    if isinstance(raw, list):
        if len(raw) != n:
            _err(path, f"expected {n} component expressions, got {len(raw)}")
        return TensorForm("list", {"components": tuple(
            _expr(t, n, f"{path}[{i}]") for i, t in enumerate(raw))})
    if not isinstance(raw, dict):
        _err(path, "expected a list of expressions or an object")
    kinds = [kind for kind, keys in FORM_KEYS.items() if set(raw) == set(keys)]
    if len(kinds) != 1:
        _err(path, "object must have exactly the keys {f, f_k, k}, {h, k, C} or {a, b, c}")
    return _form(kinds[0], raw, n, path)


def _form(kind: str, raw: dict, n: int, path: str) -> TensorForm:
    p = (path + ".") if path else ""
    if kind == "quadratic":
        a, c = _num(raw["a"], p + "a"), _num(raw["c"], p + "c")
        b = raw["b"]
        b = (_num(b, p + "b"),) * n if isinstance(b, (int, float)) and not isinstance(b, bool) \
            else _vector(b, n, p + "b")
        if a == 0 and c == 0 and not any(b):
            _err(p + "a", "a, b and c all vanish")
        return TensorForm("quadratic", {"a": a, "b": list(b), "c": c})
    k = _int(raw["k"], p + "k")
    if not 1 <= k <= n:
        _err(p + "k", f"k must lie in 1..{n}")
    if kind == "pair":
        return TensorForm("pair", {"f": _expr(raw["f"], n, p + "f"),
                                   "f_k": _expr(raw["f_k"], n, p + "f_k"), "k": k})
    C = _num(raw["C"], p + "C")
    if not C > 0:
        _err(p + "C", "C must be positive")
    h = _expr(raw["h"], n, p + "h")
    if parse(h, n).variables() - {k}:
        _err(p + "h", f"h must depend on x{k} only")
    return TensorForm("generated", {"h": h, "k": k, "C": C})


def _grid(raw, n: int) -> Grid:
    if not isinstance(raw, dict):
        _err("grid", "expected an object")
    _only(raw, GRID_KEYS, "grid")
    center = _vector(raw.get("center", [0.0] * n), n, "grid.center")
    hw = _num(raw.get("half_width", 2.0), "grid.half_width")
    ppa = _int(raw.get("points_per_axis", 9), "grid.points_per_axis")
    axes = raw.get("axes")
    if axes is not None:
        if not isinstance(axes, list) or not axes:
            _err("grid.axes", "expected a non-empty list of axis indices")
        axes = tuple(_int(a, f"grid.axes[{i}]") for i, a in enumerate(axes))
    try:
        return Grid(center, hw, ppa, axes)
    except ValueError as exc:
        _err("grid", str(exc))


def _tolerances(raw) -> Thresholds:
    if not isinstance(raw, dict):
        _err("tolerances", "expected an object")
    _only(raw, TOL_KEYS, "tolerances")
    d = Thresholds()
    vals = [_num(raw.get(k, getattr(d, k)), f"tolerances.{k}") for k in TOL_KEYS]
    try:
        return Thresholds(*vals)
    except ValueError as exc:
        _err("tolerances", str(exc))


def parse_scenario(raw: dict) -> Scenario:
    """Validate a decoded scenario object; every error names its key path."""
    if not isinstance(raw, dict):
        _err("", "scenario must be a JSON object")
    form_keys = {k for keys in FORM_KEYS.values() for k in keys}
    _only(raw, set(TOP_KEYS) | form_keys, "")
    version = raw.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        _err("schema_version", f"unsupported version {version!r}")
    if "task" not in raw and raw.get("example_id") is None:
        _err("task", "missing")
    task = raw.get("task", "example")
    if task not in TASKS:
        _err("task", f"must be one of {', '.join(TASKS)}")

    example_id = raw.get("example_id")
    if example_id is not None:
        from .catalog import catalog_scenario

        if not isinstance(example_id, str):
            _err("example_id", "expected a string")
        base = catalog_scenario(example_id)
        rest = {k: v for k, v in raw.items() if k not in ("example_id", "schema_version")}
        if set(rest) - {"task", "grid", "tolerances"}:
            key = sorted(set(rest) - {"task", "grid", "tolerances"})[0]
            _err(key, "cannot be combined with example_id")
        return replace(base, task=task,
                       grid=_grid(raw["grid"], base.n) if "grid" in raw else base.grid,
                       tolerances=_tolerances(raw["tolerances"]) if "tolerances" in raw
                       else base.tolerances)

    if "n" not in raw:
        _err("n", "missing")
    n = _int(raw["n"], "n")
    if n < 3:
        _err("n", "dimension must be at least 3")

    top = {k: raw[k] for k in form_keys if k in raw}
    described = (["tensor"] if "tensor" in raw else []) + (["top-level"] if top else [])
    if len(described) > 1:
        _err(sorted(top)[0], "tensor is already described by the 'tensor' key")
    tensor = None
    if "tensor" in raw:
        tensor = _tensor_form(raw["tensor"], n, "tensor")
    elif top:
        kinds = [kind for kind, keys in FORM_KEYS.items() if set(top) == set(keys)]
        if len(kinds) != 1:
            _err(sorted(top)[0], "top-level tensor keys must be exactly {f, f_k, k}, "
                                 "{h, k, C} or {a, b, c}")
        tensor = _form(kinds[0], top, n, "")

    background = _expr(raw.get("background", "1"), n, "background")
    phi = raw.get("phi")
    if phi is not None:
        phi = _expr(phi, n, "phi")
    base = _vector(raw["base_point"], n, "base_point") if "base_point" in raw else None
    grid = _grid(raw["grid"], n) if "grid" in raw else None
    tol = _tolerances(raw["tolerances"]) if "tolerances" in raw else Thresholds()

    if task in ("verify", "solve", "classify") and tensor is None:
        _err("tensor", f"task {task!r} needs a tensor description")
    if task in ("verify", "curvature") and phi is None:
        _err("phi", f"task {task!r} needs phi")
    if task == "example":
        _err("example_id", "task 'example' needs example_id")
    return Scenario(task, n, tensor, background, phi, base, grid, tol, None, version)


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SchemaError("", f"cannot read {path}: {exc.strerror}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return parse_scenario(raw)


def scenario_to_dict(s: Scenario) -> dict:
    """JSON-ready echo of a scenario in the documented key order."""
    return {
        "schema_version": s.schema_version,
        "task": s.task,
        "n": s.n,
        "background": s.background,
        "tensor": None if s.tensor is None else s.tensor.as_json(),
        "phi": s.phi,
        "base_point": list(s.base_point),
        "grid": s.grid.as_dict(),
        "tolerances": {"accept": s.tolerances.accept, "reject": s.tolerances.reject,
                       "quadrature": s.tolerances.quadrature},
        "example_id": s.example_id,
    }
