"""Built-in worked examples with their reference expectations.

Each entry stores the curvature formulas as originally displayed for the
example and, where they disagree with the conformal formulas and the
Christoffel oracle, the recomputed version.  Running an entry re-derives
everything and fails loudly if any expectation drifts.

Formula texts use ``{n}`` and ``{C}`` placeholders filled from the entry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..errors import SchemaError

__all__ = ["Formula", "CatalogEntry", "CATALOG", "catalog_scenario", "catalog_ids"]


@dataclass(frozen=True)
class Formula:
    """A displayed curvature formula for one table column.

    ``corrected`` is ``None`` when the displayed text is right.
    """

    column: str
    displayed: str
    corrected: str | None = None

    def texts(self, n: int, C: float) -> tuple[str, str | None]:
        fill = {"n": n, "C": repr(float(C))}
        return (self.displayed.format(**fill),
                None if self.corrected is None else self.corrected.format(**fill))


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    source: str
    description: str
    scenario: dict
    expect: dict
    C: float = 1.0
    formulas: tuple[Formula, ...] = field(default_factory=tuple)
    formula_grid: dict | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)


_LINE = {"center": [0.0, 0.0, 0.0], "half_width": 2.0, "points_per_axis": 9, "axes": [1]}
_CUBE = {"center": [0.0, 0.0, 0.0], "half_width": 2.0, "points_per_axis": 9}
_HALF = {"center": [0.0, 0.0, 1.25], "half_width": 0.75, "points_per_axis": 9}
_HALF_LINE = dict(_HALF, axes=[3])

_COSH_FK = "(sinh(x1)^2 - 2*cosh(x1))/2*exp(2*cosh(x1))"
_COSH_F = "-sinh(x1)^2/2*exp(2*cosh(x1))"
_GAUSS_FK = "2*(x1^2 - 1)*exp(2*x1^2)"
_GAUSS_F = "-2*x1^2*exp(2*x1^2)"
_HYP_F = "-(2*x3^2-1)^2/(2*x3^4)*exp(2*x3^2)"
_HYP_FN = "(4*x3^4 - 8*x3^2 - 1)/(2*x3^4)*exp(2*x3^2)"


def _entries() -> list[CatalogEntry]:
    return [
        CatalogEntry(
            id="cosh-complete",
            source="single-coordinate worked example with h = sinh",
            description="h = sinh(x1), k = 1, C = 1, n = 3: complete metric with u = C exp(-cosh x1)",
            scenario={"task": "solve", "n": 3, "tensor": [_COSH_FK, _COSH_F, _COSH_F],
                      "phi": "exp(-cosh(x1))", "grid": _LINE},
            expect={"verdict": "SOLUTION", "verify_max": 1e-10, "phi_match": 1e-6,
                    # anchoring int h at 0 turns exp(2 cosh) into e^2 exp(2(cosh - 1))
                    "generator": {"h": "sinh(x1)", "k": 1, "C": math.exp(-1.0)},
                    "completeness": "Complete"},
            formulas=(
                Formula("scalar",
                        "-({n}-1)*{C}*exp(-cosh(x1))*(2*cosh(x1)^2+({n}-2)*sinh(x1)^2)",
                        "-({n}-1)*{C}^2*exp(-2*cosh(x1))*(2*cosh(x1)+({n}-2)*sinh(x1)^2)"),
                Formula("ric_11", "-({n}-1)*cosh(x1)"),
                Formula("ric_22", "-(cosh(x1)+({n}-2)*sinh(x1)^2)"),
                Formula("K_23", "-{C}^2*sinh(x1)^2*exp(-2*cosh(x1))"),
                Formula("K_12", "-{C}^2*cosh(x1)*exp(-2*cosh(x1))"),
            ),
            formula_grid=_LINE,
            notes=("the displayed scalar curvature carries C instead of C^2, exp(-cosh) instead "
                   "of exp(-2 cosh) and cosh^2 instead of cosh",),
        ),
        CatalogEntry(
            id="rational-complete",
            source="single-coordinate worked example with h = 2x/(1+x^2)",
            description="h = 2 x1/(1+x1^2), k = 1, C = 1, n = 3: u = C/(1+x1^2)",
            scenario={"task": "solve", "n": 3, "tensor": ["4*x1^2-2", "-2*x1^2", "-2*x1^2"],
                      "phi": "1/(1+x1^2)", "grid": _LINE},
            expect={"verdict": "SOLUTION", "verify_max": 1e-10, "phi_match": 1e-6,
                    "recovered_C": [1.0, 1e-8],
                    "generator": {"h": "2*x1/(1+x1^2)", "k": 1},
                    "scalar": [[[0.0, 0.0, 0.0], -8.0, 1e-9]],
                    "sectional": [[[1.0, 0.0, 0.0], 2, 3, -0.25, 1e-9],
                                  [[1.0, 0.0, 0.0], 2, 1, 0.0, 1e-9]],
                    "completeness": "Complete"},
            formulas=(
                Formula("scalar", "-4*({n}-1)*{C}^2/(1+x1^2)^2*(1+({n}-3)*x1^2)",
                        "-4*({n}-1)*{C}^2/(1+x1^2)^4*(1+({n}-3)*x1^2)"),
                Formula("ric_11", "2*({n}-1)*(x1^2-1)/(1+x1^2)^2"),
                Formula("ric_22", "((10-4*{n})*x1^2-2)/(1+x1^2)^2"),
                Formula("K_23", "-4*{C}^2*x1^2/(1+x1^2)^4"),
                Formula("K_12", "-2*{C}^2*(1-x1^2)/(1+x1^2)^4"),
            ),
            formula_grid=_LINE,
            notes=("the displayed scalar curvature has (1+x^2)^2 where (1+x^2)^4 is correct; "
                   "both agree at x = 0",),
        ),
        CatalogEntry(
            id="gaussian-complete",
            source="single-coordinate worked example with h = 2x",
            description="h = 2 x1, k = 1, C = 1, n = 3: u = C exp(-x1^2)",
            scenario={"task": "solve", "n": 3, "tensor": [_GAUSS_FK, _GAUSS_F, _GAUSS_F],
                      "phi": "exp(-x1^2)", "grid": _LINE},
            expect={"verdict": "SOLUTION", "verify_max": 1e-10, "phi_match": 1e-6,
                    "recovered_C": [1.0, 1e-8],
                    "generator": {"h": "2*x1", "k": 1},
                    "completeness": "Complete"},
            formulas=(
                Formula("scalar", "-4*({n}-1)*{C}^2*exp(-2*x1^2)*(1+({n}-2)*x1^2)"),
                Formula("ric_11", "-2*({n}-1)"),
                Formula("ric_22", "-2*(1-2*({n}-2)*x1^2)", "-2*(1+2*({n}-2)*x1^2)"),
                Formula("K_23", "-4*x1^2*{C}^2*exp(-2*x1^2)"),
                Formula("K_12", "-2*{C}^2*exp(-2*x1^2)"),
            ),
            formula_grid=_LINE,
            notes=("the displayed Ric_ii has the sign of the x^2 term flipped",),
        ),
        CatalogEntry(
            id="hyperbolic-gaussian",
            source="worked example over the hyperbolic half-space",
            description="F = x3 (hyperbolic half-space), phi_rel = exp(-x3^2), n = 3",
            scenario={"task": "verify", "n": 3, "background": "x3",
                      "tensor": [_HYP_F, _HYP_F, _HYP_FN], "phi": "exp(-x3^2)",
                      "base_point": [0.0, 0.0, 1.0], "grid": _HALF},
            expect={"verdict": "MISMATCH", "pairing": "flat", "lift_roundtrip": 1e-6,
                    "required_tensor": 1e-8},
            formulas=(
                Formula("scalar",
                        "({n}-1)*exp(-2*x3^2)*(4*(2-{n})*x3^4+4*({n}-3)*x3^2-{n})"),
                Formula("ric_11", "(4*(2-{n})*x3^4+2*(2*{n}-5)*x3^2+1-{n})/x3^2"),
                Formula("ric_33", "({n}-1)*(4*x3^4-4*x3^2-1)/x3^2",
                        "({n}-1)*(-2*x3^2-1)/x3^2"),
                Formula("K_12", "-(1-2*x3^2)^2*exp(-2*x3^2)"),
                Formula("K_13", "2*x3^2*(2*x3^2-3)*exp(-2*x3^2)",
                        "-(1+2*x3^2)*exp(-2*x3^2)"),
            ),
            formula_grid=_HALF_LINE,
            notes=("the displayed T realises the metric against the flat metric, not against "
                   "the hyperbolic one; the hyperbolic pairing needs T multiplied by x3^2",
                   "the displayed Ric_nn and K(d_i, d_n) disagree with the oracle; the scalar "
                   "curvature, Ric_ii and K(d_i, d_j) agree"),
        ),
        CatalogEntry(
            id="sphere-family",
            source="quadratic family, globally defined case",
            description="f = 2/(1+|x|^2)^4: a = 1, b = 0, c = 1, lambda = -4",
            scenario={"task": "classify", "n": 3,
                      "tensor": ["2/(1+x1^2+x2^2+x3^2)^4"] * 3,
                      "phi": "1+x1^2+x2^2+x3^2", "grid": _CUBE},
            expect={"verdict": "OK", "family": [1.0, [0.0, 0.0, 0.0], 1.0, 1e-8],
                    "lambda": [-4.0, 1e-8], "singular_set": "empty",
                    "sectional_constant": [4.0, 1e-9]},
        ),
        CatalogEntry(
            id="ball-singular",
            source="quadratic family, sphere singular set",
            description="a = 1, b = 0, c = -1: u = |x|^2 - 1 vanishes on the unit sphere",
            scenario={"task": "classify", "n": 3, "tensor": {"a": 1.0, "b": [0.0, 0.0, 0.0],
                                                             "c": -1.0},
                      "grid": {"center": [0.0, 0.0, 0.0], "half_width": 0.5,
                               "points_per_axis": 9}},
            expect={"verdict": "OK", "lambda": [4.0, 1e-8], "singular_set": "sphere",
                    "radius": [1.0, 1e-12]},
        ),
        CatalogEntry(
            id="hyperplane-family",
            source="quadratic family, hyperplane singular set",
            description="a = 0, b = (1, 0, 0), c = 1: u = x1 + 1 vanishes on x1 = -1",
            scenario={"task": "classify", "n": 3, "tensor": {"a": 0.0, "b": [1.0, 0.0, 0.0],
                                                             "c": 1.0},
                      "grid": {"center": [0.0, 0.0, 0.0], "half_width": 0.5,
                               "points_per_axis": 9}},
            expect={"verdict": "OK", "lambda": [1.0, 1e-8], "singular_set": "hyperplane"},
        ),
        CatalogEntry(
            id="separable-exp",
            source="separable nonexistence",
            description="f_i = exp(x_i): each component depends on its own coordinate only",
            scenario={"task": "solve", "n": 3, "tensor": ["exp(x1)", "exp(x2)", "exp(x3)"],
                      "grid": _CUBE},
            expect={"verdict": "NONEXISTENT", "witness": "separable"},
        ),
        CatalogEntry(
            id="constant-identity",
            source="separable nonexistence, constant tensor",
            description="T = diag(1, 1, 1)",
            scenario={"task": "solve", "n": 3, "tensor": ["1", "1", "1"], "grid": _CUBE},
            expect={"verdict": "NONEXISTENT", "witness": "separable"},
        ),
        CatalogEntry(
            id="gaussian-perturbed",
            source="perturbation of the h = 2x example",
            description="the h = 2x tensor with f multiplied by (1 + 0.1 x2^2)",
            scenario={"task": "solve", "n": 3,
                      "tensor": [_GAUSS_FK, _GAUSS_F + "*(1+0.1*x2^2)",
                                 _GAUSS_F + "*(1+0.1*x2^2)"],
                      "grid": _CUBE},
            expect={"verdict": "NONEXISTENT", "witness_prefix": "family-",
                    "min_magnitude": 1e-3},
        ),
    ]


CATALOG: dict[str, CatalogEntry] = {e.id: e for e in _entries()}


def catalog_ids() -> list[str]:
    return list(CATALOG)


def catalog_scenario(example_id: str):
    """The entry's scenario, tagged with its id (task as stored in the entry)."""
    from dataclasses import replace

    from .schema import parse_scenario

    if example_id not in CATALOG:
        raise SchemaError("example_id", f"unknown example {example_id!r}; "
                                        f"known: {', '.join(CATALOG)}")
    return replace(parse_scenario(dict(CATALOG[example_id].scenario)), example_id=example_id)
