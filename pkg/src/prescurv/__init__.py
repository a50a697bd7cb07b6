"""Conformally flat metrics with a prescribed diagonal curvature tensor.

Given ``T = sum f_i dx_i^2`` the package decides whether a metric
``gbar = g / phi^2`` with ``R(gbar) = T (.) g`` exists, reconstructs ``phi``
when it does, and checks every curvature quantity against an independent
Christoffel-symbol computation.

Subpackages: :mod:`exprlang` (expressions), :mod:`jets` (second-order
forward differentiation), :mod:`tensors`, :mod:`curvature`,
:mod:`prescribed` (solver) and :mod:`scenarios` (files, reports, CLI).
"""

from .curvature import ConformalMetric
from .errors import PrescurvError
from .exprlang import ScalarExpr, evaluate, parse
from .grid import Grid
from .jets import Jet2, eval_jet2
from .prescribed import NonExistence, PrescribedProblem, Solution, solve
from .tensors import CurvTensor, DiagonalTensorField, SymBilinear, kulkarni_nomizu

__version__ = "0.1.0"

__all__ = [
    "ConformalMetric", "CurvTensor", "DiagonalTensorField", "Grid", "Jet2", "NonExistence",
    "PrescribedProblem", "PrescurvError", "ScalarExpr", "Solution", "SymBilinear",
    "eval_jet2", "evaluate", "kulkarni_nomizu", "parse", "solve",
]
