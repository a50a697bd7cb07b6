"""Exception types shared across the package."""

from __future__ import annotations


class PrescurvError(Exception):
    """Base class for every error raised by this package."""


class ParseError(PrescurvError, ValueError):
    """Malformed expression text.

    ``offset`` is the 0-based character offset of the offending token,
    ``expected`` a short description of what the parser wanted there.
    """

    def __init__(self, offset: int, expected: str, text: str = ""):
        self.offset = offset
        self.expected = expected
        self.text = text
        super().__init__(f"at offset {offset}: expected {expected}")


class DomainError(PrescurvError, ArithmeticError):
    """An expression was evaluated outside its real domain."""

    def __init__(self, message: str, point=None):
        self.point = point
        if point is not None:
            message = f"{message} at point {list(map(float, point))}"
        super().__init__(message)


class SingularMetric(PrescurvError):
    """The conformal factor vanishes at the query point."""

    def __init__(self, point):
        self.point = point
        super().__init__(f"conformal factor vanishes at {list(map(float, point))}")


class Degenerate(PrescurvError):
    """No admissible denominator 3 f_i + f_j exists for some direction j."""

    def __init__(self, message: str, point=None, direction: int | None = None):
        self.point = point
        self.direction = direction
        super().__init__(message)


class QuadratureFailure(PrescurvError):
    """Adaptive quadrature could not reach the requested tolerance."""


class ScaleInconsistent(PrescurvError):
    """The multiplicative constant differs between diagonal components."""

    def __init__(self, ratios, spread: float):
        self.ratios = ratios
        self.spread = spread
        super().__init__(f"scale ratios disagree (spread {spread:.3e}): {ratios}")


class DegenerateFamily(PrescurvError):
    """A quadratic conformal factor that vanishes identically."""


class DegenerateTensor(PrescurvError):
    """A constructed tensor violates the nondegeneracy condition identically."""


class Mismatch(PrescurvError):
    """A fitted closed form fails verification on the grid."""

    def __init__(self, message: str, deviation: float, point=None):
        self.deviation = deviation
        self.point = point
        super().__init__(f"{message} (max deviation {deviation:.3e})")


class NegativeRadicand(Mismatch):
    """A ratio that must be positive changed sign on the grid."""


class SchemaError(PrescurvError, ValueError):
    """Invalid scenario document; ``path`` locates the offending key."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path or '<root>'}: {message}")
