"""Shared expression corpus and conformal-factor families for the tests.

Every corpus entry is smooth on the box [-0.9, 0.9]^3.
"""

import numpy as np

CORPUS = [
    "x1",
    "2.5",
    "x1 + x2",
    "x1 - x2 - x3",
    "x1*x2*x3",
    "x1^2 + 2*x2",
    "x1^3",
    "-x1^2",
    "--x1",
    "-(x1 - x3)^2",
    "2^3^2",
    "2+3*4",
    "x1^2*x2 - 3*x3^2*x1 + 0.5",
    "1/(1+x1^2)",
    "1/(1+x1^2+x2^2+x3^2)^2",
    "(x1 + 2)/(x2 + 3)",
    "exp(x1*x2)",
    "exp(-x1^2)",
    "exp(-cosh(x1))",
    "exp(2*x1^2)*(x1^2 - 1)",
    "cosh(x1) + x2^2",
    "sinh(x1)*cosh(x2)",
    "tanh(x1 + x2*x3)",
    "sin(x1)*cos(x2)",
    "sin(x1*x2*x3) + cos(x3)",
    "log(2 + x1^2 + x2)",
    "log(3 + sin(x1))",
    "sqrt(1 + x1^2 + x2^2)",
    "sqrt(4 - x3^2)",
    "abs(x1 + 5)",
    "(x1 + 3)^0.5 + (x2 + 2)^0.5",
    "(1 + x1^2)^(-1.5)",
    "(2 + x2)^x1",
    "exp(sin(x1) * x2)",
    "cos(exp(x1/2))",
    "1e-3*x1 + 2.5e1*x2^2",
    "3.0e-1 * x3^4 - x3^2",
    "x1/(1 + x2^2)/(2 + x3)",
    "x1^2 + x2^2 + x3^2 + 1",
    "(x1^2 + x2^2 + x3^2 - 1) * 0.25",
    "-(2*x3^2-1)^2/(2*(x3+2)^4)*exp(2*x3^2)",
    "(4*x1^2 - 2)",
    "-2*x1^2",
    "2*(x1^2 - 1)*exp(2*x1^2)",
    "(sinh(x1)^2 - 2*cosh(x1))/2*exp(2*cosh(x1))",
    "2/(1 + x1^2 + x2^2 + x3^2)^4",
    "exp(x1) + exp(x2) + exp(x3)",
    "tanh(x1)^2 - 1/cosh(x2)^2",
    "x1*exp(-x2^2)*sin(2*x3)",
    "(x1 + x2)^3 - (x2 - x3)^2 * x1",
]

assert len(CORPUS) == 50


def box_points(rng, count, n=3, half=0.9):
    return rng.uniform(-half, half, size=(count, n))


def factor_families(n):
    """Five conformal factors ``u`` over R^n, keyed by a short name."""
    r2 = " + ".join(f"x{i}^2" for i in range(1, n + 1))
    poly = " + ".join(f"{0.3 + 0.1 * i}*x{i}^2 + {0.05 * i}*x{i}^3" for i in range(1, n + 1))
    return {
        "quadratic": f"1 + {r2} + 0.3*x1 - 0.2*x{n}",
        "rational": "1/(1 + x1^2)",
        "gaussian": "exp(-x2^2)",
        "cosh": f"exp(-cosh(x{n}))",
        "separable-poly": f"2 + {poly}",
    }


def rng(seed=0):
    return np.random.default_rng(seed)
