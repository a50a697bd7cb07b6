"""Prescribing curvature over the hyperbolic half-space.

Starting from phi = exp(-x3^2) on g = delta / x3^2 we compute the tensor
the metric g / phi^2 requires, lift it back to a flat problem, and
compare both pairings of the tensor against the Christoffel-route
curvature.
"""

import numpy as np

from prescurv.exprlang import evaluate_many, parse
from prescurv.grid import Grid
from prescurv.prescribed import lift_to_background, required_tensor
from prescurv.prescribed.lift import oracle_tensor, pairing_check
from prescurv.tensors import DiagonalTensorField

F = parse("x3", 3)
PHI = parse("exp(-x3^2)", 3)
grid = Grid((0.0, 0.0, 1.25), 0.75, 5)
P = grid.points()

T = required_tensor(F, PHI)
print("required T along the x3 axis:")
axis = np.zeros((5, 3))
axis[:, 2] = np.linspace(0.5, 2.0, 5)
for x3, row in zip(axis[:, 2], T.values(axis)):
    print(f"  x3 = {x3:5.3f}  f = {row[0]: .6e}  f_3 = {row[2]: .6e}")

gaps = [oracle_tensor(F, PHI, p)[1] for p in P]
print(f"max |R - T (.) g| from the Christoffel route: {max(gaps):.1e}")

lifted = lift_to_background(F, T, (0.0, 0.0, 1.0), grid)
err = np.abs(lifted.phi_rel.values(P) - evaluate_many(PHI, P)).max()
print(f"lift recovers phi to {err:.1e}")

# the tensor that pairs with the flat metric instead differs by x3^2
f_side = "-(2*x3^2-1)^2/(2*x3^4)*exp(2*x3^2)"
f_last = "(4*x3^4 - 8*x3^2 - 1)/(2*x3^4)*exp(2*x3^2)"
flat_T = DiagonalTensorField.from_texts([f_side, f_side, f_last])
print("pairing of the flat-paired tensor:", pairing_check(F, flat_T, PHI, P).as_dict())
