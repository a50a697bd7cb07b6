import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from prescurv.tensors import (CurvTensor, DiagonalTensorField, SymBilinear, kulkarni_nomizu,
                              symmetry_defects, tensor_difference, tensor_max_norm,
                              validate_symmetries)

I3 = SymBilinear.identity(3)


def test_identity_square():
    R = kulkarni_nomizu(I3, I3)
    assert R[0, 1, 0, 1] == 2
    assert R[0, 1, 0, 2] == 0
    assert tensor_max_norm(R) == 2


def test_diagonal_against_identity():
    R = kulkarni_nomizu(SymBilinear.diagonal([1.0, 2.0, 3.0]), I3)
    assert R[0, 1, 0, 1] == 3
    assert R[0, 1, 1, 0] == -3


def test_bianchi_identity_n4():
    I4 = SymBilinear.identity(4)
    R = kulkarni_nomizu(I4, I4)
    assert R[0, 1, 2, 3] + R[0, 2, 3, 1] + R[0, 3, 1, 2] == 0
    assert validate_symmetries(R, 0.0)


def test_perturbation_detected():
    R = kulkarni_nomizu(SymBilinear.diagonal([1.0, 2.0, 3.0]), I3)
    assert not validate_symmetries(R.perturbed(0, 1, 0, 1, 1e-3), 1e-6)


def test_norm_of_difference():
    R = kulkarni_nomizu(I3, SymBilinear.diagonal([1.0, -2.0, 0.5]))
    assert tensor_max_norm(R - R) == 0
    assert tensor_max_norm(kulkarni_nomizu(SymBilinear.diagonal([1.0, 0, 0]), I3)) == 1


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        kulkarni_nomizu(I3, SymBilinear.identity(4))
    with pytest.raises(ValueError):
        tensor_difference(kulkarni_nomizu(I3, I3), CurvTensor(np.zeros((4, 4, 4, 4))))


def test_symmetric_input_required():
    with pytest.raises(ValueError):
        SymBilinear(np.array([[1.0, 2.0], [0.0, 1.0]]))


def sym_matrix(n):
    return arrays(float, (n, n), elements=st.floats(-10, 10, allow_nan=False)).map(
        lambda m: SymBilinear.symmetrized(m))


pairs = st.integers(3, 5).flatmap(lambda n: st.tuples(sym_matrix(n), sym_matrix(n), sym_matrix(n)))


@settings(max_examples=80, deadline=None)
@given(pairs)
def test_product_symmetries_and_commutativity(abc):
    A, B, _ = abc
    R = kulkarni_nomizu(A, B)
    assert validate_symmetries(R, 0.0)
    assert np.array_equal(R.components, kulkarni_nomizu(B, A).components)


@settings(max_examples=60, deadline=None)
@given(pairs, st.floats(-3, 3), st.floats(-3, 3))
def test_bilinearity(abc, a, b):
    A, B, C = abc
    lhs = kulkarni_nomizu(SymBilinear(a * A.entries + b * B.entries), C).components
    rhs = a * kulkarni_nomizu(A, C).components + b * kulkarni_nomizu(B, C).components
    scale = 1 + np.abs(a * kulkarni_nomizu(A, C).components) + np.abs(b * kulkarni_nomizu(B, C).components)
    assert np.all(np.abs(lhs - rhs) <= 1e-12 * scale)


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 6).flatmap(
    lambda n: arrays(float, n, elements=st.floats(-1e3, 1e3, allow_nan=False))))
def test_injectivity_on_diagonals(d):
    R = kulkarni_nomizu(SymBilinear.diagonal(d), SymBilinear.identity(d.size))
    assert (tensor_max_norm(R) > 0) == bool(np.any(d))


def test_symmetry_defect_report():
    R = CurvTensor(np.zeros((3, 3, 3, 3))).perturbed(0, 1, 0, 2, 0.5)
    defects = symmetry_defects(R)
    assert max(defects.values()) == pytest.approx(0.5)


def test_diagonal_tensor_field():
    T = DiagonalTensorField.from_texts(["4*x1^2-2", "-2*x1^2", "-2*x1^2"])
    assert T.n == 3
    assert T.structure == "single" and T.k == 1
    assert np.allclose(T.values([[1.0, 5.0, 5.0]]), [[2.0, -2.0, -2.0]])
    assert T.at([0.0, 0.0, 0.0]).entries[0, 0] == -2
    assert DiagonalTensorField.from_texts(["1", "1", "1"]).structure in ("isotropic", "general")
