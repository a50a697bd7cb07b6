import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from corpus import CORPUS, box_points, rng
from prescurv.errors import DomainError
from prescurv.exprlang import parse
from prescurv.jets import eval_jet2, finite_diff_check, jet_batch


def test_polynomial_jet():
    j = eval_jet2(parse("x1^2", 1), [3.0])
    assert j.value == 9
    assert j.gradient.tolist() == [6.0]
    assert j.hessian.tolist() == [[2.0]]


def test_exp_product_jet():
    j = eval_jet2(parse("exp(x1*x2)", 2), [0.0, 0.0])
    assert j.value == 1
    assert np.array_equal(j.gradient, [0.0, 0.0])
    assert np.array_equal(j.hessian, [[0.0, 1.0], [1.0, 0.0]])


def test_sinh_at_zero():
    j = eval_jet2(parse("sinh(x1)", 1), [0.0])
    assert (j.value, j.gradient[0], j.hessian[0, 0]) == (0.0, 1.0, 0.0)


@pytest.mark.parametrize("text, p", [
    ("x1^3", [1.0]),
    ("cosh(x1)+x2^2", [0.5, -1.0]),
])
def test_finite_difference_examples(text, p):
    assert finite_diff_check(parse(text, len(p)), p, 1e-4) <= 1e-6


def test_constant_has_zero_discrepancy():
    assert finite_diff_check(parse("3.5", 3), [0.1, 0.2, 0.3]) <= 1e-12


def test_stencil_outside_domain():
    with pytest.raises(DomainError):
        finite_diff_check(parse("sqrt(x1)", 1), [0.0], 1e-4)


@pytest.mark.parametrize("text", CORPUS)
def test_corpus_matches_finite_differences(text):
    e = parse(text, 3)
    P = box_points(rng(11), 8)
    worst = max(finite_diff_check(e, p) for p in P)
    assert worst <= 1e-6


@pytest.mark.parametrize("text", CORPUS)
def test_hessian_exactly_symmetric(text):
    _, _, H = jet_batch(parse(text, 3), box_points(rng(5), 16))
    assert np.array_equal(H, np.swapaxes(H, 1, 2))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(CORPUS), st.sampled_from(CORPUS),
       st.floats(-5, 5, allow_nan=False), st.floats(-5, 5, allow_nan=False))
def test_linearity(t1, t2, a, b):
    e1, e2 = parse(t1, 3), parse(t2, 3)
    P = box_points(rng(2), 6)
    v, g, H = jet_batch(a * e1 + b * e2, P)
    v1, g1, H1 = jet_batch(e1, P)
    v2, g2, H2 = jet_batch(e2, P)
    for got, x, y in ((v, v1, v2), (g, g1, g2), (H, H1, H2)):
        want = a * x + b * y
        scale = 1 + np.abs(a * x) + np.abs(b * y)
        assert np.all(np.abs(got - want) <= 1e-12 * scale)


def test_batch_agrees_with_pointwise():
    e = parse(CORPUS[18], 3)
    P = box_points(rng(4), 5)
    v, g, H = jet_batch(e, P)
    for k, p in enumerate(P):
        j = eval_jet2(e, p)
        assert j.value == v[k]
        assert np.array_equal(j.gradient, g[k]) and np.array_equal(j.hessian, H[k])
