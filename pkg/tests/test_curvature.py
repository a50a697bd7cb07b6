import numpy as np
import pytest

from corpus import factor_families, rng
from prescurv.curvature import (ConformalMetric, curvature_table, metric, ricci, ricci_oracle,
                                riemann_decomp, riemann_oracle, scalar_curv, schouten,
                                schouten_definitional, sectional, weyl_residual)
from prescurv.errors import SingularMetric
from prescurv.tensors import kulkarni_nomizu, SymBilinear, tensor_max_norm, validate_symmetries

SPHERE = ConformalMetric.euclidean("1 + x1^2 + x2^2 + x3^2", 3)
FLAT = ConformalMetric.euclidean("1", 3)
HYP = ConformalMetric.from_texts("x3", "1", 3)
RATIONAL = ConformalMetric.euclidean("1/(1+x1^2)", 3)
O = np.zeros(3)


def test_flat_metric_has_no_curvature():
    p = [0.3, -0.2, 0.9]
    assert np.all(ricci(FLAT, p).entries == 0)
    assert scalar_curv(FLAT, p) == 0
    assert np.all(schouten(FLAT, p).entries == 0)
    assert tensor_max_norm(riemann_decomp(FLAT, p)) == 0
    assert tensor_max_norm(riemann_oracle(FLAT, p)) == 0
    assert weyl_residual(FLAT, p) == 0


def test_sphere_family_at_origin():
    assert np.allclose(ricci(SPHERE, O).entries, 8 * np.eye(3), atol=1e-14)
    assert scalar_curv(SPHERE, O) == pytest.approx(24, abs=1e-12)
    assert np.allclose(schouten(SPHERE, O).entries, 2 * np.eye(3), atol=1e-14)
    assert riemann_decomp(SPHERE, O)[0, 1, 0, 1] == pytest.approx(4, abs=1e-12)


def test_sign_convention_sphere_is_positive():
    P = rng(7).uniform(-2, 2, (20, 3))
    for p in P:
        for i, j in ((0, 1), (0, 2), (1, 2)):
            assert sectional(SPHERE, p, i, j) == pytest.approx(4, abs=1e-9)


def test_hyperbolic_space_form():
    p = [0.0, 0.0, 1.0]
    assert np.allclose(ricci(HYP, p).entries, -2 * np.eye(3), atol=1e-12)
    for q in ([0.4, -1.0, 0.7], [2.0, 1.0, 3.5]):
        assert sectional(HYP, q, 0, 2) == pytest.approx(-1, abs=1e-10)
        assert sectional(HYP, q, 0, 1) == pytest.approx(-1, abs=1e-10)


def test_rational_example_values():
    assert scalar_curv(RATIONAL, O) == pytest.approx(-8, abs=1e-9)
    assert sectional(RATIONAL, [1.0, 0, 0], 1, 2) == pytest.approx(-0.25, abs=1e-9)
    assert sectional(RATIONAL, [1.0, 0, 0], 1, 0) == pytest.approx(0.0, abs=1e-9)


def test_singular_point_raises():
    m = ConformalMetric.euclidean("x1^2 + x2^2 + x3^2 - 1", 3)
    with pytest.raises(SingularMetric):
        ricci(m, [1.0, 0.0, 0.0])
    with pytest.raises(SingularMetric):
        riemann_oracle(m, [0.0, 1.0, 0.0])


@pytest.mark.parametrize("n", [3, 4, 5])
@pytest.mark.parametrize("name", list(factor_families(3)))
def test_oracle_equivalence_and_traces(n, name):
    m = ConformalMetric.euclidean(factor_families(n)[name], n)
    for p in rng(n).uniform(-1.5, 1.5, (15, n)):
        Ro = riemann_oracle(m, p)
        assert validate_symmetries(Ro, 1e-10 * (1 + Ro.max_norm()))
        assert weyl_residual(m, p) <= 1e-10 * (1 + Ro.max_norm())
        K = scalar_curv(m, p)
        Ric = ricci(m, p)
        assert abs(Ric.trace_against(metric(m, p)) - K) <= 1e-10 * (1 + abs(K))
        assert np.allclose(Ric.entries, ricci_oracle(m, p).entries, rtol=1e-10, atol=1e-10)
        A, A2 = schouten(m, p).entries, schouten_definitional(m, p).entries
        assert np.abs(A - A2).max() <= 1e-10 * (1 + np.abs(A).max())


def test_corrupted_decomposition_is_detected():
    m = ConformalMetric.euclidean(factor_families(3)["quadratic"], 3)
    p = np.array([0.3, 0.2, -0.4])
    A = schouten(m, p).entries + 1e-2 * np.diag([1.0, 0.0, 0.0])
    bad = kulkarni_nomizu(SymBilinear(A), metric(m, p))
    assert tensor_max_norm(riemann_oracle(m, p) - bad) >= 1e-3


@pytest.mark.parametrize("c", [0.5, 3.0])
def test_scale_law(c):
    u = factor_families(3)["separable-poly"]
    m, mc = ConformalMetric.euclidean(u, 3), ConformalMetric.euclidean(f"{c}*({u})", 3)
    p = [0.4, -0.3, 0.8]
    assert sectional(mc, p, 0, 2) == pytest.approx(c * c * sectional(m, p, 0, 2), rel=1e-12)
    R, Rc = riemann_oracle(m, p).components, riemann_oracle(mc, p).components
    assert np.allclose(Rc, R / c ** 2, rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("c", [0.25, 2.0, 8.0])
def test_schouten_homothety_invariant(c):
    # c a power of two keeps the scaling exact in floating point
    u = "exp(-x2^2) * (1 + x1^2)"
    p = [0.7, -0.4, 0.2]
    A = schouten(ConformalMetric.euclidean(u, 3), p).entries
    Ac = schouten(ConformalMetric.euclidean(u, 3).scaled(c), p).entries
    assert np.array_equal(A, Ac)


def test_curvature_table_matches_pointwise():
    P = rng(9).uniform(-1, 1, (6, 3))
    tab = curvature_table(RATIONAL, P)
    assert list(tab) == ["scalar", "ric_11", "ric_22", "ric_33", "K_12", "K_13", "K_23"]
    for k, p in enumerate(P):
        assert tab["scalar"][k] == pytest.approx(scalar_curv(RATIONAL, p), rel=1e-12)
        assert tab["K_23"][k] == pytest.approx(sectional(RATIONAL, p, 1, 2), rel=1e-9, abs=1e-12)
        assert tab["ric_22"][k] == pytest.approx(ricci(RATIONAL, p).entries[1, 1], rel=1e-12)
