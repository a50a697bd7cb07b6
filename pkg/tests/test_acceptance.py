"""One test per acceptance criterion, each printing a PASS/FAIL line at its tolerance."""

import json
import os
import subprocess
import sys
import time

import numpy as np

from corpus import CORPUS, box_points, factor_families, rng
from prescurv.curvature import (ConformalMetric, metric, ricci, riemann_decomp, riemann_oracle,
                                scalar_curv, sectional)
from prescurv.exprlang import evaluate_many, parse, to_canonical_text
from prescurv.grid import Grid
from prescurv.jets import finite_diff_check
from prescurv.prescribed import (NonExistence, PrescribedProblem, Solution, Thresholds,
                                 classify_singular_set, construct_from_h,
                                 construct_quadratic_family, detect_quadratic_family,
                                 governing_residuals, integrability_residuals, lift_to_background,
                                 reconstruct_phi, required_tensor, solve)
from prescurv.prescribed.lift import oracle_tensor, required_tensor_values
from prescurv.prescribed.quadratic import QuadraticFamily
from prescurv.scenarios import parse_scenario, run
from prescurv.tensors import (DiagonalTensorField, SymBilinear, kulkarni_nomizu, symmetry_defects,
                              tensor_max_norm)

O3 = np.zeros(3)
LINE = Grid.cube(3, axes=(1,))
CUBE = Grid.cube(3)
EXAMPLES = {
    "sinh": ("sinh(x1)", lambda t: np.exp(-np.cosh(t))),
    "rational": ("2*x1/(1+x1^2)", lambda t: 1 / (1 + t * t)),
    "gaussian": ("2*x1", lambda t: np.exp(-t * t)),
}


def line_points(grid=LINE):
    t = grid.nodes(1)
    P = np.zeros((t.size, 3))
    P[:, 0] = t
    return P


def test_criterion_1_kulkarni_nomizu_algebra(verdict_line):
    r = rng(101)
    worst, raw_bianchi, min_norm = 0.0, 0.0, np.inf
    for trial in range(200):
        n = 3 + trial % 3
        A = SymBilinear.symmetrized(r.normal(size=(n, n)))
        B = SymBilinear.symmetrized(r.normal(size=(n, n)))
        R = kulkarni_nomizu(A, B)
        worst = max(worst, max(symmetry_defects(R).values()))
        c = R.components
        raw_bianchi = max(raw_bianchi, float(np.abs(c + c.transpose(0, 3, 1, 2)
                                                    + c.transpose(0, 2, 3, 1)).max()))
        d = r.normal(size=n) * (r.random(n) < 0.6)
        if not d.any():
            d[r.integers(n)] = 1.0
        min_norm = min(min_norm, tensor_max_norm(kulkarni_nomizu(SymBilinear.diagonal(d),
                                                                 SymBilinear.identity(n))))
    ok = worst == 0 and raw_bianchi <= 1e-15 and min_norm > 0
    verdict_line(1, ok, f"symmetry defect {worst:.1e} (tol 0), raw Bianchi sum {raw_bianchi:.1e} "
                        f"(tol 1e-15), "
                        f"min |T (.) g| over nonzero diagonal T {min_norm:.3g} (> 0)")
    assert ok


def test_criterion_2_oracle_equivalence(verdict_line):
    worst_R, worst_tr, count = 0.0, 0.0, 0
    for n in (3, 4, 5):
        for name, u in factor_families(n).items():
            m = ConformalMetric.euclidean(u, n)
            for p in rng(200 + n).uniform(-1.5, 1.5, (100, n)):
                Ro = riemann_oracle(m, p)
                gap = tensor_max_norm(riemann_decomp(m, p) - Ro) / (1 + Ro.max_norm())
                K = scalar_curv(m, p)
                tr = abs(ricci(m, p).trace_against(metric(m, p)) - K) / (1 + abs(K))
                worst_R, worst_tr = max(worst_R, gap), max(worst_tr, tr)
                count += 1
    ok = worst_R <= 1e-10 and worst_tr <= 1e-10
    verdict_line(2, ok, f"{count} (family, point, n) cases: relative Riemann gap {worst_R:.1e}, "
                        f"trace gap {worst_tr:.1e} (tol 1e-10)")
    assert count == 1500 and ok


def test_criterion_3_sphere_family(verdict_line):
    f, u, lam = construct_quadratic_family(1.0, 0.0, 1.0, 3)
    m = ConformalMetric.euclidean(u, 3)
    dev = max(abs(sectional(m, p, i, j) - 4)
              for p in rng(3).uniform(-2, 2, (20, 3)) for i, j in ((0, 1), (0, 2), (1, 2)))
    fam = detect_quadratic_family(f, CUBE)
    rt = max(abs(fam.a - 1), abs(fam.c - 1), float(np.abs(fam.b).max()))
    empty = classify_singular_set(fam).kind == "empty"
    sphere = classify_singular_set(QuadraticFamily.of(1.0, [0.0] * 3, -1.0))
    ok = (lam == -4 and dev <= 1e-9 and rt <= 1e-8 and empty
          and sphere.kind == "sphere" and abs(sphere.radius - 1) <= 1e-12)
    verdict_line(3, ok, f"lambda {lam}, sectional dev {dev:.1e} (tol 1e-9), round trip {rt:.1e} "
                        f"(tol 1e-8), (1,0,1) -> {'empty' if empty else 'not empty'}, "
                        f"(1,0,-1) -> {sphere.kind} radius {sphere.radius!r} (tol 1e-12)")
    assert ok


def test_criterion_4_single_coordinate_examples(verdict_line):
    P = line_points()
    t = P[:, 0]
    worst_verify, worst_u = 0.0, 0.0
    for name, (h, closed) in EXAMPLES.items():
        T, _ = construct_from_h(h, 1, 1.0, 3)
        u = parse({"sinh": "exp(-cosh(x1))", "rational": "1/(1+x1^2)",
                   "gaussian": "exp(-x1^2)"}[name], 3)
        if name == "sinh":
            # quadrature from 0 absorbs exp(-1) into the scale
            u = parse("exp(-cosh(x1) + 1)", 3)
        worst_verify = max(worst_verify, float(np.abs(governing_residuals(u, T, P)).max()),
                           max(max(integrability_residuals(T, p).values()) for p in P))
        sol = solve(PrescribedProblem(T, O3, LINE, Thresholds()))
        assert isinstance(sol, Solution)
        got, want = sol.values(P), closed(t)
        if name == "sinh":
            got, want = got / got[len(t) // 2], want / want[len(t) // 2]
        worst_u = max(worst_u, float(np.abs(got - want).max()))
    m = ConformalMetric.euclidean("1/(1+x1^2)", 3)
    K0 = scalar_curv(m, O3)
    s23 = sectional(m, [1.0, 0, 0], 1, 2)
    ok = worst_verify <= 1e-10 and worst_u <= 1e-6 and abs(K0 + 8) <= 1e-9 and abs(s23 + 0.25) <= 1e-9
    verdict_line(4, ok, f"verify residual {worst_verify:.1e} (tol 1e-10), u error {worst_u:.1e} "
                        f"(tol 1e-6), scalar(0) {K0!r} (-8 +- 1e-9), K23(x1=1) {s23!r} "
                        f"(-0.25 +- 1e-9)")
    assert ok


def test_criterion_5_nonexistence(verdict_line):
    results = {}
    for label, texts in (("exp", ["exp(x1)", "exp(x2)", "exp(x3)"]), ("const", ["1", "1", "1"])):
        rep = run(parse_scenario({"task": "solve", "n": 3, "tensor": texts}))
        results[label] = (rep.verdict, rep.parameters.get("witness"))
    f = "-2*x1^2*exp(2*x1^2)*(1+0.1*x2^2)"
    T = DiagonalTensorField.from_texts(["2*(x1^2 - 1)*exp(2*x1^2)", f, f])
    res = solve(PrescribedProblem(T, O3, CUBE, Thresholds()))
    fam_ok = isinstance(res, NonExistence) and res.witness.startswith("family-") and res.magnitude >= 1e-3
    ok = all(v == ("NONEXISTENT", "separable") for v in results.values()) and fam_ok
    verdict_line(5, ok, f"exp -> {results['exp']}, constant -> {results['const']}, perturbed -> "
                        f"{getattr(res, 'witness', res)} magnitude {getattr(res, 'magnitude', 0):.3g} "
                        f"(>= 1e-3)")
    assert ok


def test_criterion_6_scale_and_path(verdict_line):
    T = DiagonalTensorField.from_texts(["4*x1^2-2", "-2*x1^2", "-2*x1^2"])
    C1 = solve(PrescribedProblem(T, O3, LINE, Thresholds())).scale
    C2 = solve(PrescribedProblem(T.scaled(0.25), O3, LINE, Thresholds())).scale
    cases = []
    for h, _ in EXAMPLES.values():
        cases.append((construct_from_h(h, 1, 1.0, 3)[0], LINE))
    sphere_f = construct_quadratic_family(1.0, 0.0, 1.0, 3)[0]
    cases.append((DiagonalTensorField((sphere_f,) * 3), Grid.cube(3, points_per_axis=5)))
    gauss = "-2*x1^2*exp(2*x1^2)"
    cases.append((DiagonalTensorField.from_texts(["2*(x1^2 - 1)*exp(2*x1^2)", gauss, gauss]),
                  Grid.cube(3, points_per_axis=5)))
    worst_path = 0.0
    for Tc, grid in cases:
        assert isinstance(solve(PrescribedProblem(Tc, O3, grid, Thresholds())), Solution)
        for q in grid.points():
            a = reconstruct_phi(Tc, O3, q, order="forward")
            b = reconstruct_phi(Tc, O3, q, order="reversed")
            worst_path = max(worst_path, abs(a - b))
    ok = abs(C2 - 2 * C1) <= 1e-8 and worst_path <= 1e-8
    verdict_line(6, ok, f"C {C1!r} -> {C2!r} under T/4 (2C +- 1e-8), forward vs reversed "
                        f"{worst_path:.1e} over {len(cases)} passing scenarios (tol 1e-8)")
    assert ok


def test_criterion_7_hyperbolic_lift(verdict_line):
    F, phi = parse("x3", 3), parse("exp(-x3^2)", 3)
    grid = Grid((0.0, 0.0, 1.25), 0.75, 5)
    P = grid.points()
    T_req = required_tensor(F, phi)
    gap = 0.0
    for p in P:
        T_or, g = oracle_tensor(F, phi, p)
        Tv = T_req.values(p[None])[0]
        gap = max(gap, g, float(np.abs(T_or - Tv).max() / (1 + np.abs(Tv).max())))
    _, off = required_tensor_values(F, phi, P)
    lifted = lift_to_background(F, T_req, (0.0, 0.0, 1.0), grid)
    lift_err = float(np.abs(lifted.phi_rel.values(P) - evaluate_many(phi, P)).max())
    rep = run(parse_scenario({"example_id": "hyperbolic-gaussian"})).as_dict()
    flagged = (rep["verdict"] == "OK" and rep["parameters"]["pairing"]["confirmed"] == "flat"
               and any(d["kind"] == "pairing" for d in rep["discrepancies"]))
    ok = gap <= 1e-8 and off.max() == 0 and lift_err <= 1e-6 and flagged
    verdict_line(7, ok, f"R - T (.) g_hyp gap {gap:.1e} (tol 1e-8), lift error {lift_err:.1e} "
                        f"(tol 1e-6), displayed tensor pairing flagged: {flagged}")
    assert ok


def _cli_json(scenario_path, threads):
    env = dict(os.environ, PRESCURV_THREADS=str(threads))
    return subprocess.run([sys.executable, "-m", "prescurv", "solve", "--scenario", scenario_path],
                          env=env, capture_output=True, check=False).stdout


def test_criterion_8_infrastructure(verdict_line, tmp_path):
    round_trips = sum(parse(to_canonical_text(parse(t, 3)), 3) == parse(t, 3) for t in CORPUS)
    P = box_points(rng(8), 10)
    fd = max(finite_diff_check(parse(t, 3), p) for t in CORPUS for p in P)
    doc = {"task": "solve", "n": 3, "tensor": ["2/(1+x1^2+x2^2+x3^2)^4"] * 3,
           "grid": {"points_per_axis": 7}}
    path = tmp_path / "sphere.json"
    path.write_text(json.dumps(doc))
    outs = [_cli_json(str(path), t) for t in (1, 1, 2, 8)]
    identical = len(set(outs)) == 1 and json.loads(outs[0])["verdict"] == "SOLUTION"
    ok = round_trips == 50 and fd <= 1e-6 and identical
    verdict_line(8, ok, f"round trips {round_trips}/50, jet vs FD {fd:.1e} (tol 1e-6), "
                        f"JSON identical across runs and threads 1,1,2,8: {identical}")
    assert ok
