"""Task dispatch: turn a scenario into a structured report."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..curvature import ConformalMetric, curvature_table, riemann_decomp, riemann_oracle, \
    sectional, scalar_curv
from ..errors import Mismatch, PrescurvError
from ..exprlang import evaluate_many, parse
from ..fields import field_values
from ..grid import Grid, map_chunks
from ..prescribed.gradient import family_residuals, governing_residuals, gradient_data
from ..prescribed.lift import (effective_tensor, lift_to_background, oracle_tensor, pairing_check,
                               required_tensor)
from ..prescribed.problem import Indeterminate, NonExistence, PrescribedProblem, ResidualStat
from ..prescribed.quadratic import classify_singular_set, detect_quadratic_family
from ..prescribed.single import completeness_flag, construct_from_h, solve_single_variable
from ..prescribed.solve import Solution, reconstruct_log, solve
from ..tensors import tensor_max_norm
from .catalog import CATALOG
from .schema import Scenario, scenario_to_dict

__all__ = ["Report", "run", "VERDICTS"]

VERDICTS = ("SOLUTION", "NONEXISTENT", "MISMATCH", "INDETERMINATE", "OK", "ERROR")


@dataclass
class Report:
    """Outcome of one scenario run.

    ``residuals`` maps a residual name to max/mean/argmax/count;
    ``parameters`` holds recovered quantities; ``discrepancies`` lists
    reference formulas or expectations that disagree with the computation.
    """

    task: str
    verdict: str
    scenario: dict
    parameters: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    discrepancies: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    table: dict | None = None
    error: dict | None = None

    def as_dict(self) -> dict:
        return {
            "report_version": 1,
            "task": self.task,
            "example_id": self.scenario.get("example_id"),
            "verdict": self.verdict,
            "parameters": self.parameters,
            "residuals": self.residuals,
            "checks": self.checks,
            "discrepancies": self.discrepancies,
            "notes": self.notes,
            "error": self.error,
            "scenario": self.scenario,
            "table": self.table,
        }


def _stats(values, P) -> dict:
    return ResidualStat.from_values(values, P).as_dict()


def _judge(scn: Scenario, worst: float, ok: str, bad: str) -> str:
    return {"pass": ok, "fail": bad, "indeterminate": "INDETERMINATE"}[scn.tolerances.judge(worst)]


def _u_expr(F, phi):
    return phi if F.is_constant() and str(F) == "1.0" else phi * F


# ------------------------------------------------------------------ verify

def _verify(scn: Scenario, workers) -> Report:
    T = scn.tensor_field()
    F = scn.background_expr()
    phi = scn.phi_expr()
    T_eff = effective_tensor(F, T)
    u = _u_expr(F, phi)
    P = scn.grid.points()
    n = scn.n

    def chunk(Pc):
        R = np.abs(governing_residuals(u, T_eff, Pc))
        ld = gradient_data(T_eff, Pc, strict=False)
        fam = family_residuals(ld, field_values(u, Pc))
        return (R[:, :n].max(axis=1), R[:, n:].max(axis=1, initial=0.0),
                fam["family-1"], fam["family-2"], fam["family-3"], fam["family-4"],
                fam["family-5"], ld.degenerate)

    out = map_chunks(chunk, P, workers)
    names = ("diagonal", "cross", "family-1", "family-2", "family-3", "family-4", "family-5")
    residuals = {name: _stats(v, P) for name, v in zip(names, out[:-1])}
    worst = max(r["max"] for r in residuals.values())
    rep = Report("verify", _judge(scn, worst, "OK", "MISMATCH"), scenario_to_dict(scn),
                 {"max_residual": worst}, residuals)
    if out[-1].any():
        rep.notes.append(f"{int(out[-1].sum())} grid points have a coordinate with no usable "
                         "denominator 3 f_i + f_j; family residuals skip them there")
    if not (F.is_constant() and str(F) == "1.0"):
        pr = pairing_check(F, T, phi, P, scn.tolerances.accept)
        rep.parameters["pairing"] = pr.as_dict()
        if pr.confirmed != "background":
            rep.discrepancies.append({
                "kind": "pairing",
                "detail": f"T is confirmed against the {pr.confirmed} pairing, "
                          "not against the background metric",
                "background_deviation": pr.background_deviation,
                "flat_deviation": pr.flat_deviation,
            })
    return rep


# ------------------------------------------------------------------- solve

def _result_params(result) -> dict:
    if isinstance(result, NonExistence):
        return {"witness": result.witness, "location": _pt(result.location),
                "magnitude": result.magnitude, "detail": result.detail}
    if isinstance(result, Indeterminate):
        return {"reason": result.reason, "location": _pt(result.location),
                "magnitude": result.magnitude, "detail": result.detail}
    return {}


def _pt(p):
    return None if p is None else [float(x) for x in p]


def _solve(scn: Scenario, workers) -> Report:
    T = scn.tensor_field()
    F = scn.background_expr()
    flat = F.is_constant() and str(F) == "1.0"
    P = scn.grid.points()
    if flat:
        result = solve(PrescribedProblem(T, scn.base_point, scn.grid, scn.tolerances), workers)
    else:
        result = lift_to_background(F, T, scn.base_point, scn.grid, scn.tolerances,
                                    workers).result
    if isinstance(result, NonExistence):
        return Report("solve", "NONEXISTENT", scenario_to_dict(scn), _result_params(result))
    if isinstance(result, Indeterminate):
        return Report("solve", "INDETERMINATE", scenario_to_dict(scn), _result_params(result))

    sol: Solution = result
    fwd = map_chunks(lambda Pc: reconstruct_log(sol.T, sol.base_point, Pc, sol.quad_tol,
                                                "forward"), P, workers)
    rev = map_chunks(lambda Pc: reconstruct_log(sol.T, sol.base_point, Pc, sol.quad_tol,
                                                "reversed"), P, workers)
    params = {"recovered_C": sol.scale, "base_point": list(sol.base_point),
              "path_independence": float(np.abs(fwd - rev).max())}
    u = sol.scale * np.exp(fwd)
    if not flat:
        params["phi_rel_at_base"] = sol.scale / float(evaluate_many(F, np.array([sol.base_point]))[0])
    rep = Report("solve", "SOLUTION", scenario_to_dict(scn), params,
                 {k: v.as_dict() for k, v in sol.residual_summary.items()})
    if scn.phi is not None:
        ref = evaluate_many(scn.phi_expr(), P)
        got = u if flat else u / evaluate_many(F, P)
        dev = np.abs(got - ref)
        rep.parameters["phi_deviation"] = _stats(dev, P)
    if scn.tensor is not None and scn.tensor.kind == "generated":
        d = scn.tensor.data
        cf = completeness_flag(parse(d["h"], scn.n), d["k"])
        rep.parameters["completeness"] = cf.as_dict()
    return rep


# ---------------------------------------------------------------- classify

def _classify(scn: Scenario, workers) -> Report:
    form = scn.tensor
    T = scn.tensor_field()
    rep = Report("classify", "OK", scenario_to_dict(scn))
    if T.structure != "isotropic":
        rep.verdict = "MISMATCH"
        rep.discrepancies.append({"kind": "structure",
                                  "detail": "classification needs f_1 = ... = f_n"})
        return rep
    given = form.quadratic() if form.kind == "quadratic" else None
    try:
        fam = detect_quadratic_family(T.f[0], scn.grid, scn.tolerances.accept)
    except Mismatch as exc:
        rep.verdict = "MISMATCH"
        rep.parameters["deviation"] = exc.deviation
        rep.parameters["location"] = _pt(exc.point)
        rep.discrepancies.append({"kind": type(exc).__name__, "detail": str(exc)})
        return rep
    rep.parameters["quadratic_family"] = fam.as_dict()
    rep.parameters["singular_set"] = classify_singular_set(fam, 1e-12).as_dict()
    if given is not None:
        a = np.array([given.a, *given.b, given.c])
        b = np.array([fam.a, *fam.b, fam.c])
        err = float(min(np.abs(a - b).max(), np.abs(a + b).max()))
        rep.parameters["input_family"] = given.as_dict()
        rep.parameters["roundtrip_error"] = err
        if err > max(scn.tolerances.accept, 1e-8):
            rep.verdict = "MISMATCH"
    return rep


# --------------------------------------------------------------- curvature

def _curvature(scn: Scenario, workers) -> Report:
    m = ConformalMetric(scn.background_expr(), scn.phi_expr())
    P = scn.grid.points()

    def chunk(Pc):
        cols = curvature_table(m, Pc)
        gaps = np.empty(len(Pc))
        for k, p in enumerate(Pc):
            R = riemann_oracle(m, p)
            gaps[k] = tensor_max_norm(R - riemann_decomp(m, p)) / (1.0 + tensor_max_norm(R))
        return tuple(cols.values()) + (gaps,)

    names = list(curvature_table(m, P[:1]).keys())
    out = map_chunks(chunk, P, workers)
    table = {f"x{i + 1}": P[:, i].tolist() for i in range(scn.n)}
    table.update({name: col.tolist() for name, col in zip(names, out[:-1])})
    worst = float(out[-1].max())
    rep = Report("curvature", "OK", scenario_to_dict(scn),
                 {"rows": len(P)}, {"oracle_gap": _stats(out[-1], P)}, table=table)
    rep.verdict = _judge(scn, worst, "OK", "MISMATCH")
    return rep


# ----------------------------------------------------------------- example

def _check(rep: Report, name: str, ok: bool, expected, observed):
    rep.checks.append({"name": name, "ok": bool(ok), "expected": expected, "observed": observed})


def _example(scn: Scenario, workers) -> Report:
    entry = CATALOG[scn.example_id]
    inner_task = entry.scenario["task"]
    inner = _DISPATCH[inner_task](replace(scn, task=inner_task), workers)
    rep = Report("example", "OK", scenario_to_dict(scn), dict(inner.parameters),
                 dict(inner.residuals), list(inner.discrepancies), notes=list(entry.notes))
    rep.parameters["source"] = entry.source
    rep.parameters["description"] = entry.description
    rep.parameters["inner_task"] = inner_task
    rep.parameters["inner_verdict"] = inner.verdict
    ex = entry.expect
    n = scn.n

    _check(rep, "verdict", inner.verdict == ex["verdict"], ex["verdict"], inner.verdict)
    if "witness" in ex:
        got = inner.parameters.get("witness")
        _check(rep, "witness", got == ex["witness"], ex["witness"], got)
    if "witness_prefix" in ex:
        got = inner.parameters.get("witness") or ""
        _check(rep, "witness", got.startswith(ex["witness_prefix"]), ex["witness_prefix"] + "*", got)
    if "min_magnitude" in ex:
        got = inner.parameters.get("magnitude", 0.0)
        _check(rep, "magnitude", got >= ex["min_magnitude"], f">= {ex['min_magnitude']!r}", got)
    if "recovered_C" in ex:
        want, tol = ex["recovered_C"]
        got = inner.parameters.get("recovered_C")
        _check(rep, "recovered_C", got is not None and abs(got - want) <= tol, want, got)
    if "phi_match" in ex:
        got = inner.parameters.get("phi_deviation", {}).get("max")
        _check(rep, "phi_match", got is not None and got <= ex["phi_match"],
               f"<= {ex['phi_match']!r}", got)
    if "completeness" in ex:
        g = ex["generator"]
        cf = completeness_flag(parse(g["h"], n), g["k"])
        _check(rep, "completeness", cf.status == ex["completeness"], ex["completeness"], cf.status)
    if "generator" in ex:
        g = ex["generator"]
        T_cat = scn.tensor_field()
        Cg = g.get("C", entry.C)
        T_gen, _ = construct_from_h(g["h"], g["k"], Cg, n)
        P = scn.grid.points()
        dev = float((np.abs(T_cat.values(P) - T_gen.values(P))
                     / (1 + np.abs(T_cat.values(P)))).max())
        _check(rep, "generator_tensor", dev <= 1e-8, "<= 1e-08", dev)
        single = solve_single_variable(T_gen, Cg, scn.grid, g["k"])
        ok = hasattr(single, "scale")
        _check(rep, "generator_roundtrip", ok, "solution with the same C",
               single.max_residual() if ok else getattr(single, "witness", None))
    if "verify_max" in ex:
        v = _verify(replace(scn, task="verify"), workers)
        got = v.parameters["max_residual"]
        _check(rep, "verify_max", got <= ex["verify_max"], f"<= {ex['verify_max']!r}", got)
    if "family" in ex or "lambda" in ex or "singular_set" in ex:
        fam = inner.parameters.get("quadratic_family")
        sset = inner.parameters.get("singular_set", {})
        if "family" in ex and fam:
            a, b, c, tol = ex["family"]
            got = [fam["a"], fam["b"], fam["c"]]
            err = max(abs(fam["a"] - a), abs(fam["c"] - c),
                      max(abs(x - y) for x, y in zip(fam["b"], b)))
            _check(rep, "family", err <= tol, [a, b, c], got)
        if "lambda" in ex:
            want, tol = ex["lambda"]
            got = fam["lambda"] if fam else None
            _check(rep, "lambda", got is not None and abs(got - want) <= tol, want, got)
        if "singular_set" in ex:
            _check(rep, "singular_set", sset.get("kind") == ex["singular_set"],
                   ex["singular_set"], sset.get("kind"))
        if "radius" in ex:
            want, tol = ex["radius"]
            got = sset.get("radius")
            _check(rep, "radius", got is not None and abs(got - want) <= tol, want, got)

    metric = None
    if scn.phi is not None:
        metric = ConformalMetric(scn.background_expr(), scn.phi_expr())
    for p, want, tol in ex.get("scalar", []):
        got = scalar_curv(metric, p)
        _check(rep, f"scalar at {p}", abs(got - want) <= tol, want, got)
    for p, i, j, want, tol in ex.get("sectional", []):
        got = sectional(metric, p, i - 1, j - 1)
        _check(rep, f"K_{i}{j} at {p}", abs(got - want) <= tol, want, got)
    if "sectional_constant" in ex:
        want, tol = ex["sectional_constant"]
        rng = np.random.default_rng(0)
        pts = rng.uniform(-1.5, 1.5, size=(20, n))
        worst = max(abs(sectional(metric, p, i, j) - want)
                    for p in pts for i in range(n) for j in range(i + 1, n))
        _check(rep, "sectional_constant", worst <= tol, want, want + worst)

    if "pairing" in ex:
        got = inner.parameters.get("pairing", {}).get("confirmed")
        _check(rep, "pairing", got == ex["pairing"], ex["pairing"], got)
    if "required_tensor" in ex or "lift_roundtrip" in ex:
        F, phi = scn.background_expr(), scn.phi_expr()
        T_req = required_tensor(F, phi)
        P = scn.grid.points()
        if "required_tensor" in ex:
            worst = 0.0
            for p in P[:: max(1, len(P) // 40)]:
                T_or, gap = oracle_tensor(F, phi, p)
                R = riemann_oracle(ConformalMetric(F, phi), p)
                scale = 1.0 + tensor_max_norm(R)
                tv = T_req.values(p[None])[0]
                worst = max(worst, gap / scale,
                            float(np.abs(T_or - tv).max() / (1 + np.abs(tv).max())))
            _check(rep, "required_tensor", worst <= ex["required_tensor"],
                   f"<= {ex['required_tensor']!r}", worst)
        if "lift_roundtrip" in ex:
            lift = lift_to_background(F, T_req, scn.base_point, scn.grid, scn.tolerances, workers)
            if lift.phi_rel is None:
                _check(rep, "lift_roundtrip", False, "solution", type(lift.result).__name__)
            else:
                Q = P[:: max(1, len(P) // 60)]
                dev = float(np.abs(lift.phi_rel.values(Q) - evaluate_many(phi, Q)).max())
                _check(rep, "lift_roundtrip", dev <= ex["lift_roundtrip"],
                       f"<= {ex['lift_roundtrip']!r}", dev)
                rep.parameters["lift_phi_rel_at_base"] = lift.phi_rel.phi_at(scn.base_point)

    if entry.formulas and metric is not None:
        fg = entry.formula_grid
        grid = Grid(tuple(fg["center"]), fg["half_width"], fg["points_per_axis"],
                    tuple(fg["axes"]) if fg.get("axes") else None)
        P = grid.points()
        table = curvature_table(metric, P)
        for fm in entry.formulas:
            shown, fixed = fm.texts(n, entry.C)
            col = table[fm.column]
            d_shown = float(np.abs(evaluate_many(parse(shown, n), P) - col).max())
            ok_shown = d_shown <= 1e-9 * (1 + np.abs(col).max())
            if fixed is None:
                _check(rep, f"formula {fm.column}", ok_shown, shown, d_shown)
                continue
            d_fixed = float(np.abs(evaluate_many(parse(fixed, n), P) - col).max())
            ok_fixed = d_fixed <= 1e-9 * (1 + np.abs(col).max())
            _check(rep, f"formula {fm.column} (recomputed)", ok_fixed and not ok_shown,
                   fixed, d_fixed)
            rep.discrepancies.append({"kind": "formula", "column": fm.column,
                                      "displayed": shown, "recomputed": fixed,
                                      "displayed_deviation": d_shown,
                                      "recomputed_deviation": d_fixed})

    rep.verdict = "OK" if all(c["ok"] for c in rep.checks) else "MISMATCH"
    return rep


_DISPATCH = {"verify": _verify, "solve": _solve, "classify": _classify,
             "curvature": _curvature, "example": _example}


def run(scn: Scenario, workers: int | None = None) -> Report:
    """Execute a scenario; library errors become an ``ERROR`` report."""
    if scn.task == "example" and scn.example_id is None:
        return Report("example", "ERROR", scenario_to_dict(scn),
                      error={"type": "SchemaError", "message": "example task needs example_id"})
    try:
        return _DISPATCH[scn.task](scn, workers)
    except PrescurvError as exc:
        return Report(scn.task, "ERROR", scenario_to_dict(scn),
                      error={"type": type(exc).__name__, "message": str(exc)})
