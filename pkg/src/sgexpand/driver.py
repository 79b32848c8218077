"""End-to-end runs: solve a problem file, re-verify a report, sample plots."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace as dc_replace
from pathlib import Path
from typing import Mapping

from .ansatz import Ansatz, PolySystem, build_ansatz, extract_coefficient_system, substitute_ansatz
from .arith import RadicalValue, coefficient_field, radical_square
from .assembly import (ClosedForm, PlotGrid, VerificationReport, integrate_trig, realize,
                       sample_plot_data, verify_numeric_residual)
from .convert import coefficient_to_rf, expr_to_poly, radical_to_expr
from .errors import (MissingBindingError, ParseError, ProblemFileError, SGEError,
                     UnresolvedBranchError)
from .expr import eval_numeric, parse_expr, render
from .problem import Options, ProblemFile, parse_problem, serialize_problem
from .reduction import BalanceResult, DerivPoly, apply_pipeline, homogeneous_balance, reduce_to_ode
from .solver import FREE, SolutionSet, factor_split_solve

REPORT_FORMAT = "sgexpand-report/1"


@dataclass
class SolveResult:
    problem: ProblemFile
    options: Options
    ode: DerivPoly | None = None
    reduced: DerivPoly | None = None
    balance: BalanceResult | None = None
    ansatz: Ansatz | None = None
    system: PolySystem | None = None
    solutions: SolutionSet | None = None
    closed_forms: dict = field(default_factory=dict)
    verification: dict = field(default_factory=dict)  # id -> report | skip reason
    labels: dict = field(default_factory=dict)  # id -> [case names]
    error: SGEError | None = None
    stage: str = ""

    @property
    def ok(self) -> bool:
        return self.error is None

    @property
    def verified(self) -> bool:
        return all(not isinstance(v, VerificationReport) or v.passed
                   for v in self.verification.values())


def parse_binding(text: str) -> complex:
    """Numeric value of a binding such as ``-3``, ``1/2`` or ``1+2*i``."""
    return eval_numeric(parse_expr(text), {})


def bindings_for(pf: ProblemFile, given: Mapping[str, str]) -> dict[str, complex]:
    missing = [p for p in pf.parameters if p not in given]
    if missing:
        raise MissingBindingError(f"missing parameter bindings: {', '.join(missing)}")
    unknown = [k for k in given if k not in pf.parameters]
    if unknown:
        raise MissingBindingError(f"not a parameter of the problem: {', '.join(unknown)}")
    return {k: parse_binding(v) for k, v in given.items()}


def _constraint_matches(value, text: str, fld, params) -> bool:
    lhs, sep, rhs = text.partition("=")
    if not sep:
        raise ProblemFileError(f"expected constraint needs '=': {text!r}")
    lhs, rhs = lhs.strip(), rhs.strip()
    if rhs == "FREE":
        return value is FREE and not lhs.endswith("^2")
    if value is FREE or value is None or not isinstance(value, RadicalValue):
        return False
    target = coefficient_to_rf(expr_to_poly(parse_expr(rhs), (), fld).constant_value(), params)
    if lhs.endswith("^2"):
        return radical_square(value) == target
    return value.is_rational and value.outer == target


def match_cases(pf: ProblemFile, solutions: SolutionSet) -> dict:
    """Branch id -> names of the expected cases it satisfies."""
    fld = coefficient_field(pf.parameters)
    out = {}
    for b in solutions:
        names = []
        if b.is_resolved:
            for case, constraints in pf.expected:
                ok = True
                for c in constraints:
                    var = c.partition("=")[0].strip().removesuffix("^2")
                    if not _constraint_matches(b.assignment.get(var), c, fld, pf.parameters):
                        ok = False
                        break
                if ok:
                    names.append(case)
        out[b.id] = names
    return out


def solve_problem(pf: ProblemFile, options: Options | None = None) -> SolveResult:
    """Run reduction, balance, ansatz, extraction, solving, assembly and
    verification; pipeline errors are stored on the result."""
    options = options or pf.options
    res = SolveResult(pf, options)
    try:
        res.stage = "reduction"
        fld = coefficient_field(pf.parameters)
        frame = pf.wave_frame
        res.ode = reduce_to_ode(pf.pde_expr(), frame, pf.dependent, pf.parameters, fld)
        res.reduced = apply_pipeline(res.ode, pf.pipeline)
        res.stage = "balance"
        res.balance = homogeneous_balance(res.reduced)
        res.stage = "ansatz"
        res.ansatz = build_ansatz(res.balance.n, fld, pf.speed)
        res.system = extract_coefficient_system(substitute_ansatz(res.reduced, res.ansatz))
        res.stage = "solve"
        res.solutions = factor_split_solve(res.system, options.max_pairs)
        res.labels = match_cases(pf, res.solutions)
        res.stage = "assembly"
        integrate = "reduce_order" in pf.pipeline
        for b in res.solutions.resolved:
            cf = realize(res.ansatz, b, frame)
            res.closed_forms[b.id] = integrate_trig(cf) if integrate else cf
        res.stage = "verify"
        given = dict(pf.verify)
        if all(p in given for p in pf.parameters):
            binds = bindings_for(pf, given)
            for bid, cf in res.closed_forms.items():
                res.verification[bid] = verify_numeric_residual(
                    pf.pde_expr(), cf, binds, options.npoints, options.tol, options.seed,
                    pf.dependent)
        else:
            for bid in res.closed_forms:
                res.verification[bid] = "skipped: parameters not bound in [verify]"
        res.stage = "done"
    except SGEError as exc:
        res.error = exc
    return res


# -- reports -----------------------------------------------------------------------


def _value_text(v) -> str:
    if v is FREE:
        return "FREE"
    return render(radical_to_expr(v))


def _verification_json(v):
    if v is None:
        return None
    if isinstance(v, str):
        return {"status": v}
    return {"status": "passed" if v.passed else "failed", "max_residual": v.max_residual,
            "points": v.points, "tolerance": v.tol,
            "failures": [{"point": p, "message": m} for p, m in v.failures]}


def build_report(res: SolveResult) -> dict:
    pf = res.problem
    rep: dict = {
        "format": REPORT_FORMAT,
        "status": "ok" if res.ok else "failed",
        "problem": {"name": pf.name, "source": serialize_problem(pf)},
        "options": {"max_pairs": res.options.max_pairs, "tol": res.options.tol,
                    "seed": res.options.seed, "npoints": res.options.npoints},
    }
    if res.error is not None:
        rep["failure"] = {"stage": res.stage, "kind": type(res.error).__name__,
                          "message": str(res.error), "exit_code": res.error.exit_code}
    if res.ode is not None:
        rep["ode"] = str(res.ode)
    if res.reduced is not None:
        rep["reduced_ode"] = str(res.reduced)
    if res.balance is not None:
        rep["balance"] = {"n": res.balance.n,
                          "linear_term": res.reduced.factor_string(res.balance.linear_term),
                          "nonlinear_term": res.reduced.factor_string(res.balance.nonlinear_term)}
    if res.ansatz is not None:
        rep["unknowns"] = list(res.ansatz.gens)
    if res.system is not None:
        rep["system"] = res.system.lines()
    if res.solutions is not None:
        branches = []
        for b in res.solutions:
            cf = res.closed_forms.get(b.id)
            entry = {
                "id": b.id,
                "status": b.status,
                "label": "expected" if res.labels.get(b.id) else "extra",
                "cases": res.labels.get(b.id, []),
                "assignment": {k: _value_text(v) for k, v in b.assignment.items()},
                "free": list(b.free),
                "conditions": list(b.conditions),
            }
            if not b.is_resolved:
                entry["reason"] = b.reason
                entry["residual"] = [f"{p} = 0" for p in b.residual]
            if cf is not None:
                entry["closed_form"] = render(cf.expr)
                entry["speed"] = "FREE" if cf.speed is FREE or cf.speed is None else _value_text(cf.speed)
                entry["solution"] = render(cf.in_coordinates()) if cf.speed is not FREE else None
                entry["verification"] = _verification_json(res.verification.get(b.id))
            branches.append(entry)
        rep["branches"] = branches
        rep["expected_cases"] = {case: [bid for bid, names in res.labels.items() if case in names]
                                 for case, _ in pf.expected}
    return rep


def report_text(rep: dict) -> str:
    out = [f"problem: {rep['problem']['name']}", f"status: {rep['status']}"]
    if "failure" in rep:
        f = rep["failure"]
        out.append(f"FAILED at {f['stage']}: {f['kind']}: {f['message']}")
    if "ode" in rep:
        out.append(f"ode: {rep['ode']} = 0")
    if "reduced_ode" in rep and rep["reduced_ode"] != rep.get("ode"):
        out.append(f"after pipeline: {rep['reduced_ode']} = 0")
    if "balance" in rep:
        b = rep["balance"]
        out.append(f"balance: {b['linear_term']} against {b['nonlinear_term']} gives n = {b['n']}")
    if "system" in rep:
        out.append(f"system ({len(rep['system'])} equations):")
        out += [f"  {line}" for line in rep["system"]]
    for br in rep.get("branches", []):
        tag = br["label"] + (f" ({', '.join(br['cases'])})" if br["cases"] else "")
        out.append(f"branch {br['id']} [{br['status']}, {tag}]")
        out += [f"  {k} = {v}" for k, v in br["assignment"].items()]
        if br["status"] != "resolved":
            out.append(f"  reason: {br['reason']}")
            out += [f"  residual: {r}" for r in br["residual"]]
        if "closed_form" in br:
            out.append(f"  U(eta) = {br['closed_form']}")
            if br.get("solution"):
                out.append(f"  u = {br['solution']}")
            ver = br.get("verification") or {}
            if "max_residual" in ver:
                out.append(f"  residual check: {ver['status']} (max {ver['max_residual']:.3e} over "
                           f"{ver['points']} points, tol {ver['tolerance']:g})")
            elif ver:
                out.append(f"  residual check: {ver['status']}")
    for case, ids in rep.get("expected_cases", {}).items():
        out.append(f"expected {case}: {', '.join(ids) if ids else 'NOT FOUND'}")
    return "\n".join(out) + "\n"


def dump_json(rep: dict) -> str:
    return json.dumps(rep, indent=2, ensure_ascii=False) + "\n"


def write_report(rep: dict, out_dir) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    jpath, tpath = out_dir / "report.json", out_dir / "report.txt"
    with open(jpath, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dump_json(rep))
    with open(tpath, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(report_text(rep))
    return jpath, tpath


def load_report(path) -> dict:
    path = Path(path)
    try:
        rep = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read report {path}: {exc}") from exc
    if rep.get("format") != REPORT_FORMAT:
        raise ParseError(f"{path}: not a solution report")
    return rep


def report_problem(rep: dict) -> ProblemFile:
    return parse_problem(rep["problem"]["source"], "<report>")


def closed_form_from_report(rep: dict, branch_id: str) -> ClosedForm:
    pf = report_problem(rep)
    for br in rep.get("branches", []):
        if br["id"] != branch_id:
            continue
        if br["status"] != "resolved" or "closed_form" not in br:
            raise UnresolvedBranchError(f"branch {branch_id} has no closed form "
                                        f"({br.get('reason', br['status'])})")
        speed = FREE if br["speed"] == "FREE" else parse_expr(br["speed"])
        return ClosedForm(parse_expr(br["closed_form"]), pf.wave_frame, branch_id, speed)
    raise UnresolvedBranchError(f"no branch {branch_id!r} in report")


def verify_report(rep: dict, given: Mapping[str, str], options: Options | None = None
                  ) -> list[tuple[str, VerificationReport]]:
    pf = report_problem(rep)
    options = options or pf.options
    binds = bindings_for(pf, given)
    out = []
    for br in rep.get("branches", []):
        if br["status"] != "resolved" or "closed_form" not in br:
            continue
        cf = closed_form_from_report(rep, br["id"])
        out.append((br["id"], verify_numeric_residual(pf.pde_expr(), cf, binds, options.npoints,
                                                      options.tol, options.seed, pf.dependent)))
    return out


def plot_report(rep: dict, branch_id: str, grid: str, given: Mapping[str, str]) -> PlotGrid:
    pf = report_problem(rep)
    cf = closed_form_from_report(rep, branch_id)
    return sample_plot_data(cf, bindings_for(pf, given), grid)


def format_number(x: float) -> str:
    return format(x, ".17g")


def plot_csv(grid: PlotGrid) -> str:
    lines = [",".join(grid.columns)]
    lines += [",".join(format_number(v) for v in row) for row in grid.rows]
    return "\n".join(lines) + "\n"


def write_plot_csv(grid: PlotGrid, path) -> Path:
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(plot_csv(grid))
    return path


def with_overrides(options: Options, **kw) -> Options:
    return dc_replace(options, **{k: v for k, v in kw.items() if v is not None})
