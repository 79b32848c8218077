"""Shared builders and independent oracles for the test suite."""

from __future__ import annotations

import itertools
from pathlib import Path

from sgexpand.ansatz import build_ansatz, extract_coefficient_system, substitute_ansatz
from sgexpand.arith import coefficient_field
from sgexpand.convert import expr_to_poly
from sgexpand.expr import Deriv, eval_numeric, map_derivatives, parse_expr, replace, sym
from sgexpand.reduction import WaveFrame, apply_pipeline, homogeneous_balance, reduce_to_ode

ROOT = Path(__file__).resolve().parent.parent
PROBLEMS = ROOT / "problems"
GOLDEN = Path(__file__).resolve().parent / "golden"

YTSF_PDE = "-4*D(u,x,t) + D(u,x,x,x,z) + 4*D(u,x)*D(u,x,z) + 2*D(u,x,x)*D(u,z) + 3*D(u,y,y)"
RD_PDE = "D(u,t,t) + alpha*D(u,x,x) + beta*u + gamma*u^3"
RD_PARAMS = ("alpha", "beta", "gamma")
YTSF_FRAME = WaveFrame.of({"x": 1, "y": 1, "z": 1})
RD_FRAME = WaveFrame.of({"x": 1})

REAL_POINT = {"alpha": -3, "beta": -2, "gamma": 1}
COMPLEX_POINT = {"alpha": 1, "beta": 1, "gamma": 1}

# Hand-entered reference systems keyed by trig monomial (sin-degree, cos-degree).
YTSF_REFERENCE = {
    (0, 0): "4*v*A0 + 3*A0^2 + 3*B1^2 + 3*A0 + 2*A2",
    (0, 1): "4*v*A1 + 6*A0*A1 + 6*B1*B2 + A1",
    (1, 0): "4*v*B1 + 6*A0*B1 + 2*B1",
    (0, 2): "4*v*A2 + 6*A0*A2 + 3*A1^2 - 3*B1^2 + 3*B2^2 - 5*A2",
    (1, 1): "4*v*B2 + 6*A0*B2 + 6*A1*B1 - 2*B2",
    (0, 3): "6*A1*A2 - 6*B1*B2 + 2*A1",
    (1, 2): "6*A1*B2 + 6*A2*B1 + 2*B1",
    (0, 4): "3*A2^2 - 3*B2^2 + 6*A2",
    (1, 3): "6*A2*B2 + 6*B2",
}
RD_REFERENCE = {
    (0, 0): "gamma*A0^3 + 3*gamma*A0*B1^2 + beta*A0",
    (0, 1): "3*gamma*A0^2*A1 + 3*gamma*A1*B1^2 - 2*v^2*A1 - 2*alpha*A1 + beta*A1",
    (1, 0): "3*gamma*A0^2*B1 + gamma*B1^3 - v^2*B1 - alpha*B1 + beta*B1",
    (0, 2): "3*gamma*A0*A1^2 - 3*gamma*A0*B1^2",
    (1, 1): "6*gamma*A0*A1*B1",
    (0, 3): "gamma*A1^3 - 3*gamma*A1*B1^2 + 2*v^2*A1 + 2*alpha*A1",
    (1, 2): "3*gamma*A1^2*B1 - gamma*B1^3 + 2*v^2*B1 + 2*alpha*B1",
}


def pipeline(which: str):
    """(ode, reduced ode, balance, ansatz, system) for 'ytsf' or 'rd'."""
    if which == "ytsf":
        pde, frame, steps, params = YTSF_PDE, YTSF_FRAME, ("integrate_once", "reduce_order"), ()
    else:
        pde, frame, steps, params = RD_PDE, RD_FRAME, (), RD_PARAMS
    fld = coefficient_field(params)
    ode = reduce_to_ode(parse_expr(pde), frame, "u", params, fld)
    reduced = apply_pipeline(ode, steps)
    bal = homogeneous_balance(reduced)
    ans = build_ansatz(bal.n, fld)
    system = extract_coefficient_system(substitute_ansatz(reduced, ans))
    return ode, reduced, bal, ans, system


def reference_system(which: str, gens, fld):
    table = YTSF_REFERENCE if which == "ytsf" else RD_REFERENCE
    return {tag: expr_to_poly(parse_expr(text), gens, fld) for tag, text in table.items()}


def _shift(point, coord, h):
    p = dict(point)
    p[coord] = p[coord] + h
    return p


def fd_derivative(f, point, coords, h=0.01):
    """Nested fourth-order central differences for the mixed partial along
    ``coords``."""
    if not coords:
        return f(point)
    c, rest = coords[0], coords[1:]

    def g(p):
        return fd_derivative(f, p, rest, h)

    return (-g(_shift(point, c, 2 * h)) + 8 * g(_shift(point, c, h))
            - 8 * g(_shift(point, c, -h)) + g(_shift(point, c, -2 * h))) / (12 * h)


def fd_residual(pde_text: str, u_expr, point: dict, params: dict, h=0.01) -> complex:
    """PDE residual with every derivative of u taken by finite differences
    of the numeric solution (no symbolic differentiation)."""
    pde = parse_expr(pde_text)
    ctx = {k: complex(v) for k, v in params.items()}
    found: dict = {}

    def slot(d: Deriv):
        name = f"fd_{len(found)}"
        found[name] = tuple(d.coords)
        return sym(name)

    flat = replace(map_derivatives(pde, slot), {"u": sym("fd_u")})

    def u_at(p):
        return eval_numeric(u_expr, dict(ctx, **{k: complex(v) for k, v in p.items()}))

    env = dict(ctx, **{k: complex(v) for k, v in point.items()})
    env["fd_u"] = u_at(point)
    for name, coords in found.items():
        env[name] = fd_derivative(u_at, point, coords, h)
    return eval_numeric(flat, env)


# Reference closed forms; s1, s2, s3 stand for independent +/- choices.
REFERENCE_SOLUTIONS = {
    "kink": ("ytsf", "2*tanh(x + y + z + 7/4*t)"),
    "kink_drift": ("ytsf", "2*tanh(x + y + z - 1/4*t) - 4/3*(x + y + z - 1/4*t)"),
    "complex_kink": ("ytsf", "tanh(x + y + z + t) + s1*i*sech(x + y + z + t)"),
    "complex_kink_drift": ("ytsf", "tanh(x + y + z + 1/2*t) + s1*i*sech(x + y + z + 1/2*t)"
                     " - 1/3*(x + y + z + 1/2*t)"),
    "rd_tanh": ("rd", "s1*sqrt(-beta/gamma)*tanh(x + s2*sqrt((beta - 2*alpha)/2)*t)"),
    "rd_sech": ("rd", "s1*sqrt(-2*beta/gamma)*sech(x + s2*sqrt(-beta - alpha)*t)"),
    "rd_mixed": ("rd", "s1*sqrt(-beta/gamma)*tanh(x + s3*sqrt(2*beta - alpha)*t)"
                    " + s2*sqrt(beta/gamma)*sech(x + s3*sqrt(2*beta - alpha)*t)"),
}


def sign_variants(text: str):
    """All +/- instances of a reference form as parsed expressions."""
    names = [s for s in ("s1", "s2", "s3") if s in text]
    out = []
    for signs in itertools.product((1, -1), repeat=len(names)):
        out.append(replace(parse_expr(text), {n: parse_expr(str(s)) for n, s in zip(names, signs)}))
    return out
