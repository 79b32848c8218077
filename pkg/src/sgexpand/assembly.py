"""Closed-form travelling waves from solved branches, plus symbolic and
numeric verification and plot sampling."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .ansatz import Ansatz, TrigPoly
from .arith import Polynomial, RadicalValue
from .convert import coeff_to_expr, radical_to_expr
from .errors import EvaluationError, SGEError, UnresolvedBranchError
from .expr import (ZERO, Deriv, Expr, add, const, differentiate, eval_numeric, func,
                   map_derivatives, mul, power, render, replace, sym)
from .reduction import WaveFrame
from .solver import FREE, SolutionBranch, check_branch

ETA = "eta"
DEFAULT_SEED = 20240601
# Speed used for numeric checks when a branch leaves the speed unconstrained.
FREE_SPEED_SAMPLE = Fraction(3, 7)


class IntegrationError(SGEError):
    exit_code = 4


def _eta() -> Expr:
    return sym(ETA)


def _basis(a: int, b: int) -> Expr:
    return mul(power(func("sech", _eta()), a), power(func("tanh", _eta()), b))


# Antiderivatives of sech^a * tanh^b, all with zero integration constant.
ANTIDERIVATIVES: dict[tuple[int, int], Expr] = {
    (0, 0): _eta(),
    (0, 1): func("ln", func("cosh", _eta())),
    (0, 2): add(_eta(), mul(const(-1), func("tanh", _eta()))),
    (1, 0): mul(const(2), func("arctan", func("tanh", mul(const(Fraction(1, 2)), _eta())))),
    (1, 1): mul(const(-1), func("sech", _eta())),
}


@dataclass
class ClosedForm:
    """u = expr(eta) along a wave frame.

    ``terms`` keeps the basis expansion {(a, b): coefficient} of the
    realized trig polynomial (before integration, if any).
    """

    expr: Expr
    frame: WaveFrame | None = None
    branch_id: str = ""
    speed: object = None  # RadicalValue, Expr, FREE or None
    terms: dict = field(default_factory=dict)
    integrated: bool = False

    def speed_expr(self) -> Expr:
        if self.frame is None:
            raise ValueError("closed form has no frame")
        if self.speed is None or self.speed is FREE:
            return sym(self.frame.speed)
        if isinstance(self.speed, Expr):
            return self.speed
        return radical_to_expr(self.speed)

    def in_coordinates(self) -> Expr:
        """The solution with eta replaced by the frame's moving coordinate."""
        if self.frame is None:
            raise ValueError("closed form has no frame")
        return replace(self.expr, {ETA: self.frame.eta_expr(self.speed_expr())})

    def __str__(self):
        return render(self.expr)


def value_expr(p: Polynomial, assignment: Mapping[str, object]) -> Expr:
    """Polynomial in the unknowns evaluated at a branch assignment."""
    terms = []
    for mono, c in p.terms.items():
        factors = [coeff_to_expr(c)]
        for g, e in zip(p.gens, mono):
            if not e:
                continue
            val = assignment.get(g, FREE)
            if val is FREE:
                raise UnresolvedBranchError(f"unknown {g} is FREE but appears in the solution")
            if not isinstance(val, RadicalValue):
                raise UnresolvedBranchError(f"unknown {g} has no closed-form value")
            factors.append(power(radical_to_expr(val), e))
        terms.append(mul(*factors))
    return add(*terms)


def realize(source, branch: SolutionBranch, frame: WaveFrame | None = None) -> ClosedForm:
    """Substitute s -> sech(eta), c -> tanh(eta) and the branch values."""
    body = source.body if isinstance(source, Ansatz) else source
    if not isinstance(body, TrigPoly):
        raise TypeError("realize needs an Ansatz or a TrigPoly")
    if not branch.is_resolved:
        raise UnresolvedBranchError(f"branch {branch.id or '?'} is unresolved: {branch.reason}")
    terms = {}
    for m in sorted(body.coeffs, key=lambda m: (m[1], m[0])):
        coeff = value_expr(body.coeffs[m], branch.assignment)
        if coeff != ZERO:
            terms[m] = coeff
    expr = add(*[mul(c, _basis(*m)) for m, c in terms.items()])
    speed = branch.assignment.get(frame.speed) if frame is not None else None
    return ClosedForm(expr, frame, branch.id, speed, terms)


def integrate_trig(v: ClosedForm) -> ClosedForm:
    """Term-wise antiderivative in eta with zero integration constant."""
    parts = []
    for m, c in v.terms.items():
        if m not in ANTIDERIVATIVES:
            raise IntegrationError(f"no antiderivative for sech^{m[0]}*tanh^{m[1]}")
        parts.append(mul(c, ANTIDERIVATIVES[m]))
    return ClosedForm(add(*parts), v.frame, v.branch_id, v.speed, dict(v.terms), True)


def verify_symbolic(system, branch: SolutionBranch) -> bool:
    return check_branch(system, branch)


# -- numeric residuals ---------------------------------------------------------


@dataclass
class VerificationReport:
    max_residual: float
    points: int
    failures: list  # [(point dict, message)]
    tol: float

    @property
    def passed(self) -> bool:
        return not self.failures and self.points > 0 and self.max_residual <= self.tol


def residual_expr(pde: Expr, sol: ClosedForm, dependent: str = "u") -> Expr:
    """The pde with u replaced by the closed form in original coordinates."""
    u = sol.in_coordinates()
    cache: dict[tuple, Expr] = {(): u}

    def deriv(coords: tuple) -> Expr:
        if coords not in cache:
            cache[coords] = differentiate(deriv(coords[:-1]), coords[-1])
        return cache[coords]

    def on_deriv(d: Deriv) -> Expr:
        if d.name != dependent:
            raise SGEError(f"derivative of unknown function {d.name!r}")
        return deriv(tuple(d.coords))

    return replace(map_derivatives(pde, on_deriv), {dependent: u})


def numeric_context(sol: ClosedForm, params: Mapping[str, complex]) -> dict:
    ctx = {k: complex(v) for k, v in params.items()}
    if sol.frame is not None and (sol.speed is None or sol.speed is FREE):
        ctx.setdefault(sol.frame.speed, complex(FREE_SPEED_SAMPLE))
    return ctx


def verify_numeric_residual(pde: Expr, sol: ClosedForm, params: Mapping[str, complex],
                            npoints: int = 200, tol: float = 1e-8,
                            seed: int = DEFAULT_SEED, dependent: str = "u",
                            eta_bound: float = 3.0) -> VerificationReport:
    """Evaluate the pde residual at seeded random points with coordinates in
    [-2, 2] and |eta| <= eta_bound; evaluation failures are recorded."""
    res = residual_expr(pde, sol, dependent)
    ctx = numeric_context(sol, params)
    eta = sol.frame.eta_expr(sol.speed_expr())
    coords = sol.frame.coordinates
    rng = random.Random(seed)
    worst, done, failures = 0.0, 0, []
    attempts = 0
    while done < npoints and attempts < 100 * npoints:
        attempts += 1
        point = {c: rng.uniform(-2.0, 2.0) for c in coords}
        env = dict(ctx, **{c: complex(x) for c, x in point.items()})
        try:
            if abs(eval_numeric(eta, env)) > eta_bound:
                continue
            r = abs(eval_numeric(res, env))
        except EvaluationError as exc:
            failures.append((point, str(exc)))
            done += 1
            continue
        done += 1
        if r != r or r == float("inf"):
            failures.append((point, "non-finite residual"))
            continue
        worst = max(worst, r)
    return VerificationReport(worst, done, failures, tol)


# -- plot sampling ---------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    ranges: tuple  # ((name, lo, hi, count), ...) one or two entries
    fixed: tuple = ()  # ((name, value), ...)

    @staticmethod
    def parse(text: str) -> "GridSpec":
        """``eta=-5:5:201``, ``x=-5:5:101;t=0`` or ``x=-5:5:41,y=-5:5:41;z=0,t=0``."""
        head, _, tail = text.strip().partition(";")
        ranges = []
        for part in filter(None, (p.strip() for p in head.split(","))):
            name, eq, bounds = part.partition("=")
            bits = bounds.split(":")
            if not eq or len(bits) != 3:
                raise ValueError(f"malformed grid range {part!r}")
            try:
                lo, hi, n = Fraction(bits[0]), Fraction(bits[1]), int(bits[2])
            except ValueError as exc:
                raise ValueError(f"malformed grid range {part!r}") from exc
            if n < 1:
                raise ValueError(f"grid count must be positive in {part!r}")
            ranges.append((name.strip(), lo, hi, n))
        if not 1 <= len(ranges) <= 2:
            raise ValueError("grid needs one or two ranges")
        fixed = []
        for part in filter(None, (p.strip() for p in tail.replace(";", ",").split(","))):
            name, eq, val = part.partition("=")
            if not eq:
                raise ValueError(f"malformed fixed coordinate {part!r}")
            try:
                fixed.append((name.strip(), Fraction(val.strip())))
            except ValueError as exc:
                raise ValueError(f"malformed fixed coordinate {part!r}") from exc
        names = [r[0] for r in ranges] + [f[0] for f in fixed]
        if len(set(names)) != len(names):
            raise ValueError("grid names must be distinct")
        return GridSpec(tuple(ranges), tuple(fixed))

    @staticmethod
    def axis(lo: Fraction, hi: Fraction, n: int) -> list[float]:
        if n == 1:
            return [float(lo)]
        return [float(lo + (hi - lo) * k / (n - 1)) for k in range(n)]


@dataclass
class PlotGrid:
    columns: tuple
    rows: list


def sample_plot_data(sol: ClosedForm, params: Mapping[str, complex], grid) -> PlotGrid:
    layout = GridSpec.parse(grid) if isinstance(grid, str) else grid
    ctx = numeric_context(sol, params)
    names = [r[0] for r in layout.ranges]
    axes = [GridSpec.axis(*r[1:]) for r in layout.ranges]
    if names == [ETA]:
        if layout.fixed:
            raise ValueError("an eta grid takes no fixed coordinates")
        target = sol.expr
    else:
        if ETA in names:
            raise ValueError("eta cannot be combined with coordinate ranges")
        if sol.frame is None:
            raise ValueError("coordinate grids need a wave frame")
        given = set(names) | {f[0] for f in layout.fixed}
        unknown = given - set(sol.frame.coordinates)
        if unknown:
            raise ValueError(f"not a coordinate of the frame: {', '.join(sorted(unknown))}")
        missing = [c for c in sol.frame.coordinates if c not in given]
        if missing:
            raise ValueError(f"grid leaves coordinates unset: {', '.join(missing)}")
        ctx.update({n: complex(v) for n, v in layout.fixed})
        target = sol.in_coordinates()
    rows = []
    if len(axes) == 1:
        points = [(a,) for a in axes[0]]
    else:
        points = [(a, b) for a in axes[0] for b in axes[1]]
    for pt in points:
        env = dict(ctx, **{n: complex(x) for n, x in zip(names, pt)})
        u = eval_numeric(target, env)
        rows.append(pt + (u.real, u.imag))
    return PlotGrid(tuple(names) + ("re_u", "im_u"), rows)


__all__ = [
    "ANTIDERIVATIVES", "ClosedForm", "DEFAULT_SEED", "ETA", "FREE_SPEED_SAMPLE", "GridSpec",
    "IntegrationError", "PlotGrid", "VerificationReport", "integrate_trig", "realize",
    "residual_expr", "sample_plot_data", "value_expr", "verify_numeric_residual",
    "verify_symbolic",
]
