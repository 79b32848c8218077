"""Travelling-wave reduction of a PDE to an ODE in eta, integration with a
zero constant, order reduction U' = V and homogeneous balance."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .arith import Polynomial, QQI
from .errors import MethodInapplicable, NotIntegrableError, ReductionError
from .expr import Add, Const, Deriv, Expr, Func, Mul, Pow, Sym, add, const, mul, sym

# A term's factor key: sorted ((derivative order, multiplicity), ...).
FactorKey = tuple


@dataclass(frozen=True)
class WaveFrame:
    """eta = sum_i k_i * x_i - speed * time."""

    coefficients: tuple  # ((coordinate, Fraction), ...) spatial part
    time: str | None = "t"
    speed: str = "v"

    def __post_init__(self):
        if not any(k for _, k in self.coefficients):
            raise ValueError("at least one spatial coefficient must be nonzero")

    @classmethod
    def of(cls, coefficients: Mapping[str, object], time: str | None = "t", speed: str = "v"):
        return cls(tuple((c, Fraction(k)) for c, k in coefficients.items()), time, speed)

    @property
    def coordinates(self) -> tuple[str, ...]:
        coords = tuple(c for c, _ in self.coefficients)
        return coords + ((self.time,) if self.time else ())

    def eta_expr(self, speed: Expr | None = None) -> Expr:
        speed = sym(self.speed) if speed is None else speed
        terms = [mul(const(k), sym(c)) for c, k in self.coefficients]
        if self.time:
            terms.append(mul(const(-1), speed, sym(self.time)))
        return add(*terms)

    def chain_factor(self, coord: str, gens, fld) -> Polynomial:
        """d/d(coord) = factor * d/d(eta)."""
        if coord == self.time:
            return -Polynomial.variable(gens, self.speed, fld)
        for c, k in self.coefficients:
            if c == coord:
                return Polynomial.constant(gens, fld(k), fld)
        raise ReductionError(f"coordinate {coord!r} is not part of the frame")


def _key_mul(a: FactorKey, b: FactorKey) -> FactorKey:
    counts: dict[int, int] = dict(a)
    for k, m in b:
        counts[k] = counts.get(k, 0) + m
    return tuple(sorted(counts.items()))


def _prime(k: int) -> str:
    return "'" * k if k <= 3 else f"^({k})"


@dataclass(frozen=True)
class DerivPoly:
    """Sum of coefficient * prod U^(k)^m with polynomial coefficients."""

    var: str
    terms: Mapping  # FactorKey -> Polynomial
    gens: tuple = ("v",)
    field: object = QQI

    def __post_init__(self):
        object.__setattr__(self, "terms", {k: c for k, c in self.terms.items() if c})

    # construction helpers
    def _with(self, terms, var=None) -> "DerivPoly":
        return DerivPoly(var or self.var, terms, self.gens, self.field)

    def constant(self, c) -> "DerivPoly":
        return self._with({(): Polynomial.constant(self.gens, self.field(c), self.field)})

    def __add__(self, other: "DerivPoly") -> "DerivPoly":
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms[k] + c if k in terms else c
        return self._with(terms)

    def __neg__(self):
        return self._with({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "DerivPoly") -> "DerivPoly":
        terms: dict = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = _key_mul(k1, k2)
                terms[k] = terms[k] + c1 * c2 if k in terms else c1 * c2
        return self._with(terms)

    def scale(self, c) -> "DerivPoly":
        return self._with({k: v * c for k, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, DerivPoly):
            return NotImplemented
        return self.var == other.var and self.terms == other.terms

    def __hash__(self):
        return hash((self.var, frozenset(self.terms.items())))

    @property
    def orders(self) -> set[int]:
        return {k for key in self.terms for k, _ in key}

    def derivative(self) -> "DerivPoly":
        """Formal d/d(eta)."""
        out: dict = {}
        for key, c in self.terms.items():
            for idx, (k, m) in enumerate(key):
                rest = list(key)
                rest[idx] = (k, m - 1)
                rest = tuple(x for x in rest if x[1])
                new = _key_mul(rest, ((k + 1, 1),))
                cm = c * m
                out[new] = out[new] + cm if new in out else cm
        return self._with(out)

    def factor_string(self, key: FactorKey) -> str:
        parts = []
        for k, m in key:
            f = f"{self.var}{_prime(k)}"
            parts.append(f if m == 1 else f"({f})^{m}" if k else f"{f}^{m}")
        return "*".join(parts)

    def __str__(self):
        if not self.terms:
            return "0"
        keyed = sorted(self.terms.items(),
                       key=lambda kv: (-max((k for k, _ in kv[0]), default=-1),
                                       -sum(m for _, m in kv[0]), kv[0]))
        out = []
        for key, c in keyed:
            fs = self.factor_string(key)
            cs = str(c)
            if not fs:
                out.append(cs)
            elif cs == "1":
                out.append(fs)
            elif cs == "-1":
                out.append("-" + fs)
            elif len(c.terms) > 1:
                out.append(f"({cs})*{fs}")
            else:
                out.append(f"{cs}*{fs}")
        s = out[0]
        for p in out[1:]:
            s += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return s

    def __repr__(self):
        return f"DerivPoly({self})"


def reduce_to_ode(pde: Expr, frame: WaveFrame, dependent: str = "u",
                  params: tuple[str, ...] = (), fld=QQI, var: str = "U") -> DerivPoly:
    """Substitute u = U(eta): each d/dx_i becomes k_i d/deta and d/dt
    becomes -v d/deta."""
    gens = (frame.speed,)
    zero = DerivPoly(var, {}, gens, fld)

    def leaf(key, c: Polynomial) -> DerivPoly:
        return DerivPoly(var, {key: c}, gens, fld)

    def one() -> Polynomial:
        return Polynomial.constant(gens, fld.one, fld)

    def conv(node: Expr) -> DerivPoly:
        if isinstance(node, Const):
            return leaf((), one().scale(fld(node.value)))
        if isinstance(node, Sym):
            if node.name == dependent:
                return leaf(((0, 1),), one())
            if node.name in params:
                return leaf((), Polynomial.constant(gens, fld.parameter(node.name), fld))
            if node.name in frame.coordinates:
                raise ReductionError(f"explicit dependence on coordinate {node.name!r}")
            raise ReductionError(f"unknown symbol {node.name!r}")
        if isinstance(node, Deriv):
            if node.name != dependent:
                raise ReductionError(f"derivative of {node.name!r}, expected {dependent!r}")
            c = one()
            for coord in node.coords:
                c = c * frame.chain_factor(coord, gens, fld)
            return leaf(((len(node.coords), 1),), c)
        if isinstance(node, Add):
            out = zero
            for a in node.args:
                out = out + conv(a)
            return out
        if isinstance(node, Mul):
            out = leaf((), one())
            for a in node.args:
                out = out * conv(a)
            return out
        if isinstance(node, Pow):
            base = conv(node.base)
            if node.exp < 0:
                if set(base.terms) != {()}:
                    raise ReductionError(f"non-polynomial dependence on {dependent}: {node}")
                c = base.terms[()]
                if not c.is_constant:
                    raise ReductionError(f"division by a speed-dependent factor: {node}")
                inv = fld.one / c.constant_value()
                return leaf((), one().scale(inv ** (-node.exp)))
            out = leaf((), one())
            for _ in range(node.exp):
                out = out * base
            return out
        if isinstance(node, Func):
            raise ReductionError(f"non-polynomial dependence: {node.name}(...)")
        raise ReductionError(f"unsupported node {node!r}")

    return conv(pde)


def integrate_once(ode: DerivPoly) -> DerivPoly:
    """Term-wise antiderivative with zero integration constant.

    Recognized patterns: c*U^(k) -> c*U^(k-1) for k >= 1, and
    c*U^(j)*U^(j+1) -> (c/2)*(U^(j))^2.
    """
    out: dict = {}
    half = ode.field(Fraction(1, 2))
    for key, c in ode.terms.items():
        if len(key) == 1 and key[0][1] == 1 and key[0][0] >= 1:
            new, cn = ((key[0][0] - 1, 1),), c
        elif (len(key) == 2 and key[0][1] == 1 and key[1][1] == 1
              and key[1][0] == key[0][0] + 1):
            new, cn = ((key[0][0], 2),), c * half
        else:
            raise NotIntegrableError(
                f"term {ode.factor_string(key) or '1'} is not integrable by pattern")
        out[new] = out[new] + cn if new in out else cn
    return ode._with(out)


def reduce_order(ode: DerivPoly, new_var: str = "V") -> DerivPoly:
    """Rename U^(k) to V^(k-1) (setting U' = V)."""
    if 0 in ode.orders or () in ode.terms:
        raise ReductionError(f"cannot set {ode.var}' = {new_var}: underived {ode.var} present")
    terms = {tuple((k - 1, m) for k, m in key): c for key, c in ode.terms.items()}
    return ode._with(terms, var=new_var)


@dataclass(frozen=True)
class BalanceResult:
    n: int
    linear_term: FactorKey
    nonlinear_term: FactorKey


def homogeneous_balance(ode: DerivPoly) -> BalanceResult:
    """Balance the highest linear derivative against the dominant nonlinear
    term with weight n + k per factor U^(k)."""
    linear = [key for key in ode.terms if len(key) == 1 and key[0][1] == 1 and key[0][0] >= 1]
    nonlinear = [key for key in ode.terms if sum(m for _, m in key) >= 2]
    if not linear:
        raise MethodInapplicable("no linear derivative term to balance")
    if not nonlinear:
        raise MethodInapplicable("no nonlinear term to balance")
    lin = max(linear, key=lambda key: key[0][0])
    top = lin[0][0]
    # weight m*n + s; dominant for large n is the largest (m, s)
    nl = max(nonlinear, key=lambda key: (sum(m for _, m in key), sum(k * m for k, m in key)))
    m = sum(mm for _, mm in nl)
    s = sum(k * mm for k, mm in nl)
    num, den = top - s, m - 1
    if num <= 0 or num % den:
        raise MethodInapplicable(
            f"balance n + {top} = {m}n + {s} has no positive integer solution")
    return BalanceResult(num // den, lin, nl)


def apply_pipeline(ode: DerivPoly, steps) -> DerivPoly:
    for step in steps:
        if step == "integrate_once":
            ode = integrate_once(ode)
        elif step == "reduce_order":
            ode = reduce_order(ode)
        else:
            raise ReductionError(f"unknown pipeline step {step!r}")
    return ode
