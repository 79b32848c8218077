"""Expression trees for PDEs and closed-form solutions.

Nodes are immutable and built through the smart constructors :func:`add`,
:func:`mul`, :func:`power` and :func:`func`, which flatten, fold constants,
collect like terms and sort arguments.  Any tree built that way is in
canonical form, so structural equality is meaningful and
``parse_expr(render(e)) == e``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .arith import GaussianRational
from .errors import DifferentiationError, EvaluationError, ParseError

FUNCTIONS = ("sin", "cos", "tan", "sinh", "cosh", "tanh", "sech", "exp", "ln", "arctan", "sqrt")


class Expr:
    __slots__ = ()

    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return add(self, neg(as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), neg(self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, e: int):
        return power(self, e)

    def __truediv__(self, other):
        return mul(self, power(as_expr(other), -1))

    def __str__(self):
        return render(self)


@dataclass(frozen=True, eq=True, repr=False)
class Const(Expr):
    value: GaussianRational

    def __repr__(self):
        return f"Const({self.value})"


@dataclass(frozen=True, eq=True, repr=False)
class Sym(Expr):
    name: str

    def __repr__(self):
        return f"Sym({self.name})"


@dataclass(frozen=True, eq=True, repr=False)
class Add(Expr):
    args: tuple

    def __repr__(self):
        return f"Add{self.args!r}"


@dataclass(frozen=True, eq=True, repr=False)
class Mul(Expr):
    args: tuple

    def __repr__(self):
        return f"Mul{self.args!r}"


@dataclass(frozen=True, eq=True, repr=False)
class Pow(Expr):
    base: Expr
    exp: int

    def __repr__(self):
        return f"Pow({self.base!r}, {self.exp})"


@dataclass(frozen=True, eq=True, repr=False)
class Func(Expr):
    name: str
    arg: Expr

    def __repr__(self):
        return f"Func({self.name}, {self.arg!r})"


@dataclass(frozen=True, eq=True, repr=False)
class Deriv(Expr):
    """Partial derivative of the dependent variable ``name`` with respect to
    the listed coordinates, in order."""

    name: str
    coords: tuple

    def __repr__(self):
        return f"Deriv({self.name}, {self.coords})"


ZERO = Const(GaussianRational(0))
ONE = Const(GaussianRational(1))
IMAG = Const(GaussianRational(0, 1))


def const(x) -> Const:
    return Const(GaussianRational.coerce(x))


def sym(name: str) -> Sym:
    return Sym(name)


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, str):
        return Sym(x)
    return const(x)


# -- canonical constructors -------------------------------------------------


def sort_key(e: Expr) -> tuple:
    rank = {Const: 0, Sym: 1, Deriv: 2, Func: 3, Pow: 4, Mul: 5, Add: 6}[type(e)]
    base = e.base if isinstance(e, Pow) else e
    return (render(base), rank, e.exp if isinstance(e, Pow) else 1)


def _split_coeff(e: Expr) -> tuple[GaussianRational, Expr]:
    """e = coefficient * rest with rest free of a leading constant."""
    if isinstance(e, Const):
        return e.value, ONE
    if isinstance(e, Mul) and isinstance(e.args[0], Const):
        rest = e.args[1:]
        return e.args[0].value, rest[0] if len(rest) == 1 else Mul(rest)
    return GaussianRational(1), e


def add(*args: Expr) -> Expr:
    flat: list[Expr] = []
    for a in args:
        if isinstance(a, Add):
            flat.extend(a.args)
        else:
            flat.append(a)
    total = GaussianRational(0)
    collected: dict[Expr, GaussianRational] = {}
    order: list[Expr] = []
    for a in flat:
        c, rest = _split_coeff(a)
        if rest == ONE:
            total = total + c
            continue
        if rest in collected:
            collected[rest] = collected[rest] + c
        else:
            collected[rest] = c
            order.append(rest)
    terms = []
    for rest in order:
        c = collected[rest]
        if c:
            terms.append(_scaled(c, rest))
    terms.sort(key=sort_key)
    if total:
        terms.insert(0, Const(total))
    if not terms:
        return ZERO
    if len(terms) == 1:
        return terms[0]
    return Add(tuple(terms))


def _scaled(c: GaussianRational, rest: Expr) -> Expr:
    if c == 1:
        return rest
    if isinstance(rest, Mul):
        return Mul((Const(c),) + rest.args)
    return Mul((Const(c), rest))


def mul(*args: Expr) -> Expr:
    flat: list[Expr] = []
    for a in args:
        if isinstance(a, Mul):
            flat.extend(a.args)
        else:
            flat.append(a)
    coeff = GaussianRational(1)
    powers: dict[Expr, int] = {}
    order: list[Expr] = []
    for a in flat:
        if isinstance(a, Const):
            coeff = coeff * a.value
            continue
        base, e = (a.base, a.exp) if isinstance(a, Pow) else (a, 1)
        if base in powers:
            powers[base] += e
        else:
            powers[base] = e
            order.append(base)
    if not coeff:
        return ZERO
    factors = []
    for base in order:
        e = powers[base]
        if e:
            f = power(base, e)
            if isinstance(f, Const):
                coeff = coeff * f.value
            elif isinstance(f, Mul):
                # power() may split off a constant, e.g. (2x)^2
                for g in f.args:
                    if isinstance(g, Const):
                        coeff = coeff * g.value
                    else:
                        factors.append(g)
            else:
                factors.append(f)
    factors.sort(key=sort_key)
    if not factors:
        return Const(coeff)
    if len(factors) == 1 and isinstance(factors[0], Add) and coeff != 1:
        return add(*[mul(Const(coeff), t) for t in factors[0].args])
    if coeff == 1:
        return factors[0] if len(factors) == 1 else Mul(tuple(factors))
    return Mul((Const(coeff),) + tuple(factors))


def neg(e: Expr) -> Expr:
    return mul(Const(GaussianRational(-1)), e)


def power(base: Expr, e: int) -> Expr:
    if not isinstance(e, int):
        raise TypeError("only integer exponents are supported")
    if e == 0:
        return ONE
    if e == 1:
        return base
    if isinstance(base, Const):
        if not base.value and e < 0:
            raise ZeroDivisionError("zero to a negative power")
        return Const(base.value ** e)
    if isinstance(base, Pow):
        return power(base.base, base.exp * e)
    if isinstance(base, Mul):
        return mul(*[power(f, e) for f in base.args])
    return Pow(base, e)


def func(name: str, arg: Expr) -> Expr:
    if name not in FUNCTIONS:
        raise ValueError(f"unknown function {name!r}")
    if isinstance(arg, Const):
        v = arg.value
        if not v:
            folded = {"sin": 0, "tan": 0, "sinh": 0, "tanh": 0, "arctan": 0, "sqrt": 0,
                      "cos": 1, "cosh": 1, "sech": 1, "exp": 1}
            if name in folded:
                return const(folded[name])
        if name == "ln" and v == 1:
            return ZERO
        if name == "sqrt":
            r = v.sqrt()
            if r is not None:
                return Const(r)
    return Func(name, arg)


def canonical(e: Expr) -> Expr:
    """Rebuild ``e`` bottom-up through the canonical constructors."""
    if isinstance(e, (Const, Sym, Deriv)):
        return e
    if isinstance(e, Add):
        return add(*[canonical(a) for a in e.args])
    if isinstance(e, Mul):
        return mul(*[canonical(a) for a in e.args])
    if isinstance(e, Pow):
        return power(canonical(e.base), e.exp)
    if isinstance(e, Func):
        return func(e.name, canonical(e.arg))
    raise TypeError(f"not an expression: {e!r}")


# -- rendering --------------------------------------------------------------


def _is_negative_term(e: Expr) -> bool:
    c, _ = _split_coeff(e)
    return c.is_negative()


def _render_const(v: GaussianRational, as_factor: bool) -> str:
    s = str(v)
    if as_factor and v.re and v.im:
        return f"({s})"
    return s


def _render_factor(e: Expr) -> str:
    if isinstance(e, (Add, Mul)):
        return f"({render(e)})"
    if isinstance(e, Const):
        v = e.value
        if v.is_negative() or (v.re and v.im) or v.re.denominator != 1 or v.im:
            return f"({render(e)})"
    return render(e)


def render(e: Expr) -> str:
    if isinstance(e, Const):
        return _render_const(e.value, False)
    if isinstance(e, Sym):
        return e.name
    if isinstance(e, Deriv):
        return f"D({e.name},{','.join(e.coords)})"
    if isinstance(e, Func):
        return f"{e.name}({render(e.arg)})"
    if isinstance(e, Pow):
        return f"{_render_factor(e.base)}^{e.exp}"
    if isinstance(e, Mul):
        head = e.args[0]
        parts = [_render_factor(a) if isinstance(a, Add) else render(a) for a in e.args[1:]]
        if isinstance(head, Const):
            v = head.value
            if v == -1:
                return "-" + "*".join(parts)
            return "*".join([_render_const(v, True)] + parts)
        return "*".join([_render_factor(head) if isinstance(head, Add) else render(head)] + parts)
    if isinstance(e, Add):
        out = render(e.args[0])
        for t in e.args[1:]:
            if _is_negative_term(t):
                out += " - " + render(neg(t))
            else:
                out += " + " + render(t)
        return out
    raise TypeError(f"not an expression: {e!r}")


# -- parsing ----------------------------------------------------------------


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int, int]] = []
        line, col, k = 1, 1, 0
        n = len(text)
        while k < n:
            ch = text[k]
            if ch == "\n":
                line, col, k = line + 1, 1, k + 1
                continue
            if ch.isspace():
                k += 1
                col += 1
                continue
            start = k
            if ch.isdigit() or (ch == "." and k + 1 < n and text[k + 1].isdigit()):
                while k < n and (text[k].isdigit() or text[k] == "."):
                    k += 1
                kind = "decimal" if "." in text[start:k] else "int"
                if text[start:k].count(".") > 1:
                    raise ParseError(f"malformed number {text[start:k]!r}", line, col)
            elif ch.isalpha():
                while k < n and (text[k].isalnum() or text[k] == "_"):
                    k += 1
                kind = "ident"
            elif ch in "+-*/^(),":
                k += 1
                kind = ch
            else:
                raise ParseError(f"unexpected character {ch!r}", line, col)
            self.tokens.append((kind, text[start:k], line, col))
            col += k - start
        self.tokens.append(("eof", "", line, col))


class _Parser:
    def __init__(self, text: str):
        self.tokens = _Lexer(text).tokens
        self.pos = 0

    def peek(self, offset: int = 0):
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def take(self, kind: str | None = None):
        tok = self.peek()
        if kind is not None and tok[0] != kind:
            want = "end of input" if kind == "eof" else repr(kind)
            got = "end of input" if tok[0] == "eof" else repr(tok[1])
            raise ParseError(f"expected {want}, found {got}", tok[2], tok[3])
        self.pos += 1
        return tok

    def error(self, msg: str, tok=None):
        tok = tok or self.peek()
        return ParseError(msg, tok[2], tok[3])

    def expr(self) -> Expr:
        terms = [self.term()]
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            t = self.term()
            terms.append(t if op == "+" else neg(t))
        return add(*terms)

    def term(self) -> Expr:
        factors = [self.factor()]
        while self.peek()[0] in ("*", "/"):
            op = self.take()[0]
            f = self.factor()
            factors.append(f if op == "*" else power(f, -1))
        return mul(*factors)

    def factor(self) -> Expr:
        base = self.base()
        if self.peek()[0] == "^":
            self.take()
            return power(base, self.exponent())
        return base

    def exponent(self) -> int:
        tok = self.peek()
        sign = 1
        paren = False
        if tok[0] == "(":
            self.take()
            paren = True
            tok = self.peek()
        if tok[0] == "-":
            self.take()
            sign = -1
            tok = self.peek()
        if tok[0] != "int":
            raise self.error("non-integer exponent", tok)
        self.take()
        if paren:
            if self.peek()[0] != ")":
                raise self.error("non-integer exponent")
            self.take()
        return sign * int(tok[1])

    def base(self) -> Expr:
        tok = self.peek()
        kind = tok[0]
        if kind == "-":
            self.take()
            return neg(self.factor())
        if kind == "int":
            self.take()
            if self.peek()[0] == "/" and self.peek(1)[0] == "int":
                self.take()
                den = self.take()
                if int(den[1]) == 0:
                    raise self.error("zero denominator in rational literal", den)
                return const(Fraction(int(tok[1]), int(den[1])))
            return const(int(tok[1]))
        if kind == "decimal":
            self.take()
            return const(Fraction(tok[1]))
        if kind == "(":
            self.take()
            e = self.expr()
            self.take(")")
            return e
        if kind == "ident":
            self.take()
            name = tok[1]
            if self.peek()[0] == "(":
                return self.call(name, tok)
            if name == "i":
                return IMAG
            return Sym(name)
        if kind == "eof":
            raise self.error("unexpected end of input", tok)
        raise self.error(f"unexpected token {tok[1]!r}", tok)

    def call(self, name: str, tok) -> Expr:
        self.take("(")
        if name == "D":
            dep = self.take("ident")[1]
            coords = []
            while self.peek()[0] == ",":
                self.take()
                coords.append(self.take("ident")[1])
            self.take(")")
            if not coords:
                raise self.error("derivative needs at least one coordinate", tok)
            return Deriv(dep, tuple(coords))
        if name not in FUNCTIONS:
            raise self.error(f"unknown function {name!r}", tok)
        arg = self.expr()
        self.take(")")
        return func(name, arg)


def parse_expr(text: str) -> Expr:
    """Parse the expression grammar into a canonical tree.

    >>> render(parse_expr("2*tanh(eta)"))
    '2*tanh(eta)'
    """
    p = _Parser(text)
    e = p.expr()
    p.take("eof")
    return e


# -- traversal --------------------------------------------------------------


def free_symbols(e: Expr) -> set[str]:
    if isinstance(e, Sym):
        return {e.name}
    if isinstance(e, Const):
        return set()
    if isinstance(e, Deriv):
        return {e.name, *e.coords}
    if isinstance(e, (Add, Mul)):
        return set().union(*(free_symbols(a) for a in e.args))
    if isinstance(e, Pow):
        return free_symbols(e.base)
    if isinstance(e, Func):
        return free_symbols(e.arg)
    raise TypeError(f"not an expression: {e!r}")


def substitute(e: Expr, name: str, replacement: Expr) -> Expr:
    """Replace every occurrence of symbol ``name``; derivative nodes are left
    untouched."""
    return replace(e, {name: replacement})


def replace(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    if isinstance(e, Sym):
        return mapping.get(e.name, e)
    if isinstance(e, (Const, Deriv)):
        return e
    if isinstance(e, Add):
        return add(*[replace(a, mapping) for a in e.args])
    if isinstance(e, Mul):
        return mul(*[replace(a, mapping) for a in e.args])
    if isinstance(e, Pow):
        return power(replace(e.base, mapping), e.exp)
    if isinstance(e, Func):
        return func(e.name, replace(e.arg, mapping))
    raise TypeError(f"not an expression: {e!r}")


def map_derivatives(e: Expr, fn) -> Expr:
    """Rebuild ``e`` with each Deriv node d replaced by fn(d)."""
    if isinstance(e, Deriv):
        return fn(e)
    if isinstance(e, (Const, Sym)):
        return e
    if isinstance(e, Add):
        return add(*[map_derivatives(a, fn) for a in e.args])
    if isinstance(e, Mul):
        return mul(*[map_derivatives(a, fn) for a in e.args])
    if isinstance(e, Pow):
        return power(map_derivatives(e.base, fn), e.exp)
    if isinstance(e, Func):
        return func(e.name, map_derivatives(e.arg, fn))
    raise TypeError(f"not an expression: {e!r}")


# -- differentiation --------------------------------------------------------


def _dfunc(name: str, a: Expr) -> Expr:
    f = lambda n, x=a: func(n, x)  # noqa: E731
    if name == "sin":
        return f("cos")
    if name == "cos":
        return neg(f("sin"))
    if name == "tan":
        return power(f("cos"), -2)
    if name == "sinh":
        return f("cosh")
    if name == "cosh":
        return f("sinh")
    if name == "tanh":
        return power(f("sech"), 2)
    if name == "sech":
        return neg(mul(f("sech"), f("tanh")))
    if name == "exp":
        return f("exp")
    if name == "ln":
        return power(a, -1)
    if name == "arctan":
        return power(add(ONE, power(a, 2)), -1)
    if name == "sqrt":
        return mul(const(Fraction(1, 2)), power(f("sqrt"), -1))
    raise DifferentiationError(f"no derivative rule for {name!r}")


def differentiate(e: Expr, var: str) -> Expr:
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Sym):
        return ONE if e.name == var else ZERO
    if isinstance(e, Deriv):
        raise DifferentiationError(f"cannot differentiate unresolved derivative {render(e)}")
    if isinstance(e, Add):
        return add(*[differentiate(a, var) for a in e.args])
    if isinstance(e, Mul):
        terms = []
        for k, a in enumerate(e.args):
            da = differentiate(a, var)
            if da != ZERO:
                terms.append(mul(*e.args[:k], da, *e.args[k + 1:]))
        return add(*terms)
    if isinstance(e, Pow):
        db = differentiate(e.base, var)
        if db == ZERO:
            return ZERO
        return mul(const(e.exp), power(e.base, e.exp - 1), db)
    if isinstance(e, Func):
        da = differentiate(e.arg, var)
        if da == ZERO:
            return ZERO
        return mul(_dfunc(e.name, e.arg), da)
    raise DifferentiationError(f"unsupported node {e!r}")


# -- numeric evaluation -----------------------------------------------------


def _stable_sech(z: complex) -> complex:
    w = z if z.real >= 0 else -z
    t = cmath.exp(-w)
    d = 1 + t * t
    if d == 0:
        raise EvaluationError("pole of sech")
    return 2 * t / d


def _stable_tanh(z: complex) -> complex:
    w, s = (z, 1) if z.real >= 0 else (-z, -1)
    t = cmath.exp(-2 * w)
    if 1 + t == 0:
        raise EvaluationError("pole of tanh")
    return s * (1 - t) / (1 + t)


def _stable_ln_cosh(z: complex) -> complex:
    w = z if z.real >= 0 else -z
    return w + cmath.log((1 + cmath.exp(-2 * w)) / 2)


def eval_numeric(e: Expr, ctx: Mapping[str, complex]) -> complex:
    """Evaluate in IEEE double complex arithmetic."""
    try:
        return _eval(e, ctx)
    except EvaluationError:
        raise
    except (ZeroDivisionError, OverflowError, ValueError) as exc:
        raise EvaluationError(f"evaluation failed at {render(e)}: {exc}") from exc


def _eval(e: Expr, ctx) -> complex:
    if isinstance(e, Const):
        return complex(e.value)
    if isinstance(e, Sym):
        try:
            return complex(ctx[e.name])
        except KeyError:
            raise EvaluationError(f"unbound symbol {e.name!r}") from None
    if isinstance(e, Add):
        return sum((_eval(a, ctx) for a in e.args), 0j)
    if isinstance(e, Mul):
        v = 1 + 0j
        for a in e.args:
            v *= _eval(a, ctx)
        return v
    if isinstance(e, Pow):
        b = _eval(e.base, ctx)
        if b == 0 and e.exp < 0:
            raise EvaluationError(f"pole: {render(e.base)} = 0")
        return b ** e.exp
    if isinstance(e, Func):
        if e.name == "ln" and isinstance(e.arg, Func) and e.arg.name == "cosh":
            return _stable_ln_cosh(_eval(e.arg.arg, ctx))
        z = _eval(e.arg, ctx)
        name = e.name
        if name == "sech":
            return _stable_sech(z)
        if name == "tanh":
            return _stable_tanh(z)
        if name == "ln":
            if z == 0:
                raise EvaluationError("logarithm of zero")
            return cmath.log(z)
        fn = {"sin": cmath.sin, "cos": cmath.cos, "tan": cmath.tan, "sinh": cmath.sinh,
              "cosh": cmath.cosh, "exp": cmath.exp, "arctan": cmath.atan,
              "sqrt": cmath.sqrt}[name]
        return fn(z)
    if isinstance(e, Deriv):
        raise EvaluationError(f"cannot evaluate unresolved derivative {render(e)}")
    raise EvaluationError(f"unsupported node {e!r}")


def is_finite(z: complex) -> bool:
    return math.isfinite(z.real) and math.isfinite(z.imag)
