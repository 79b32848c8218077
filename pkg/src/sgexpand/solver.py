"""Exact solution of the coefficient systems by Groebner triangularization
and recursive factor-and-branch splitting with quadratic radicals."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt
from typing import Mapping

from .arith import (GaussianRational, Polynomial, RadicalValue, RationalFunction,
                    radical_canonicalize)
from .errors import NestedRadicalError
from .groebner import DEFAULT_MAX_PAIRS, TermOrder, buchberger, normal_form_reduce

log = logging.getLogger(__name__)


class _Free:
    """Marker for an unknown left unconstrained."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "FREE"

    __str__ = __repr__


FREE = _Free()

RESOLVED = "resolved"
UNRESOLVED = "unresolved"


@dataclass
class SolutionBranch:
    assignment: dict  # unknown -> RadicalValue | FREE
    conditions: tuple = ()  # "factor = 0" choices, in order
    status: str = RESOLVED
    residual: tuple = ()  # Polynomials left over for an unresolved branch
    reason: str = ""
    id: str = ""

    @property
    def is_resolved(self) -> bool:
        return self.status == RESOLVED

    @property
    def free(self) -> tuple[str, ...]:
        return tuple(k for k, v in self.assignment.items() if v is FREE)

    def value(self, name: str):
        return self.assignment.get(name)

    def key(self) -> tuple:
        items = tuple((k, "FREE" if v is FREE else v.key())
                      for k, v in sorted(self.assignment.items()))
        return (self.status, items, tuple(str(p) for p in self.residual))

    def describe(self) -> str:
        parts = [f"{k} = {v}" for k, v in self.assignment.items()]
        text = ", ".join(parts)
        if not self.is_resolved:
            text += f" [UNRESOLVED: {self.reason}]"
        return text


@dataclass
class SolutionSet:
    branches: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.branches)

    def __len__(self):
        return len(self.branches)

    @property
    def resolved(self) -> list[SolutionBranch]:
        return [b for b in self.branches if b.is_resolved]

    @property
    def unresolved(self) -> list[SolutionBranch]:
        return [b for b in self.branches if not b.is_resolved]

    def get(self, branch_id: str) -> SolutionBranch:
        for b in self.branches:
            if b.id == branch_id:
                return b
        raise KeyError(branch_id)


# -- field extension by independent square roots ----------------------------


class _Ext:
    """Element of K[x_free][sqrt(r_1), sqrt(r_2), ...] with the radicals
    treated as independent symbols subject only to sqrt(r)^2 = r."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    @classmethod
    def scalar(cls, c: RationalFunction) -> "_Ext":
        return cls({((), frozenset()): c})

    @classmethod
    def radical(cls, r: RadicalValue) -> "_Ext":
        c = r.outer * r.sign
        if r.is_rational:
            return cls.scalar(c)
        return cls({((), frozenset([r.radicand])): c})

    @classmethod
    def symbol(cls, name: str, one: RationalFunction) -> "_Ext":
        return cls({(((name, 1),), frozenset()): one})

    def __add__(self, other: "_Ext") -> "_Ext":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return _Ext(out)

    def __mul__(self, other: "_Ext") -> "_Ext":
        out: dict = {}
        for (m1, r1), c1 in self.terms.items():
            for (m2, r2), c2 in other.terms.items():
                c = c1 * c2
                for r in r1 & r2:
                    c = c * r
                mono = dict(m1)
                for name, e in m2:
                    mono[name] = mono.get(name, 0) + e
                k = (tuple(sorted(mono.items())), r1 ^ r2)
                out[k] = out[k] + c if k in out else c
        return _Ext(out)

    def __pow__(self, e: int) -> "_Ext":
        if not self.terms:
            return _Ext() if e else _Ext.scalar(RationalFunction.constant((), 1))
        result = _Ext({((), frozenset()): _one_like(self)})
        for _ in range(e):
            result = result * self
        return result

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def symbols(self) -> set[str]:
        return {name for (m, _), _ in self.terms.items() for name, _ in m}

    def as_radical(self) -> RadicalValue | None:
        """Single-radical value, or None when several radicals or free
        symbols remain."""
        if not self.terms:
            return None
        keys = list(self.terms)
        if any(m for m, _ in keys):
            return None
        rads = {r for _, r in keys}
        if rads == {frozenset()}:
            c = self.terms[keys[0]]
            return radical_canonicalize(c, c._coerce(1))
        if len(keys) != 1 or len(rads.pop()) != 1:
            return None
        (_, r), c = next(iter(self.terms.items()))
        return radical_canonicalize(c, next(iter(r)))


def _one_like(e: _Ext) -> RationalFunction:
    c = next(iter(e.terms.values()), None)
    if c is None:
        raise ValueError("power of an empty extension element")
    return c._coerce(1)


def _to_rf(c, fld) -> RationalFunction:
    if isinstance(c, RationalFunction):
        return c
    return RationalFunction.constant(tuple(getattr(fld, "params", ())),
                                     GaussianRational.coerce(c))


def _eval_ext(p: Polynomial, values: Mapping[str, object]) -> _Ext:
    """Evaluate ``p`` with each unknown bound to a RadicalValue, an _Ext, or
    FREE (kept as a symbol)."""
    one = _to_rf(p.field.one, p.field)
    cache: dict[str, _Ext] = {}

    def val(name):
        if name not in cache:
            v = values.get(name, FREE)
            if v is FREE:
                cache[name] = _Ext.symbol(name, one)
            elif isinstance(v, _Ext):
                cache[name] = v
            elif isinstance(v, RadicalValue):
                if isinstance(v.outer, RadicalValue) or isinstance(v.radicand, RadicalValue):
                    raise NestedRadicalError("nested radical in assignment")
                cache[name] = _Ext.radical(v)
            else:
                cache[name] = _Ext.scalar(_to_rf(v, p.field))
        return cache[name]

    total = _Ext()
    for mono, c in p.terms.items():
        term = _Ext.scalar(_to_rf(c, p.field))
        for g, e in zip(p.gens, mono):
            if e:
                term = term * (val(g) ** e)
        total = total + term
    return total


def check_branch(system, branch: SolutionBranch) -> bool:
    """True iff the assignment zeroes every equation.

    Radicals with distinct canonical radicands are treated as independent,
    so a True answer is sound for every choice of square-root branches.
    """
    if not branch.is_resolved:
        raise ValueError("check_branch needs a resolved branch")
    polys = list(getattr(system, "polys", system))
    for v in branch.assignment.values():
        if isinstance(v, RadicalValue) and (isinstance(v.outer, RadicalValue)
                                            or isinstance(v.radicand, RadicalValue)):
            raise NestedRadicalError("nested radical in assignment")
    return all(_eval_ext(p, branch.assignment).is_zero() for p in polys)


def zeroes_all(polys, assignment: Mapping[str, object]) -> bool:
    return all(_eval_ext(p, assignment).is_zero() for p in polys)


# -- univariate helpers ------------------------------------------------------


def _univariate_coeffs(p: Polynomial, var: str) -> dict[int, object]:
    k = p.gens.index(var)
    return {m[k]: c for m, c in p.terms.items()}


def _from_coeffs(gens, var, coeffs: Mapping[int, object], fld) -> Polynomial:
    k = gens.index(var)
    terms = {}
    for e, c in coeffs.items():
        m = [0] * len(gens)
        m[k] = e
        terms[tuple(m)] = c
    return Polynomial(gens, terms, fld)


def _const_value(c):
    """GaussianRational value of a field element, or None if it involves
    parameters."""
    if isinstance(c, GaussianRational):
        return c
    if isinstance(c, RationalFunction) and c.is_constant:
        return c.constant_value()
    return None


def _divisors(n: int, limit: int = 10 ** 12) -> list[int] | None:
    n = abs(n)
    if n == 0 or n > limit:
        return None
    out = []
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            out += [d, n // d]
    return sorted(set(out))


def _rational_roots(coeffs: Mapping[int, GaussianRational]) -> list[GaussianRational]:
    """Rational roots of a univariate polynomial with Gaussian-rational
    coefficients (rational root test on p * conj(p))."""
    deg = max(coeffs)
    low = min(e for e, c in coeffs.items() if c)
    if low:
        coeffs = {e - low: c for e, c in coeffs.items()}
        deg -= low
    if deg < 1:
        return []
    if any(not c.is_real for c in coeffs.values()):
        conj = {e: c.conjugate() for e, c in coeffs.items()}
        prod: dict[int, GaussianRational] = {}
        for e1, c1 in coeffs.items():
            for e2, c2 in conj.items():
                prod[e1 + e2] = prod.get(e1 + e2, GaussianRational(0)) + c1 * c2
        real = {e: c.re for e, c in prod.items()}
    else:
        real = {e: c.re for e, c in coeffs.items()}
    top = max(e for e, c in real.items() if c)
    den = 1
    for c in real.values():
        den = den * c.denominator // gcd(den, c.denominator)
    ints = {e: int(c * den) for e, c in real.items()}
    ps, qs = _divisors(ints.get(0, 0)), _divisors(ints[top])
    if ps is None or qs is None:
        return []
    found = []
    for p in ps:
        for q in qs:
            for s in (1, -1):
                r = Fraction(s * p, q)
                if r in found:
                    continue
                val = sum((c * r ** e for e, c in coeffs.items()), GaussianRational(0))
                if not val:
                    found.append(r)
    return sorted((GaussianRational(r) for r in found), key=lambda g: g.re)


def _uni_divide(num: dict, den: dict) -> tuple[dict, dict]:
    num = {e: c for e, c in num.items() if c}
    dd = max(den)
    lc = den[dd]
    q: dict = {}
    while num and max(num) >= dd:
        dn = max(num)
        t = num[dn] / lc
        q[dn - dd] = t
        for e, c in den.items():
            k = e + dn - dd
            num[k] = num.get(k, 0 * c) - t * c if k in num else -(t * c)
        num = {e: c for e, c in num.items() if c}
    return q, num


def _uni_gcd(a: dict, b: dict) -> dict:
    while b:
        _, r = _uni_divide(a, b)
        a, b = b, r
    lc = a[max(a)]
    return {e: c / lc for e, c in a.items()}


def _uni_derivative(a: dict) -> dict:
    return {e - 1: c * e for e, c in a.items() if e}


def _squarefree(p: Polynomial, var: str) -> Polynomial:
    coeffs = _univariate_coeffs(p, var)
    d = _uni_derivative(coeffs)
    if not d:
        return p
    g = _uni_gcd(coeffs, d)
    if max(g) == 0:
        return p
    q, _ = _uni_divide(coeffs, g)
    return _from_coeffs(p.gens, var, q, p.field).monic()


def _field_sqrt(x, fld):
    """Exact square root of a field element, or None."""
    c = _const_value(x)
    if c is not None:
        r = c.sqrt()
        return None if r is None else fld(r) if not isinstance(x, GaussianRational) else r
    if isinstance(x, RationalFunction):
        rv = radical_canonicalize(x._coerce(1), x)
        if rv.is_rational:
            return rv.outer
    return None


# -- branch state ------------------------------------------------------------


@dataclass(frozen=True)
class _State:
    eqs: tuple  # Polynomials (each = 0)
    values: tuple  # ((unknown, field element | RadicalValue), ...)
    pending: tuple  # ((unknown, Polynomial expression), ...) in creation order
    conditions: tuple

    def assign(self, var, val, cond, eqs) -> "_State":
        return _State(tuple(eqs), self.values + ((var, val),), self.pending,
                      self.conditions + (cond,))


@dataclass
class _Outcome:
    branches: list


def _fmt_value(v) -> str:
    return str(v)


class _Solver:
    def __init__(self, system, max_pairs: int):
        self.polys = [p for p in getattr(system, "polys", system) if p]
        if not self.polys:
            raise ValueError("empty system")
        self.gens = self.polys[0].gens
        self.field = self.polys[0].field
        self.order = TermOrder(self.gens)
        self.max_pairs = max_pairs

    def run(self) -> list[SolutionBranch]:
        return self._solve(_State(tuple(self.polys), (), (), ()))

    # main recursion
    def _solve(self, st: _State) -> list[SolutionBranch]:
        gb = buchberger(st.eqs, self.order, max_pairs=self.max_pairs)
        if gb.is_unit:
            return []
        basis = list(gb.polys)
        if not basis:
            return self._finalize(st, ())
        # monomial factors first: they give the cheapest splits
        for g in sorted(basis, key=self._rank):
            cm = g.content_monomial()
            if any(cm) and len(g.terms) > 1:
                return self._split_monomial(st, basis, g, cm)
        for g in sorted(basis, key=self._rank):
            out = self._try(st, basis, g)
            if out is not None:
                return out.branches
        return self._finalize(st, tuple(basis), reason="no factorable basis element")

    def _rank(self, g: Polynomial):
        return (len(g.variables()), sum(g.leading_monomial()), g.leading_monomial())

    def _split_monomial(self, st, basis, g, cm) -> list[SolutionBranch]:
        out = []
        for var, e in zip(self.gens, cm):
            if e:
                eqs = [p.subs({var: self.field.zero}) for p in basis]
                out += self._solve(st.assign(var, self.field.zero, f"{var} = 0",
                                             [p for p in eqs if p]))
        mono = Polynomial.monomial(self.gens, cm, self.field.one, self.field)
        cof = g / mono
        if not cof.is_constant:
            out += self._solve(_State(tuple(basis) + (cof,), st.values, st.pending,
                                      st.conditions + (f"{cof} = 0",)))
        return out

    def _try(self, st, basis, g) -> _Outcome | None:
        vars_ = g.variables()
        if len(vars_) == 1:
            return self._univariate(st, basis, g, vars_[0])
        # linear in some variable with a field coefficient: back-substitute
        for var in vars_:
            parts = g.coefficients_in(var)
            if max(parts) == 1 and parts[1].is_constant:
                expr = -(parts.get(0, g.zero())) / parts[1].constant_value()
                eqs = [p.subs({var: expr}) for p in basis if p is not g]
                nst = _State(tuple(p for p in eqs if p), st.values,
                             st.pending + ((var, expr),), st.conditions)
                return _Outcome(self._solve(nst))
        return None

    def _univariate(self, st, basis, g, var) -> _Outcome | None:
        g = _squarefree(g, var)
        coeffs = _univariate_coeffs(g, var)
        deg = max(coeffs)
        if deg == 1:
            root = -coeffs.get(0, self.field.zero) / coeffs[1]
            return _Outcome(self._substitute(st, basis, var, root, f"{var} = {root}"))
        consts = {e: _const_value(c) for e, c in coeffs.items()}
        if all(c is not None for c in consts.values()):
            roots = _rational_roots(consts)
            if roots and deg > len(roots):
                out = []
                for r in roots:
                    out += self._substitute(st, basis, var, self.field(r), f"{var} = {r}")
                rest = coeffs
                for r in roots:
                    rest, _ = _uni_divide(rest, {1: self.field.one, 0: -self.field(r)})
                cof = _from_coeffs(self.gens, var, rest, self.field)
                out += self._solve(_State(tuple(basis) + (cof,), st.values, st.pending,
                                          st.conditions + (f"{cof} = 0",)))
                return _Outcome(out)
            if roots and deg == len(roots):
                out = []
                for r in roots:
                    out += self._substitute(st, basis, var, self.field(r), f"{var} = {r}")
                return _Outcome(out)
        if deg == 2:
            a, b, c = (coeffs.get(k, self.field.zero) for k in (2, 1, 0))
            disc = b * b - a * c * 4
            root = _field_sqrt(disc, self.field)
            if root is not None:
                out = []
                for s in (1, -1) if disc else (1,):
                    r = (-b + root * s) / (a * 2)
                    out += self._substitute(st, basis, var, r, f"{var} = {r}")
                return _Outcome(out)
            others = [p for p in basis if p is not g]
            if not b and not any(var in p.variables() for p in others):
                rhs = -c / a
                rv = radical_canonicalize(_to_rf(self.field.one, self.field),
                                          _to_rf(rhs, self.field))
                out = []
                for val in (rv, -rv):
                    nst = _State(tuple(others), st.values + ((var, val),), st.pending,
                                 st.conditions + (f"{var}^2 = {rhs}",))
                    out += self._solve(nst) if others else self._finalize(nst, ())
                return _Outcome(out)
        return None

    def _substitute(self, st, basis, var, root, cond) -> list[SolutionBranch]:
        eqs = [p.subs({var: root}) for p in basis]
        eqs = [p for p in eqs if p]
        return self._solve(st.assign(var, root, cond, eqs))

    # leaves
    def _finalize(self, st: _State, residual: tuple, reason: str = "") -> list[SolutionBranch]:
        values: dict = {}
        for var, val in st.values:
            values[var] = val if isinstance(val, RadicalValue) else RadicalValue.exact(
                _to_rf(val, self.field))
        pending_vars = {v for v, _ in st.pending}
        residual_vars = {v for p in residual for v in p.variables()}
        for g in self.gens:
            if g not in values and g not in pending_vars:
                values[g] = FREE
        status, why = (UNRESOLVED, reason) if residual else (RESOLVED, "")
        leftovers = list(residual)
        for var, expr in reversed(st.pending):
            ext = _eval_ext(expr, {k: v for k, v in values.items()
                                   if not isinstance(v, _PendingExpr)})
            rv = ext.as_radical()
            if ext.is_zero():
                values[var] = RadicalValue.exact(_to_rf(self.field.zero, self.field))
            elif rv is not None:
                values[var] = rv
            else:
                values[var] = _PendingExpr(expr)
                leftovers.append(Polynomial.variable(self.gens, var, self.field) - expr)
                status = UNRESOLVED
                free = sorted(ext.symbols)
                why = why or (f"{var} depends on unconstrained {', '.join(free)}"
                              if free else f"{var} needs several independent radicals")
        if status == UNRESOLVED:
            assignment = {g: values[g] for g in self.gens}
            for k in residual_vars:
                if assignment.get(k) is FREE:
                    assignment.pop(k)
            return [SolutionBranch(
                {k: v for k, v in assignment.items() if not isinstance(v, _PendingExpr)},
                st.conditions, UNRESOLVED, tuple(leftovers), why)]
        branch = SolutionBranch({g: values[g] for g in self.gens}, st.conditions)
        if not check_branch(self.polys, branch):
            log.debug("discarding branch failing verification: %s", branch.describe())
            return []
        return [branch]


@dataclass(frozen=True)
class _PendingExpr:
    expr: Polynomial


def _sort_key(b: SolutionBranch):
    return (not b.is_resolved, len(b.free),
            tuple("" if v is FREE else str(v) for v in b.assignment.values()),
            b.key())


def _ideal_generators(b: SolutionBranch, gens, fld) -> list[Polynomial] | None:
    """Generators of the ideal cut out by a branch, when it is expressible
    without radicals."""
    out = list(b.residual)
    for var, val in b.assignment.items():
        if val is FREE:
            continue
        if not val.is_rational:
            return None
        c = val.outer
        if fld.params:
            out.append(Polynomial.variable(gens, var, fld) - c)
        else:
            if not c.is_constant:
                return None
            out.append(Polynomial.variable(gens, var, fld) - c.constant_value())
    return out


def _prune_subsumed(branches: list[SolutionBranch], gens, fld) -> list[SolutionBranch]:
    """Drop branches whose solution set lies inside another branch's."""
    ideals = [_ideal_generators(b, gens, fld) for b in branches]
    bases = [None if i is None else buchberger(i, TermOrder(gens)) if i else None
             for i in ideals]
    keep = []
    for x, bx in enumerate(branches):
        gx = bases[x]
        subsumed = False
        if gx is not None:
            for y, gy_gens in enumerate(ideals):
                if y == x or gy_gens is None:
                    continue
                if all(not normal_form_reduce(p, gx) for p in gy_gens):
                    # x lies in y; on mutual inclusion keep the earlier one
                    mutual = bases[y] is not None and all(
                        not normal_form_reduce(p, bases[y]) for p in ideals[x])
                    if not mutual or y < x:
                        subsumed = True
                        break
        if subsumed:
            log.debug("dropping branch contained in another: %s", bx.describe())
        else:
            keep.append(bx)
    return keep


def factor_split_solve(system, max_pairs: int = DEFAULT_MAX_PAIRS) -> SolutionSet:
    """All branches reachable by lex Groebner triangularization plus
    splitting on monomial factors, rational roots, linear back-substitution
    and quadratic (possibly radical) roots.  Branches whose solution set
    is contained in another branch's are dropped.

    Branches beyond this factoring power are returned UNRESOLVED with the
    residual basis; resolved branches are verified against the input
    system and deduplicated.
    """
    solver = _Solver(system, max_pairs)
    seen: dict = {}
    for b in solver.run():
        seen.setdefault(b.key(), b)
    branches = sorted(seen.values(), key=_sort_key)
    branches = _prune_subsumed(branches, solver.gens, solver.field)
    for k, b in enumerate(branches, 1):
        b.id = f"br{k}"
    return SolutionSet(branches)
