"""Exact arithmetic: Gaussian rationals, sparse polynomials, rational functions
in free parameters, and single-level square-root values.

Rationals are plain :class:`fractions.Fraction` objects.  Everything built on
top of them is immutable and hashable.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import reduce
from typing import Callable, Iterable, Mapping

from .errors import NestedRadicalError

__all__ = [
    "GaussianRational",
    "Polynomial",
    "RationalFunction",
    "RadicalValue",
    "QQI",
    "RationalFunctionField",
    "rat_normalize",
    "gauss_mul",
    "poly_arith",
    "poly_gcd",
    "rf_normalize",
    "radical_canonicalize",
    "radical_square",
]


def rat_normalize(num: int, den: int) -> Fraction:
    """Reduced rational num/den with the sign on the numerator."""
    if den == 0:
        raise ZeroDivisionError("rational with zero denominator")
    return Fraction(num, den)


def _rational_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    n, d = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if n * n == q.numerator and d * d == q.denominator:
        return Fraction(n, d)
    return None


def _square_part(n: int) -> tuple[int, int]:
    """Split |n| = s^2 * f with f square-free; return (s, sign(n) * f)."""
    sign = -1 if n < 0 else 1
    n = abs(n)
    s, f, p = 1, 1, 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
            s *= p
        if n % p == 0:
            n //= p
            f *= p
        p += 1
    return s, sign * f * n


class GaussianRational:
    """Complex number re + im*i with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x)
        if isinstance(x, str):
            return cls(Fraction(x))
        raise TypeError(f"cannot convert {type(x).__name__} to GaussianRational")

    def __add__(self, other):
        if not isinstance(other, GaussianRational):
            if not isinstance(other, (int, Fraction)):
                return NotImplemented
            return GaussianRational(self.re + other, self.im)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        if not isinstance(other, GaussianRational):
            if not isinstance(other, (int, Fraction)):
                return NotImplemented
            return GaussianRational(self.re - other, self.im)
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, GaussianRational):
            if not isinstance(other, (int, Fraction)):
                return NotImplemented
            return GaussianRational(self.re * other, self.im * other)
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return GaussianRational(a * c)
        return GaussianRational(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        n = self.norm()
        if not n:
            raise ZeroDivisionError("inverse of zero")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division by zero")
            return GaussianRational(self.re / other, self.im / other)
        if not isinstance(other, GaussianRational):
            return NotImplemented
        if not other.im:
            return self / other.re
        return self * other.inverse()

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) * self.inverse()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        result, base = GaussianRational(1), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self):
        return hash(self.re) if not self.im else hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    @property
    def is_real(self) -> bool:
        return not self.im

    def is_negative(self) -> bool:
        """Sign convention used for rendering: negative real part, or zero
        real part and negative imaginary part."""
        return self.re < 0 or (not self.re and self.im < 0)

    def sqrt(self) -> "GaussianRational | None":
        """Exact square root in Q(i), or None if there is none."""
        a, b = self.re, self.im
        if not b:
            if a >= 0:
                r = _rational_sqrt(a)
                return None if r is None else GaussianRational(r)
            r = _rational_sqrt(-a)
            return None if r is None else GaussianRational(0, r)
        m = _rational_sqrt(a * a + b * b)
        if m is None:
            return None
        x = _rational_sqrt((a + m) / 2)
        y = _rational_sqrt((m - a) / 2)
        if x is None or y is None:
            return None
        return GaussianRational(x, y if b > 0 else -y)

    def __repr__(self):
        return f"GaussianRational({self})"

    def __str__(self):
        re, im = self.re, self.im
        if not im:
            return str(re)
        imag = "i" if im == 1 else "-i" if im == -1 else f"{im}*i"
        if not re:
            return imag
        sep = "" if imag.startswith("-") else "+"
        return f"{re}{sep}{imag}"


def gauss_mul(a: GaussianRational, b: GaussianRational) -> GaussianRational:
    return a * b


I = GaussianRational(0, 1)


class _GaussianField:
    """Q(i) viewed as a coefficient field."""

    zero = GaussianRational(0)
    one = GaussianRational(1)
    params: tuple[str, ...] = ()

    def __call__(self, x) -> GaussianRational:
        return GaussianRational.coerce(x)

    def is_element(self, x) -> bool:
        return isinstance(x, GaussianRational)

    def to_rf(self, x: GaussianRational) -> "RationalFunction":
        return RationalFunction.constant((), x)

    def __repr__(self):
        return "QQ(i)"


QQI = _GaussianField()


def _mono_mul(a: tuple, b: tuple) -> tuple:
    return tuple([x + y for x, y in zip(a, b)])


def _mono_divides(a: tuple, b: tuple) -> bool:
    return all(x <= y for x, y in zip(a, b))


class Polynomial:
    """Sparse multivariate polynomial over a coefficient field.

    ``gens`` fixes the variable order; exponent tuples compare
    lexicographically with ``gens[0]`` as the most significant variable.
    Coefficients are elements of ``field`` (Q(i) or a rational function
    field); zero coefficients are never stored.
    """

    __slots__ = ("gens", "terms", "field", "_lm")

    def __init__(self, gens: Iterable[str], terms: Mapping[tuple, object] | None = None,
                 field=QQI, *, _clean: bool = True):
        self.gens = tuple(gens)
        self.field = field
        self._lm = None
        if terms is None:
            self.terms = {}
        elif _clean:
            n = len(self.gens)
            clean = {}
            for mono, c in terms.items():
                if len(mono) != n:
                    raise ValueError(f"exponent vector {mono} does not match {self.gens}")
                if not field.is_element(c):
                    c = field(c)
                if c:
                    clean[tuple(mono)] = c
            self.terms = clean
        else:
            self.terms = terms

    # -- construction -----------------------------------------------------

    @classmethod
    def constant(cls, gens, c, field=QQI) -> "Polynomial":
        gens = tuple(gens)
        return cls(gens, {(0,) * len(gens): c}, field)

    @classmethod
    def variable(cls, gens, name: str, field=QQI) -> "Polynomial":
        gens = tuple(gens)
        mono = tuple(1 if g == name else 0 for g in gens)
        if sum(mono) != 1:
            raise ValueError(f"{name!r} is not one of {gens}")
        return cls(gens, {mono: field.one}, field)

    @classmethod
    def monomial(cls, gens, mono: tuple, c, field=QQI) -> "Polynomial":
        return cls(gens, {tuple(mono): c}, field)

    def _new(self, terms) -> "Polynomial":
        return Polynomial(self.gens, terms, self.field, _clean=False)

    def zero(self) -> "Polynomial":
        return self._new({})

    def one(self) -> "Polynomial":
        return self._new({(0,) * len(self.gens): self.field.one})

    # -- predicates -------------------------------------------------------

    def __bool__(self):
        return bool(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self):
        """Coefficient of the constant monomial."""
        return self.terms.get((0,) * len(self.gens), self.field.zero)

    def variables(self) -> tuple[str, ...]:
        used = [False] * len(self.gens)
        for mono in self.terms:
            for k, e in enumerate(mono):
                if e:
                    used[k] = True
        return tuple(g for g, u in zip(self.gens, used) if u)

    def degree(self, var: str | None = None) -> int:
        """Total degree, or degree in ``var``; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        if var is None:
            return max(sum(m) for m in self.terms)
        k = self.gens.index(var)
        return max(m[k] for m in self.terms)

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.gens != self.gens:
                raise ValueError(f"mismatched variable sets {self.gens} vs {other.gens}")
            return other
        return Polynomial.constant(self.gens, self.field(other), self.field)

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        terms = dict(self.terms)
        for m, c in other.terms.items():
            s = terms.get(m)
            if s is None:
                terms[m] = c
            else:
                s = s + c
                if s:
                    terms[m] = s
                else:
                    del terms[m]
        return self._new(terms)

    __radd__ = __add__

    def __neg__(self):
        return self._new({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            try:
                c = self.field(other)
            except TypeError:
                return NotImplemented
            return self.scale(c)
        other = self._coerce(other)
        if len(other.terms) == 1:
            (m, c), = other.terms.items()
            return self.mul_term(m, c)
        terms: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                s = terms.get(m)
                terms[m] = c1 * c2 if s is None else s + c1 * c2
        return self._new({m: c for m, c in terms.items() if c})

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        result, base = self.one(), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def scale(self, c) -> "Polynomial":
        if not c:
            return self.zero()
        return self._new({m: v * c for m, v in self.terms.items()})

    def mul_term(self, mono: tuple, c) -> "Polynomial":
        if not c:
            return self.zero()
        return self._new({_mono_mul(m, mono): v * c for m, v in self.terms.items()})

    def __truediv__(self, other):
        if isinstance(other, Polynomial):
            return divexact(self, other)
        c = self.field(other)
        if not c:
            raise ZeroDivisionError("polynomial division by zero")
        inv = self.field.one / c
        return self.scale(inv)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.gens == other.gens and self.terms == other.terms
        if isinstance(other, (int, Fraction, GaussianRational)) or self.field.is_element(other):
            if not other:
                return not self.terms
            return self.is_constant and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        return hash((self.gens, frozenset(self.terms.items())))

    # -- orderings --------------------------------------------------------

    def leading_monomial(self) -> tuple:
        if self._lm is None:
            if not self.terms:
                raise ValueError("zero polynomial has no leading monomial")
            self._lm = max(self.terms)
        return self._lm

    def leading_coefficient(self):
        return self.terms[self.leading_monomial()]

    def monic(self) -> "Polynomial":
        if not self.terms:
            return self
        lc = self.leading_coefficient()
        if lc == self.field.one:
            return self
        return self.scale(self.field.one / lc)

    # -- structure --------------------------------------------------------

    def coefficients_in(self, var: str) -> dict[int, "Polynomial"]:
        """View as a univariate polynomial in ``var``: degree -> coefficient
        (a polynomial over the same gens not involving ``var``)."""
        k = self.gens.index(var)
        out: dict[int, dict] = {}
        for m, c in self.terms.items():
            e = m[k]
            out.setdefault(e, {})[m[:k] + (0,) + m[k + 1:]] = c
        return {e: self._new(t) for e, t in out.items()}

    def subs(self, values: Mapping[str, "Polynomial | object"]) -> "Polynomial":
        """Substitute polynomials (or field elements) for variables."""
        result = self
        for var, val in values.items():
            if var not in result.gens:
                continue
            val = result._coerce(val)
            parts = result.coefficients_in(var)
            acc = result.zero()
            for e in sorted(parts, reverse=True):
                # Horner would need consecutive degrees; use explicit powers.
                acc = acc + parts[e] * (val ** e)
            result = acc
        return result

    def embed(self, gens: Iterable[str]) -> "Polynomial":
        """Re-express over a different (super)set of variables."""
        gens = tuple(gens)
        if gens == self.gens:
            return self
        index = {g: k for k, g in enumerate(gens)}
        for g in self.variables():
            if g not in index:
                raise ValueError(f"variable {g!r} missing from target {gens}")
        pos = [index.get(g) for g in self.gens]
        terms = {}
        for m, c in self.terms.items():
            new = [0] * len(gens)
            for p, e in zip(pos, m):
                if e:
                    new[p] = e
            terms[tuple(new)] = c
        return Polynomial(gens, terms, self.field, _clean=False)

    def map_coefficients(self, fn: Callable, field) -> "Polynomial":
        return Polynomial(self.gens, {m: fn(c) for m, c in self.terms.items()}, field)

    def derivative(self, var: str) -> "Polynomial":
        k = self.gens.index(var)
        terms = {}
        for m, c in self.terms.items():
            if m[k]:
                terms[m[:k] + (m[k] - 1,) + m[k + 1:]] = c * m[k]
        return self._new(terms)

    def evaluate(self, point: Mapping[str, complex], coeff: Callable = complex) -> complex:
        total = 0j
        for m, c in self.terms.items():
            v = coeff(c)
            for g, e in zip(self.gens, m):
                if e:
                    v *= point[g] ** e
            total += v
        return total

    def content_monomial(self) -> tuple:
        """Largest monomial dividing every term."""
        if not self.terms:
            return (0,) * len(self.gens)
        return tuple(map(min, zip(*self.terms)))

    def sorted_terms(self) -> list[tuple[tuple, object]]:
        return sorted(self.terms.items(), reverse=True)

    # -- rendering --------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono, c in self.sorted_terms():
            factors = []
            for g, e in zip(self.gens, mono):
                if e == 1:
                    factors.append(g)
                elif e:
                    factors.append(f"{g}^{e}")
            parts.append(_render_term(c, factors))
        return _join_terms(parts)

    def __repr__(self):
        return f"Polynomial({self}; {', '.join(self.gens)})"


def _coeff_string(c) -> tuple[bool, str, bool]:
    """(negative, magnitude string, needs parentheses as a factor)."""
    if isinstance(c, GaussianRational):
        neg = c.is_negative()
        mag = -c if neg else c
        s = str(mag)
        return neg, s, bool(mag.re) and bool(mag.im)
    if isinstance(c, RationalFunction):
        if c.is_constant:
            return _coeff_string(c.constant_value())
        neg = c.num.leading_coefficient().is_negative()
        mag = -c if neg else c
        s = str(mag)
        compound = len(mag.num.terms) > 1 or not mag.den.is_constant
        return neg, s, compound
    s = str(c)
    return s.startswith("-"), s.lstrip("-"), False


def _render_term(c, factors: list[str]) -> str:
    neg, mag, compound = _coeff_string(c)
    if not factors:
        body = mag
    elif mag == "1":
        body = "*".join(factors)
    else:
        body = "*".join([f"({mag})" if compound else mag] + factors)
    return f"-{body}" if neg else body


def _join_terms(parts: list[str]) -> str:
    out = parts[0]
    for p in parts[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


def poly_arith(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    if a.gens != b.gens:
        raise ValueError(f"mismatched variable sets {a.gens} vs {b.gens}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown polynomial operation {op!r}")


def divexact(a: Polynomial, b: Polynomial) -> Polynomial:
    """Exact quotient a / b; raises ValueError if b does not divide a."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if b.gens != a.gens:
        raise ValueError(f"mismatched variable sets {a.gens} vs {b.gens}")
    lm_b = b.leading_monomial()
    lc_b = b.terms[lm_b]
    inv = a.field.one / lc_b
    q: dict = {}
    r = a
    while r:
        lm = r.leading_monomial()
        if not _mono_divides(lm_b, lm):
            raise ValueError("polynomial division is not exact")
        mono = tuple(x - y for x, y in zip(lm, lm_b))
        c = r.terms[lm] * inv
        q[mono] = c
        r = r - b.mul_term(mono, c)
    return a._new(q)


def _prem(a: Polynomial, b: Polynomial, var: str) -> Polynomial:
    """Pseudo-remainder of a by b as univariate polynomials in ``var``."""
    db = b.degree(var)
    k = a.gens.index(var)
    lc_b = b.coefficients_in(var)[db]
    r = a
    while r and r.degree(var) >= db:
        dr = r.degree(var)
        lc_r = r.coefficients_in(var)[dr]
        shift = tuple(dr - db if j == k else 0 for j in range(len(a.gens)))
        r = r * lc_b - (b * lc_r).mul_term(shift, a.field.one)
    return r


def _content_in(p: Polynomial, var: str) -> Polynomial:
    parts = p.coefficients_in(var)
    return reduce(poly_gcd, parts.values())


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic greatest common divisor over the coefficient field.

    Recursive primitive-remainder-sequence algorithm: split off contents
    with respect to the first variable present, run Euclid on the
    primitive parts with pseudo-remainders, recombine.
    """
    if a.gens != b.gens:
        raise ValueError(f"mismatched variable sets {a.gens} vs {b.gens}")
    if not a:
        return b.monic()
    if not b:
        return a.monic()
    if a.is_constant or b.is_constant:
        return a.one()
    present = set(a.variables()) | set(b.variables())
    var = next(g for g in a.gens if g in present)
    if a.degree(var) == 0 or b.degree(var) == 0:
        # var appears in only one of them; gcd divides every var-coefficient.
        if a.degree(var) == 0:
            a, b = b, a
        return reduce(poly_gcd, a.coefficients_in(var).values(), b).monic()
    ca, cb = _content_in(a, var), _content_in(b, var)
    pa, pb = divexact(a, ca), divexact(b, cb)
    c = poly_gcd(ca, cb)
    if pa.degree(var) < pb.degree(var):
        pa, pb = pb, pa
    while pb:
        r = _prem(pa, pb, var)
        pa = pb
        if not r:
            break
        if r.degree(var) == 0:
            # primitive parts with a var-free remainder are coprime
            pa = pa.one()
            break
        pb = divexact(r, _content_in(r, var))
    g = pa
    return (c * g).monic()


def poly_sqrt(p: Polynomial) -> Polynomial | None:
    """Exact square root of a polynomial, or None."""
    if not p:
        return p
    lm = p.leading_monomial()
    if any(e % 2 for e in lm):
        return None
    lc = p.terms[lm]
    if isinstance(lc, GaussianRational):
        r = lc.sqrt()
    else:
        return None
    if r is None:
        return None
    s = p._new({tuple(e // 2 for e in lm): r})
    lead2 = s.scale(p.field(2))
    for _ in range(len(p.terms) + 1):
        rem = p - s * s
        if not rem:
            return s
        lm_r = rem.leading_monomial()
        lm_s = s.leading_monomial()
        if not _mono_divides(lm_s, lm_r):
            return None
        mono = tuple(x - y for x, y in zip(lm_r, lm_s))
        t = p._new({mono: rem.terms[lm_r] / lead2.terms[lm_s]})
        if t.leading_monomial() >= lm_s:
            return None
        s = s + t
    return None


class RationalFunction:
    """Quotient of two parameter polynomials over Q(i).

    Always stored reduced: gcd(num, den) = 1 and den has leading
    coefficient 1.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial | None = None, *, reduced: bool = False):
        if den is None:
            den = num.one()
        if num.gens != den.gens:
            raise ValueError(f"mismatched variable sets {num.gens} vs {den.gens}")
        if not den:
            raise ZeroDivisionError("rational function with zero denominator")
        if not reduced:
            num, den = _rf_reduce(num, den)
        self.num = num
        self.den = den

    @classmethod
    def constant(cls, gens, c) -> "RationalFunction":
        p = Polynomial.constant(gens, GaussianRational.coerce(c))
        return cls(p, p.one(), reduced=True)

    @classmethod
    def parameter(cls, gens, name: str) -> "RationalFunction":
        p = Polynomial.variable(gens, name)
        return cls(p, p.one(), reduced=True)

    @property
    def gens(self) -> tuple[str, ...]:
        return self.num.gens

    @property
    def is_constant(self) -> bool:
        return self.num.is_constant and self.den.is_constant

    def constant_value(self) -> GaussianRational:
        return self.num.constant_value() / self.den.constant_value()

    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            if other.gens != self.gens:
                raise ValueError(f"mismatched variable sets {self.gens} vs {other.gens}")
            return other
        if isinstance(other, Polynomial):
            return RationalFunction(other, other.one(), reduced=True)
        return RationalFunction.constant(self.gens, GaussianRational.coerce(other))

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, reduced=True)

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if self.den.is_constant and other.den.is_constant:
            return RationalFunction(self.num * other.num, self.den.one(), reduced=True)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if not self.num:
            raise ZeroDivisionError("inverse of zero rational function")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return RationalFunction(self.num ** e, self.den ** e, reduced=True)

    def __eq__(self, other):
        if isinstance(other, RationalFunction):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self.den.is_constant and self.num == other
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self):
        return bool(self.num)

    def evaluate(self, point: Mapping[str, complex]) -> complex:
        d = self.den.evaluate(point)
        if d == 0:
            raise ZeroDivisionError("rational function pole")
        return self.num.evaluate(point) / d

    def __str__(self):
        if self.den.is_constant:
            return str(self.num)
        n = str(self.num)
        d = str(self.den)
        if len(self.num.terms) > 1:
            n = f"({n})"
        if len(self.den.terms) > 1:
            d = f"({d})"
        return f"{n}/{d}"

    def __repr__(self):
        return f"RationalFunction({self})"


def _rf_reduce(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
    if not num:
        return num, den.one()
    if not den.is_constant:
        g = poly_gcd(num, den)
        if not g.is_constant:
            num, den = divexact(num, g), divexact(den, g)
    lc = den.leading_coefficient()
    if lc != 1:
        inv = GaussianRational(1) / lc
        num, den = num.scale(inv), den.scale(inv)
    return num, den


def rf_normalize(num: Polynomial, den: Polynomial) -> RationalFunction:
    return RationalFunction(num, den)


class RationalFunctionField:
    """Q(i)(p1, ..., pk): coefficient field with free parameters."""

    def __init__(self, params: Iterable[str]):
        self.params = tuple(params)
        self.zero = RationalFunction.constant(self.params, 0)
        self.one = RationalFunction.constant(self.params, 1)

    def __call__(self, x) -> RationalFunction:
        if isinstance(x, RationalFunction):
            if x.gens != self.params:
                raise ValueError(f"rational function over {x.gens}, expected {self.params}")
            return x
        if isinstance(x, Polynomial):
            return RationalFunction(x.embed(self.params), None, reduced=True)
        return RationalFunction.constant(self.params, GaussianRational.coerce(x))

    def is_element(self, x) -> bool:
        return isinstance(x, RationalFunction) and x.gens == self.params

    def parameter(self, name: str) -> RationalFunction:
        return RationalFunction.parameter(self.params, name)

    def to_rf(self, x: RationalFunction) -> RationalFunction:
        return x

    def __eq__(self, other):
        return isinstance(other, RationalFunctionField) and other.params == self.params

    def __hash__(self):
        return hash(("RF", self.params))

    def __repr__(self):
        return f"QQ(i)({', '.join(self.params)})"


def coefficient_field(params: Iterable[str]):
    """Q(i) when there are no parameters, otherwise Q(i)(params)."""
    params = tuple(params)
    return RationalFunctionField(params) if params else QQI


# -- radicals ---------------------------------------------------------------


def _as_rf(x, gens) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, Polynomial):
        return RationalFunction(x)
    return RationalFunction.constant(gens, GaussianRational.coerce(x))


def _sign_normal(rf: RationalFunction) -> bool:
    """True if ``rf`` is in its sign-normal form (leading coeff 'positive')."""
    return not rf or not rf.num.leading_coefficient().is_negative()


class RadicalValue:
    """Value sign * outer * sqrt(radicand); radicand 1 means radical-free."""

    __slots__ = ("outer", "radicand", "sign")

    def __init__(self, outer: RationalFunction, radicand: RationalFunction, sign: int = 1):
        if isinstance(outer, RadicalValue) or isinstance(radicand, RadicalValue):
            raise NestedRadicalError("nested radicals are not supported")
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        self.outer = outer
        self.radicand = radicand
        self.sign = sign

    @classmethod
    def exact(cls, value: RationalFunction) -> "RadicalValue":
        return radical_canonicalize(value, value._coerce(1))

    @property
    def gens(self):
        return self.outer.gens

    @property
    def is_rational(self) -> bool:
        return self.radicand == 1

    def key(self) -> tuple:
        return (self.sign, str(self.outer), str(self.radicand))

    def __eq__(self, other):
        if not isinstance(other, RadicalValue):
            return NotImplemented
        return (self.sign == other.sign and self.outer == other.outer
                and self.radicand == other.radicand)

    def __hash__(self):
        return hash((self.sign, self.outer, self.radicand))

    def __neg__(self):
        if self.is_rational:
            return RadicalValue(-self.outer, self.radicand, 1)
        return RadicalValue(self.outer, self.radicand, -self.sign)

    def evaluate(self, point: Mapping[str, complex]) -> complex:
        val = self.sign * self.outer.evaluate(point)
        if self.is_rational:
            return val
        return val * cmath.sqrt(self.radicand.evaluate(point))

    def __str__(self):
        if self.is_rational:
            return str(self.outer)
        sign = "-" if self.sign < 0 else ""
        if self.outer == 1:
            return f"{sign}sqrt({self.radicand})"
        out = str(self.outer)
        if len(self.outer.num.terms) > 1 and self.outer.den.is_constant:
            out = f"({out})"
        return f"{sign}{out}*sqrt({self.radicand})"

    def __repr__(self):
        return f"RadicalValue({self})"


def radical_canonicalize(outer, radicand, sign: int = 1) -> RadicalValue:
    """Canonical sign * outer * sqrt(radicand).

    The radicand is made denominator-free (sqrt(p/q) = sqrt(p*q)/q), its
    numerical content square-free, and square monomial/polynomial factors
    move into the outer coefficient.  The outer coefficient is kept with a
    non-negative leading coefficient; the sign label carries the rest.
    """
    if isinstance(outer, RadicalValue) or isinstance(radicand, RadicalValue):
        raise NestedRadicalError("nested radicals are not supported")
    gens = (outer.gens if isinstance(outer, (RationalFunction, Polynomial))
            else radicand.gens if isinstance(radicand, (RationalFunction, Polynomial)) else ())
    outer = _as_rf(outer, gens)
    radicand = _as_rf(radicand, gens)
    one = outer._coerce(1)
    if not outer or not radicand:
        return RadicalValue(outer._coerce(0), one, 1)

    # sqrt(p/q) = sqrt(p*q)/q
    if not radicand.den.is_constant or radicand.den != 1:
        outer = outer / RationalFunction(radicand.den)
        rad = radicand.num * radicand.den
    else:
        rad = radicand.num

    # square monomial factors
    cm = rad.content_monomial()
    half = tuple(e // 2 for e in cm)
    if any(half):
        outer = outer * RationalFunction(Polynomial.monomial(rad.gens, half, 1))
        rad = divexact(rad, Polynomial.monomial(rad.gens, tuple(2 * h for h in half), 1))

    # numerical content
    coeffs = list(rad.terms.values())
    if all(c.is_real for c in coeffs):
        nums = [c.re.numerator for c in coeffs]
        dens = [c.re.denominator for c in coeffs]
        g = reduce(math.gcd, nums)
        l = reduce(lambda x, y: x * y // math.gcd(x, y), dens)
        content = Fraction(g, l)
        if rad.leading_coefficient().re < 0:
            content = -content
        prim = rad.scale(GaussianRational(1 / content))
        # content = n/d ; sqrt(n/d) = sqrt(n*d)/d
        n, d = content.numerator, content.denominator
        s, f = _square_part(n * d)
        outer = outer * GaussianRational(Fraction(s, d))
        rad = prim.scale(GaussianRational(f))
        content_part = GaussianRational(f)
    else:
        lc = rad.leading_coefficient()
        prim = rad.monic()
        r = lc.sqrt()
        if r is not None:
            outer = outer * r
            rad = prim
            content_part = GaussianRational(1)
        else:
            content_part = lc

    # perfect-square primitive part
    if not prim.is_constant:
        root = poly_sqrt(prim)
        if root is not None:
            outer = outer * RationalFunction(root)
            rad = Polynomial.constant(rad.gens, content_part)

    if rad.is_constant:
        c = rad.constant_value()
        r = c.sqrt()
        if r is not None:
            outer = outer * r
            rad = rad.one()

    radicand = RationalFunction(rad, rad.one(), reduced=True)
    if radicand == 1:
        return RadicalValue(outer * sign, radicand, 1)
    if not _sign_normal(outer):
        outer, sign = -outer, -sign
    return RadicalValue(outer, radicand, sign)


def radical_square(r: RadicalValue) -> RationalFunction:
    return r.outer * r.outer * r.radicand
