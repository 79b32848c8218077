"""Trig-polynomial ring in s = sin(w), c = cos(w) with s^2 + c^2 = 1 and the
derivation w' = sin(w); ansatz construction and coefficient extraction."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from math import comb
from typing import Mapping

from .arith import Polynomial, QQI
from .reduction import DerivPoly

Monomial = tuple  # (a, b) for s^a * c^b


class TrigPoly:
    """Sparse map (a, b) -> Polynomial coefficient of s^a c^b.

    Products may temporarily carry any s-degree; :meth:`normalize` rewrites
    s^2 = 1 - c^2 so that a <= 1.
    """

    __slots__ = ("coeffs", "gens", "field")

    def __init__(self, coeffs: Mapping[Monomial, Polynomial], gens, field=QQI):
        self.gens = tuple(gens)
        self.field = field
        self.coeffs = {m: c for m, c in coeffs.items() if c}

    def _zero_coeff(self) -> Polynomial:
        return Polynomial(self.gens, None, self.field)

    def _new(self, coeffs) -> "TrigPoly":
        return TrigPoly(coeffs, self.gens, self.field)

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out[m] + c if m in out else c
        return self._new(out)

    def __neg__(self):
        return self._new({m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other) -> "TrigPoly":
        if isinstance(other, Polynomial):
            return self._new({m: c * other for m, c in self.coeffs.items()})
        out: dict = {}
        for (a1, b1), c1 in self.coeffs.items():
            for (a2, b2), c2 in other.coeffs.items():
                m = (a1 + a2, b1 + b2)
                out[m] = out[m] + c1 * c2 if m in out else c1 * c2
        return self._new(out).normalize()

    def __pow__(self, e: int) -> "TrigPoly":
        result = self._new({(0, 0): Polynomial.constant(self.gens, self.field.one, self.field)})
        for _ in range(e):
            result = result * self
        return result

    def __eq__(self, other):
        if not isinstance(other, TrigPoly):
            return NotImplemented
        return self.normalize().coeffs == other.normalize().coeffs

    def __bool__(self):
        return bool(self.coeffs)

    @property
    def is_normal(self) -> bool:
        return all(a <= 1 for a, _ in self.coeffs)

    def normalize(self) -> "TrigPoly":
        if self.is_normal:
            return self
        out: dict = {}
        for (a, b), c in self.coeffs.items():
            q, r = divmod(a, 2)
            # s^a c^b = s^r (1 - c^2)^q c^b
            for k in range(q + 1):
                m = (r, b + 2 * k)
                term = c * ((-1) ** k * comb(q, k))
                out[m] = out[m] + term if m in out else term
        return self._new(out)

    def diff(self) -> "TrigPoly":
        """d/d(eta) with s' = s*c and c' = -s^2."""
        out: dict = {}
        for (a, b), c in self.coeffs.items():
            if a:
                m = (a, b + 1)
                t = c * a
                out[m] = out[m] + t if m in out else t
            if b:
                m = (a + 2, b - 1)
                t = c * (-b)
                out[m] = out[m] + t if m in out else t
        return self._new(out).normalize()

    def evaluate(self, s: complex, c: complex, point: Mapping[str, complex] | None = None,
                 coeff=complex) -> complex:
        point = point or {}
        total = 0j
        for (a, b), p in self.coeffs.items():
            total += p.evaluate(point, coeff) * s ** a * c ** b
        return total

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for (a, b) in sorted(self.coeffs, key=lambda m: (m[1], m[0])):
            parts.append(f"({self.coeffs[(a, b)]})*{monomial_label((a, b))}")
        return " + ".join(parts)

    def __repr__(self):
        return f"TrigPoly({self})"


def trig_normalize(p: TrigPoly) -> TrigPoly:
    return p.normalize()


def trig_diff(p: TrigPoly) -> TrigPoly:
    return p.normalize().diff()


def monomial_label(m: Monomial) -> str:
    a, b = m
    parts = []
    if a:
        parts.append("sin" if a == 1 else f"sin^{a}")
    if b:
        parts.append("cos" if b == 1 else f"cos^{b}")
    return "*".join(parts) or "1"


def unknown_names(n: int, speed: str = "v") -> tuple[str, ...]:
    """Lex order of the unknowns, largest first: A0, B1, A1, ..., Bn, An, v."""
    names = ["A0"]
    for j in range(1, n + 1):
        names += [f"B{j}", f"A{j}"]
    return tuple(names) + (speed,)


@dataclass
class Ansatz:
    """U = A0 + sum_j c^(j-1) (Bj s + Aj c)."""

    n: int
    gens: tuple
    body: TrigPoly
    field: object = QQI
    _derivs: list = dataclasses.field(default_factory=list, repr=False)

    def derivative(self, k: int) -> TrigPoly:
        if not self._derivs:
            self._derivs.append(self.body)
        while len(self._derivs) <= k:
            self._derivs.append(self._derivs[-1].diff())
        return self._derivs[k]

    @property
    def unknowns(self) -> tuple[str, ...]:
        return self.gens[:-1]

    @property
    def speed(self) -> str:
        return self.gens[-1]


def build_ansatz(n: int, fld=QQI, speed: str = "v") -> Ansatz:
    if n < 1:
        raise ValueError("ansatz order n must be at least 1")
    gens = unknown_names(n, speed)

    def var(name):
        return Polynomial.variable(gens, name, fld)

    coeffs = {(0, 0): var("A0")}
    for j in range(1, n + 1):
        coeffs[(1, j - 1)] = var(f"B{j}")
        coeffs[(0, j)] = var(f"A{j}")
    return Ansatz(n, gens, TrigPoly(coeffs, gens, fld), fld)


def substitute_ansatz(ode: DerivPoly, ansatz: Ansatz) -> TrigPoly:
    """Replace each V^(k) in ``ode`` by the k-th derivative of the body."""
    gens = ansatz.gens
    one = TrigPoly({(0, 0): Polynomial.constant(gens, ansatz.field.one, ansatz.field)},
                   gens, ansatz.field)
    total = TrigPoly({}, gens, ansatz.field)
    for key, c in ode.terms.items():
        term = one * c.embed(gens)
        for k, m in key:
            term = term * (ansatz.derivative(k) ** m)
        total = total + term
    return total.normalize()


@dataclass(frozen=True)
class PolySystem:
    """Polynomial equations (each = 0) tagged with their source monomial."""

    equations: tuple  # ((tag, Polynomial), ...)
    gens: tuple
    field: object = QQI

    @property
    def polys(self) -> list[Polynomial]:
        return [p for _, p in self.equations]

    @property
    def tags(self) -> list[Monomial]:
        return [t for t, _ in self.equations]

    def __len__(self):
        return len(self.equations)

    def lines(self) -> list[str]:
        return [f"{monomial_label(t)}: {p} = 0" for t, p in self.equations]

    @classmethod
    def from_polys(cls, polys, gens=None, field=None) -> "PolySystem":
        polys = list(polys)
        gens = gens or polys[0].gens
        field = field or polys[0].field
        return cls(tuple((("eq", k), p) for k, p in enumerate(polys)), tuple(gens), field)


def extract_coefficient_system(p: TrigPoly) -> PolySystem:
    """One equation per monomial of the normal form, ordered by cos-degree
    then sin-degree."""
    p = p.normalize()
    tags = sorted(p.coeffs, key=lambda m: (m[1], m[0]))
    return PolySystem(tuple((t, p.coeffs[t]) for t in tags), p.gens, p.field)
