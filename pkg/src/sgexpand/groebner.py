"""Buchberger's algorithm over a coefficient field with lex term order."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .arith import Polynomial
from .errors import SolverCapExceeded

DEFAULT_MAX_PAIRS = 10_000


@dataclass(frozen=True)
class TermOrder:
    """Lexicographic order; ``variables[0]`` is the largest variable."""

    variables: tuple

    def adapt(self, p: Polynomial) -> Polynomial:
        return p.embed(self.variables)


@dataclass(frozen=True)
class GroebnerBasis:
    polys: tuple
    order: TermOrder

    def __iter__(self):
        return iter(self.polys)

    def __len__(self):
        return len(self.polys)

    @property
    def is_unit(self) -> bool:
        return len(self.polys) == 1 and self.polys[0].is_constant and bool(self.polys[0])


def _lcm(a: tuple, b: tuple) -> tuple:
    return tuple(map(max, a, b))


def _divides(a: tuple, b: tuple) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _coprime(a: tuple, b: tuple) -> bool:
    return all(not (x and y) for x, y in zip(a, b))


def s_polynomial(f: Polynomial, g: Polynomial, order: TermOrder | None = None) -> Polynomial:
    if order is not None:
        f, g = order.adapt(f), order.adapt(g)
    lf, lg = f.leading_monomial(), g.leading_monomial()
    lcm = _lcm(lf, lg)
    one = f.field.one
    a = f.mul_term(tuple(x - y for x, y in zip(lcm, lf)), one / f.terms[lf])
    b = g.mul_term(tuple(x - y for x, y in zip(lcm, lg)), one / g.terms[lg])
    return a - b


def _reduce(p: Polynomial, basis: Sequence[tuple[tuple, object, Polynomial]]) -> Polynomial:
    """Full reduction; ``basis`` holds (leading monomial, 1/lc, poly)."""
    remainder: dict = {}
    while p:
        lm = p.leading_monomial()
        c = p.terms[lm]
        for blm, inv, g in basis:
            if _divides(blm, lm):
                mono = tuple(x - y for x, y in zip(lm, blm))
                p = p - g.mul_term(mono, c * inv)
                break
        else:
            remainder[lm] = c
            p = p._new({m: v for m, v in p.terms.items() if m != lm})
    return p._new(remainder)


def _prepared(basis: Sequence[Polynomial]):
    out = []
    for g in basis:
        lm = g.leading_monomial()
        out.append((lm, g.field.one / g.terms[lm], g))
    return out


def normal_form_reduce(p: Polynomial, basis) -> Polynomial:
    polys = list(basis.polys if isinstance(basis, GroebnerBasis) else basis)
    if isinstance(basis, GroebnerBasis):
        p = basis.order.adapt(p)
    return _reduce(p, _prepared([g for g in polys if g]))


def buchberger(system, order: TermOrder | None = None,
               max_pairs: int = DEFAULT_MAX_PAIRS) -> GroebnerBasis:
    """Reduced Groebner basis (monic, inter-reduced, sorted by leading
    monomial ascending).

    ``system`` is a sequence of polynomials or a PolySystem.  Raises
    SolverCapExceeded after ``max_pairs`` critical pairs.
    """
    polys = list(getattr(system, "polys", system))
    if order is None:
        if not polys:
            return GroebnerBasis((), TermOrder(()))
        order = TermOrder(polys[0].gens)
    polys = [order.adapt(p).monic() for p in polys if p]
    if not polys:
        return GroebnerBasis((), order)

    G: list[Polynomial] = []
    pairs: set[tuple[int, int]] = set()
    for f in polys:
        f = _reduce(f, _prepared(G)) if G else f
        if f:
            if f.is_constant:
                return GroebnerBasis((f.one(),), order)
            G.append(f.monic())
            pairs |= {(i, len(G) - 1) for i in range(len(G) - 1)}

    processed = 0
    done: set[tuple[int, int]] = set()
    while pairs:
        pair = min(pairs, key=lambda ij: (sum(_lcm(G[ij[0]].leading_monomial(),
                                                   G[ij[1]].leading_monomial())),
                                          _lcm(G[ij[0]].leading_monomial(),
                                               G[ij[1]].leading_monomial()), ij))
        pairs.discard(pair)
        i, j = pair
        done.add(pair)
        li, lj = G[i].leading_monomial(), G[j].leading_monomial()
        if _coprime(li, lj):
            continue
        lcm = _lcm(li, lj)
        if any(k not in pair and _divides(G[k].leading_monomial(), lcm)
               and (min(i, k), max(i, k)) not in pairs and (min(j, k), max(j, k)) not in pairs
               for k in range(len(G))):
            continue
        processed += 1
        if processed > max_pairs:
            raise SolverCapExceeded(f"Buchberger exceeded {max_pairs} critical pairs")
        h = _reduce(s_polynomial(G[i], G[j]), _prepared(G))
        if h:
            if h.is_constant:
                return GroebnerBasis((h.one(),), order)
            G.append(h.monic())
            n = len(G) - 1
            pairs |= {(k, n) for k in range(n)}

    return GroebnerBasis(tuple(_interreduce(G)), order)


def _interreduce(G: list[Polynomial]) -> list[Polynomial]:
    minimal: list[Polynomial] = []
    for g in sorted(G, key=lambda p: p.leading_monomial()):
        if not any(_divides(h.leading_monomial(), g.leading_monomial()) for h in minimal):
            minimal.append(g)
    reduced = []
    for k, g in enumerate(minimal):
        others = minimal[:k] + minimal[k + 1:]
        reduced.append(_reduce(g, _prepared(others)).monic())
    return sorted(reduced, key=lambda p: p.leading_monomial())


def is_groebner(basis) -> bool:
    """Buchberger criterion: every S-polynomial reduces to zero."""
    G = [g for g in getattr(basis, "polys", basis) if g]
    prep = _prepared(G)
    for i in range(len(G)):
        for j in range(i + 1, len(G)):
            if _reduce(s_polynomial(G[i], G[j]), prep):
                return False
    return True
