"""Conversions between expression trees and exact polynomial objects."""

from __future__ import annotations

from .arith import (GaussianRational, Polynomial, QQI, RadicalValue, RationalFunction,
                    RationalFunctionField)
from .errors import ReductionError
from .expr import Add, Const, Expr, Func, Mul, Pow, Sym, add, const, func, mul, power, sym


def poly_to_expr(p: Polynomial) -> Expr:
    terms = []
    for mono, c in p.terms.items():
        factors = [power(sym(g), e) for g, e in zip(p.gens, mono) if e]
        terms.append(mul(coeff_to_expr(c), *factors))
    return add(*terms)


def rf_to_expr(r: RationalFunction) -> Expr:
    num = poly_to_expr(r.num)
    if r.den.is_constant:
        return mul(const(GaussianRational(1) / r.den.constant_value()), num)
    return mul(num, power(poly_to_expr(r.den), -1))


def coeff_to_expr(c) -> Expr:
    if isinstance(c, GaussianRational):
        return Const(c)
    if isinstance(c, RationalFunction):
        return rf_to_expr(c)
    if isinstance(c, RadicalValue):
        return radical_to_expr(c)
    return const(c)


def radical_to_expr(r: RadicalValue) -> Expr:
    outer = rf_to_expr(r.outer)
    if r.is_rational:
        return outer
    return mul(const(r.sign), outer, func("sqrt", rf_to_expr(r.radicand)))


def expr_to_poly(e: Expr, gens: tuple[str, ...], field=QQI) -> Polynomial:
    """Convert a polynomial expression in ``gens`` (with parameters of
    ``field`` allowed anywhere, including denominators)."""
    params = getattr(field, "params", ())

    def conv(node: Expr) -> Polynomial:
        if isinstance(node, Const):
            return Polynomial.constant(gens, field(node.value), field)
        if isinstance(node, Sym):
            if node.name in gens:
                return Polynomial.variable(gens, node.name, field)
            if node.name in params:
                return Polynomial.constant(gens, field.parameter(node.name), field)
            raise ReductionError(f"unknown symbol {node.name!r}")
        if isinstance(node, Add):
            out = Polynomial(gens, None, field)
            for a in node.args:
                out = out + conv(a)
            return out
        if isinstance(node, Mul):
            out = Polynomial.constant(gens, field.one, field)
            for a in node.args:
                out = out * conv(a)
            return out
        if isinstance(node, Pow):
            b = conv(node.base)
            if node.exp >= 0:
                return b ** node.exp
            if not b.is_constant or not b:
                raise ReductionError(f"negative power of a non-constant: {node}")
            return Polynomial.constant(gens, field.one / b.constant_value(), field) ** (-node.exp)
        if isinstance(node, Func):
            raise ReductionError(f"non-polynomial function {node.name!r}")
        raise ReductionError(f"unsupported node {node!r}")

    return conv(e)


def coefficient_to_rf(c, params: tuple[str, ...]) -> RationalFunction:
    if isinstance(c, RationalFunction):
        return c
    return RationalFunction.constant(params, GaussianRational.coerce(c))


def param_field(params) -> RationalFunctionField | type(QQI):
    params = tuple(params)
    return RationalFunctionField(params) if params else QQI
