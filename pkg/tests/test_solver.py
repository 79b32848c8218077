import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from helpers import COMPLEX_POINT, REAL_POINT, RD_PARAMS, pipeline
from sgexpand.arith import (GaussianRational, Polynomial, RationalFunctionField,
                            radical_canonicalize, radical_square)
from sgexpand.errors import NestedRadicalError, SolverCapExceeded
from sgexpand.groebner import buchberger
from sgexpand.solver import (FREE, UNRESOLVED, SolutionBranch, check_branch,
                             factor_split_solve)

F = RationalFunctionField(RD_PARAMS)
al, be, ga = (F.parameter(p) for p in RD_PARAMS)


def rat(x):
    return radical_canonicalize(x, 1)


def values(branch):
    return {k: ("FREE" if v is FREE else str(v)) for k, v in branch.assignment.items()}


@pytest.fixture(scope="module")
def ytsf():
    system = pipeline("ytsf")[4]
    return system, factor_split_solve(system)


@pytest.fixture(scope="module")
def rd():
    system = pipeline("rd")[4]
    return system, factor_split_solve(system)


YTSF_CASES = [
    {"v": "-7/4", "A0": "2", "B1": "0", "A1": "0", "B2": "0", "A2": "-2"},
    {"v": "1/4", "A0": "2/3", "B1": "0", "A1": "0", "B2": "0", "A2": "-2"},
    {"v": "-1", "A0": "1", "B1": "0", "A1": "0", "B2": "i", "A2": "-1"},
    {"v": "-1", "A0": "1", "B1": "0", "A1": "0", "B2": "-i", "A2": "-1"},
    {"v": "-1/2", "A0": "2/3", "B1": "0", "A1": "0", "B2": "i", "A2": "-1"},
    {"v": "-1/2", "A0": "2/3", "B1": "0", "A1": "0", "B2": "-i", "A2": "-1"},
]


def test_ytsf_branches(ytsf):
    _, sols = ytsf
    found = [values(b) for b in sols.resolved]
    for case in YTSF_CASES:
        assert case in found
    zero = {"A0": "0", "B1": "0", "A1": "0", "B2": "0", "A2": "0", "v": "FREE"}
    assert zero in found
    assert [b.id for b in sols] == [f"br{k}" for k in range(1, len(sols) + 1)]
    # the only leftover is the constant family A0 = -(4v+3)/3
    (un,) = sols.unresolved
    assert un.status == UNRESOLVED and un.assignment["v"] is FREE
    assert [str(p) for p in un.residual] == ["A0 + 4/3*v + 1"]


def _rd_case(b):
    sq = {k: radical_square(v) for k, v in b.assignment.items() if v is not FREE}
    z = F.zero
    if sq["A0"] == z and sq["B1"] == z and sq["A1"] == -be / ga and sq["v"] == (be - 2 * al) / 2:
        return 1
    if sq["A0"] == z and sq["A1"] == z and sq["B1"] == -2 * be / ga and sq["v"] == -be - al:
        return 2
    if (sq["A0"] == z and sq["A1"] == -be / ga and sq["B1"] == be / ga
            and sq["v"] == 2 * be - al):
        return 3
    return None


def test_rd_branches(rd):
    _, sols = rd
    cases = {}
    for b in sols.resolved:
        cases.setdefault(_rd_case(b), []).append(b)
    assert len(cases[1]) == 4 and len(cases[2]) == 4 and len(cases[3]) == 8
    for k in (1, 2, 3):
        signs = {tuple(b.assignment[g].sign for g in ("B1", "A1", "v")
                       if not b.assignment[g].is_rational) for b in cases[k]}
        assert len(signs) == len(cases[k])
    zero = [b for b in cases[None] if all(v is FREE or not radical_square(v) for v in
                                          b.assignment.values())]
    assert len(zero) == 1 and zero[0].assignment["v"] is FREE
    assert not sols.unresolved


def test_single_linear_equation():
    x = Polynomial.variable(("x",), "x")
    sols = factor_split_solve([x - 1])
    assert len(sols) == 1
    (b,) = sols
    assert b.is_resolved and not b.free and b.assignment == {"x": rat(1)}


def test_inconsistent_system_has_no_branches():
    x = Polynomial.variable(("x",), "x")
    assert len(factor_split_solve([x - 1, x - 2])) == 0


def test_cap_error():
    with pytest.raises(SolverCapExceeded):
        factor_split_solve(pipeline("ytsf")[4], max_pairs=2)


def _ytsf_case1():
    return SolutionBranch({"A0": rat(2), "B1": rat(0), "A1": rat(0), "B2": rat(0),
                           "A2": rat(-2), "v": rat(Fraction(-7, 4))})


def test_check_branch_examples(ytsf):
    system, _ = ytsf
    b = _ytsf_case1()
    assert check_branch(system, b)
    bad = dict(b.assignment, A0=rat(3))
    assert not check_branch(system, SolutionBranch(bad))


def test_check_branch_rd_case3(rd):
    system, _ = rd
    b = SolutionBranch({"A0": rat(0), "B1": radical_canonicalize(F.one, be / ga),
                        "A1": radical_canonicalize(F.one, -be / ga),
                        "v": radical_canonicalize(F.one, 2 * be - al)})
    assert check_branch(system, b)
    flipped = dict(b.assignment, v=radical_canonicalize(F.one, 2 * be + al))
    assert not check_branch(system, SolutionBranch(flipped))


def test_check_branch_rejects_unresolved_and_nested(ytsf):
    system, sols = ytsf
    with pytest.raises(ValueError):
        check_branch(system, next(iter(sols.unresolved)))
    nested = radical_canonicalize(1, 2)
    nested = type(nested).__new__(type(nested))
    object.__setattr__(nested, "outer", radical_canonicalize(1, 2))
    object.__setattr__(nested, "radicand", rat(3).outer)
    object.__setattr__(nested, "sign", 1)
    b = dict(_ytsf_case1().assignment, A0=nested)
    with pytest.raises(NestedRadicalError):
        check_branch(system, SolutionBranch(b))


def _numeric(branch, params, free_value=0.37 + 0.11j):
    out = {}
    for k, v in branch.assignment.items():
        out[k] = free_value if v is FREE else v.evaluate(params)
    return dict(params, **out)


def _rf_eval(params):
    return lambda c: c.evaluate(params) if hasattr(c, "den") else complex(c)


@pytest.mark.parametrize("which, points", [("ytsf", [{}]), ("rd", [REAL_POINT, COMPLEX_POINT])])
def test_ideal_membership_soundness(which, points, ytsf, rd):
    system, sols = ytsf if which == "ytsf" else rd
    basis = buchberger(system)
    for b in sols.resolved:
        assert check_branch(system, b)
        for pt in points:
            env = _numeric(b, {k: complex(v) for k, v in pt.items()})
            for g in basis:
                assert abs(g.evaluate(env, _rf_eval(env))) < 1e-9, (b.id, str(g))


def test_rd_sign_symmetry(rd):
    _, sols = rd

    def key(assign):
        return tuple(sorted((k, "FREE" if v is FREE else str(v)) for k, v in assign.items()))

    def flip(assign, names):
        return {k: (v if v is FREE or k not in names else -v) for k, v in assign.items()}

    have = {key(b.assignment) for b in sols.resolved}
    for b in sols.resolved:
        for names in (("v",), ("B1",), ("A0", "B1", "A1")):
            assert key(flip(b.assignment, names)) in have


# -- completeness against an enumeration oracle ----------------------------------

GENS = ("x", "y", "z")
VALUES = [GaussianRational(a) for a in (-2, -1, 0, 1, 2)] + [GaussianRational(0, 1),
                                                              GaussianRational(Fraction(1, 2))]


def _var(n):
    return Polynomial.variable(GENS, n)


def _const(c):
    return Polynomial.constant(GENS, c)


def _linear(kind, a, b, c):
    """x_a - c, x_a - x_b, or x_a + x_b - c."""
    if kind == 0 or a == b:
        return _var(GENS[a]) - _const(c)
    if kind == 1:
        return _var(GENS[a]) - _var(GENS[b])
    return _var(GENS[a]) + _var(GENS[b]) - _const(c)


factor = st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2),
                   st.sampled_from(VALUES))
equation = st.tuples(factor, factor)


def _exact(p, env):
    total = GaussianRational(0)
    for m, c in p.terms.items():
        term = c
        for g, e in zip(p.gens, m):
            term = term * env[g] ** e
        total = total + term
    return total


def _solve_linear(rows):
    """Unique solution of sum_j a_j x_j = b by Gauss-Jordan elimination, else None."""
    rows = [list(r) for r in rows]
    n = len(GENS)
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if piv is None:
            return None
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][col].inverse()
        rows[r] = [a * inv for a in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        r += 1
    if any(row[n] for row in rows[r:]):
        return None
    return tuple(rows[i][n] for i in range(n))


def _row(lin):
    coeffs = [lin.terms.get(tuple(int(k == j) for k in range(3)), GaussianRational(0))
              for j in range(3)]
    return coeffs + [-lin.terms.get((0, 0, 0), GaussianRational(0))]


def _candidate_points(factors, system):
    """Isolated roots: choose one linear factor per equation and solve."""
    pts = set()
    for choice in itertools.product(*factors):
        pt = _solve_linear([_row(lin) for lin in choice])
        if pt is not None:
            assert all(not _exact(p, dict(zip(GENS, pt))) for p in system)
            pts.add(pt)
    return pts


def _covers(branch, point):
    env = dict(zip(GENS, point))
    for k, v in branch.assignment.items():
        if v is FREE:
            continue
        if abs(v.evaluate({}) - complex(env[k].re, env[k].im)) > 1e-12:
            return False
    return all(not _exact(p, env) for p in branch.residual)


@settings(max_examples=100, deadline=None)
@given(st.lists(equation, min_size=3, max_size=3))
def test_completeness_against_enumeration(eqs):
    factors = [(_linear(*f1[:3], f1[3]), _linear(*f2[:3], f2[3])) for f1, f2 in eqs]
    system = [a * b for a, b in factors]
    sols = factor_split_solve(system)
    rng = random.Random(1)
    # soundness: resolved branches zero the system for arbitrary FREE values
    for b in sols.resolved:
        for _ in range(3):
            env = {k: (complex(rng.uniform(-2, 2), rng.uniform(-2, 2)) if v is FREE
                       else v.evaluate({})) for k, v in b.assignment.items()}
            for p in system:
                assert abs(p.evaluate(env)) < 1e-9
    # completeness: every enumerated root lies on some branch
    for pt in _candidate_points(factors, system):
        assert any(_covers(b, pt) for b in sols), pt
