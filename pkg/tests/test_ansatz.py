import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from helpers import reference_system, pipeline
from sgexpand.ansatz import (TrigPoly, build_ansatz, extract_coefficient_system,
                             substitute_ansatz, trig_diff, trig_normalize, unknown_names)
from sgexpand.arith import GaussianRational, Polynomial, QQI
from sgexpand.reduction import DerivPoly

GENS = unknown_names(2)


def var(name, gens=GENS):
    return Polynomial.variable(gens, name)


def const_poly(c, gens=("p",)):
    if not isinstance(c, GaussianRational):
        c = GaussianRational(c)
    return Polynomial.constant(gens, c)


def tp(coeffs, gens=GENS):
    return TrigPoly(coeffs, gens)


def test_build_ansatz_shapes():
    a2 = build_ansatz(2)
    assert a2.gens == ("A0", "B1", "A1", "B2", "A2", "v")
    assert a2.body.coeffs == {(0, 0): var("A0"), (1, 0): var("B1"), (0, 1): var("A1"),
                              (1, 1): var("B2"), (0, 2): var("A2")}
    a1 = build_ansatz(1)
    assert set(a1.body.coeffs) == {(0, 0), (1, 0), (0, 1)}
    a3 = build_ansatz(3)
    assert set(a3.body.coeffs) - set(a2.body.coeffs) == {(1, 2), (0, 3)}
    with pytest.raises(ValueError):
        build_ansatz(0)


def test_normalize_examples():
    one = const_poly(1)
    s2 = TrigPoly({(2, 0): one}, ("p",))
    assert trig_normalize(s2).coeffs == {(0, 0): one, (0, 2): -one}
    s3 = TrigPoly({(3, 0): one}, ("p",))
    assert trig_normalize(s3).coeffs == {(1, 0): one, (1, 2): -one}


def _reference_second_derivative():
    a1, b1, b2, a2 = var("A1"), var("B1"), var("B2"), var("A2")
    return tp({(3, 0): -b1, (1, 2): b1, (2, 1): -2 * a1, (3, 1): -5 * b2, (1, 3): b2,
               (4, 0): 2 * a2, (2, 2): -4 * a2})


def test_normalize_reference_second_derivative():
    a1, b1, b2, a2 = var("A1"), var("B1"), var("B2"), var("A2")
    expected = {(0, 0): 2 * a2, (0, 1): -2 * a1, (1, 0): -b1, (0, 2): -8 * a2,
                (1, 1): -5 * b2, (0, 3): 2 * a1, (1, 2): 2 * b1, (0, 4): 6 * a2, (1, 3): 6 * b2}
    assert trig_normalize(_reference_second_derivative()).coeffs == expected


def test_second_derivative_of_ansatz():
    body = build_ansatz(2).body
    assert trig_diff(trig_diff(body)).coeffs == trig_normalize(_reference_second_derivative()).coeffs


def test_trig_diff_of_cos():
    one = const_poly(1)
    c = TrigPoly({(0, 1): one}, ("p",))
    assert trig_diff(c).coeffs == {(0, 2): one, (0, 0): -one}


def _random_trig(rng, max_deg=4):
    coeffs = {}
    for _ in range(rng.randint(1, 5)):
        m = (rng.randint(0, 3), rng.randint(0, max_deg))
        coeffs[m] = const_poly(GaussianRational(rng.randint(-5, 5), rng.randint(-2, 2)))
    return TrigPoly(coeffs, ("p",))


def test_leibniz_rule():
    rng = random.Random(23)
    for _ in range(100):
        p, q = _random_trig(rng), _random_trig(rng)
        assert trig_diff(p * q) == trig_diff(p) * q + p * trig_diff(q)


def _at(p, eta):
    return p.evaluate(1 / math.cosh(eta), math.tanh(eta))


def test_normal_form_sampling():
    rng = random.Random(29)
    for _ in range(50):
        raw = TrigPoly({(rng.randint(0, 5), rng.randint(0, 4)): const_poly(rng.randint(-5, 5))
                        for _ in range(4)}, ("p",))
        norm = trig_normalize(raw)
        assert norm.is_normal
        for _ in range(40):
            eta = rng.uniform(-3, 3)
            assert abs(_at(raw, eta) - _at(norm, eta)) <= 1e-12


def test_derivation_matches_finite_differences():
    # omega' = sin(omega) is solved exactly by sin = sech(eta), cos = -tanh(eta)
    rng = random.Random(31)
    h = 1e-5

    def exact_at(p, eta):
        return p.evaluate(1 / math.cosh(eta), -math.tanh(eta))

    for _ in range(30):
        p = trig_normalize(_random_trig(rng))
        dp = trig_diff(p)
        for _ in range(10):
            eta = rng.uniform(-3, 3)
            fd = (exact_at(p, eta + h) - exact_at(p, eta - h)) / (2 * h)
            exact = exact_at(dp, eta)
            assert abs(fd - exact) <= 1e-6 * max(1.0, abs(exact))


def test_tanh_realization_is_the_reflected_wave():
    # with cos -> tanh the derivation holds for eta -> -eta, so derivatives flip sign
    rng = random.Random(37)
    h = 1e-5
    for _ in range(20):
        p = trig_normalize(_random_trig(rng))
        dp = trig_diff(p)
        for _ in range(5):
            eta = rng.uniform(-3, 3)
            fd = (_at(p, eta + h) - _at(p, eta - h)) / (2 * h)
            assert abs(fd + _at(dp, eta)) <= 1e-6 * max(1.0, abs(fd))


@settings(max_examples=100, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(0, 1), st.integers(0, 4)),
                       st.integers(-3, 3), min_size=1, max_size=6))
def test_basis_linear_independence(raw):
    p = TrigPoly({m: const_poly(c) for m, c in raw.items()}, ("p",))
    npts = 2 * max(1, len(p.coeffs))
    vanishes = all(abs(_at(p, -2 + 4 * k / (npts - 1 or 1))) < 1e-9 for k in range(npts))
    assert vanishes == (not p.coeffs)


def test_identity_ode_returns_body():
    ans = build_ansatz(2)
    ode = DerivPoly("V", {((0, 1),): Polynomial.constant(("v",), QQI.one)}, ("v",), QQI)
    assert substitute_ansatz(ode, ans) == ans.body


def test_zero_trig_poly_gives_empty_system():
    assert len(extract_coefficient_system(TrigPoly({}, GENS))) == 0


@pytest.mark.parametrize("which, tags", [
    ("ytsf", [(0, 0), (1, 0), (0, 1), (1, 1), (0, 2), (1, 2), (0, 3), (1, 3), (0, 4)]),
    ("rd", [(0, 0), (1, 0), (0, 1), (1, 1), (0, 2), (1, 2), (0, 3)]),
])
def test_system_regeneration(which, tags):
    system = pipeline(which)[4]
    assert system.tags == tags
    reference = reference_system(which, system.gens, system.field)
    for tag, p in system.equations:
        assert p == reference[tag], tag


def test_system_lines_are_labelled():
    lines = pipeline("ytsf")[4].lines()
    assert lines[0].startswith("1: ") and lines[-1].startswith("cos^4: ")
    assert any(ln.startswith("sin*cos^3: ") for ln in lines)
