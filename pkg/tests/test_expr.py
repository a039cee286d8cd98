import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from clifford_bvp.algebra import Multivector, Signature
from clifford_bvp.errors import DomainError, ExprSyntaxError, ParaRealViolation
from clifford_bvp.expr import evaluate, evaluate_array, parse, parse_multivector, pretty, uses_point_function


def test_examples():
    s1 = Signature(1)
    assert evaluate(parse("1/(1+abs2(x))", s1), [1.0], s1) == Multivector.scalar(s1, 0.5)
    s2 = Signature(2)
    v = evaluate(parse("x0*e(1)*gauss(x)", s2), [1.0, 0.0], s2)
    assert v.allclose(Multivector(s2, [0, math.exp(-1), 0, 0]), atol=1e-16)


def test_para_real_violation():
    s3 = Signature(3)
    with pytest.raises(ParaRealViolation):
        parse("e(3)", s3)
    with pytest.raises(ParaRealViolation):
        parse("x0*e13", s3)
    assert parse("e(3)", s3, para_real=False) is not None


@pytest.mark.parametrize(
    "text, position",
    [("1 +", 3), ("pow(x0, 1.5)", 8), ("x3", 0), ("foo(x0)", 0), ("(1+x0", 5), ("1 2", 2)],
)
def test_syntax_errors_report_position(text, position):
    with pytest.raises(ExprSyntaxError) as info:
        parse(text, Signature(2))
    assert info.value.position == position


def test_no_caret_operator():
    with pytest.raises(ExprSyntaxError):
        parse("x0^2", Signature(1))


def test_division_by_multivector_rejected():
    s = Signature(2)
    node = parse("1/e1", s)
    with pytest.raises(DomainError):
        evaluate(node, [0.0, 0.0], s)


def test_vectorised_matches_pointwise():
    s = Signature(3)
    node = parse("sin(x0)*e1 + pow(x1, 2)*exp(-abs2(x)) - 3*e12/(1+abs2(x))", s)
    pts = np.random.default_rng(0).normal(size=(7, 3))
    arr = evaluate_array(node, pts, s)
    for p, row in zip(pts, arr):
        assert np.allclose(evaluate(node, p, s).coeffs, row, atol=1e-15)


def test_uses_point_function():
    s = Signature(1)
    assert uses_point_function(parse("x0*gauss(x)", s))
    assert not uses_point_function(parse("x0*exp(-x0*x0)", s))


def test_parse_multivector():
    s = Signature(2)
    assert parse_multivector("1.0 + 1.0*e12", s) == Multivector(s, [1, 0, 0, 1])
    assert parse_multivector("e2", s) == Multivector.generator(s, 2)
    with pytest.raises(ExprSyntaxError):
        parse_multivector("x0", s)


# ---------------------------------------------------------------- round trip

GOLDEN = [
    "0", "1", "-2.5", "x0", "x1", "-x0", "+x1", "x0 + x1", "x0 - x1", "x0*x1",
    "x0/2", "2*x0 - 3*x1", "(x0 + x1)*(x0 - x1)", "pow(x0, 2)", "pow(x0 + 1, 3)",
    "pow(1 + abs2(x), -1)", "1/(1+abs2(x))", "abs2(x)", "gauss(x)", "x0*gauss(x)",
    "exp(x0)", "exp(-abs2(x))", "sin(x0)", "cos(x1)", "sqrt(1 + abs2(x))",
    "sqrt(sqrt(abs2(x)))", "e0", "e1", "2*e1", "x0*e1", "e1*x0 + x1", "e(1)",
    "e(1)*gauss(x)", "sin(x0)*e1 - cos(x1)", "1 - (x0 - x1)", "1 - (x0 + x1)",
    "x0/(x1/2)", "x0/x1/2", "-(x0 + x1)", "--x0", "pow(-x0, 2)", "-pow(x0, 2)",
    "exp(sin(cos(x0)))", "3*(2*(1 + x0))", "x0*(x1*e1)", "(x0*x1)*e1",
    "1e-3*x0", "2.5e2 + x1", "gauss(x)*(1 + x0*e1)", "x0 - x1*e1 + 4",
]


@pytest.mark.parametrize("text", GOLDEN)
def test_round_trip_golden(text):
    s = Signature(2)
    node = parse(text, s)
    again = parse(pretty(node, 2), s)
    assert pretty(again, 2) == pretty(node, 2)
    pts = np.array([[0.3, -0.7], [1.1, 0.4], [-0.5, 2.0]])
    a, b = evaluate_array(node, pts, s), evaluate_array(again, pts, s)
    assert np.allclose(a, b, rtol=1e-15, atol=0)


assert len(GOLDEN) == 50

leaf = st.sampled_from(["x0", "x1", "e1", "2", "0.5", "abs2(x)", "gauss(x)"])


def _grow(children):
    return st.one_of(
        st.tuples(children, st.sampled_from(["+", "-", "*"]), children).map(lambda t: f"({t[0]} {t[1]} {t[2]})"),
        children.map(lambda c: f"-{c}"),
        children.map(lambda c: f"sin({c})"),
        st.tuples(children, st.integers(0, 3)).map(lambda t: f"pow({t[0]}, {t[1]})"),
    )


@given(st.recursive(leaf, _grow, max_leaves=8))
def test_round_trip_random(text):
    s = Signature(2)
    try:
        node = parse(text, s)
    except ExprSyntaxError:
        pytest.skip("generated a non-scalar function argument")
    assert pretty(parse(pretty(node, 2), s), 2) == pretty(node, 2)
