import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flexcurv.errors import NumericalDomainError, ValidationError
from flexcurv.expr import (
    Add,
    BinOp,
    Call,
    Const,
    EvalDomainError,
    ExprSyntaxError,
    Neg,
    Num,
    Pow,
    ScalarField2,
    Sub,
    UnknownIdentifierError,
    Var,
    eval_jet2,
    parse,
    to_source,
)

CATALOG_EXPRESSIONS = [
    "u^2+v^2",
    "(u^2+v^2)/2",
    "u*v",
    "u^2-v^2",
    "u*v+u^3",
    "1-sqrt(1-u^2-v^2)",
    "sqrt(4-u^2-v^2)",
    "u^2*v+cos(u)",
    "exp(u)*cos(v)",
    "log(2+u*v)",
    "sin(u*v)/(1+u^2)",
    "(2+u)^1.5*v",
    "4096*(u*(1-u)*v*(1-v))^3",
]


def test_parse_sum_of_squares():
    assert parse("u^2+v^2") == Add(Pow(Var("u"), Num(2.0)), Pow(Var("v"), Num(2.0)))


def test_parse_sqrt():
    expected = Call("sqrt", Sub(Sub(Num(1.0), Pow(Var("u"), Num(2.0))), Pow(Var("v"), Num(2.0))))
    assert parse("sqrt(1-u^2-v^2)") == expected


def test_incomplete_expression_reports_offset():
    with pytest.raises(ExprSyntaxError) as info:
        parse("u+")
    assert info.value.offset == 2
    assert "number" in info.value.expected


def test_syntax_error_is_validation_error():
    with pytest.raises(ValidationError):
        parse("u*(v")


@pytest.mark.parametrize("source, offset", [(")", 0), ("u v", 2), ("2**u", 2), ("sin u", 4)])
def test_syntax_error_offsets(source, offset):
    with pytest.raises(ExprSyntaxError) as info:
        parse(source)
    assert info.value.offset == offset


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifierError) as info:
        parse("u + w")
    assert info.value.name == "w"
    assert info.value.offset == 4


def test_power_is_right_associative():
    assert parse("2^3^2") == Pow(Num(2.0), Pow(Num(3.0), Num(2.0)))
    assert eval_jet2(parse("2^3^2"), 0.0, 0.0).value == 512.0


def test_unary_minus_binds_looser_than_power():
    assert parse("-u^2") == Neg(Pow(Var("u"), Num(2.0)))


def test_constants():
    assert parse("pi") == Const("pi")
    assert eval_jet2(parse("2*pi"), 0.0, 0.0).value == 2 * math.pi


# -- print / parse round trip -------------------------------------------------------

leaves = st.one_of(
    st.floats(min_value=0, max_value=1e6, allow_nan=False, allow_infinity=False).map(Num),
    st.sampled_from([Var("u"), Var("v"), Const("pi"), Const("e")]),
)


def _extend(children):
    return st.one_of(
        children.map(Neg),
        st.tuples(st.sampled_from("+-*/^"), children, children).map(lambda t: BinOp(*t)),
        st.tuples(st.sampled_from(["sin", "cos", "exp", "log", "sqrt"]), children).map(lambda t: Call(*t)),
    )


expressions = st.recursive(leaves, _extend, max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(expressions)
def test_print_parse_round_trip(e):
    assert parse(to_source(e)) == e


# -- jets ---------------------------------------------------------------------------


def test_jet_polynomial():
    j = eval_jet2(parse("u^2+v^2"), 1.0, 2.0)
    assert j.value == 5.0
    assert j.gradient == (2.0, 4.0)
    assert j.hessian == (2.0, 0.0, 2.0)


def test_jet_hemisphere_at_pole():
    # d/du sqrt(1-u^2-v^2) = -u/sqrt(...), second derivative -1 at the pole
    j = eval_jet2(parse("sqrt(1-u^2-v^2)"), 0.0, 0.0)
    assert j.value == 1.0
    assert j.gradient == (0.0, 0.0)
    assert j.hessian == (-1.0, 0.0, -1.0)


def test_division_by_zero_is_domain_error():
    with pytest.raises(EvalDomainError) as info:
        eval_jet2(parse("1/u"), 0.0, 0.0)
    assert isinstance(info.value, NumericalDomainError)
    assert info.value.point == (0.0, 0.0)


@pytest.mark.parametrize("source", ["log(u)", "sqrt(u)", "u^0.5", "sqrt(-1-u^2)"])
def test_domain_errors(source):
    with pytest.raises(EvalDomainError):
        eval_jet2(parse(source), 0.0, 0.5)


def test_integer_power_of_negative_base():
    j = eval_jet2(parse("u^3"), -2.0, 0.0)
    assert (j.value, j.du, j.duu) == (-8.0, 12.0, -12.0)


def test_vectorized_matches_scalar():
    e = parse("exp(u)*cos(v)+u*v^2")
    u = np.linspace(-1, 1, 7)
    v = np.linspace(0, 2, 7)
    jv = eval_jet2(e, u, v)
    for k in range(7):
        js = eval_jet2(e, float(u[k]), float(v[k]))
        assert jv.value[k] == js.value
        assert jv.duv[k] == js.duv


def test_constant_broadcasts():
    j = eval_jet2(parse("3"), np.zeros(4), np.zeros(4))
    assert np.shape(j.value) == (4,)
    assert np.all(j.du == 0)


def _fd_gradient(field, u, v, h):
    fu = (field(u + h, v) - field(u - h, v)) / (2 * h)
    fv = (field(u, v + h) - field(u, v - h)) / (2 * h)
    return fu, fv


@pytest.mark.parametrize("source", CATALOG_EXPRESSIONS)
def test_jet_matches_finite_differences(source):
    field = ScalarField2.parse(source)
    rng = np.random.default_rng(7)
    u = rng.uniform(0.05, 0.45, 100)
    v = rng.uniform(0.05, 0.45, 100)
    h = 1e-5
    j = field.jet(u, v)

    def close(a, b):
        return np.all(np.abs(a - b) <= 1e-6 * np.maximum(1.0, np.abs(b)))

    fu, fv = _fd_gradient(field, u, v, h)
    assert close(j.du, fu)
    assert close(j.dv, fv)
    # Hessian: central differences of the gradient of the value
    grad_u = lambda a, b: field.jet(a, b).du  # noqa: E731
    grad_v = lambda a, b: field.jet(a, b).dv  # noqa: E731
    fuu, fuv = _fd_gradient(grad_u, u, v, h)
    fvu, fvv = _fd_gradient(grad_v, u, v, h)
    assert close(j.duu, fuu)
    assert close(j.duv, fuv)
    assert close(j.duv, fvu)
    assert close(j.dvv, fvv)


@pytest.mark.parametrize("a, b", [("u^2*v", "sin(u)"), ("exp(u*v)", "sqrt(2+v)"), ("1/(1+u^2)", "u*v^3")])
def test_jet_linearity_is_exact(a, b):
    rng = np.random.default_rng(3)
    u, v = rng.uniform(-0.5, 0.5, (2, 50))
    ja, jb = eval_jet2(parse(a), u, v), eval_jet2(parse(b), u, v)
    jab = eval_jet2(parse(f"({a})+({b})"), u, v)
    for part in ("value", "du", "dv", "duu", "duv", "dvv"):
        assert np.array_equal(getattr(jab, part), getattr(ja, part) + getattr(jb, part))


def test_chain_rule_sin_uv():
    rng = np.random.default_rng(11)
    u, v = rng.uniform(-2, 2, (2, 200))
    j = eval_jet2(parse("sin(u*v)"), u, v)
    s, c = np.sin(u * v), np.cos(u * v)
    expected = {
        "value": s,
        "du": v * c,
        "dv": u * c,
        "duu": -v * v * s,
        "duv": c - u * v * s,
        "dvv": -u * u * s,
    }
    for part, want in expected.items():
        got = getattr(j, part)
        assert np.all(np.abs(got - want) <= 1e-12 * np.maximum(1.0, np.abs(want))), part


def test_field_arithmetic_builds_expressions():
    f = ScalarField2.parse("u") * 2 + ScalarField2.parse("v^2")
    assert f(1.0, 3.0) == 11.0
    assert parse(f.source) == f.expr
