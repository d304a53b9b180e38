import pytest
from hypothesis import given, settings

from conftest import grounded_operators
from heunpainleve.errors import (SigmaNotFactored, SpecSyntaxError, UndeclaredParameter,
                                 ZeroDenominator)
from heunpainleve.heun_class import HeunOperator, Z
from heunpainleve.painleve_catalog import entry
from heunpainleve.parser import (format_operator, format_spec, parse_operator, parse_spec,
                                 tokenize)
from heunpainleve.polyalg import RatFunc
from heunpainleve.sing_analysis import PrincipalOperator

T = RatFunc("t")

VI_TEXT = """
# Painlevé VI family
param k0, k1, kt, kinf, c
time t
sigma = z*(z-1)*(z-t)
tau = (1-k0)*(z-1)*(z-t) + (1-k1)*z*(z-t) + (1-kt)*z*(z-1)
eta = ((k0+k1+kt-1)^2 - kinf^2)/4 * z - c
"""


def test_type_one_example():
    ps = parse_spec("param c; sigma = 1; tau = 0; eta = -4*z^3 - 2*t*z - c; time t")
    assert ps.time == "t" and set(ps.params) == {"c", "t"}
    assert ps.operator == entry("I").family.op


def test_type_six_example():
    op = parse_operator(VI_TEXT)
    assert sorted(str(r) for r, _ in op.roots) == ["0", "1", "t"]
    assert op.sigma == Z * (Z - 1) * (Z - T)
    assert op.eta.coeff("z", 0) == -RatFunc("c")


def test_operator_precedence_and_powers():
    op = parse_operator("param a; sigma = z^2; tau = -a^2*z + 2/3; eta = -(z - 1)^2/2")
    a = RatFunc("a")
    assert op.tau == -a * a * Z + RatFunc(2) / 3
    assert op.eta == -(Z - 1) ** 2 / 2
    assert op.roots == ((RatFunc(0), 2),)


def test_principal_slots():
    op = parse_operator("p = 0; q = -z")
    assert isinstance(op, PrincipalOperator)
    assert op.q == -Z


def test_canonical_round_trip_text():
    text = format_spec(parse_spec(VI_TEXT))
    assert format_spec(parse_spec(text)) == text
    assert parse_operator(text) == parse_operator(VI_TEXT)


@settings(max_examples=60)
@given(grounded_operators())
def test_print_parse_identity(op):
    text = format_operator(op)
    assert parse_operator(text) == op
    assert format_operator(parse_operator(text)) == text


def test_zero_denominator():
    with pytest.raises(ZeroDenominator) as ei:
        parse_operator("sigma = z^2; eta = 1/0")
    assert (ei.value.line, ei.value.column) == (1, 21)
    with pytest.raises(ZeroDenominator):
        parse_operator("param a; sigma = z; eta = 1/(a - a)")


def test_undeclared_parameter():
    with pytest.raises(UndeclaredParameter) as ei:
        parse_operator("sigma = z\ntau = b*z")
    assert (ei.value.line, ei.value.column) == (2, 7)


def test_sigma_not_factored():
    with pytest.raises(SigmaNotFactored):
        parse_operator("sigma = z^2 + 1")
    with pytest.raises(SigmaNotFactored):
        parse_operator("sigma = 1/z")
    with pytest.raises(SigmaNotFactored):
        parse_operator("sigma = 0")


@pytest.mark.parametrize("text,line,column,expected", [
    ("sigma = z +", 1, 12, "identifier"),
    ("sigma = (z", 1, 11, "')'"),
    ("sigma z", 1, 7, "'='"),
    ("sigma = z\nrho = 1", 2, 1, "sigma"),
    ("sigma = z^x", 1, 11, "nonnegative integer"),
])
def test_syntax_errors_report_position(text, line, column, expected):
    with pytest.raises(SpecSyntaxError) as ei:
        parse_operator(text)
    err = ei.value
    assert (err.line, err.column) == (line, column), str(err)
    assert expected in err.expected, err.expected


@pytest.mark.parametrize("text", [
    "sigma = z; sigma = z",
    "param z; sigma = z",
    "time t; time s; sigma = z",
    "sigma = z; p = 1",
    "tau = z",
    "sigma = z $",
])
def test_rejected_specs(text):
    with pytest.raises(SpecSyntaxError):
        parse_operator(text)


def test_comments_and_separators():
    toks = tokenize("sigma = z # note\n;; tau = 1")
    assert [t.kind for t in toks].count("sep") >= 2
    op = parse_operator("\n\nsigma = z # note\n;; tau = 1\n")
    assert op == HeunOperator.build([0], RatFunc(1), RatFunc(0))
