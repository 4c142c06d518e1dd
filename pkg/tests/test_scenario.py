import numpy as np
import pytest
from hypothesis import given, strategies as st

from hardyop import funcspace as fs
from hardyop.errors import ParseError, ValidationError
from hardyop.estimators import AnalysisConfig
from hardyop.scenario import Scenario, parse_expression, parse_scenario, serialize

BASE = "u = 1\nphi = z\np = 2\nq = 2\n"


def test_multiplication_folds_scalars():
    s = parse_scenario("u = 1\nphi = mul(0.5, z)\np = 2\nq = 2\n")
    assert s.phi(1.0) == pytest.approx(0.5)
    assert s.phi.sup_modulus_estimate == pytest.approx(0.5)


def test_infinite_exponent():
    s = parse_scenario("u = 1\nphi = z\np = inf\nq = 2\n")
    assert s.p.infinite


def test_non_selfmap_is_a_validation_error():
    with pytest.raises(ValidationError):
        parse_scenario("u = 1\nphi = add(1, z)\np = 2\nq = 2\n")


def test_unknown_key_position():
    with pytest.raises(ParseError) as info:
        parse_scenario(BASE + "  colour = red\n")
    assert (info.value.line, info.value.col) == (5, 3)


def test_syntax_error_position():
    with pytest.raises(ParseError) as info:
        parse_scenario("u = 1\nphi = mul(0.5, z\np = 2\nq = 2\n")
    assert info.value.line == 2
    assert info.value.col == 17


@pytest.mark.parametrize("text", [
    "u = 1\nphi = z\np = 2\n",
    BASE + "p = 3\n",
    "u = 1\nphi = z\np = 0.5\nq = 2\n",
    "u = 1\nphi = foo(z)\np = 2\nq = 2\n",
    "u = 1\nphi z\np = 2\nq = 2\n",
    BASE + "grid = many\n",
])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_scenario(text)


def test_comments_and_overrides():
    s = parse_scenario("# demo\nname = demo  # trailing\n" + BASE + "grid = 4096\nn_schedule = 4, 8\nalpha = 0.6\n")
    assert s.name == "demo"
    assert s.config == AnalysisConfig(grid=4096, n_schedule=(4, 8), alpha=0.6)


@pytest.mark.parametrize("expr,w,expected", [
    ("poly(1, 2)", 0.5, 2.0),
    ("rational([1], [2, -1])", 0.5, 1 / 1.5),
    ("blaschke(0)", 0.3, 0.3),
    ("kernel(0.5)", 0.0, 0.75),
    ("kernel(0.5, 2)", 0.0, np.sqrt(0.75)),
    ("cauchy(0.5j)", 1j, 2.0),
    ("pow(z, 3)", 0.5, 0.125),
    ("add(1, z, z)", 0.25, 1.5),
    ("mul(2, z, z)", 0.5, 0.5),
    ("compose(pow(z, 2), poly(0, 0.5))", 1.0, 0.25),
    ("dilate(z, 0.5)", 1.0, 0.5),
    ("-0.3+0.4j", 0.1, -0.3 + 0.4j),
])
def test_expression_values(expr, w, expected):
    assert parse_expression(expr)(w) == pytest.approx(expected)


_leaf = st.sampled_from(["z", "poly(0.5, 0.25)", "blaschke(0.1, -0.2j)", "kernel(0.3, 2)", "cauchy(0.4)", "0.5"])
_exprs = st.recursive(_leaf, lambda inner: st.one_of(
    st.builds(lambda a, b: f"add({a}, {b})", inner, inner),
    st.builds(lambda a, b: f"mul({a}, {b})", inner, inner),
    st.builds(lambda a: f"pow({a}, 2)", inner),
    st.builds(lambda a: f"compose({a}, poly(0, 0.5))", inner),
), max_leaves=6)


@given(_exprs)
def test_expression_round_trip(text):
    f = parse_expression(text)
    g = parse_expression(f.to_expr())
    assert g == f
    w = np.array([0.0, 0.3 + 0.2j, -0.5j])
    assert np.allclose(g(w), f(w))


@given(st.sampled_from(["z", "mul(0.5, z)", "blaschke(0, 0.5)", "pow(z, 2)", "poly(0.5, 0.5)"]),
       st.sampled_from(["1", "z", "poly(1, -1)"]),
       st.sampled_from(["1", "2", "4", "inf"]), st.sampled_from(["1", "2", "3"]),
       st.sampled_from([{}, {"grid": 4096}, {"alpha": 0.6, "depth": 8}, {"n_schedule": (4, 8)}]))
def test_scenario_round_trip(phi, u, p, q, overrides):
    s = parse_scenario(f"name = rt\nu = {u}\nphi = {phi}\np = {p}\nq = {q}\n")
    s = s.with_overrides(**overrides)
    assert parse_scenario(serialize(s)) == s


def test_scenario_dataclass_defaults():
    s = Scenario("x", fs.constant(1.0), fs.SelfMap(fs.identity()), fs.as_exponent(2), fs.as_exponent(2))
    assert s.config == AnalysisConfig()
