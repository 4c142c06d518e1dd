import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hardyop import funcspace as fs
from hardyop.errors import OutsideDomain, ValidationError

from conftest import blaschke_maps, coefficient_lists, disk_points


def test_exponent_parsing():
    assert fs.as_exponent("inf").infinite
    assert fs.as_exponent(math.inf) == fs.INF
    assert fs.as_exponent(2).value == 2.0
    with pytest.raises(ValidationError):
        fs.as_exponent(0.5)


def test_polynomial_evaluation(z):
    f = fs.polynomial([1, 2, 3])
    assert f(0.5) == pytest.approx(1 + 1 + 0.75)
    assert np.allclose(f(np.array([0, 1j])), [1, 1 + 2j - 3])


def test_arithmetic_builds_expected_values(z, one):
    f = 1 - z
    g = 0.5 * (one + z)
    w = 0.3 + 0.2j
    assert f(w) == pytest.approx(1 - w)
    assert g(w) == pytest.approx((1 + w) / 2)
    assert (f * g)(w) == pytest.approx((1 - w) * (1 + w) / 2)
    assert (-f)(w) == pytest.approx(w - 1)


def test_rational_rejects_interior_pole():
    with pytest.raises(ValidationError):
        fs.rational([1], [1, -2])


def test_rational_boundary_root_is_singular():
    f = fs.rational([1], [1, -1])
    assert f.singular_points == (1 + 0j,)


def test_evaluate_outside_disk_raises(z):
    with pytest.raises(OutsideDomain):
        fs.evaluate(z, 1.5)


@given(blaschke_maps())
def test_blaschke_is_unimodular_on_circle(phi):
    vals = phi(fs.circle_points(256))
    assert np.allclose(np.abs(vals), 1.0, atol=1e-12)


def test_selfmap_rejects_constants_and_escapes(z):
    with pytest.raises(ValidationError):
        fs.SelfMap(fs.constant(0.5))
    with pytest.raises(ValidationError):
        fs.SelfMap(fs.add(fs.constant(1.0), z))


def test_selfmap_sup_estimate(z):
    assert fs.SelfMap(fs.polynomial([0, 0.5])).sup_modulus_estimate == pytest.approx(0.5)
    assert fs.SelfMap(z).sup_modulus_estimate == pytest.approx(1.0)


@given(coefficient_lists())
def test_h2_norm_is_coefficient_l2(c):
    f = fs.polynomial(c)
    assert fs.hardy_norm(f, 2) == pytest.approx(np.linalg.norm(c), rel=1e-9)


@given(coefficient_lists(8))
def test_hardy_norms_are_monotone_in_p(c):
    f = fs.polynomial(c)
    n1, n2, n4, ninf = (fs.hardy_norm(f, p) for p in (1, 2, 4, "inf"))
    assert n1 <= n2 * (1 + 1e-9) <= n4 * (1 + 2e-9) <= ninf * (1 + 3e-9)


@pytest.mark.parametrize("p", [1, 2, 3])
def test_kernel_powers_have_unit_norm(p):
    f = fs.kernel_power(0.9j, p)
    assert fs.hardy_norm(f, p) == pytest.approx(1.0, rel=1e-9)


def test_sup_norm_refines_between_samples():
    f = fs.polynomial([0, 1])
    g = fs.compose(f, fs.polynomial([0, np.exp(0.001j)]))
    assert fs.hardy_norm(g, "inf", 64) == pytest.approx(1.0, abs=1e-12)


@given(disk_points(0.9), st.integers(0, 20))
def test_taylor_coefficients_of_kernel(a, n):
    c = fs.taylor_coefficients(fs.reproducing_kernel_fn(a), 24)
    assert c[n] == pytest.approx((1 - abs(a) ** 2) * (n + 1) * np.conj(a) ** n, abs=1e-12)


def test_radial_dilation(z):
    phi = fs.radial_dilation(fs.SelfMap(z), 0.25)
    assert isinstance(phi, fs.SelfMap)
    assert phi(1.0) == pytest.approx(0.25)


@pytest.mark.parametrize("expr", [
    fs.polynomial([1, 0.5j]),
    fs.blaschke([0.1, -0.2 + 0.3j]),
    fs.kernel_power(0.4, 3),
    fs.scalar_multiple(2.0, fs.identity()),
    fs.compose(fs.cauchy(0.3), fs.polynomial([0, 0.5])),
    fs.power(fs.identity(), 3),
])
def test_to_expr_is_stable(expr):
    from hardyop.scenario import parse_expression
    assert parse_expression(expr.to_expr()) == expr
