import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hardyop import funcspace as fs
from hardyop import kernels as kn
from hardyop.errors import OutsideDomain, ValidationError

from conftest import disk_points, selfmaps


@given(disk_points(0.9), disk_points(0.9))
def test_reproducing_property(a, w):
    ka = fs.taylor_coefficients(kn.reproducing_kernel(a), 400)
    kw = fs.taylor_coefficients(kn.cauchy_kernel(w), 400)
    inner = np.vdot(kw, ka)
    assert inner == pytest.approx(kn.reproducing_kernel(a)(w), abs=1e-9)


@pytest.mark.parametrize("p", [1, 2, 4])
def test_delta_norm(p):
    assert kn.delta_norm(0.6, p) == pytest.approx(0.64 ** (-1 / p))
    with pytest.raises(OutsideDomain):
        kn.delta_norm(1.0, p)


@given(selfmaps(), disk_points(0.9), disk_points(0.9))
def test_schwarz_pick_contraction(phi, z, w):
    lhs = kn.pseudohyperbolic(phi(z), phi(w))
    assert lhs <= kn.pseudohyperbolic(z, w) + 1e-9


def test_pseudohyperbolic_is_symmetric_and_vectorised():
    z = np.array([0.1, 0.5j, -0.3 + 0.2j])
    w = np.array([0.0, 0.2, 0.7])
    assert np.allclose(kn.pseudohyperbolic(z, w), kn.pseudohyperbolic(w, z))


def test_stolz_domain_validation():
    with pytest.raises(ValidationError):
        kn.StolzDomain(0.5)
    with pytest.raises(ValidationError):
        kn.StolzDomain(1.0, 1.2)


def test_stolz_contains_radial_segment_and_excludes_tangent_points():
    dom = kn.StolzDomain(1.0, 0.5)
    r = np.linspace(0, 0.999, 50)
    assert np.all(dom.contains(r))
    theta = 0.2
    assert not dom.contains(0.999 * np.exp(1j * theta))


@given(st.floats(0.0, 0.999), st.floats(-math.pi, math.pi), st.floats(0.05, 0.95))
def test_stolz_membership_matches_brute_force(r, t, alpha):
    z = r * complex(math.cos(t), math.sin(t))
    s = np.linspace(0.0, 1.0, 20001)[:-1]
    brute = bool(np.any(np.abs(z - s) < (1 - s) * alpha))
    gap = float(kn._stolz_gap(z, 1.0, alpha))
    if abs(gap) > 1e-6:
        assert kn.stolz_contains(kn.StolzDomain(1.0, alpha), z) == brute


@given(st.floats(0.51, 0.995))
def test_shadow_halfwidth_matches_membership(r):
    alpha = 0.5
    h = kn.shadow_halfwidth(r, alpha)
    dom = kn.StolzDomain(1.0, alpha)
    assert dom.contains(r * np.exp(1j * h * 0.999))
    assert not dom.contains(r * np.exp(1j * min(h * 1.001 + 1e-9, math.pi)))


def test_shadow_measure_near_boundary():
    got = kn.shadow_measure(0.99, 0.5)
    expected = kn.shadow_halfwidth(0.99, 0.5) / math.pi
    assert got == pytest.approx(expected, abs=2 / fs.DEFAULT_GRID)
    assert kn.shadow_measure(0.3, 0.5) == 1.0
