"""Cross-module invariants."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hardyop import estimators as est
from hardyop import funcspace as fs
from hardyop import kernels as kn
from hardyop import measures as ms
from hardyop import smoothing as sm
from hardyop import truncation as tr

from conftest import coefficient_lists, disk_points, polynomial_maps, selfmaps

B3 = fs.SelfMap(fs.blaschke([0, 0.5, -0.3 + 0.4j]))


@given(coefficient_lists(40))
def test_quadrature_is_exact_for_polynomials(c):
    f = fs.polynomial(c)
    assert fs.hardy_norm(f, 2, 128) ** 2 == pytest.approx(np.sum(np.abs(c) ** 2), rel=1e-12)


@given(coefficient_lists(12), st.floats(0.05, 0.95), st.floats(0.05, 0.95), st.sampled_from([1, 2, 3]))
def test_norm_grows_with_radius(c, r1, r2, p):
    r1, r2 = sorted((r1, r2))
    f = fs.polynomial(c)
    assert fs.hardy_norm(f, p, radius=r1) <= fs.hardy_norm(f, p, radius=r2) + 1e-12


@given(disk_points(0.99), st.sampled_from([1, 2, 3.5]))
def test_kernel_power_normalisation(a, p):
    assert fs.hardy_norm(fs.kernel_power(a, p), p, 2**16) == pytest.approx(1.0, abs=1e-8)


@given(coefficient_lists(12), st.floats(0.05, 0.95), st.sampled_from([1, 2, "inf"]))
def test_dilation_contracts(c, r, p):
    f = fs.polynomial(c)
    assert fs.hardy_norm(fs.radial_dilation(f, r), p) <= fs.hardy_norm(f, p) + 1e-10


@given(selfmaps(), disk_points(0.95), disk_points(0.95))
def test_two_point_bound(phi, z, w):
    assert abs(phi(z) - phi(w)) <= 2 * kn.pseudohyperbolic(z, w) + 1e-12


@given(disk_points(0.999), st.floats(0.05, 0.9), st.floats(0.05, 0.9))
def test_stolz_monotone_in_aperture(z, a1, a2):
    a1, a2 = sorted((a1, a2))
    if kn.stolz_contains(kn.StolzDomain(1.0, a1), z):
        assert kn.stolz_contains(kn.StolzDomain(1.0, a2), z)


def test_stolz_excludes_opposite_point():
    assert not kn.stolz_contains(kn.StolzDomain(1.0, 0.5), -0.9)
    assert kn.stolz_contains(kn.StolzDomain(1.0, 0.5), 0.9)
    assert kn.stolz_contains(kn.StolzDomain(1j, 0.5), 0.0)


def test_shadow_ratio_is_bounded():
    r = np.linspace(0.5, 0.999, 60)
    ratio = [kn.shadow_measure(x, 0.5, 2**16) / (1 - x) for x in r]
    assert 0.15 < min(ratio) and max(ratio) < 2.1


@given(polynomial_maps(), coefficient_lists(6))
def test_pullback_change_of_variables(phi, c):
    u = fs.polynomial([1, 0.5j])
    f = fs.polynomial(c)
    M = 2**12
    mu = ms.pullback(u, phi, 2, M)
    lhs = mu.integrate(lambda z: np.abs(f(z)) ** 2)
    rhs = np.mean(np.abs(u(fs.circle_points(M))) ** 2 * np.abs(f(phi(fs.circle_points(M)))) ** 2)
    assert abs(lhs - rhs) <= 1e-9 * mu.total_mass


def test_annulus_ratio_sup_against_n_star():
    phi = fs.SelfMap(fs.polynomial([0.5, 0.5]))
    constants = []
    for M in (2**12, 2**13):
        mu = ms.pullback(1.0, phi, 2, M)
        vals = []
        for k in (2, 3, 4):
            r = 1 - 2.0**-k
            rest = ms.restrict_annulus(mu, r)
            ring = np.concatenate([x * fs.circle_points(256) for x in (r, 1 - 2.0 ** -(k + 2))])
            vals.append(ms.ratio_sup(rest, 2, 2, depth=8).ratio_sup / ms.n_star(mu, r, 2, 2, ring))
        constants.append(max(vals))
    assert max(constants) < 10
    assert constants[1] == pytest.approx(constants[0], rel=0.05)


def test_balayage_tail_decreases():
    # The atoms nearest the contact point leave a floor that shrinks with the grid.
    phi = fs.SelfMap(fs.polynomial([0.5, 0.5]))
    floors = []
    for M in (2**14, 2**16):
        mu = ms.pullback(1.0, phi, 1, M)
        vals = [ms.ls_norm_G(ms.restrict_annulus(mu, 1 - 2.0**-k), 2.0) for k in range(1, 11)]
        assert all(b <= a * (1 + 1e-9) for a, b in zip(vals, vals[1:]))
        floors.append(vals[-1])
    assert floors[1] < 0.5 * floors[0]


@given(coefficient_lists(20), st.integers(30, 400))
def test_fejer_remainder_tends_to_zero(c, N):
    c = np.asarray(c)
    deg = len(c) - 1
    rem = fs.hardy_norm(fs.polynomial(sm.fejer_remainder(c, N)), 1) if deg else 0.0
    assert rem <= max(deg, 1) * np.abs(c).max() * max(deg, 1) / N + 1e-12


@pytest.mark.parametrize("u,phi", [
    (1.0, fs.identity()), (1.0, fs.monomial(2)), (fs.identity(), fs.identity()), (1.0, B3.map),
    (1.0, fs.polynomial([0, 0.5])),
])
def test_pq_lower_below_twice_upper(u, phi):
    sched = est.RingSchedule.dyadic(3, 10, 64)
    trace = est.ring_sweep(u, fs.SelfMap(phi), 2, 2, sched)
    low, c = est.essnorm_pq_lower(u, fs.SelfMap(phi), 2, 2, trace=trace)
    assert c * low <= 2 * est.essnorm_pq_upper(u, fs.SelfMap(phi), 2, 2, trace=trace) + 1e-9


@pytest.mark.parametrize("phi", [B3, fs.SelfMap(fs.polynomial([0.5, 0.5])), fs.SelfMap(fs.monomial(3))])
def test_power_norms_match_extremal_integral(phi):
    J = est.extremal_integral(1.0, phi, 2)
    lim, _ = est.power_norm_limit(1.0, phi, 2)
    assert lim == pytest.approx(math.sqrt(J), abs=1e-3)


@pytest.mark.parametrize("p,q", [(4, 2), ("inf", 2), (2, 2)])
def test_bracket_invariant_under_grid_doubling(p, q):
    a = est.analyze(1.0, B3, p, q, est.AnalysisConfig(grid=2**13), truncation=False).bracket
    b = est.analyze(1.0, B3, p, q, est.AnalysisConfig(grid=2**14), truncation=False).bracket
    assert (a.lower, a.upper) == pytest.approx((b.lower, b.upper), abs=1e-6)


_FINITE_N = pytest.mark.xfail(
    strict=True, reason="compact symbol: finite-N lower values exceed the limsup that the upper values bound")


@pytest.mark.parametrize("u,phi", [
    (1.0, fs.identity()), (1.0, fs.monomial(2)), (fs.identity(), fs.identity()), (1.0, B3.map),
    pytest.param(1.0, fs.polynomial([0, 0.5]), marks=_FINITE_N),
    pytest.param(fs.polynomial([1, 0.5]), fs.polynomial([0.1, 0.5, 0.3]), marks=_FINITE_N),
])
def test_truncation_sandwich_all_pairs(u, phi):
    b = tr.truncation_bracket(u, phi)
    assert max(b.lower_values) <= min(b.upper_values) + 1e-6


@pytest.mark.parametrize("u,phi", [
    (1.0, fs.identity()), (1.0, B3.map), (1.0, fs.polynomial([0, 0.5])),
    (fs.polynomial([1, 0.5]), fs.polynomial([0.1, 0.5, 0.3])),
])
def test_truncation_bracket_is_ordered(u, phi):
    b = tr.truncation_bracket(u, phi)
    assert b.lower <= b.upper
    assert b.upper == min(b.upper_values)


def test_operator_norm_monotone_in_degree():
    u, phi = fs.polynomial([1, 0.5]), fs.polynomial([0.1, 0.5, 0.3])
    norms = [tr.operator_norm_h2(tr.build_matrix(u, phi, K)) for K in (16, 32, 64, 128, 256)]
    assert all(b >= a - 1e-9 for a, b in zip(norms, norms[1:]))


@settings(max_examples=15)
@given(coefficient_lists(64))
def test_matrix_reproduces_operator(c):
    u, phi = fs.polynomial([1, 0.5]), fs.polynomial([0.1, 0.5, 0.3])
    T = tr.build_matrix(u, phi)
    x = np.zeros(T.degree + 1, complex)
    x[: len(c)] = c
    image = fs.hardy_norm(fs.mul(u, fs.compose(fs.polynomial(c), phi)), 2)
    assert np.linalg.norm(T.entries @ x) == pytest.approx(image, abs=1e-6)
