import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hardyop import estimators as est
from hardyop import funcspace as fs
from hardyop.errors import NonConvergent, Undecided, ValidationError

from conftest import disk_points

HALF = fs.SelfMap(fs.polynomial([0, 0.5]))
B3 = fs.SelfMap(fs.blaschke([0, 0.5, -0.3 + 0.4j]))


def test_config_validation():
    with pytest.raises(ValidationError):
        est.AnalysisConfig(ring_k_min=3, ring_k_max=5)
    with pytest.raises(ValidationError):
        est.AnalysisConfig(alpha=1.0)
    with pytest.raises(ValidationError):
        est.AnalysisConfig(kernel_method="simpson")
    assert est.AnalysisConfig(n_schedule=[8, 16]).n_schedule == (8, 16)


def test_ring_schedule():
    sched = est.RingSchedule.dyadic(3, 6, 8)
    assert sched.radii == (0.875, 0.9375, 0.96875, 0.984375)
    assert np.allclose(np.abs(sched.ring(0)), 0.875)
    with pytest.raises(ValidationError):
        est.RingSchedule((0.5, 0.4))


@pytest.mark.parametrize("p,q,tag", [
    (2, 2, "p<=q finite"), (1, 3, "p=1<=q"), (2, "inf", "H^p->H^inf"),
    ("inf", 2, "H^inf->H^q"), (4, 2, "p>q finite"),
])
def test_regimes(p, q, tag):
    assert est.regime_of(p, q) == tag


def test_regime_rejects_both_infinite():
    with pytest.raises(ValidationError):
        est.regime_of("inf", "inf")


def test_tail_limit_converged_and_geometric():
    assert est.tail_limit([2.0, 1.5, 1.25, 1.25]) == (1.25, "converged")
    seq = [1 + 0.5**k for k in range(10)]
    val, method = est.tail_limit(seq)
    assert method == "extrapolated"
    assert val == pytest.approx(1.0, abs=1e-12)


def test_tail_limit_rejects_oscillation():
    with pytest.raises(NonConvergent):
        est.tail_limit([1.0, 2.0, 1.0, 2.0, 1.0, 2.0])


@given(disk_points(0.99))
def test_poisson_normalisation(a):
    for method in ("trapezoid", "adaptive"):
        assert est.kernel_integral(1.0, fs.identity(), 2, 2, a, method=method) == pytest.approx(1.0, abs=1e-8)


@given(disk_points(0.9))
def test_kernel_integral_closed_form_p2_q4(a):
    r2 = abs(a) ** 2
    got = est.kernel_integral(1.0, fs.identity(), 2, 4, a, method="adaptive")
    assert got == pytest.approx((1 + r2) / (1 - r2), abs=1e-7)


def test_kernel_integral_of_dilation_matches_series():
    sched = est.RingSchedule.dyadic(3, 8, 16)
    trace = est.ring_sweep(1.0, HALF, 2, 2, sched)
    r = np.asarray(trace.radii)
    assert np.allclose(trace.maxima, (1 - r**2) / (1 - r**2 / 4), atol=1e-10)
    assert trace.at_origin == pytest.approx(1.0)


def test_boundedness_of_identity_and_divergence_for_p_below_q():
    assert est.boundedness_pq(1.0, fs.identity(), 2, 2).bounded
    res = est.boundedness_pq(1.0, fs.identity(), 2, 4)
    assert not res.bounded and math.isinf(res.sup_estimate)


def test_boundedness_pq_needs_ordered_exponents():
    with pytest.raises(ValidationError):
        est.boundedness_pq(1.0, fs.identity(), 4, 2)


def test_classify_growth_undecided():
    assert est._classify_growth([1, 1.2, 1.3, 1.4]) is None
    trace = est.RingTrace((0.5, 0.75, 0.875, 0.9375), (1, 1.2, 1.3, 1.4), (1,) * 4, (0j,) * 4, 1.0)
    with pytest.raises(Undecided) as info:
        est.boundedness_pq(1.0, fs.identity(), 2, 2, trace=trace)
    assert info.value.trace is trace


def test_lower_constant():
    assert est.lower_constant(2, 2) == 1.0
    assert est.lower_constant(1, 2) == 0.5


def test_essnorm_bracket_for_compact_dilation():
    b = est.essnorm_pq(1.0, HALF, 1, 1)
    assert b.compact
    assert 0 <= b.lower <= b.upper < 0.05


def test_m_phi_for_tangent_map():
    u = fs.polynomial([1, -1])
    val, seq = est.m_phi(u, fs.SelfMap(fs.polynomial([0.5, 0.5])), 2)
    assert val == pytest.approx(2.0, rel=1e-6)
    assert len(seq) == 10


def test_m_phi_needs_full_modulus():
    with pytest.raises(ValidationError):
        est.m_phi(1.0, HALF, 2)


def test_essnorm_p_inf_compact_when_sup_below_one():
    b = est.essnorm_p_inf(1.0, HALF, 2)
    assert (b.lower, b.upper, b.compact) == (0.0, 0.0, True)


def test_boundedness_p_inf():
    assert not est.boundedness_p_inf(1.0, fs.SelfMap(fs.identity()), 2).bounded
    assert est.boundedness_p_inf(1.0, HALF, 2).bounded


def test_extremal_integral_of_inner_map():
    assert est.extremal_integral(1.0, B3, 2) == pytest.approx(1.0, abs=1e-6)


def test_extremal_integral_of_tangent_map_vanishes():
    val, det = est.extremal_integral(1.0, fs.SelfMap(fs.polynomial([0.5, 0.5])), 2, return_details=True)
    assert val < 1e-3
    assert det["method"] == "extrapolated"
    assert np.all(np.diff(det["sequence"]) <= 0)


def test_power_norm_limit_of_inner_map():
    val, det = est.power_norm_limit(1.0, B3, 2)
    assert val == pytest.approx(1.0, abs=1e-3)
    assert len(det["sequence"]) == 17


def test_composition_norm_surrogate():
    assert est.composition_norm_surrogate(fs.SelfMap(fs.identity()), 2) == 1.0
    phi = fs.SelfMap(fs.polynomial([0.5, 0.5]))
    assert est.composition_norm_surrogate(phi, 2) == pytest.approx(math.sqrt(3))


def test_essnorm_p_gt_q_for_inner_map():
    b = est.essnorm_p_gt_q(1.0, B3, 4, 2)
    assert b.lower == pytest.approx(1.0, abs=1e-6)
    assert b.lower <= b.upper


def test_analyze_reports_unbounded():
    rep = est.analyze(1.0, fs.identity(), 2, 4, truncation=False)
    assert rep.status == "unbounded" and rep.bracket is None
    assert rep.to_dict()["bounded"] is False


def test_analyze_rejects_zero_weight():
    with pytest.raises(ValidationError):
        est.analyze(0.0, fs.identity(), 2, 2)
