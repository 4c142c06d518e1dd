"""Acceptance suite shared by ``hardyop selftest`` and the test-suite.

Each ``criterion_<n>`` returns a :class:`CriterionResult`; none of them raise
on a numerical miss, so a failing criterion is reported rather than aborting
the run.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import estimators as est
from . import funcspace as fs
from . import measures as ms
from . import smoothing as sm
from . import truncation as tr
from .scenario import Scenario, parse_scenario

# (name, u, phi, p, q, expected compact)
SUITE = (
    ("identity_22", "1", "z", "2", "2", False),
    ("square_22", "1", "pow(z, 2)", "2", "2", False),
    ("shift_22", "z", "z", "2", "2", False),
    ("blaschke3_22", "1", "blaschke(0, 0.5, -0.3+0.4j)", "2", "2", False),
    ("half_11", "1", "mul(0.5, z)", "1", "1", True),
    ("identity_11", "1", "z", "1", "1", False),
    ("half_2inf", "1", "mul(0.5, z)", "2", "inf", True),
    ("tangent_2inf", "poly(1, -1)", "poly(0.5, 0.5)", "2", "inf", False),
    ("blaschke3_inf2", "1", "blaschke(0, 0.5, -0.3+0.4j)", "inf", "2", False),
    ("tangent_inf2", "poly(1, 1)", "poly(0.5, 0.5)", "inf", "2", True),
    ("blaschke3_42", "1", "blaschke(0, 0.5, -0.3+0.4j)", "4", "2", False),
    ("half_42", "1", "mul(0.5, z)", "4", "2", True),
)


def suite_text(entry) -> str:
    name, u, phi, p, q, _ = entry
    return f"name = {name}\nu = {u}\nphi = {phi}\np = {p}\nq = {q}\n"


def suite_scenarios() -> list[Scenario]:
    return [parse_scenario(suite_text(e)) for e in SUITE]


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    elapsed: float = 0.0
    values: dict = field(default_factory=dict)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] criterion {self.number:2d}: {self.title} ({self.elapsed:.2f} s) {self.detail}"


def _close(x, target, tol) -> bool:
    return x is not None and math.isfinite(x) and abs(x - target) <= tol


def random_polynomials(n: int = 200, max_degree: int = 64, seed: int = 20240611):
    """Complex Gaussian polynomials of random degree, normalised to unit ``H^1`` norm.

    Returns a list of coefficient arrays.
    """
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        deg = int(rng.integers(0, max_degree + 1))
        c = rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)
        c /= fs.hardy_norm(fs.polynomial(c), 1)
        out.append(c)
    return out


def random_selfmaps(n: int = 20, seed: int = 7):
    """Self-maps drawn from Blaschke products, small polynomials, dilations and compositions."""
    rng = np.random.default_rng(seed)

    def disk_point(rmax):
        return rmax * math.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())

    def one():
        kind = int(rng.integers(0, 3))
        if kind == 0:
            return fs.blaschke([disk_point(0.7) for _ in range(int(rng.integers(1, 4)))])
        if kind == 1:
            c = rng.standard_normal(int(rng.integers(2, 6))) + 1j * rng.standard_normal(1)
            c *= rng.uniform(0.3, 0.95) / np.abs(c).sum()
            return fs.polynomial(c)
        return fs.radial_dilation(fs.blaschke([disk_point(0.7)]), rng.uniform(0.3, 0.95))

    maps = []
    for _ in range(n):
        f = one()
        if rng.uniform() < 0.3:
            f = fs.compose(f, one())
        maps.append((fs.SelfMap(f), disk_point(0.9), int(rng.integers(0, 21))))
    return maps


# --------------------------------------------------------------------------- criteria


def criterion_1() -> CriterionResult:
    cfg = est.AnalysisConfig(grid=2**14, truncation_degree=256)
    t0 = time.perf_counter()
    rep = est.analyze(1.0, fs.identity(), 2, 2, cfg)
    dt = time.perf_counter() - t0
    b, t = rep.bracket, rep.truncation
    vals = {"kernel_upper": b and b.upper_raw, "kernel_lower": b and b.lower_raw,
            "trunc_upper": t and t.upper, "trunc_lower": t and t.lower, "seconds": dt}
    ok = (rep.status == "ok" and _close(b.upper_raw, 1, 1e-6) and _close(b.lower_raw, 1, 1e-6)
          and _close(t.upper, 1, 1e-8) and _close(t.lower, 0.5, 1e-8) and dt < 5.0)
    return CriterionResult(1, "identity bracket", ok, _fmt(vals), dt, vals)


def criterion_2() -> CriterionResult:
    t0 = time.perf_counter()
    radii = np.linspace(0.0, 0.99, 50)
    angles = np.pi * (3.0 - math.sqrt(5.0)) * np.arange(50)
    a_vals = radii * np.exp(1j * angles)
    errs = [abs(est.kernel_integral(1.0, fs.identity(), 2, 2, a, M=2**16, method="trapezoid") - 1.0)
            for a in a_vals]
    dt = time.perf_counter() - t0
    vals = {"max_error": max(errs), "seconds": dt}
    return CriterionResult(2, "Poisson normalisation", max(errs) <= 1e-8 and dt < 10.0, _fmt(vals), dt, vals)


def criterion_3() -> CriterionResult:
    t0 = time.perf_counter()
    radii = np.linspace(0.0, 0.9, 20)
    a_vals = radii * np.exp(1j * np.linspace(0, 2 * np.pi, 20, endpoint=False))
    errs = []
    for a in a_vals:
        r2 = abs(a) ** 2
        got = est.kernel_integral(1.0, fs.identity(), 2, 4, a, method="trapezoid")
        errs.append(abs(got - (1 + r2) / (1 - r2)))
    bounded = est.boundedness_pq(1.0, fs.identity(), 2, 4).bounded
    dt = time.perf_counter() - t0
    vals = {"max_error": max(errs), "bounded": bounded}
    return CriterionResult(3, "closed-form kernel integral", max(errs) <= 1e-7 and bounded is False,
                           _fmt(vals), dt, vals)


def criterion_4() -> CriterionResult:
    t0 = time.perf_counter()
    phi = fs.SelfMap(fs.polynomial([0, 0.5]))
    trace = est.ring_sweep(1.0, phi, 2, 2)
    r = np.asarray(trace.radii)
    expected = (1 - r**2) / (1 - r**2 / 4)
    err = float(np.max(np.abs(np.asarray(trace.maxima) - expected)))
    T = tr.build_matrix(1.0, phi)
    up64 = tr.essnorm_h2_upper(T, 64)
    dt = time.perf_counter() - t0
    vals = {"ring_max_error": err, "upper_at_N64": up64}
    return CriterionResult(4, "compact decay", err <= 1e-8 and up64 < 1e-3, _fmt(vals), dt, vals)


def criterion_5() -> CriterionResult:
    t0 = time.perf_counter()
    rep = est.analyze(1.0, fs.monomial(2), 2, 2)
    dt = time.perf_counter() - t0
    b, t = rep.bracket, rep.truncation
    vals = {"kernel_upper": b and b.upper_raw, "kernel_lower": b and b.lower_raw, "trunc_upper": t and t.upper}
    ok = (rep.status == "ok" and _close(b.upper_raw, 1, 1e-6) and _close(b.lower_raw, 1, 1e-6)
          and _close(t.upper, 1, 1e-8))
    return CriterionResult(5, "inner-map isometry", ok, _fmt(vals), dt, vals)


def criterion_6(polys=None) -> CriterionResult:
    t0 = time.perf_counter()
    polys = polys if polys is not None else random_polynomials()
    worst = -math.inf
    for c in polys:
        for N in (8, 32, 128):
            rem = sm.fejer_remainder(c, N)
            g = fs.polynomial(rem) if np.any(rem) else None
            for r in (0.3, 0.5, 0.8):
                sup = fs.hardy_norm(g, "inf", 4096, radius=r) if g is not None else 0.0
                worst = max(worst, sup - sm.remainder_sup_bound(r, N))
    dt = time.perf_counter() - t0
    vals = {"max_excess": worst, "seconds": dt}
    return CriterionResult(6, "Fejér remainder bound", worst <= 1e-10 and dt < 30.0, _fmt(vals), dt, vals)


def criterion_7(polys=None) -> CriterionResult:
    t0 = time.perf_counter()
    polys = polys if polys is not None else random_polynomials()
    worst_k = worst_r = -math.inf
    for c in polys:
        f = fs.polynomial(c)
        norms = {p: fs.hardy_norm(f, p) for p in (1, 2)}
        for N in (8, 32, 128):
            k = sm.fejer_apply(c, N)
            worst_k = max(worst_k, fs.hardy_norm(fs.polynomial(k), 1) - norms[1])
            rem = sm.fejer_remainder(c, N)
            for p in (1, 2):
                rn = fs.hardy_norm(fs.polynomial(rem), p) if np.any(rem) else 0.0
                worst_r = max(worst_r, rn - 2 * norms[p])
    dt = time.perf_counter() - t0
    vals = {"fejer_excess": worst_k, "remainder_excess": worst_r}
    return CriterionResult(7, "contraction suite", worst_k <= 1e-10 and worst_r <= 1e-10, _fmt(vals), dt, vals)


def criterion_8() -> CriterionResult:
    t0 = time.perf_counter()
    tangent = fs.SelfMap(fs.polynomial([0.5, 0.5]))
    eps = 2.0 ** -np.arange(3, 13)
    tangent_J, det = est.extremal_integral(1.0, tangent, 2, eps, return_details=True)
    B3 = fs.SelfMap(fs.blaschke([0, 0.5, -0.3 + 0.4j]))
    J = est.extremal_integral(1.0, B3, 2)
    lim, _ = est.power_norm_limit(1.0, B3, 2)
    dt = time.perf_counter() - t0
    vals = {"tangent_estimate": tangent_J, "tangent_last_level": det["sequence"][-1],
            "blaschke_extremal": J, "power_limit": lim}
    ok = tangent_J < 1e-3 and _close(J, 1, 1e-6) and _close(lim, 1, 1e-3)
    return CriterionResult(8, "extremal-set regime", ok, _fmt(vals), dt, vals)


def criterion_9() -> CriterionResult:
    t0 = time.perf_counter()
    ident = fs.SelfMap(fs.identity())
    half = fs.SelfMap(fs.polynomial([0, 0.5]))
    rejected = []
    for p, q in ((1, 2), (1, 4), (1.5, 3), (2, 3), (2, 4), (3, 8)):
        mu = ms.pullback(1.0, ident, q)
        cl = ms.classify_carleson(mu, p, q)
        rejected.append((not cl.is_carleson) and abs(mu.boundary_mass - mu.total_mass) <= 1e-12)
    accepted = []
    g_err = 0.0
    annulus = []
    for p, q in ((2, 1), (4, 2), (3, 2)):
        mu = ms.pullback(1.0, half, q)
        cl = ms.classify_carleson(mu, p, q, refined=ms.pullback(1.0, half, q, 2 * mu.grid_size))
        accepted.append(cl.is_carleson)
        G = ms.balayage_grid(mu, 0.6)
        g_err = max(g_err, float(np.max(np.abs(G - 4.0 / 3.0))))
        for r in (0.51, 0.6, 0.9, 0.99):
            annulus.append(ms.ls_norm_G(ms.restrict_annulus(mu, r), p / (p - q), 0.6))
    dt = time.perf_counter() - t0
    vals = {"rejected": all(rejected), "accepted": all(accepted), "G_error": g_err,
            "annulus_max": max(annulus)}
    ok = all(rejected) and all(accepted) and g_err <= 1e-9 and all(v == 0.0 for v in annulus)
    return CriterionResult(9, "Carleson classifier", ok, _fmt(vals), dt, vals)


def criterion_10() -> CriterionResult:
    t0 = time.perf_counter()
    worst = 0.0
    for phi, a, p in random_selfmaps():
        alpha = tr.kernel_coefficient_alpha(phi, a, p)
        direct = fs.taylor_coefficients(fs.compose(fs.reproducing_kernel_fn(a), phi.map), 32)[p]
        worst = max(worst, abs(alpha - direct / (1 - abs(a) ** 2)))
    dt = time.perf_counter() - t0
    vals = {"max_error": worst}
    return CriterionResult(10, "kernel coefficient cross-check", worst <= 1e-8, _fmt(vals), dt, vals)


def criterion_11(scenarios=None) -> CriterionResult:
    t0 = time.perf_counter()
    scenarios = scenarios if scenarios is not None else suite_scenarios()
    problems = []
    for entry, s in zip(SUITE, scenarios):
        rep = est.analyze(s.u, s.phi, s.p, s.q, s.config)
        if rep.status != "ok":
            problems.append(f"{s.name}: status {rep.status}")
            continue
        b = rep.bracket
        if b.lower > b.upper + 1e-9:
            problems.append(f"{s.name}: lower {b.lower} > upper {b.upper}")
        if entry[5] and not (b.compact and b.upper < s.config.compact_threshold):
            problems.append(f"{s.name}: expected compact, upper {b.upper}")
        if rep.truncation is not None:
            t = rep.truncation
            if max(b.lower, t.lower) > min(b.upper, t.upper) + 1e-9:
                problems.append(f"{s.name}: kernel [{b.lower}, {b.upper}] misses truncation [{t.lower}, {t.upper}]")
        elif s.p.value == 2 and s.q.value == 2 and not s.p.infinite and not s.q.infinite:
            problems.append(f"{s.name}: no truncation bracket")
    dt = time.perf_counter() - t0
    vals = {"scenarios": len(scenarios), "problems": problems}
    return CriterionResult(11, "bracket sanity across regimes", not problems,
                           "; ".join(problems) or f"{len(scenarios)} scenarios consistent", dt, vals)


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11)


def run_all(echo=None) -> list[CriterionResult]:
    """Run every criterion; ``echo`` receives each result line as it completes."""
    polys = random_polynomials()
    out = []
    for fn in CRITERIA:
        res = fn(polys) if fn in (criterion_6, criterion_7) else fn()
        out.append(res)
        if echo:
            echo(res.line())
    return out


def _fmt(vals: dict) -> str:
    parts = []
    for k, v in vals.items():
        parts.append(f"{k}={v:.3g}" if isinstance(v, float) else f"{k}={v}")
    return " ".join(parts)
