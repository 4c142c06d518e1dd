"""Boundedness tests, compactness tests and essential-norm brackets for ``uC_φ: H^p → H^q``.

Four regimes are handled:

``p<=q finite`` / ``p=1<=q``
    Kernel integrals ``∫ |u|^q ((1-|a|^2)/|1-conj(a)φ|^2)^{q/p} dm`` swept over
    rings ``|a| = r_k``.
``H^p->H^inf``
    The quantity ``M_φ(u)`` on superlevel sets of ``|φ|`` in the disk.
``H^inf->H^q``
    ``∫_{E_φ} |u|^q dm`` over the set where ``|φ*| = 1``.
``p>q finite``
    Carleson classification of the pullback measure plus integrals over
    ``E_φ``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import funcspace as fs
from . import measures as ms
from . import truncation as tr
from .errors import (AliasingTooLarge, EmptyLevel, HardyError, NoConvergence, NonConvergent, NotBounded,
                     Undecided, ValidationError)
from .quadrature import circle_integral_batch

GROWTH_RATIO = 1.10
STABLE_RATIO = 1.05
EXTREMAL_RTOL = 1e-4


@dataclass(frozen=True)
class AnalysisConfig:
    """Grid sizes, schedules and thresholds for one analysis run."""

    grid: int = fs.DEFAULT_GRID
    kernel_grid: int = fs.KERNEL_GRID
    ring_k_min: int = 3
    ring_k_max: int = 14
    ring_angles: int = 256
    kernel_method: str = "adaptive"
    quad_tol: float = 1e-10
    eps_k_min: int = 3
    eps_k_max: int = 12
    extremal_grid: int = 2**16
    disk_angles: int = 2048
    power_k_max: int = 16
    depth: int = ms.DEFAULT_DEPTH
    alpha: float = 0.5
    truncation_degree: int = tr.DEFAULT_DEGREE
    n_schedule: tuple = tr.DEFAULT_SCHEDULE
    remainder: str = "dirichlet"
    compact_threshold: float = 0.05
    composition_norm: str = "surrogate"

    def __post_init__(self):
        object.__setattr__(self, "n_schedule", tuple(int(n) for n in self.n_schedule))
        if self.ring_k_max - self.ring_k_min < 3:
            raise ValidationError("ring schedule needs at least four rings")
        if self.eps_k_max - self.eps_k_min < 2:
            raise ValidationError("epsilon schedule needs at least three values")
        if self.kernel_method not in ("adaptive", "trapezoid"):
            raise ValidationError("kernel_method must be 'adaptive' or 'trapezoid'")
        if self.composition_norm not in ("surrogate", "truncation"):
            raise ValidationError("composition_norm must be 'surrogate' or 'truncation'")
        if not 0.0 < self.alpha < 1.0:
            raise ValidationError("alpha must lie in (0, 1)")

    @property
    def eps_schedule(self) -> np.ndarray:
        return 2.0 ** -np.arange(self.eps_k_min, self.eps_k_max + 1)

    def ring_schedule(self) -> "RingSchedule":
        return RingSchedule.dyadic(self.ring_k_min, self.ring_k_max, self.ring_angles)


@dataclass(frozen=True)
class RingSchedule:
    """Radii ``r_k`` increasing to 1 and the number of equispaced angles per ring."""

    radii: tuple
    angles: int = 256

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        if r.ndim != 1 or r.size == 0 or np.any(r <= 0) or np.any(r >= 1) or np.any(np.diff(r) <= 0):
            raise ValidationError("radii must be strictly increasing in (0, 1)")
        object.__setattr__(self, "radii", tuple(float(x) for x in r))

    @classmethod
    def dyadic(cls, k_min: int = 3, k_max: int = 14, angles: int = 256):
        return cls(tuple(1.0 - 2.0**-k for k in range(k_min, k_max + 1)), angles)

    def ring(self, i: int) -> np.ndarray:
        return self.radii[i] * np.exp(2j * np.pi * np.arange(self.angles) / self.angles)


@dataclass(frozen=True)
class EssNormBracket:
    """Two-sided essential-norm estimate.

    ``lower`` and ``upper`` already include the bracket constants; the raw
    quantities they were built from are kept alongside.
    """

    lower: float
    upper: float
    regime: str
    constants: tuple
    lower_raw: float
    upper_raw: float
    compact: bool = False
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        d = asdict(self)
        d["constants"] = list(self.constants)
        return d


# --------------------------------------------------------------------------- helpers


def _exps(p, q):
    return fs.as_exponent(p), fs.as_exponent(q)


def _regime(p: fs.Exponent, q: fs.Exponent) -> str:
    if p.infinite and q.infinite:
        raise ValidationError("p = q = ∞ is not covered")
    if q.infinite:
        return "H^p->H^inf"
    if p.infinite:
        return "H^inf->H^q"
    if p.value > q.value:
        return "p>q finite"
    return "p=1<=q" if p.value == 1.0 else "p<=q finite"


def regime_of(p, q) -> str:
    """Regime tag for the exponent pair."""
    return _regime(*_exps(p, q))


def tail_limit(values, rtol: float = EXTREMAL_RTOL, max_ratio: float = 0.95):
    """Limit of a sequence that converges geometrically from above.

    Returns ``(limit, method)``. When the last two values agree to ``rtol``
    the last value is returned as is. Otherwise the successive differences
    of the last five values are fitted by ``C ρ^k`` in log space and the
    remaining geometric tail is subtracted.

    Raises
    ------
    NonConvergent
        If the differences are not positive, not geometric, or decay too
        slowly (``ρ > max_ratio``).
    """
    v = np.asarray(values, dtype=float)
    last, prev = float(v[-1]), float(v[-2])
    if abs(last - prev) <= rtol * max(abs(last), abs(prev)) or max(abs(last), abs(prev)) < 1e-300:
        return last, "converged"
    window = v[-5:]
    d = -np.diff(window)
    if window.size < 4 or np.any(d <= 0):
        raise NonConvergent(f"sequence does not settle: last values {window.tolist()}")
    k = np.arange(d.size)
    slope, intercept = np.polyfit(k, np.log(d), 1)
    resid = np.log(d) - (intercept + slope * k)
    rho = math.exp(slope)
    if not 0.0 < rho < max_ratio or np.max(np.abs(resid)) > 0.2:
        raise NonConvergent(f"sequence tail is not geometric (ratio {rho:.3g})")
    next_diff = math.exp(intercept + slope * d.size)
    limit = last - next_diff / (1.0 - rho)
    return float(min(max(limit, 0.0), last)), "extrapolated"


# --------------------------------------------------------------------------- kernel integrals


def _kernel_weight(a, one_minus_abs2, values_phi, expo):
    d = np.abs(1.0 - np.conj(a) * values_phi) ** 2
    return (one_minus_abs2 / d) ** expo


def kernel_integral_trapezoid(u, phi, p, q, a, M: int = fs.KERNEL_GRID, *, tol: float = fs.NORM_TOL,
                              max_grid: int = fs.MAX_GRID) -> float:
    """Kernel integral on a uniform grid, doubled until successive values agree to ``tol``."""
    p, q = _exps(p, q)
    a = complex(a)
    if abs(a) >= 1:
        raise fs.OutsideDomain("|a| must be < 1")
    u, phi = fs.as_function(u), fs.as_selfmap(phi)
    e = q.finite / p.finite
    oma = 1.0 - abs(a) ** 2

    def at(Mg):
        tu = fs.boundary_trace(u, Mg)
        tp = fs.boundary_trace(phi.map, Mg)
        ok = ~(tu.singular | tp.singular)
        vals = np.abs(tu.values[ok]) ** q.value * _kernel_weight(a, oma, tp.values[ok], e)
        return float(vals.sum() / Mg)

    M = int(M)
    prev, cur = at(M), at(2 * M)
    while abs(cur - prev) > tol * abs(cur):
        M *= 2
        if 2 * M > max_grid:
            raise NonConvergent(f"kernel integral unconverged at grid {max_grid}")
        prev, cur = cur, at(2 * M)
    return cur


def _peak_breakpoints(phi: fs.SelfMap, a_values: np.ndarray, M0: int = 4096, max_peaks: int = 12):
    """Angles where ``|1 - conj(a) φ(ζ)|`` has local minima, refined by golden section."""
    theta = 2 * np.pi * np.arange(M0) / M0
    P = phi(np.exp(1j * theta))
    extra = [float(np.angle(s)) for s in phi.singular_points]
    out = []
    rows, centers = [], []
    for lo in range(0, a_values.size, 64):
        a = a_values[lo : lo + 64, None]
        D = np.abs(1.0 - np.conj(a) * P[None, :]) ** 2
        is_min = (D <= np.roll(D, 1, axis=1)) & (D < np.roll(D, -1, axis=1))
        for i in range(D.shape[0]):
            idx = np.flatnonzero(is_min[i])
            if idx.size > max_peaks:
                idx = idx[np.argsort(D[i, idx])[:max_peaks]]
            rows.extend([lo + i] * idx.size)
            centers.extend(theta[idx].tolist())
    rows = np.asarray(rows, dtype=int)
    centers = np.asarray(centers, dtype=float)
    h = 2 * np.pi / M0
    if rows.size:
        ac = np.conj(a_values[rows])
        best, _ = fs.golden_max(lambda t: -np.abs(1.0 - ac * phi(np.exp(1j * t))) ** 2,
                                centers - h, centers + h)
    else:
        best = centers
    for i in range(a_values.size):
        out.append(np.concatenate([best[rows == i], extra]))
    return out


def kernel_integrals_adaptive(u, phi, p, q, a_values, *, tol: float = 1e-10) -> np.ndarray:
    """Kernel integrals for many ``a`` by tanh-sinh quadrature split at the kernel peaks."""
    p, q = _exps(p, q)
    u, phi = fs.as_function(u), fs.as_selfmap(phi)
    a_values = np.atleast_1d(np.asarray(a_values, dtype=complex))
    r = np.abs(a_values)
    if np.any(r >= 1):
        raise fs.OutsideDomain("|a| must be < 1")
    oma = (1.0 - r) * (1.0 + r)
    e = q.finite / p.finite
    qv = q.value
    bps = _peak_breakpoints(phi, a_values)
    extra = [float(np.angle(s)) for s in u.singular_points]
    if extra:
        bps = [np.concatenate([b, extra]) for b in bps]

    def integrand(zeta, owner):
        U = u(zeta)
        P = phi(zeta)
        return np.abs(U) ** qv * _kernel_weight(a_values[owner], oma[owner], P, e)

    return circle_integral_batch(integrand, bps, tol=tol).values


def kernel_integral(u, phi, p, q, a, M: int = fs.KERNEL_GRID, method: str = "trapezoid") -> float:
    """``∫_T |u|^q ((1-|a|^2)/|1-conj(a)φ|^2)^{q/p} dm``.

    Parameters
    ----------
    method : {"trapezoid", "adaptive"}
        Uniform grid with doubling from ``M``, or tanh-sinh quadrature split at
        the peaks of the kernel (needed when ``|a|`` is very close to 1).
    """
    if method == "trapezoid":
        return kernel_integral_trapezoid(u, phi, p, q, a, M)
    if method == "adaptive":
        return float(kernel_integrals_adaptive(u, phi, p, q, [a])[0])
    raise ValidationError(f"unknown method {method!r}")


@dataclass(frozen=True)
class RingTrace:
    """Kernel integrals over a ring schedule."""

    radii: tuple
    maxima: tuple
    minima: tuple
    argmax: tuple
    at_origin: float

    def to_dict(self):
        return {
            "radii": list(self.radii),
            "maxima": list(self.maxima),
            "minima": list(self.minima),
            "argmax_re": [a.real for a in self.argmax],
            "argmax_im": [a.imag for a in self.argmax],
            "at_origin": self.at_origin,
        }


def ring_sweep(u, phi, p, q, schedule: RingSchedule | None = None, *, method: str = "adaptive",
               M: int = fs.KERNEL_GRID, tol: float = 1e-10) -> RingTrace:
    """Kernel integrals on every ring of ``schedule`` plus the value at ``a = 0``."""
    schedule = schedule or RingSchedule.dyadic()
    maxima, minima, argmax = [], [], []
    for i in range(len(schedule.radii)):
        a = schedule.ring(i)
        if method == "adaptive":
            vals = kernel_integrals_adaptive(u, phi, p, q, a, tol=tol)
        else:
            vals = np.array([kernel_integral_trapezoid(u, phi, p, q, x, M) for x in a])
        j = int(np.argmax(vals))
        maxima.append(float(vals[j]))
        minima.append(float(vals.min()))
        argmax.append(complex(a[j]))
    origin = float(kernel_integrals_adaptive(u, phi, p, q, [0j], tol=tol)[0])
    return RingTrace(schedule.radii, tuple(maxima), tuple(minima), tuple(argmax), origin)


@dataclass(frozen=True)
class BoundednessResult:
    bounded: bool
    sup_estimate: float
    diagnostics: dict = field(default_factory=dict)


def _classify_growth(maxima):
    m = np.asarray(maxima, dtype=float)
    ratios = m[1:] / np.where(m[:-1] > 0, m[:-1], np.finfo(float).tiny)
    if ratios.size >= 3 and np.all(ratios[-3:] > GROWTH_RATIO):
        return False
    if m[-1] <= STABLE_RATIO * m[-2]:
        return True
    return None


def boundedness_pq(u, phi, p, q, schedule: RingSchedule | None = None, *, trace: RingTrace | None = None,
                   method: str = "adaptive") -> BoundednessResult:
    """Kernel-integral boundedness test for ``1 <= p <= q < ∞``.

    Unbounded when each of the last three ring maxima exceeds its predecessor
    by more than 10%; bounded when the last maximum is at most 5% above the
    one before.

    Raises
    ------
    Undecided
        Otherwise. The ring trace is attached as ``err.trace``.
    """
    p, q = _exps(p, q)
    if p.infinite or q.infinite or p.value > q.value:
        raise ValidationError("boundedness_pq needs 1 <= p <= q < ∞")
    trace = trace or ring_sweep(u, phi, p, q, schedule, method=method)
    verdict = _classify_growth(trace.maxima)
    sup = max(max(trace.maxima), trace.at_origin)
    diag = {"rings": trace.to_dict()}
    if verdict is None:
        err = Undecided("ring maxima neither stabilise nor diverge")
        err.trace = trace
        raise err
    return BoundednessResult(verdict, sup if verdict else math.inf, diag)


def essnorm_pq_upper(u, phi, p, q, schedule: RingSchedule | None = None, *,
                     trace: RingTrace | None = None) -> float:
    """``(max of the kernel integrals over the two outermost rings)^{1/q}``."""
    p, q = _exps(p, q)
    trace = trace or ring_sweep(u, phi, p, q, schedule)
    return max(trace.maxima[-2:]) ** (1.0 / q.finite)


def lower_constant(p, q) -> float:
    """1 when both exponents exceed 1, else 1/2."""
    p, q = _exps(p, q)
    return 1.0 if (p.value > 1.0 and q.value > 1.0) else 0.5


def essnorm_pq_lower(u, phi, p, q, schedule: RingSchedule | None = None, *,
                     trace: RingTrace | None = None, rings: int = 2) -> tuple:
    """Test-vector estimate ``max ||u·(k_a^{1/p} ∘ φ)||_q`` over the outermost rings.

    On each ring the test vector uses the ``a`` that maximised the kernel
    integral, and its norm is computed through the function tree, a route
    independent of the kernel-integral code.

    Returns
    -------
    value : float
        Raw limsup estimate, before the constant.
    constant : float
        The applicable lower constant (1 or 1/2).
    """
    p, q = _exps(p, q)
    u, phi = fs.as_function(u), fs.as_selfmap(phi)
    trace = trace or ring_sweep(u, phi, p, q, schedule)
    vals = []
    for a in trace.argmax[-rings:]:
        f = fs.mul(u, fs.compose(fs.kernel_power(a, p.value), phi.map))
        bps = _peak_breakpoints(phi, np.array([a]))[0]
        vals.append(fs.hardy_norm(f, q, breakpoints=bps, tol=1e-10))
    return max(vals), lower_constant(p, q)


def _tail_decreasing(maxima, k: int = 3) -> bool:
    m = np.asarray(maxima[-k:], dtype=float)
    return bool(np.all(np.diff(m) <= 1e-12 * max(m.max(), 1e-300)))


def essnorm_pq(u, phi, p, q, config: AnalysisConfig | None = None, *, trace: RingTrace | None = None) -> EssNormBracket:
    """Kernel bracket ``[c·lower, 2·upper]`` for ``1 <= p <= q < ∞``.

    The upper constant is the bound 2 on the norms of the smoothing remainders.
    """
    cfg = config or AnalysisConfig()
    p, q = _exps(p, q)
    trace = trace or ring_sweep(u, phi, p, q, cfg.ring_schedule(), method=cfg.kernel_method, tol=cfg.quad_tol)
    up = essnorm_pq_upper(u, phi, p, q, trace=trace)
    low, c = essnorm_pq_lower(u, phi, p, q, trace=trace)
    upper = 2.0 * up
    compact = upper < cfg.compact_threshold and _tail_decreasing(trace.maxima)
    return EssNormBracket(c * low, upper, _regime(p, q), (c, 2.0), low, up, compact,
                          {"rings": trace.to_dict()})


# --------------------------------------------------------------------------- H^p -> H^inf


def _disk_grid(n_angles: int, depth: int):
    """Polar grid with radii ``1 - 2^-j`` (j = 1..depth), a uniform interior part and the circle."""
    radii = np.unique(np.concatenate([np.linspace(0.0, 0.5, 6), 1.0 - 2.0 ** -np.arange(1, depth + 1), [1.0]]))
    theta = 2 * np.pi * np.arange(n_angles) / n_angles
    return (radii[:, None] * np.exp(1j * theta)[None, :]).ravel()


def _growth_samples(u, phi, p: float, z):
    """``|φ(z)|`` and ``|u(z)| / (1 - |φ(z)|^2)^{1/p}`` on the grid.

    Points where ``φ`` is unimodular to rounding get ``inf`` (or NaN when
    ``u`` vanishes there too).
    """
    U = np.abs(u(z))
    P = np.abs(phi(z))
    ok = np.isfinite(U) & np.isfinite(P)
    U, P = U[ok], P[ok]
    den = (1.0 - P) * (1.0 + P)
    touching = den <= 1e-15
    with np.errstate(divide="ignore", invalid="ignore"):
        val = U / np.where(touching, 1.0, den) ** (1.0 / p)
    val = np.where(touching, np.where(U > 1e-12, np.inf, np.nan), val)
    return P, val


def boundedness_p_inf(u, phi, p, *, angles: int = 2048) -> BoundednessResult:
    """Grid supremum of ``|u|^p / (1 - |φ|^2)`` at three near-boundary refinements.

    Raises
    ------
    Undecided
        If the three suprema neither agree within 5% nor grow by 10% per step.
    """
    p = fs.as_exponent(p).finite
    u, phi = fs.as_function(u), fs.as_selfmap(phi)
    sups = []
    for n, depth in ((angles // 2, 20), (angles, 30), (2 * angles, 40)):
        _, val = _growth_samples(u, phi, p, _disk_grid(n, depth))
        sups.append(float(np.nanmax(val)) ** p)
    diag = {"grid_sups": sups}
    if math.isinf(sups[-1]):
        return BoundednessResult(False, math.inf, diag)
    if abs(sups[-1] - sups[-2]) <= 0.05 * sups[-1]:
        return BoundednessResult(True, sups[-1], diag)
    if sups[1] > GROWTH_RATIO * sups[0] and sups[2] > GROWTH_RATIO * sups[1]:
        return BoundednessResult(False, math.inf, diag)
    raise Undecided(f"disk-grid suprema unstable: {sups}")


def m_phi(u, phi, p, eps_schedule=None, *, angles: int = 2048, depth: int = 40):
    """``M_φ(u)``: limsup of ``|u(z)| / (1-|φ(z)|^2)^{1/p}`` as ``|φ(z)| → 1``.

    For each ε the supremum is taken over disk-grid points with
    ``|φ(z)| > 1 - ε``.

    Returns
    -------
    value : float
        The final-ε value, or ``inf`` when the sequence diverges.
    sequence : list of float

    Raises
    ------
    EmptyLevel
        If some level set stays empty after one angular refinement.
    """
    p = fs.as_exponent(p).finite
    u, phi = fs.as_function(u), fs.as_selfmap(phi)
    if phi.sup_modulus_estimate < 1.0 - 1e-9:
        raise ValidationError("m_phi needs ||φ||_∞ = 1")
    eps = np.asarray(eps_schedule if eps_schedule is not None else 2.0 ** -np.arange(3, 13), dtype=float)
    P, val = _growth_samples(u, phi, p, _disk_grid(angles, depth))
    refined = False
    seq = []
    for e in eps:
        sel = P > 1.0 - e
        if not sel.any() and not refined:
            P, val = _growth_samples(u, phi, p, _disk_grid(2 * angles, depth))
            refined = True
            sel = P > 1.0 - e
        if not sel.any():
            raise EmptyLevel(f"no grid point with |φ| > 1 - {e:g}")
        v = val[sel]
        v = v[~np.isnan(v)]
        seq.append(float(v.max()) if v.size else 0.0)
    value = seq[-1]
    s = np.asarray(seq)
    if len(seq) >= 4 and np.all(s[-3:] > GROWTH_RATIO * s[-4:-1]):
        value = math.inf
    return value, seq


def essnorm_p_inf(u, phi, p, config: AnalysisConfig | None = None) -> EssNormBracket:
    """Bracket ``[c·M_φ(u), 2·M_φ(u)]`` with ``c = 1`` for ``p > 1`` and 1/2 for ``p = 1``.

    A symbol with ``||φ||_∞ < 1`` gives a compact operator and the bracket [0, 0].

    Raises
    ------
    NotBounded
        If ``M_φ(u)`` diverges.
    """
    cfg = config or AnalysisConfig()
    pe = fs.as_exponent(p)
    pv = pe.finite
    phi = fs.as_selfmap(phi)
    c = 1.0 if pv > 1.0 else 0.5
    regime = "H^p->H^inf"
    if phi.sup_modulus_estimate < 1.0 - 1e-9:
        return EssNormBracket(0.0, 0.0, regime, (c, 2.0), 0.0, 0.0, True,
                              {"reason": "sup |phi| < 1", "sup_modulus": phi.sup_modulus_estimate})
    M, seq = m_phi(u, phi, pv, cfg.eps_schedule, angles=cfg.disk_angles)
    diag = {"eps": cfg.eps_schedule.tolist(), "m_phi_sequence": seq}
    if math.isinf(M):
        raise NotBounded("M_phi(u) diverges")
    upper = 2.0 * M
    return EssNormBracket(c * M, upper, regime, (c, 2.0), M, M, upper < cfg.compact_threshold, diag)


# --------------------------------------------------------------------------- extremal set


def extremal_sequence(u, phi, t, eps_schedule=None, M: int = 2**16) -> list:
    """``∫ |u|^t`` over ``{|φ*| > 1 - ε}`` for each ε, by the trapezoid rule."""
    t = fs.as_exponent(t).finite
    u, phi = fs.as_function(u), fs.as_selfmap(phi)
    eps = np.asarray(eps_schedule if eps_schedule is not None else 2.0 ** -np.arange(3, 13), dtype=float)
    tu = fs.boundary_trace(u, M)
    tp = fs.boundary_trace(phi.map, M)
    ok = ~(tu.singular | tp.singular)
    U = np.abs(tu.values[ok]) ** t
    P = np.abs(tp.values[ok])
    return [float(U[P > 1.0 - e].sum() / M) for e in eps]


def extremal_integral(u, phi, t, eps_schedule=None, M: int = 2**16, *, return_details: bool = False):
    """Estimate of ``∫_{E_φ} |u|^t dm`` where ``E_φ = {|φ*| = 1}``.

    The superlevel integrals decrease as ε does. If the last two agree to
    1e-4 relative the last one is returned; otherwise a geometric tail is
    fitted and extrapolated (see :func:`tail_limit`).

    Raises
    ------
    NonConvergent
        If the sequence neither settles nor decays geometrically.
    """
    seq = extremal_sequence(u, phi, t, eps_schedule, M)
    value, method = tail_limit(seq)
    if return_details:
        return value, {"sequence": seq, "method": method}
    return value


def essnorm_inf_q(u, phi, q, config: AnalysisConfig | None = None) -> EssNormBracket:
    """Bracket ``[J^{1/q}/2, 2 J^{1/q}]`` with ``J = ∫_{E_φ} |u|^q dm``."""
    cfg = config or AnalysisConfig()
    q = fs.as_exponent(q).finite
    norm_u = fs.hardy_norm(u, q, cfg.grid)
    if not math.isfinite(norm_u):
        raise NotBounded("u is not in H^q")
    J, det = extremal_integral(u, phi, q, cfg.eps_schedule, cfg.extremal_grid, return_details=True)
    root = J ** (1.0 / q)
    diag = {"eps": cfg.eps_schedule.tolist(), "extremal": det, "norm_u": norm_u}
    upper = 2.0 * root
    return EssNormBracket(0.5 * root, upper, "H^inf->H^q", (0.5, 2.0), root, root,
                          upper < cfg.compact_threshold, diag)


# --------------------------------------------------------------------------- p > q


def composition_norm_surrogate(phi, s: float) -> float:
    """Classical bound ``((1+|φ(0)|)/(1-|φ(0)|))^{1/s}`` for ``||C_φ||`` on ``H^s``."""
    phi = fs.as_selfmap(phi)
    a0 = abs(complex(phi(np.array([0j]))[0]))
    return ((1.0 + a0) / (1.0 - a0)) ** (1.0 / s)


def essnorm_p_gt_q(u, phi, p, q, config: AnalysisConfig | None = None, *,
                   carleson: ms.CarlesonClassification | None = None) -> EssNormBracket:
    """Bracket for ``∞ > p > q``.

    Lower: ``(∫_{E_φ}|u|^q)^{1/q}``. Upper:
    ``2 B^{1/q} (∫_{E_φ}|u|^{pq/(p-q)})^{(p-q)/(pq)}`` with ``B`` the bound on
    ``||C_φ||_{H^{p/q}}`` (the surrogate, or for ``p/q = 2`` optionally the
    truncated matrix norm).

    Raises
    ------
    NotBounded
        If the pullback measure is not (p, q)-Carleson.
    """
    cfg = config or AnalysisConfig()
    p, q = _exps(p, q)
    pv, qv = p.finite, q.finite
    if not pv > qv:
        raise ValidationError("essnorm_p_gt_q needs p > q")
    u, phi = fs.as_function(u), fs.as_selfmap(phi)
    if carleson is None:
        mu = ms.pullback(u, phi, qv, cfg.grid)
        mu2 = ms.pullback(u, phi, qv, 2 * cfg.grid)
        carleson = ms.classify_carleson(mu, pv, qv, depth=cfg.depth, alpha=cfg.alpha, refined=mu2)
    if not carleson.is_carleson:
        raise NotBounded("pullback measure is not (p, q)-Carleson")
    s = pv / qv
    if cfg.composition_norm == "truncation" and s == 2.0:
        B = tr.operator_norm_h2(tr.build_matrix(fs.constant(1.0), phi, cfg.truncation_degree, cfg.grid))
        b_label = "truncation"
    else:
        B = composition_norm_surrogate(phi, s)
        b_label = "surrogate (classical bound, not from the estimate itself)"
    t_up = pv * qv / (pv - qv)
    J_low, d_low = extremal_integral(u, phi, qv, cfg.eps_schedule, cfg.extremal_grid, return_details=True)
    J_up, d_up = extremal_integral(u, phi, t_up, cfg.eps_schedule, cfg.extremal_grid, return_details=True)
    lower = J_low ** (1.0 / qv)
    up_raw = J_up ** ((pv - qv) / (pv * qv))
    upper = 2.0 * B ** (1.0 / qv) * up_raw
    diag = {"eps": cfg.eps_schedule.tolist(), "composition_norm": B, "composition_norm_source": b_label,
            "extremal_q": d_low,
            "extremal_pq": d_up, "carleson": carleson.certificate}
    return EssNormBracket(lower, upper, "p>q finite", (1.0, 2.0 * B ** (1.0 / qv)), lower, up_raw,
                          upper < cfg.compact_threshold, diag)


def power_norm_sequence(u, phi, q, n_list=None, M: int = fs.DEFAULT_GRID) -> list:
    """``||u·φ^n||_q`` for each ``n`` in ``n_list`` (default ``2^k``, k = 0..16)."""
    q = fs.as_exponent(q)
    u, phi = fs.as_function(u), fs.as_selfmap(phi)
    n_list = n_list if n_list is not None else [2**k for k in range(17)]
    return [fs.hardy_norm(fs.mul(u, fs.power(phi.map, int(n))), q, M) for n in n_list]


def power_norm_limit(u, phi, q, n_list=None, M: int = fs.DEFAULT_GRID):
    """Limit of :func:`power_norm_sequence`, extrapolated as in :func:`extremal_integral`."""
    seq = power_norm_sequence(u, phi, q, n_list, M)
    value, method = tail_limit(seq)
    return value, {"sequence": seq, "method": method}


# --------------------------------------------------------------------------- dispatch


@dataclass(frozen=True)
class Report:
    """Outcome of :func:`analyze`.

    ``status`` is ``ok``, ``unbounded``, ``undecided`` or ``nonconvergent``.
    """

    regime: str
    status: str
    bounded: bool | None
    bracket: EssNormBracket | None
    boundedness: dict
    truncation: tr.TruncationBracket | None = None
    message: str = ""

    def to_dict(self):
        return {
            "regime": self.regime,
            "status": self.status,
            "bounded": self.bounded,
            "bracket": self.bracket.to_dict() if self.bracket else None,
            "boundedness": self.boundedness,
            "truncation": self.truncation.to_dict() if self.truncation else None,
            "message": self.message,
        }


def _status_of(err: HardyError) -> str:
    return "undecided" if isinstance(err, Undecided) else "nonconvergent"


def analyze(u, phi, p, q, config: AnalysisConfig | None = None, *, truncation: bool = True) -> Report:
    """Boundedness test and essential-norm bracket for ``uC_φ: H^p → H^q``.

    For ``p = q = 2`` the matrix-truncation bracket is added when
    ``truncation`` is true.
    """
    cfg = config or AnalysisConfig()
    p, q = _exps(p, q)
    u = fs.as_function(u)
    phi = fs.as_selfmap(phi)
    if np.all(np.abs(u(fs.circle_points(64, 0.5))) == 0.0):
        raise ValidationError("u must be a non-zero function")
    regime = _regime(p, q)
    try:
        if regime in ("p<=q finite", "p=1<=q"):
            trace = ring_sweep(u, phi, p, q, cfg.ring_schedule(), method=cfg.kernel_method,
                               M=cfg.kernel_grid, tol=cfg.quad_tol)
            try:
                b = boundedness_pq(u, phi, p, q, trace=trace)
            except Undecided as err:
                return Report(regime, "undecided", None, None, {"rings": trace.to_dict()}, message=str(err))
            bdict = {"sup_estimate": b.sup_estimate, **b.diagnostics}
            if not b.bounded:
                return Report(regime, "unbounded", False, None, bdict, message="kernel integrals diverge")
            bracket = essnorm_pq(u, phi, p, q, cfg, trace=trace)
            tb = None
            if truncation and p.value == 2.0 and q.value == 2.0:
                tb = tr.truncation_bracket(u, phi, cfg.truncation_degree, cfg.n_schedule, cfg.grid, cfg.remainder)
            return Report(regime, "ok", True, bracket, bdict, tb)
        if regime == "H^p->H^inf":
            b = boundedness_p_inf(u, phi, p, angles=cfg.disk_angles)
            bdict = {"sup_estimate": b.sup_estimate, **b.diagnostics}
            if not b.bounded:
                return Report(regime, "unbounded", False, None, bdict, message="|u|^p/(1-|phi|^2) unbounded")
            return Report(regime, "ok", True, essnorm_p_inf(u, phi, p, cfg), bdict)
        if regime == "H^inf->H^q":
            norm_u = fs.hardy_norm(u, q, cfg.grid)
            bdict = {"sup_estimate": norm_u, "criterion": "u in H^q"}
            if not math.isfinite(norm_u):
                return Report(regime, "unbounded", False, None, bdict, message="u not in H^q")
            return Report(regime, "ok", True, essnorm_inf_q(u, phi, q, cfg), bdict)
        mu = ms.pullback(u, phi, q.value, cfg.grid)
        mu2 = ms.pullback(u, phi, q.value, 2 * cfg.grid)
        try:
            cl = ms.classify_carleson(mu, p.value, q.value, depth=cfg.depth, alpha=cfg.alpha, refined=mu2)
        except Undecided as err:
            return Report(regime, "undecided", None, None, {}, message=str(err))
        bdict = {"criterion": "(p,q)-Carleson pullback", "certificate": cl.certificate}
        if not cl.is_carleson:
            return Report(regime, "unbounded", False, None, bdict, message="not (p,q)-Carleson")
        return Report(regime, "ok", True, essnorm_p_gt_q(u, phi, p, q, cfg, carleson=cl), bdict)
    except (Undecided, NonConvergent, NoConvergence, AliasingTooLarge, EmptyLevel) as err:
        return Report(regime, _status_of(err), None, None, {}, message=str(err))
    except NotBounded as err:
        return Report(regime, "unbounded", False, None, {}, message=str(err))
