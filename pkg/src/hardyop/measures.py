"""Pullback measures on the closed disk and Carleson-type tests on them.

A pullback measure is stored as one atom per boundary sample: the atom sits at
``φ*(ζ_j)`` and carries weight ``|u*(ζ_j)|^q / M``. Atoms whose modulus exceeds
``boundary_threshold`` form the boundary part; the rest form the interior part.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import funcspace as fs
from .errors import Undecided, ValidationError
from .kernels import DEFAULT_APERTURE, StolzDomain, shadow_halfwidth, stolz_contains

BOUNDARY_THRESHOLD = 1.0 - 1e-6
DEFAULT_DEPTH = 10
STABILITY_TOL = 0.05
BOUNDARY_MASS_TOL = 1e-2
DENSITY_BIN_FACTOR = 64


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PullbackMeasure:
    """Atomic measure on the closed disk.

    Attributes
    ----------
    locations, weights : ndarray
        Atom positions and non-negative weights.
    grid_size : int
        Number of boundary samples the atoms came from.
    boundary_threshold : float
        Atoms with modulus at or above this value form the boundary part.
    excluded : int
        Samples dropped because ``u`` or ``φ`` was singular there.
    """

    locations: np.ndarray
    weights: np.ndarray
    grid_size: int
    boundary_threshold: float = BOUNDARY_THRESHOLD
    excluded: int = 0
    modulus: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        loc = _frozen(self.locations, complex)
        w = _frozen(self.weights, float)
        if loc.shape != w.shape or loc.ndim != 1:
            raise ValidationError("locations and weights must be 1-d arrays of equal length")
        if np.any(w < 0):
            raise ValidationError("atom weights must be non-negative")
        mod = np.abs(loc)
        if np.any(mod > 1.0 + 1e-12):
            raise ValidationError("atoms must lie in the closed disk")
        if not 0.0 < self.boundary_threshold < 1.0:
            raise ValidationError("boundary_threshold must lie in (0, 1)")
        mod.setflags(write=False)
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "modulus", mod)

    @property
    def boundary_part(self) -> np.ndarray:
        return self.modulus >= self.boundary_threshold

    @property
    def interior_part(self) -> np.ndarray:
        return ~self.boundary_part

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    @property
    def boundary_mass(self) -> float:
        return float(self.weights[self.boundary_part].sum())

    @property
    def interior_mass(self) -> float:
        return float(self.weights[self.interior_part].sum())

    @property
    def size(self) -> int:
        return self.weights.size

    def subset(self, mask) -> "PullbackMeasure":
        return PullbackMeasure(self.locations[mask], self.weights[mask], self.grid_size,
                               self.boundary_threshold, self.excluded)

    def integrate(self, g) -> float:
        """``∫ g dμ`` for a vectorised function ``g`` of the atom locations."""
        if self.size == 0:
            return 0.0
        return float(np.sum(self.weights * np.asarray(g(self.locations), dtype=float)))


def empty_measure(grid_size: int = 1) -> PullbackMeasure:
    return PullbackMeasure(np.zeros(0, complex), np.zeros(0), grid_size)


def pullback(u, phi, q, M: int = fs.DEFAULT_GRID, boundary_threshold: float = BOUNDARY_THRESHOLD) -> PullbackMeasure:
    """Atomic pullback of ``|u|^q dm`` under the boundary map of ``φ``.

    Samples where either trace is singular are excluded and counted.
    """
    q = fs.as_exponent(q).finite
    phi = fs.as_selfmap(phi)
    tu = fs.boundary_trace(u, M)
    tp = fs.boundary_trace(phi.map, M)
    bad = tu.singular | tp.singular
    loc = tp.values[~bad]
    mod = np.abs(loc)
    # Rounding can push unimodular boundary values a hair outside the circle.
    loc = np.where(mod > 1.0, loc / np.where(mod > 0, mod, 1.0), loc)
    w = np.abs(tu.values[~bad]) ** q / M
    return PullbackMeasure(loc, w, int(M), boundary_threshold, int(bad.sum()))


# --------------------------------------------------------------------------- windows


def _arc_masses(angles, weights, centers, half_width):
    """Mass of atoms with angular distance < ``half_width`` from each center."""
    if angles.size == 0:
        return np.zeros(centers.size)
    if half_width >= np.pi:
        return np.full(centers.size, weights.sum())
    order = np.argsort(angles)
    a = angles[order]
    w = weights[order]
    a3 = np.concatenate([a - 2 * np.pi, a, a + 2 * np.pi])
    cw = np.concatenate([[0.0], np.cumsum(np.concatenate([w, w, w]))])
    lo = np.searchsorted(a3, centers - half_width, side="right")
    hi = np.searchsorted(a3, centers + half_width, side="left")
    return cw[hi] - cw[lo]


def window_mass(mu: PullbackMeasure, center: float, length: float) -> float:
    """Interior mass of the Carleson window over the arc of normalised length ``length``.

    The window holds points with ``1 - length <= |z|`` and argument within
    ``π·length`` of ``center``. Boundary atoms are not part of any window.
    """
    if not 0.0 < length <= 1.0:
        raise ValidationError("arc length must lie in (0, 1]")
    sel = mu.interior_part & (mu.modulus >= 1.0 - length)
    ang = np.angle(mu.locations[sel])
    return float(_arc_masses(ang, mu.weights[sel], np.array([float(center)]), np.pi * length)[0])


@dataclass(frozen=True)
class CarlesonReport:
    """Supremum of window ratios with the arc that attains it.

    ``witness_arc`` is ``(center index, level)``: the arc is centred at grid
    angle ``2π·index/n_centers`` and has normalised length ``2**-level``
    (level 0 is the whole circle).
    """

    ratio_sup: float
    witness_arc: tuple
    exponent_ratio: float
    arc_family_depth: int
    n_centers: int


def window_ratio(mu: PullbackMeasure, index: int, level: int, p, q, n_centers: int) -> float:
    """Re-evaluate the ratio of one arc of the family scanned by :func:`ratio_sup`."""
    ell = 2.0**-level
    e = fs.as_exponent(q).finite / fs.as_exponent(p).finite
    if level == 0:
        return mu.interior_mass
    return window_mass(mu, 2 * np.pi * index / n_centers, ell) / ell**e


def ratio_sup(mu: PullbackMeasure, p, q, depth: int = DEFAULT_DEPTH, n_centers: int | None = None) -> CarlesonReport:
    """Supremum of ``μ_D(S(I)) / |I|^{q/p}`` over centred dyadic arcs.

    Arcs are centred at ``n_centers`` equispaced angles (default: the
    measure's grid size) with lengths ``2**-1 .. 2**-depth`` plus the whole
    circle. Any arc sits inside a family arc at most twice as long, so the
    result approximates the true supremum up to that factor.
    """
    p, q = fs.as_exponent(p).finite, fs.as_exponent(q).finite
    if p > q:
        raise ValidationError("ratio_sup applies to p <= q")
    e = q / p
    n_centers = int(n_centers or mu.grid_size)
    centers = 2 * np.pi * np.arange(n_centers) / n_centers
    best, witness = mu.interior_mass, (0, 0)
    inner = mu.interior_part
    for level in range(1, depth + 1):
        ell = 2.0**-level
        sel = inner & (mu.modulus >= 1.0 - ell)
        if not sel.any():
            continue
        masses = _arc_masses(np.angle(mu.locations[sel]), mu.weights[sel], centers, np.pi * ell)
        j = int(np.argmax(masses))
        ratio = float(masses[j]) / ell**e
        if ratio > best:
            best, witness = ratio, (j, level)
    return CarlesonReport(float(best), witness, e, int(depth), n_centers)


def restrict_annulus(mu: PullbackMeasure, r: float) -> PullbackMeasure:
    """Keep the atoms with ``|location| >= r``."""
    if not 0.0 < r < 1.0:
        raise ValidationError("r must lie in (0, 1)")
    return mu.subset(mu.modulus >= r)


def n_star(mu: PullbackMeasure, r: float, p, q, ring) -> float:
    """``max_{a in ring, |a| >= r} ∫ |k_a|^{q/p} dμ`` over the closed disk."""
    e = fs.as_exponent(q).finite / fs.as_exponent(p).finite
    ring = np.asarray(ring, dtype=complex).ravel()
    ring = ring[np.abs(ring) >= r]
    if mu.size == 0 or ring.size == 0:
        return 0.0
    best = 0.0
    step = max(1, 2**22 // max(mu.size, 1))
    for lo in range(0, ring.size, step):
        a = ring[lo : lo + step, None]
        k = (1.0 - np.abs(a) ** 2) / np.abs(1.0 - np.conj(a) * mu.locations[None, :]) ** 2
        best = max(best, float((k**e @ mu.weights).max()))
    return best


# --------------------------------------------------------------------------- balayage


def balayage_G(mu: PullbackMeasure, zeta, alpha: float = DEFAULT_APERTURE):
    """``G(ζ) = Σ_{atoms in Γ(ζ)} w / (1 - |z|^2)`` over interior atoms, evaluated directly."""
    zeta = np.atleast_1d(np.asarray(zeta, dtype=complex))
    sel = mu.interior_part
    loc = mu.locations[sel]
    dens = mu.weights[sel] / (1.0 - mu.modulus[sel] ** 2)
    out = np.zeros(zeta.size)
    for i, z0 in enumerate(zeta):
        inside = stolz_contains(StolzDomain(z0 / abs(z0), alpha), loc)
        out[i] = float(dens[inside].sum())
    return float(out[0]) if out.size == 1 else out


def balayage_grid(mu: PullbackMeasure, alpha: float = DEFAULT_APERTURE, M: int | None = None) -> np.ndarray:
    """``G`` at the ``M`` grid vertices, by spreading every atom over its shadow arc.

    An interior atom at ``z`` lies in ``Γ(ζ)`` exactly for ``ζ`` in the open arc
    centred at ``z/|z|`` with half-width ``arcsin(α/|z|) - arcsin(α)`` (the
    whole circle when ``|z| < α``), so a difference array gives all vertices in
    ``O(M + atoms)``.
    """
    M = int(M or mu.grid_size)
    sel = mu.interior_part
    mod = mu.modulus[sel]
    dens = mu.weights[sel] / (1.0 - mod**2)
    everywhere = mod < alpha
    G = np.full(M, float(dens[everywhere].sum()))
    rest = ~everywhere
    if not rest.any():
        return G
    theta = np.mod(np.angle(mu.locations[sel][rest]), 2 * np.pi)
    h = shadow_halfwidth(mod[rest], alpha)
    d = dens[rest]
    step = 2 * np.pi / M
    # Vertices j with |jΔ - θ| < h, i.e. j in [lo, hi], possibly wrapping.
    lo = np.floor((theta - h) / step).astype(np.int64) + 1
    hi = np.ceil((theta + h) / step).astype(np.int64) - 1
    ok = hi >= lo
    lo, hi, d = lo[ok], hi[ok], d[ok]
    full = hi - lo + 1 >= M
    G += float(d[full].sum())
    lo, hi, d = lo[~full], hi[~full], d[~full]
    diff = np.zeros(3 * M + 1)
    np.add.at(diff, lo + M, d)
    np.add.at(diff, hi + M + 1, -d)
    acc = np.cumsum(diff)[: 3 * M]
    G += acc[:M] + acc[M : 2 * M] + acc[2 * M :]
    return G


def ls_norm_G(mu: PullbackMeasure, s: float, alpha: float = DEFAULT_APERTURE, M: int | None = None) -> float:
    """Discrete ``L^s`` norm of the balayage function over ``M`` grid vertices."""
    if not 1.0 <= s < math.inf:
        raise ValidationError("s must lie in [1, ∞)")
    G = balayage_grid(mu, alpha, M)
    return float(np.mean(G**s) ** (1.0 / s))


def boundary_density(mu: PullbackMeasure, s, bins: int | None = None):
    """Density of the boundary part with respect to ``dm`` and its ``L^s`` norm.

    Boundary atoms are binned by angle into ``bins`` equal cells (default:
    the grid size); ``F`` is cell mass times the number of cells. ``s`` may be
    ``inf``.

    Returns
    -------
    F : ndarray
    norm : float
    """
    bins = int(bins or mu.grid_size)
    F = np.zeros(bins)
    sel = mu.boundary_part
    if sel.any():
        theta = np.mod(np.angle(mu.locations[sel]), 2 * np.pi)
        # Offset by half a sample so grid angles never sit on a cell edge.
        idx = np.floor(theta * bins / (2 * np.pi) + 0.5 * bins / mu.grid_size).astype(np.int64) % bins
        np.add.at(F, idx, mu.weights[sel])
        F *= bins
    s = fs.as_exponent(s)
    norm = float(F.max()) if s.infinite else float(np.mean(F**s.value) ** (1.0 / s.value))
    return F, norm


# --------------------------------------------------------------------------- classification


@dataclass(frozen=True)
class CarlesonClassification:
    is_carleson: bool
    regime: str
    certificate: dict


def _stable(a: float, b: float, tol: float = STABILITY_TOL) -> bool:
    scale = max(abs(a), abs(b))
    return scale == 0.0 or abs(a - b) <= tol * scale


def classify_carleson(mu: PullbackMeasure, p, q, *, depth: int = DEFAULT_DEPTH,
                      alpha: float = DEFAULT_APERTURE, refined: PullbackMeasure | None = None,
                      bins: int | None = None) -> CarlesonClassification:
    """Decide whether ``μ`` is a (p, q)-Carleson measure.

    ``p < q``
        The boundary part must carry (numerically) no mass and the window
        ratio supremum must be stable under a depth increment.
    ``p = q``
        Stable window ratios on the interior part plus a stable, bounded
        boundary density.
    ``p > q``
        Stable ``L^s`` norms, ``s = p/(p-q)``, of the balayage function and of
        the boundary density.

    Stability means a relative change below 5% between the measure and
    ``refined`` (a pullback on the doubled grid) or, without ``refined``,
    between grid resolutions ``M`` and ``M/2``. The boundary density uses
    ``grid_size / 64`` cells unless ``bins`` is given: per-sample cells leave
    sampling jitter of tens of percent in the density of a map with
    non-uniform boundary speed.

    Raises
    ------
    Undecided
        If a stability check fails.
    """
    p, q = fs.as_exponent(p).finite, fs.as_exponent(q).finite
    regime = "p<=q" if p <= q else "p>q"
    if mu.size == 0 or mu.total_mass == 0.0:
        return CarlesonClassification(True, regime, {"reason": "empty measure"})
    bins = int(bins or max(1, mu.grid_size // DENSITY_BIN_FACTOR))
    cert: dict = {"alpha": alpha, "depth": depth, "boundary_mass": mu.boundary_mass,
                  "total_mass": mu.total_mass, "density_bins": bins}

    def unstable(what, a, b):
        raise Undecided(f"{what} not stable: {a:.6g} vs {b:.6g}")

    if p <= q:
        rep = ratio_sup(mu, p, q, depth)
        deeper = ratio_sup(mu, p, q, depth + 1)
        cert.update(ratio_sup=rep.ratio_sup, witness_arc=list(rep.witness_arc),
                    ratio_sup_deeper=deeper.ratio_sup)
        if p < q and mu.boundary_mass > BOUNDARY_MASS_TOL * mu.total_mass:
            cert["reason"] = "boundary part carries mass"
            return CarlesonClassification(False, regime, cert)
        if not _stable(rep.ratio_sup, deeper.ratio_sup):
            unstable("window ratio under depth increment", rep.ratio_sup, deeper.ratio_sup)
        if refined is not None:
            r2 = ratio_sup(refined, p, q, depth).ratio_sup
            cert["ratio_sup_refined"] = r2
            if not _stable(rep.ratio_sup, r2):
                unstable("window ratio under grid doubling", rep.ratio_sup, r2)
        if p == q:
            _, fmax = boundary_density(mu, "inf", bins)
            if refined is not None:
                _, fmax2 = boundary_density(refined, "inf", bins)
            else:
                _, fmax2 = boundary_density(mu, "inf", max(1, bins // 2))
            cert.update(density_sup=fmax, density_sup_check=fmax2)
            if not _stable(fmax, fmax2):
                unstable("boundary density sup", fmax, fmax2)
        cert["reason"] = "stable window ratios"
        return CarlesonClassification(True, regime, cert)

    s = p / (p - q)
    g = ls_norm_G(mu, s, alpha)
    _, fn = boundary_density(mu, s, bins)
    if refined is not None:
        g2 = ls_norm_G(refined, s, alpha)
        _, fn2 = boundary_density(refined, s, bins)
    else:
        g2 = ls_norm_G(mu, s, alpha, max(2, mu.grid_size // 2))
        _, fn2 = boundary_density(mu, s, max(1, bins // 2))
    cert.update(s=s, ls_norm_G=g, ls_norm_G_check=g2, density_ls_norm=fn, density_ls_norm_check=fn2,
                maximal_operator_factor="||M||_p (symbolic)")
    if not _stable(g, g2):
        unstable("balayage L^s norm", g, g2)
    if not _stable(fn, fn2):
        unstable("boundary density L^s norm", fn, fn2)
    cert["reason"] = "stable L^s norms"
    return CarlesonClassification(True, regime, cert)


def measure_to_csv(mu: PullbackMeasure, path) -> None:
    """Write rows ``location_re, location_im, weight``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["location_re", "location_im", "weight"])
        for z, wt in zip(mu.locations, mu.weights):
            w.writerow([repr(float(z.real)), repr(float(z.imag)), repr(float(wt))])
