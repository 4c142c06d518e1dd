"""Reproducing kernels, point-evaluation norms, pseudohyperbolic distance and Stolz domains."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import funcspace as fs
from .errors import OutsideDomain, ValidationError

DEFAULT_APERTURE = 0.5


def reproducing_kernel(a) -> fs.DiscFunction:
    """``k_a(z) = (1 - |a|^2) / (1 - conj(a) z)^2``.

    Raises
    ------
    OutsideDomain
        If ``|a| >= 1``.
    """
    return fs.kernel_power(a, 1.0)


def kernel_power(a, p) -> fs.DiscFunction:
    """``k_a^{1/p}`` on the principal branch; a unit vector of ``H^p``."""
    p = fs.as_exponent(p)
    if p.infinite:
        raise ValidationError("kernel_power needs a finite exponent")
    return fs.kernel_power(a, p.value)


def cauchy_kernel(w) -> fs.DiscFunction:
    """``K_w(z) = 1 / (1 - conj(w) z)``."""
    return fs.cauchy(w)


def delta_norm(w, p) -> float:
    """Norm of point evaluation at ``w`` on ``H^p``: ``(1 - |w|^2)^{-1/p}``."""
    w = complex(w)
    if abs(w) >= 1.0:
        raise OutsideDomain("|w| must be < 1")
    p = fs.as_exponent(p)
    if p.infinite:
        raise ValidationError("delta_norm needs a finite exponent")
    return (1.0 - abs(w) ** 2) ** (-1.0 / p.value)


def pseudohyperbolic(z, w):
    """``|z - w| / |1 - conj(w) z|``, vectorised over array inputs."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if np.any(np.abs(z) >= 1.0) or np.any(np.abs(w) >= 1.0):
        raise OutsideDomain("pseudohyperbolic distance needs points of the open disk")
    out = np.abs(z - w) / np.abs(1.0 - np.conj(w) * z)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class StolzDomain:
    """Interior of the convex hull of ``{vertex} ∪ aperture·D``."""

    vertex: complex
    aperture: float = DEFAULT_APERTURE

    def __post_init__(self):
        v = complex(self.vertex)
        if abs(abs(v) - 1.0) > 1e-12:
            raise ValidationError("Stolz vertex must have modulus 1")
        if not 0.0 < self.aperture < 1.0:
            raise ValidationError("aperture must lie in (0, 1)")
        object.__setattr__(self, "vertex", v)

    def contains(self, z):
        return stolz_contains(self, z)


def _stolz_gap(z, vertex, alpha):
    """Minimum over t of ``|z - (1-t)ζ| - tα``; negative exactly inside the hull."""
    zr = np.asarray(z, dtype=complex) * np.conj(np.asarray(vertex, dtype=complex))
    x, y = zr.real, zr.imag
    s = np.clip(x - alpha * np.abs(y) / math.sqrt(1.0 - alpha * alpha), 0.0, 1.0)
    return np.abs(zr - s) - (1.0 - s) * alpha


def stolz_contains(domain: StolzDomain, z):
    """Whether ``z`` lies in the open Stolz domain.

    With ``z' = z conj(ζ) = x + iy`` the hull is the union of the disks
    ``D(s, (1-s)α)`` for ``s`` in [0, 1). The gap ``|z' - s| - (1-s)α`` is
    convex in ``s`` and minimised at ``s* = x - α|y|/sqrt(1-α²)``, clipped to
    [0, 1].
    """
    z = np.asarray(z, dtype=complex)
    inside = (_stolz_gap(z, domain.vertex, domain.aperture) < 0.0) | (np.abs(z) < domain.aperture)
    return bool(inside) if inside.ndim == 0 else inside


def shadow_halfwidth(radius, alpha: float = DEFAULT_APERTURE):
    """Angular half-width of the boundary arc whose Stolz domains contain a point of modulus ``radius``.

    Equals ``arcsin(α/r) - arcsin(α)`` for ``α <= r < 1`` and π for ``r < α``.
    """
    r = np.asarray(radius, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = np.arcsin(np.minimum(alpha / np.where(r > 0, r, 1.0), 1.0)) - math.asin(alpha)
    out = np.where(r < alpha, np.pi, h)
    return float(out) if out.ndim == 0 else out


def shadow_measure(z, alpha: float = DEFAULT_APERTURE, M: int = fs.DEFAULT_GRID) -> float:
    """Fraction of the ``M`` grid points ζ with ``z ∈ Γ(ζ)``."""
    zeta = fs.circle_points(M)
    return float(np.count_nonzero(stolz_contains(StolzDomain(1.0, alpha), np.conj(zeta) * complex(z))) / M)
