"""Analytic functions on the unit disk, boundary traces and Hardy norms.

Functions are immutable expression trees over a small set of primitives
(polynomials, rational functions, finite Blaschke products, reproducing and
Cauchy kernels, monomials) closed under scalar multiples, sums, products and
composition. Every node evaluates vectorised over numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from numbers import Number

import numpy as np

from .errors import (
    AliasingTooLarge,
    NonConvergent,
    OutsideDomain,
    SingularPoint,
    ValidationError,
)
from .quadrature import circle_integral

DEFAULT_GRID = 2**14
KERNEL_GRID = 2**16
MAX_GRID = 2**22
NORM_TOL = 1e-9

_SINGULAR_TOL = 1e-9
_KINDS = (
    "polynomial",
    "rational",
    "blaschke_product",
    "kernel",
    "cauchy_kernel",
    "monomial_power",
    "scalar_multiple",
    "sum",
    "product",
    "composition",
)


# --------------------------------------------------------------------------- exponents


@dataclass(frozen=True)
class Exponent:
    """A Lebesgue exponent in [1, ∞] with infinity as a separate tag.

    Use :func:`as_exponent` to coerce numbers and the string ``"inf"``.
    """

    value: float = 2.0
    infinite: bool = False

    def __post_init__(self):
        if self.infinite:
            object.__setattr__(self, "value", 0.0)
        else:
            v = float(self.value)
            if not math.isfinite(v) or v < 1.0:
                raise ValidationError(f"exponent must be >= 1, got {self.value!r}")
            object.__setattr__(self, "value", v)

    @property
    def finite(self) -> float:
        """The numeric value; raises for the infinite tag."""
        if self.infinite:
            raise ValidationError("exponent is infinite")
        return self.value

    def __str__(self):
        if self.infinite:
            return "inf"
        v = self.value
        return str(int(v)) if v == int(v) else repr(v)


INF = Exponent(infinite=True)


def as_exponent(p) -> Exponent:
    """Coerce ``p`` (number, ``"inf"``, ``math.inf`` or Exponent) to an Exponent."""
    if isinstance(p, Exponent):
        return p
    if isinstance(p, str):
        s = p.strip().lower()
        if s in ("inf", "infinity", "∞"):
            return INF
        return Exponent(float(s))
    if p is None or (isinstance(p, Number) and math.isinf(float(p)) and float(p) > 0):
        return INF
    return Exponent(float(p))


# --------------------------------------------------------------------------- functions


def _ctuple(values):
    return tuple(complex(v) for v in values)


@dataclass(frozen=True)
class DiscFunction:
    """Node of an analytic-function expression tree.

    Parameters
    ----------
    kind : str
        One of the primitive or combinator kinds.
    params : tuple
        Kind-specific parameters, e.g. the coefficient tuple of a polynomial or
        ``(a, p)`` for the kernel power ``k_a^{1/p}``.
    children : tuple of DiscFunction
        Operands of combinators; empty for primitives.
    singular_points : tuple of complex
        Unit-modulus points where the boundary trace is undefined.

    Notes
    -----
    Build nodes through the factory functions (:func:`polynomial`,
    :func:`kernel_power`, ...) which validate parameters and compute the
    singular points; the raw constructor performs no checks.
    """

    kind: str
    params: tuple = ()
    children: tuple = ()
    singular_points: tuple = field(default=(), compare=False)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return _eval(self, z)

    # Arithmetic sugar used by tests and scripts.
    def __add__(self, other):
        return add(self, _lift(other))

    def __radd__(self, other):
        return add(_lift(other), self)

    def __mul__(self, other):
        if isinstance(other, Number):
            return scalar_multiple(other, self)
        return mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, Number):
            return scalar_multiple(other, self)
        return mul(_lift(other), self)

    def __neg__(self):
        return scalar_multiple(-1.0, self)

    def __sub__(self, other):
        return add(self, scalar_multiple(-1.0, _lift(other)))

    def __rsub__(self, other):
        return add(_lift(other), scalar_multiple(-1.0, self))

    def to_expr(self) -> str:
        """Canonical expression string accepted by the scenario parser."""
        return _to_expr(self)

    def __str__(self):
        return self.to_expr()


def _lift(x):
    if isinstance(x, DiscFunction):
        return x
    if isinstance(x, SelfMap):
        return x.map
    return constant(x)


def _horner(coeffs, z):
    out = np.zeros_like(z)
    for c in reversed(coeffs):
        out = out * z + c
    return out


def _eval(f: DiscFunction, z: np.ndarray) -> np.ndarray:
    k = f.kind
    if k == "polynomial":
        return _horner(f.params, z) if f.params else np.zeros_like(z)
    if k == "rational":
        num, den = f.params
        return _horner(num, z) / _horner(den, z)
    if k == "blaschke_product":
        out = np.ones_like(z)
        for a in f.params:
            out = out * ((z - a) / (1.0 - np.conj(a) * z))
        return out
    if k == "kernel":
        a, p = f.params
        base = 1.0 - np.conj(a) * z
        scale = (1.0 - abs(a) ** 2) ** (1.0 / p)
        if p == 1.0:
            return scale / (base * base)
        if p == 2.0:
            return scale / base
        return scale * np.power(base, -2.0 / p)
    if k == "cauchy_kernel":
        (w,) = f.params
        return 1.0 / (1.0 - np.conj(w) * z)
    if k == "monomial_power":
        (n,) = f.params
        return z**n
    if k == "scalar_multiple":
        return f.params[0] * _eval(f.children[0], z)
    if k == "sum":
        out = _eval(f.children[0], z)
        for g in f.children[1:]:
            out = out + _eval(g, z)
        return out
    if k == "product":
        out = _eval(f.children[0], z)
        for g in f.children[1:]:
            out = out * _eval(g, z)
        return out
    if k == "composition":
        outer, inner = f.children
        return _eval(outer, _eval(inner, z))
    raise ValidationError(f"unknown kind {k!r}")


def _union_points(children):
    pts = []
    for g in children:
        for s in g.singular_points:
            if all(abs(s - t) > _SINGULAR_TOL for t in pts):
                pts.append(s)
    return tuple(pts)


def _check_in_disk(a, what):
    if not abs(a) < 1.0:
        raise OutsideDomain(f"{what} must satisfy |{what}| < 1, got {a!r}")


# ----- primitive factories


def polynomial(coeffs) -> DiscFunction:
    """Polynomial with coefficients ``c0 + c1 z + ...``."""
    c = _ctuple(coeffs)
    if not c:
        c = (0j,)
    return DiscFunction("polynomial", c)


def constant(c) -> DiscFunction:
    return polynomial([c])


def identity() -> DiscFunction:
    """The coordinate function ``z``."""
    return polynomial([0, 1])


def rational(num, den) -> DiscFunction:
    """Quotient of two polynomials.

    Denominator roots strictly inside the disk are rejected; roots on the
    circle become singular boundary points.
    """
    n, d = _ctuple(num), _ctuple(den)
    if not d or all(x == 0 for x in d):
        raise ValidationError("denominator is identically zero")
    roots = np.roots(list(reversed(d))) if len(d) > 1 else np.array([])
    sing = []
    for r in roots:
        if abs(r) < 1.0 - _SINGULAR_TOL:
            raise ValidationError(f"rational function has a pole inside the disk at {complex(r)!r}")
        if abs(abs(r) - 1.0) <= _SINGULAR_TOL:
            sing.append(complex(r / abs(r)))
    return DiscFunction("rational", (n, d), (), tuple(sing))


def blaschke(zeros) -> DiscFunction:
    """Finite Blaschke product ``prod (z - a)/(1 - conj(a) z)``."""
    zs = _ctuple(zeros)
    for a in zs:
        _check_in_disk(a, "zero")
    return DiscFunction("blaschke_product", zs)


def kernel_power(a, p=1.0) -> DiscFunction:
    """The kernel power ``k_a^{1/p}`` (principal branch); ``p = 1`` gives ``k_a``."""
    a = complex(a)
    _check_in_disk(a, "a")
    p = as_exponent(p).finite
    return DiscFunction("kernel", (a, p))


def reproducing_kernel_fn(a) -> DiscFunction:
    return kernel_power(a, 1.0)


def cauchy(w) -> DiscFunction:
    """Cauchy kernel ``1/(1 - conj(w) z)``."""
    w = complex(w)
    _check_in_disk(w, "w")
    return DiscFunction("cauchy_kernel", (w,))


def monomial(n: int) -> DiscFunction:
    n = int(n)
    if n < 0:
        raise ValidationError("monomial exponent must be non-negative")
    return DiscFunction("monomial_power", (n,))


# ----- combinators


def scalar_multiple(c, f) -> DiscFunction:
    f = _lift(f)
    return DiscFunction("scalar_multiple", (complex(c),), (f,), f.singular_points)


def add(*fs) -> DiscFunction:
    fs = tuple(_lift(f) for f in fs)
    if len(fs) == 1:
        return fs[0]
    return DiscFunction("sum", (), fs, _union_points(fs))


def mul(*fs) -> DiscFunction:
    fs = tuple(_lift(f) for f in fs)
    if len(fs) == 1:
        return fs[0]
    return DiscFunction("product", (), fs, _union_points(fs))


def compose(outer, inner) -> DiscFunction:
    """``outer ∘ inner``.

    Only the singular points of ``inner`` are propagated; a boundary point
    that ``inner`` sends onto a singular point of ``outer`` shows up as a
    non-finite sample instead.
    """
    outer, inner = _lift(outer), _lift(inner)
    return DiscFunction("composition", (), (outer, inner), inner.singular_points)


def power(f, n: int) -> DiscFunction:
    """``f**n`` as a composition with the monomial ``z**n``."""
    f = _lift(f)
    if f.kind == "polynomial" and f.params == (0j, 1 + 0j):
        return monomial(n)
    return compose(monomial(n), f)


# ----- self-maps


def _disk_probe():
    radii = np.concatenate([np.linspace(0.0, 0.9, 10), 1.0 - 2.0 ** -np.arange(4, 21)])
    theta = 2 * np.pi * np.arange(512) / 512
    return (radii[:, None] * np.exp(1j * theta)[None, :]).ravel()


_PROBE = _disk_probe()


@dataclass(frozen=True)
class SelfMap:
    """An analytic self-map of the disk.

    Construction checks ``|φ| < 1`` on a polar disk grid whose radii reach
    ``1 - 2**-20``, and that φ is not constant.

    Attributes
    ----------
    map : DiscFunction
    sup_modulus_estimate : float
        Maximum of the boundary trace modulus, clipped to (0, 1].
    """

    map: DiscFunction
    sup_modulus_estimate: float = field(default=None, compare=False)

    def __post_init__(self):
        f = self.map
        vals = f(_PROBE)
        if not np.all(np.isfinite(vals)):
            raise ValidationError("map is not finite on the disk grid")
        mod = np.abs(vals)
        if mod.max() >= 1.0:
            raise ValidationError(f"not a self-map of the disk: |phi| reaches {mod.max():.6g}")
        if np.abs(vals - vals[0]).max() <= 1e-12:
            raise ValidationError("self-map must be non-constant")
        if self.sup_modulus_estimate is None:
            trace = boundary_trace(f, 2**12)
            sup = float(np.max(np.abs(trace.values[~trace.singular])))
            if sup > 1.0 + 1e-9:
                raise ValidationError(f"boundary trace exceeds modulus 1 ({sup:.6g})")
            object.__setattr__(self, "sup_modulus_estimate", min(max(sup, mod.max()), 1.0))

    def __call__(self, z):
        return self.map(z)

    @property
    def singular_points(self):
        return self.map.singular_points

    def to_expr(self):
        return self.map.to_expr()


def as_selfmap(phi) -> SelfMap:
    return phi if isinstance(phi, SelfMap) else SelfMap(_lift(phi))


def as_function(f) -> DiscFunction:
    return _lift(f)


# --------------------------------------------------------------------------- evaluation


def evaluate(f, z) -> complex:
    """Evaluate ``f`` at a single point of the closed disk.

    Raises
    ------
    OutsideDomain
        If ``|z| > 1``.
    SingularPoint
        If ``z`` is one of the listed singular boundary points.
    """
    f = _lift(f)
    z = complex(z)
    if abs(z) > 1.0 + 1e-12:
        raise OutsideDomain(f"|z| = {abs(z):.6g} > 1")
    for s in f.singular_points:
        if abs(z - s) <= _SINGULAR_TOL:
            raise SingularPoint(f"{z!r} is a singular boundary point")
    return complex(f(np.array([z]))[0])


@dataclass(frozen=True)
class BoundaryGrid:
    """Samples ``f(ρ e^{2πij/M})`` with a mask flagging singular samples."""

    values: np.ndarray
    radius: float
    singular: np.ndarray

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def angles(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.size) / self.size


def circle_points(M: int, radius: float = 1.0) -> np.ndarray:
    return radius * np.exp(2j * np.pi * np.arange(M) / M)


def _check_grid(M):
    M = int(M)
    if M < 2 or M & (M - 1):
        raise ValidationError(f"grid size must be a power of two >= 2, got {M}")
    return M


def singular_mask(f, zeta: np.ndarray, radius: float = 1.0) -> np.ndarray:
    """Mask of unit-circle samples that coincide with a singular boundary point."""
    mask = np.zeros(zeta.shape, dtype=bool)
    if radius < 1.0 or not f.singular_points:
        return mask
    for s in f.singular_points:
        mask |= np.abs(np.angle(zeta * np.conj(s))) <= _SINGULAR_TOL
    return mask


def boundary_trace(f, M: int = DEFAULT_GRID, radius: float = 1.0) -> BoundaryGrid:
    """Sample ``f`` on ``M`` equispaced points of the circle of radius ``radius``.

    Samples landing on a singular boundary point, or evaluating to a
    non-finite number, are flagged rather than zeroed.
    """
    f = _lift(f)
    M = _check_grid(M)
    if not 0.0 < radius <= 1.0:
        raise OutsideDomain("radius must lie in (0, 1]")
    zeta = circle_points(M, radius)
    vals = f(zeta)
    sing = singular_mask(f, zeta, radius) | ~np.isfinite(vals)
    vals = np.where(sing, 0.0, vals)
    vals.setflags(write=False)
    sing.setflags(write=False)
    return BoundaryGrid(vals, float(radius), sing)


def _lp_mean(trace: BoundaryGrid, p: float) -> float:
    mod = np.abs(trace.values)
    return float(np.sum(mod[~trace.singular] ** p) / trace.size)


def hardy_norm(f, p, M: int = DEFAULT_GRID, *, tol: float = NORM_TOL, max_grid: int = MAX_GRID,
               radius: float = 1.0, breakpoints=None) -> float:
    """Hardy ``H^p`` norm by quadrature on the circle.

    Parameters
    ----------
    f : DiscFunction
    p : Exponent or number or "inf"
    M : int
        Starting grid size; doubled until two successive values agree to ``tol``.
    breakpoints : array_like, optional
        Angles of sharp features. When given, the integral is computed by
        adaptive tanh-sinh quadrature cut at these angles instead of the
        uniform grid.

    Returns
    -------
    float
        For ``p = ∞`` the boundary maximum of ``|f|`` (grid maximum refined by a
        local golden-section search), which equals the disk supremum by the
        maximum principle.
    """
    f = _lift(f)
    p = as_exponent(p)
    if p.infinite:
        return _sup_norm(f, M, radius)
    pv = p.value
    if breakpoints is not None:
        pts = list(np.asarray(breakpoints, dtype=float).ravel())
        pts += [float(np.angle(s)) for s in f.singular_points]
        val = circle_integral(lambda z: np.abs(f(radius * z)) ** pv, pts, tol=tol)
        return val ** (1.0 / pv)
    M = _check_grid(M)
    fine = boundary_trace(f, 2 * M, radius)
    prev = _lp_mean(BoundaryGrid(fine.values[::2], radius, fine.singular[::2]), pv)
    cur = _lp_mean(fine, pv)
    while abs(cur - prev) > tol * max(abs(cur), 1e-300):
        M *= 2
        if 2 * M > max_grid:
            raise NonConvergent(f"hardy_norm did not converge up to grid {max_grid}")
        fine = boundary_trace(f, 2 * M, radius)
        prev, cur = cur, _lp_mean(fine, pv)
    return cur ** (1.0 / pv)


def golden_max(fn, lo, hi, iters: int = 80):
    """Vectorised golden-section search for local maxima of ``fn`` on ``[lo, hi]``.

    Returns the abscissae and values of the best points found.
    """
    a = np.array(lo, dtype=float)
    b = np.array(hi, dtype=float)
    g = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - g * (b - a)
    d = a + g * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        left = fc >= fd
        a = np.where(left, a, c)
        b = np.where(left, d, b)
        x_new = np.where(left, b - g * (b - a), a + g * (b - a))
        f_new = fn(x_new)
        c, d, fc, fd = (
            np.where(left, x_new, d),
            np.where(left, c, x_new),
            np.where(left, f_new, fd),
            np.where(left, fc, f_new),
        )
        if np.all(b - a < 1e-15):
            break
    best = fc >= fd
    return np.where(best, c, d), np.where(best, fc, fd)


def _sup_norm(f, M, radius):
    trace = boundary_trace(f, _check_grid(M), radius)
    if trace.singular.any():
        return math.inf
    mod = np.abs(trace.values)
    j = int(np.argmax(mod))
    h = 2 * np.pi / trace.size
    th = 2 * np.pi * j / trace.size
    _, best = golden_max(lambda t: np.abs(f(radius * np.exp(1j * t))), th - h, th + h)
    return float(max(mod[j], float(best)))


def radial_dilation(f, r: float):
    """``f(r z)``; a SelfMap input yields a SelfMap with sup modulus at most ``r``."""
    if not 0.0 < r < 1.0:
        raise ValidationError("dilation radius must lie in (0, 1)")
    if isinstance(f, SelfMap):
        return SelfMap(compose(f.map, polynomial([0, r])))
    return compose(_lift(f), polynomial([0, r]))


def taylor_coefficients(f, K: int, radius: float = 1.0, M: int | None = None, *,
                        tol: float = 1e-10, return_error: bool = False):
    """Taylor coefficients ``0..K`` of ``f`` by FFT on a circle of radius ``radius``.

    Polynomials are read off exactly. Otherwise the grid is doubled (from
    ``M`` or an automatic starting size) until the Fourier mass in the upper
    half of the spectrum, which bounds the aliasing error, falls below
    ``tol`` relative to the largest coefficient.

    Raises
    ------
    AliasingTooLarge
        If the aliasing estimate stays above ``tol`` up to the maximal grid.
    """
    f = _lift(f)
    K = int(K)
    if f.kind == "polynomial":
        c = np.zeros(K + 1, dtype=complex)
        n = min(K + 1, len(f.params))
        c[:n] = f.params[:n]
        return (c, 0.0) if return_error else c
    if not 0.0 < radius <= 1.0:
        raise OutsideDomain("radius must lie in (0, 1]")
    if radius == 1.0 and f.singular_points:
        raise ValidationError("function has singular boundary points; use radius < 1")
    if M is None:
        M = max(DEFAULT_GRID, 1 << int(math.ceil(math.log2(4 * (K + 1)))))
    M = _check_grid(M)
    if K >= M // 2:
        raise ValidationError("degree K must be below M/2")
    while True:
        vals = f(circle_points(M, radius))
        if not np.all(np.isfinite(vals)):
            raise SingularPoint("non-finite samples on the sampling circle")
        c = np.fft.fft(vals) / M
        scale = radius ** -np.arange(K + 1)
        coeffs = c[: K + 1] * scale
        alias = float(np.abs(c[M // 2 :]).max()) * scale[-1]
        if alias <= tol * max(1.0, float(np.abs(coeffs).max())):
            break
        if 2 * M > MAX_GRID:
            raise AliasingTooLarge(f"aliasing estimate {alias:.3g} exceeds tolerance {tol:.3g}")
        M *= 2
    return (coeffs, alias) if return_error else coeffs


# --------------------------------------------------------------------------- expressions


def format_number(c) -> str:
    """Shortest round-tripping text for a complex number."""
    c = complex(c)
    re, im = c.real, c.imag
    if im == 0.0:
        return repr(re)
    if re == 0.0:
        return f"{im!r}j"
    sign = "+" if im >= 0 else "-"
    return f"{re!r}{sign}{abs(im)!r}j"


def _is_z(f):
    return f.kind == "polynomial" and f.params == (0j, 1 + 0j)


def _factor_expr(f: DiscFunction) -> str:
    if f.kind == "polynomial" and len(f.params) == 1:
        return f"poly({format_number(f.params[0])})"
    return _to_expr(f)


def _to_expr(f: DiscFunction) -> str:
    k = f.kind
    if k == "polynomial":
        if _is_z(f):
            return "z"
        if len(f.params) == 1:
            return format_number(f.params[0])
        return "poly(" + ", ".join(format_number(c) for c in f.params) + ")"
    if k == "rational":
        num, den = f.params
        return ("rational([" + ", ".join(map(format_number, num)) + "], ["
                + ", ".join(map(format_number, den)) + "])")
    if k == "blaschke_product":
        return "blaschke(" + ", ".join(map(format_number, f.params)) + ")"
    if k == "kernel":
        a, p = f.params
        if p == 1.0:
            return f"kernel({format_number(a)})"
        return f"kernel({format_number(a)}, {p!r})"
    if k == "cauchy_kernel":
        return f"cauchy({format_number(f.params[0])})"
    if k == "monomial_power":
        return f"pow(z, {f.params[0]})"
    if k == "scalar_multiple":
        return f"mul({format_number(f.params[0])}, {_to_expr(f.children[0])})"
    if k == "sum":
        return "add(" + ", ".join(_to_expr(g) for g in f.children) + ")"
    if k == "product":
        # A bare number inside mul() would parse back as a scalar factor.
        return "mul(" + ", ".join(_factor_expr(g) for g in f.children) + ")"
    if k == "composition":
        outer, inner = f.children
        if outer.kind == "monomial_power":
            return f"pow({_to_expr(inner)}, {outer.params[0]})"
        return f"compose({_to_expr(outer)}, {_to_expr(inner)})"
    raise ValidationError(f"unknown kind {k!r}")
