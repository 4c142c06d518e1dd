"""Fejér and Dirichlet coefficient multipliers and the Fejér remainder bounds."""

from __future__ import annotations

import math

import numpy as np

from . import funcspace as fs
from .errors import ValidationError


def _coeffs(c):
    c = np.asarray(c, dtype=complex)
    if c.ndim != 1:
        raise ValidationError("coefficient vector must be one-dimensional")
    return c


def fejer_multipliers(length: int, N: int) -> np.ndarray:
    """Multipliers ``max(1 - n/N, 0)`` for ``n = 0 .. length-1``."""
    if N < 1:
        raise ValidationError("N must be >= 1")
    n = np.arange(length)
    return np.clip(1.0 - n / N, 0.0, None)


def fejer_apply(c, N: int) -> np.ndarray:
    """Coefficients of ``K_N f``: ``(1 - n/N) c[n]`` for ``n < N``, zero beyond.

    Examples
    --------
    >>> fejer_apply([1, 1, 1], 2).real
    array([1. , 0.5, 0. ])
    """
    c = _coeffs(c)
    return c * fejer_multipliers(c.size, N)


def fejer_remainder(c, N: int) -> np.ndarray:
    """Coefficients of ``R_N f = f - K_N f``."""
    c = _coeffs(c)
    return c * (1.0 - fejer_multipliers(c.size, N))


def dirichlet_apply(c, N: int) -> np.ndarray:
    """Partial sum of degree ``N``.

    Unlike the Fejér means these projections are not uniformly bounded on
    ``H^1``; they are used only on ``H^2``.
    """
    if N < 0:
        raise ValidationError("N must be >= 0")
    return _coeffs(c)[: N + 1].copy()


def dirichlet_remainder(c, N: int) -> np.ndarray:
    """``f`` minus its degree-``N`` partial sum, same length as ``c``."""
    c = _coeffs(c).copy()
    c[: N + 1] = 0
    return c


def _weighted_sum(r: float, N: int) -> float:
    """``sum_{n=1}^{N-1} n r^n`` in closed form."""
    if N <= 1:
        return 0.0
    return r * (1.0 - N * r ** (N - 1) + (N - 1) * r**N) / (1.0 - r) ** 2


def remainder_sup_bound(r: float, N: int) -> float:
    """Bound on ``sup_{|w|<=r} |R_N f(w)|`` for ``||f||_1 = 1``.

    ``(1/N) sum_{n=1}^{N-1} n r^n + r^N / (1 - r)``.
    """
    if not 0.0 < r < 1.0:
        raise ValidationError("r must lie in (0, 1)")
    if N < 1:
        raise ValidationError("N must be >= 1")
    return _weighted_sum(r, N) / N + r**N / (1.0 - r)


def choose_N(r: float, eps: float, q) -> int:
    """Smallest ``N`` with ``r^N <= eps^{1/q}(1-r)/2`` and ``(1/N) sum n r^n <= eps^{1/q}/2``.

    The first condition holds from ``N_A = ceil(log(δ(1-r)) / log r)`` on,
    with ``δ = eps^{1/q}/2``. The second term is the running mean of the
    unimodal sequence ``n r^n`` and so is itself unimodal; beyond ``N_A`` it
    therefore switches from failing to holding at most once, which a binary
    search locates. It holds for ``N >= r/((1-r)^2 δ)``.
    """
    if not 0.0 < r < 1.0 or eps <= 0:
        raise ValidationError("need 0 < r < 1 and eps > 0")
    q = fs.as_exponent(q).finite
    delta = eps ** (1.0 / q) / 2.0

    def mean_ok(n):
        return _weighted_sum(r, n) / n <= delta

    lo = 1
    if delta * (1.0 - r) < 1.0:
        lo = max(1, math.ceil(math.log(delta * (1.0 - r)) / math.log(r)))
        while lo > 1 and r ** (lo - 1) <= delta * (1.0 - r):
            lo -= 1
        while r**lo > delta * (1.0 - r):
            lo += 1
    if mean_ok(lo):
        return lo
    hi = max(lo + 1, math.ceil(r / ((1.0 - r) ** 2 * delta)) + 1)
    while not mean_ok(hi):
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mean_ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def coefficients_to_function(c) -> fs.DiscFunction:
    """Polynomial with the given coefficients."""
    return fs.polynomial(_coeffs(c))
