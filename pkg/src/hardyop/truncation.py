"""Matrix truncation of ``uC_φ`` on ``H^2`` and the remainder-operator sandwich.

Column ``n`` of the truncation holds the Taylor coefficients ``0..K`` of
``u·φ^n``. Columns whose coefficient mass beyond degree ``K`` is not negligible
are reported and excluded from the essential-norm estimates, since their
truncation misrepresents the operator.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import funcspace as fs
from .errors import AliasingTooLarge, NoConvergence, SingularPoint, ValidationError

DEFAULT_DEGREE = 256
DEFAULT_SCHEDULE = (8, 16, 32, 64, 128)
GAMMA = 2.0
RESOLVED_TOL = 1e-10


@dataclass(frozen=True)
class TruncationMatrix:
    """Truncated matrix of ``uC_φ`` in the monomial basis.

    Attributes
    ----------
    degree : int
        ``K``; the matrix is ``(K+1) x (K+1)``.
    entries : ndarray
    column_tails : ndarray
        ``l^2`` mass of coefficients beyond ``K`` for each column.
    tail_bound : float
        Largest column tail.
    alias_bound : float
        Largest Fourier coefficient in the upper half of the FFT spectrum.
    """

    degree: int
    entries: np.ndarray
    column_tails: np.ndarray
    tail_bound: float
    alias_bound: float
    grid_size: int

    @property
    def resolved(self) -> int:
        return resolved_columns(self.column_tails)


def resolved_columns(tails, tol: float = RESOLVED_TOL) -> int:
    """Length of the leading run of columns whose tail is at most ``tol``."""
    ok = np.asarray(tails) <= tol
    return ok.size if ok.all() else int(np.argmin(ok))


def build_matrix(u, phi, K: int = DEFAULT_DEGREE, M: int = fs.DEFAULT_GRID, radius: float = 1.0,
                 tol: float = 1e-10) -> TruncationMatrix:
    """Build the truncation from one boundary grid of ``u`` and running powers of ``φ``.

    Raises
    ------
    AliasingTooLarge
        If the upper half of the FFT spectrum of some column exceeds ``tol``
        relative to that column's size.
    """
    u = fs.as_function(u)
    phi = fs.as_selfmap(phi)
    K = int(K)
    M = int(M)
    if K >= M // 2:
        raise ValidationError("K must be below M/2")
    zeta = fs.circle_points(M, radius)
    U = u(zeta)
    P = phi(zeta)
    if not (np.all(np.isfinite(U)) and np.all(np.isfinite(P))):
        raise SingularPoint("non-finite boundary samples; use radius < 1")
    scale = radius ** -np.arange(M // 2)
    entries = np.empty((K + 1, K + 1), dtype=complex)
    tails = np.empty(K + 1)
    alias = 0.0
    Q = U.copy()
    for n in range(K + 1):
        c = np.fft.fft(Q) / M
        low = c[: M // 2] * scale
        entries[:, n] = low[: K + 1]
        tails[n] = float(np.sqrt(np.sum(np.abs(low[K + 1 :]) ** 2)))
        col_alias = float(np.abs(c[M // 2 :]).max())
        if col_alias > tol * max(1.0, float(np.abs(low).max())):
            raise AliasingTooLarge(f"column {n}: aliasing estimate {col_alias:.3g}")
        alias = max(alias, col_alias)
        Q *= P
    entries.setflags(write=False)
    tails.setflags(write=False)
    return TruncationMatrix(K, entries, tails, float(tails.max()), alias, M)


def operator_norm_h2(T, *, tol: float = 1e-10, max_iter: int = 20000, seed: int = 0) -> float:
    """Largest singular value by Golub-Kahan-Lanczos bidiagonalization.

    Only products with ``A`` and ``A^H`` are used, with full
    reorthogonalization. Stops when the residual bound of the top Ritz value
    is at most ``tol`` relative. Plain power iteration stalls when the top
    singular values cluster, as they do for Toeplitz symbols such as ``1+z``.

    Raises
    ------
    NoConvergence
        After ``max_iter`` steps without meeting ``tol``.
    """
    A = T.entries if isinstance(T, TruncationMatrix) else np.asarray(T, dtype=complex)
    if A.size == 0:
        return 0.0
    m, n = A.shape
    steps = min(max_iter, n)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    V = np.zeros((steps + 1, n), dtype=complex)
    U = np.zeros((steps, m), dtype=complex)
    V[0] = v / np.linalg.norm(v)
    alphas, betas = [], []
    u = A @ V[0]
    for k in range(steps):
        u -= U[:k].T @ (U[:k].conj() @ u)
        a = np.linalg.norm(u)
        if a == 0.0:
            # Invariant subspace: the current Ritz values are exact.
            break
        U[k] = u / a
        alphas.append(a)
        x = A.conj().T @ U[k]
        x -= V[:k + 1].T @ (V[:k + 1].conj() @ x)
        b = np.linalg.norm(x)
        # The small SVD dominates the cost for large n, so test on a sparse schedule.
        if k < 16 or k % 8 == 7 or b == 0.0 or k + 1 == n:
            _, sv, Wh = np.linalg.svd(_bidiagonal(alphas, betas))
            # Residual of the top Ritz pair: b times the last entry of its right vector.
            if b * abs(Wh[0, -1]) <= tol * sv[0] or k + 1 == n:
                return float(sv[0])
        betas.append(b)
        V[k + 1] = x / b
        u = A @ V[k + 1] - b * U[k]
    else:
        raise NoConvergence(f"bidiagonalization did not converge in {max_iter} steps")
    return float(np.linalg.svd(_bidiagonal(alphas, betas), compute_uv=False)[0]) if alphas else 0.0


def _bidiagonal(alphas, betas) -> np.ndarray:
    k = len(alphas)
    return np.diag(alphas) + np.diag(betas[:k - 1], 1) if k else np.zeros((0, 0))


def remainder_diagonal(size: int, N: int, remainder: str = "dirichlet") -> np.ndarray:
    """Diagonal of the remainder operator on monomials ``0..size-1``.

    ``dirichlet`` keeps degrees above ``N``; ``fejer`` uses ``min(n/N, 1)``.
    """
    n = np.arange(size)
    if remainder == "dirichlet":
        return (n > N).astype(float)
    if remainder == "fejer":
        return np.minimum(n / N, 1.0)
    raise ValidationError(f"unknown remainder {remainder!r}")


def _resolved_block(T: TruncationMatrix):
    return T.entries[:, : T.resolved]


def essnorm_h2_upper(T: TruncationMatrix, N: int, remainder: str = "dirichlet") -> float:
    """``||uC_φ R_N||`` on the resolved columns."""
    A = _resolved_block(T)
    return operator_norm_h2(A * remainder_diagonal(A.shape[1], N, remainder)[None, :])


def essnorm_h2_lower(T: TruncationMatrix, N: int, remainder: str = "dirichlet") -> float:
    """``||R_N uC_φ|| / γ`` with ``γ = 2``, on the resolved columns."""
    A = _resolved_block(T)
    return operator_norm_h2(remainder_diagonal(A.shape[0], N, remainder)[:, None] * A) / GAMMA


@dataclass(frozen=True)
class TruncationBracket:
    """Per-N remainder norms and their tail estimates.

    ``upper`` is the minimum of the upper values over the usable schedule;
    each is an upper bound on its own. The lower values decrease towards
    their limsup and overstate it at finite N, so ``lower`` is the smaller of
    the last two, clipped to ``upper`` (the limsup cannot exceed it) with
    ``lower_clipped`` set when that happens.
    """

    lower: float
    upper: float
    schedule: tuple
    upper_values: tuple
    lower_values: tuple
    operator_norm: float
    resolved_columns: int
    tail_bound: float
    remainder: str
    degree: int
    lower_clipped: bool = False

    def to_dict(self):
        return {
            "lower": self.lower,
            "upper": self.upper,
            "schedule": list(self.schedule),
            "upper_values": list(self.upper_values),
            "lower_values": list(self.lower_values),
            "operator_norm": self.operator_norm,
            "resolved_columns": self.resolved_columns,
            "tail_bound": self.tail_bound,
            "remainder": self.remainder,
            "degree": self.degree,
            "lower_clipped": self.lower_clipped,
            "label": "numerical evidence",
        }


def truncation_bracket(u, phi, K: int = DEFAULT_DEGREE, schedule=DEFAULT_SCHEDULE,
                       M: int = fs.DEFAULT_GRID, remainder: str = "dirichlet",
                       matrix: TruncationMatrix | None = None) -> TruncationBracket:
    """Remainder sandwich over an N-schedule.

    Schedule entries with no resolved column above ``N`` carry no information
    about the tail of the operator and are dropped.
    """
    T = matrix or build_matrix(u, phi, K, M)
    usable = tuple(int(N) for N in schedule if int(N) + 1 < T.resolved)
    if not usable:
        raise ValidationError(
            f"no schedule entry below the {T.resolved} resolved columns; increase K")
    ups = tuple(essnorm_h2_upper(T, N, remainder) for N in usable)
    lows = tuple(essnorm_h2_lower(T, N, remainder) for N in usable)
    upper = float(min(ups))
    lower = float(min(lows[-2:]))
    return TruncationBracket(
        lower=min(lower, upper),
        upper=upper,
        schedule=usable,
        upper_values=ups,
        lower_values=lows,
        operator_norm=operator_norm_h2(_resolved_block(T)),
        resolved_columns=T.resolved,
        tail_bound=T.tail_bound,
        remainder=remainder,
        degree=T.degree,
        lower_clipped=lower > upper,
    )


def kernel_coefficient_alpha(phi, a, p_index: int, M: int = 2**12) -> complex:
    """Coefficient ``p`` of ``C_φ(k_a / (1 - |a|^2))`` from its finite closed form.

    ``Σ_{j<=p} <ψ^j, z^p> (j+1) conj(a)^j / (1 - conj(a) a0)^{j+2}`` with
    ``a0 = φ(0)`` and ``ψ = φ - a0``; the inner products come from an FFT of
    boundary samples of ``ψ^j``.
    """
    phi = fs.as_selfmap(phi)
    a = complex(a)
    if abs(a) >= 1.0:
        raise fs.OutsideDomain("|a| must be < 1")
    p = int(p_index)
    if p < 0:
        raise ValidationError("p_index must be >= 0")
    if p >= M // 2:
        raise ValidationError("p_index must be below M/2")
    a0 = complex(phi(np.array([0j]))[0])
    zeta = fs.circle_points(M)
    psi = phi(zeta) - a0
    ac = np.conj(a)
    base = 1.0 - ac * a0
    total = 0j
    Q = np.ones(M, dtype=complex)
    for j in range(p + 1):
        inner = complex(np.fft.fft(Q)[p] / M)
        total += inner * (j + 1) * ac**j / base ** (j + 2)
        Q = Q * psi
    return total


def matrix_to_csv(T: TruncationMatrix, path) -> None:
    """Write rows ``row, col, re, im`` for every non-zero entry."""
    rows, cols = np.nonzero(T.entries)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["row", "col", "re", "im"])
        for i, j in zip(rows, cols):
            z = T.entries[i, j]
            w.writerow([int(i), int(j), repr(float(z.real)), repr(float(z.imag))])
