"""(p,k)-norms and the eigenvalue sums they are built from."""

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    as_matrix,
    clamp_psd,
    eigvalsh,
    fro,
    hermitian_eigen,
    random_isometry,
    singular_values,
)

MAJORIZATION_TOL = 1e-12


@dataclass(frozen=True)
class PkParams:
    """Exponent ``p >= 1`` (finite) and truncation length ``k >= 1``."""

    p: float
    k: int

    def __post_init__(self):
        if not np.isfinite(self.p) or self.p < 1:
            raise ValueError(f"p must be finite and >= 1, got {self.p}")
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k}")
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "k", int(self.k))

    def effective_k(self, rows, cols):
        return min(self.k, rows, cols)


def _params(p, k):
    if isinstance(p, PkParams):
        return p
    return PkParams(p, k)


def pk_norm_pth_power_from_values(s, p, k):
    """``sum_{i<=k} s_i**p`` for a descending vector of singular values."""
    return float(np.sum(s[: min(k, len(s))] ** p))


def pk_norm_pth_power(a, p, k=None):
    """Sum of the ``k`` largest singular values raised to ``p``.

    ``k`` is clamped to ``min(rows, cols)``.  Either ``pk_norm_pth_power(a, p, k)``
    or ``pk_norm_pth_power(a, PkParams(p, k))``.
    """
    params = _params(p, k)
    a = as_matrix(a)
    return pk_norm_pth_power_from_values(singular_values(a), params.p, params.k)


def pk_norm(a, p, k=None):
    """The (p,k)-norm ``(sum_{i<=k} s_i(a)**p)**(1/p)``."""
    params = _params(p, k)
    return pk_norm_pth_power(a, params) ** (1.0 / params.p)


def ky_fan(a, k):
    return pk_norm(a, 1, k)


def schatten(a, p):
    a = as_matrix(a)
    return pk_norm(a, p, min(a.shape))


def top_k_eigen_sum(a, k, power=1.0, tol=1e-10):
    """``sum_{i<=k} lambda_i(a)**power`` over the descending spectrum.

    Fractional powers require ``a`` to be PSD; eigenvalues in
    ``[-1e-10 * ||a||_F, 0)`` are treated as zero.
    """
    a = as_matrix(a)
    if power < 1:
        raise ValueError("power must be >= 1")
    n = a.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    w = eigvalsh(a, tol)[:k]
    if float(power).is_integer():
        return float(np.sum(w ** int(power)))
    w = clamp_psd(w, fro(a))
    return float(np.sum(w**power))


def top_k_power_sums(values, k, power):
    """Row-wise ``sum_{i<=k} v_i**power`` for descending eigenvalue rows of PSD matrices."""
    v = np.atleast_2d(values)[:, :k]
    return np.sum(np.where(v > 0, v, 0.0) ** power, axis=1)


@dataclass
class KyFanReport:
    top_sum: float
    bottom_sum: float
    traces: np.ndarray
    attains_max: bool
    attains_min: bool
    violations: int
    tol: float = field(default=1e-9)

    @property
    def holds(self):
        return self.violations == 0 and self.attains_max and self.attains_min


def kyfan_extremal_check(a, k, trials=100, seed=0, tol=1e-9):
    """Sample ``tr(W^* a W)`` over random isometries ``W`` (n x k).

    Every sample must lie between the bottom-k and top-k eigenvalue sums, and
    the eigenvector isometries must attain both ends.
    """
    a = as_matrix(a)
    eig = hermitian_eigen(a)
    n = a.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    top = float(np.sum(eig.values[:k]))
    bottom = float(np.sum(eig.values[n - k :]))
    rng = np.random.default_rng(seed)
    traces = np.empty(trials)
    for t in range(trials):
        w = random_isometry(n, k, rng)
        traces[t] = np.real(np.trace(w.conj().T @ a @ w))
    scale = tol * (1.0 + fro(a))
    violations = int(np.sum((traces > top + scale) | (traces < bottom - scale)))
    vt = eig.vectors[:, :k]
    vb = eig.vectors[:, n - k :]
    at_max = abs(np.real(np.trace(vt.conj().T @ a @ vt)) - top) <= scale
    at_min = abs(np.real(np.trace(vb.conj().T @ a @ vb)) - bottom) <= scale
    return KyFanReport(top, bottom, traces, bool(at_max), bool(at_min), violations, tol)


def weak_majorization(x, y, tol=MAJORIZATION_TOL):
    """True iff every top-k partial sum of ``x`` is at most that of ``y``."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    cx = np.cumsum(np.sort(x)[::-1])
    cy = np.cumsum(np.sort(y)[::-1])
    return bool(np.all(cx <= cy + tol))

