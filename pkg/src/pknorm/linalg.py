"""Dense complex linear algebra on numpy arrays.

Matrices are plain ``complex128`` ndarrays.  The eigen and singular value
solvers are cyclic Jacobi (see ``_kernels``), accurate at the matrix sizes
this package works with (N up to about 64).
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels

HERMITIAN_TOL = 1e-10
ORTHONORMAL_TOL = 1e-8


class NotHermitianError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


def as_matrix(a, name="matrix"):
    """Validate and convert to a 2-d complex128 array (copying only if needed)."""
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-d, got shape {a.shape}")
    if a.shape[0] == 0 or a.shape[1] == 0:
        raise ValueError(f"{name} must be non-empty, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def fro(a):
    return float(np.sqrt(np.sum(np.abs(a) ** 2)))


def unit(i, j, rows, cols=None):
    """Matrix unit E_ij (0-based) of shape rows x cols."""
    e = np.zeros((rows, rows if cols is None else cols), dtype=np.complex128)
    e[i, j] = 1.0
    return e


def matmul(a, b):
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return a @ b


def adjoint(a):
    return as_matrix(a).conj().T


def is_unitary(u, tol=1e-10):
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return fro(u.conj().T @ u - np.eye(u.shape[0])) <= tol


@dataclass(frozen=True)
class HermitianEigen:
    values: np.ndarray  # descending
    vectors: np.ndarray  # columns are eigenvectors


@dataclass(frozen=True)
class Svd:
    left: np.ndarray
    values: np.ndarray  # descending, length min(rows, cols)
    right: np.ndarray

    def reconstruct(self):
        r = len(self.values)
        return (self.left[:, :r] * self.values) @ self.right[:, :r].conj().T


def _descending(values):
    # stable: ties keep encounter order
    return np.argsort(-values, kind="stable")


def _check_hermitian(a, tol):
    if a.shape[0] != a.shape[1]:
        raise NotHermitianError(f"matrix must be square, got {a.shape}")
    scale = fro(a)
    if fro(a - a.conj().T) > tol * max(scale, 1e-300):
        raise NotHermitianError("matrix is not Hermitian within tolerance")


def hermitian_eigen(a, tol=HERMITIAN_TOL):
    """Eigenvalues (descending) and unitary eigenvectors of a Hermitian matrix."""
    a = as_matrix(a)
    _check_hermitian(a, tol)
    w, v, sweeps = _kernels.jacobi_eigh(a, True)
    if sweeps < 0:
        raise ConvergenceError("Jacobi eigensolver exceeded the sweep cap")
    order = _descending(w)
    return HermitianEigen(values=w[order], vectors=np.ascontiguousarray(v[:, order]))


def eigvalsh(a, tol=HERMITIAN_TOL):
    """Descending eigenvalues only; cheaper than :func:`hermitian_eigen`."""
    a = as_matrix(a)
    _check_hermitian(a, tol)
    w, _, sweeps = _kernels.jacobi_eigh(a, False)
    if sweeps < 0:
        raise ConvergenceError("Jacobi eigensolver exceeded the sweep cap")
    return w[_descending(w)]


def eigvalsh_batch(stack):
    """Descending eigenvalues of every matrix in a (b, n, n) Hermitian stack.

    No Hermitian check is made; each matrix is symmetrized by the kernel.
    """
    stack = np.ascontiguousarray(stack, dtype=np.complex128)
    w, sweeps = _kernels.jacobi_eigvalsh_batch(stack)
    if sweeps < 0:
        raise ConvergenceError("Jacobi eigensolver exceeded the sweep cap")
    return -np.sort(-w, axis=1, kind="stable")


def _fix_phase(left, right):
    # largest-modulus entry of each left vector made real positive
    idx = np.argmax(np.abs(left), axis=0)
    pivots = left[idx, np.arange(left.shape[1])]
    mags = np.abs(pivots)
    phases = np.where(mags > 0, pivots / np.where(mags > 0, mags, 1.0), 1.0)
    return left / phases, right / phases


def svd(a):
    """Full SVD ``a = left @ diag(values) @ right^*`` with unitary factors."""
    a = as_matrix(a)
    flip = a.shape[0] < a.shape[1]
    work = np.ascontiguousarray(a.conj().T if flip else a)
    w, v, sweeps = _kernels.jacobi_svd(work, True)
    if sweeps < 0:
        raise ConvergenceError("Jacobi SVD exceeded the sweep cap")
    s = np.sqrt(np.sum(np.abs(w) ** 2, axis=0))
    order = _descending(s)
    s, w, v = s[order], w[:, order], v[:, order]
    r = int(np.sum(s > max(s[0], 1e-300) * 1e-13))
    # columns for (numerically) zero singular values come from completion
    u = orthonormal_completion(w[:, :r] / s[:r])
    left, right = (v, u) if flip else (u, v)
    k = len(s)
    fl, fr = _fix_phase(left[:, :k], right[:, :k])
    left = np.concatenate([fl, left[:, k:]], axis=1)
    right = np.concatenate([fr, right[:, k:]], axis=1)
    return Svd(left=left, values=s, right=right)


def singular_values(a):
    """Descending singular values without accumulating vectors."""
    a = as_matrix(a)
    if a.shape[0] < a.shape[1]:
        a = a.conj().T
    w, _, sweeps = _kernels.jacobi_svd(np.ascontiguousarray(a), False)
    if sweeps < 0:
        raise ConvergenceError("Jacobi SVD exceeded the sweep cap")
    s = np.sqrt(np.sum(np.abs(w) ** 2, axis=0))
    return -np.sort(-s)


def rank_tol(a, tol=1e-10):
    """Number of singular values above ``tol * s_1``; 0 for the zero matrix."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    s = singular_values(a)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def _gram_schmidt_into(basis, count, vec):
    # two passes of classical Gram-Schmidt against basis[:, :count]
    for _ in range(2):
        if count:
            vec = vec - basis[:, :count] @ (basis[:, :count].conj().T @ vec)
    return vec


def orthonormal_completion(cols, tol=ORTHONORMAL_TOL):
    """Extend orthonormal columns to a square unitary with them as leading block."""
    cols = np.asarray(cols, dtype=np.complex128)
    if cols.ndim == 1:
        cols = cols[:, None]
    n, r = cols.shape
    if r > n:
        raise ValueError("more columns than rows")
    if fro(cols.conj().T @ cols - np.eye(r)) > tol:
        raise ValueError("input columns are not orthonormal")
    out = np.zeros((n, n), dtype=np.complex128)
    out[:, :r] = cols
    for count in range(r, n):
        q = out[:, :count]
        proj = np.eye(n) - q @ q.conj().T
        j = int(np.argmax(np.sum(np.abs(proj) ** 2, axis=0)))
        x = _gram_schmidt_into(out, count, proj[:, j])
        out[:, count] = x / np.sqrt(np.sum(np.abs(x) ** 2))
    return out


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def ginibre(rows, cols=None, seed=None):
    """Complex Gaussian matrix with i.i.d. entries of unit variance."""
    rng = _rng(seed)
    cols = rows if cols is None else cols
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_unitary(n, seed=None):
    """Haar unitary: Gram-Schmidt on a Ginibre sample.

    Gram-Schmidt yields an R factor with positive real diagonal, which is the
    phase fix that makes the distribution Haar.
    """
    if n < 1:
        raise ValueError("n must be positive")
    z = ginibre(n, n, seed)
    q = np.zeros((n, n), dtype=np.complex128)
    for j in range(n):
        x = _gram_schmidt_into(q, j, z[:, j])
        q[:, j] = x / np.sqrt(np.sum(np.abs(x) ** 2))
    return q


def random_isometry(n, k, seed=None):
    return random_unitary(n, seed)[:, :k]


def random_psd(n, seed=None, rank=None):
    g = ginibre(n, n if rank is None else rank, seed)
    return g @ g.conj().T


def random_hermitian(n, seed=None):
    g = ginibre(n, n, seed)
    return (g + g.conj().T) / 2


def nearest_unitary(a):
    """Closest unitary in Frobenius norm (singular values snapped to 1)."""
    f = svd(a)
    return f.left @ f.right.conj().T


def hermitian_power(a, gamma, tol=HERMITIAN_TOL):
    """``a**gamma`` for PSD ``a`` through its eigendecomposition."""
    eig = hermitian_eigen(a, tol)
    w = clamp_psd(eig.values, fro(a))
    return (eig.vectors * w**gamma) @ eig.vectors.conj().T


def clamp_psd(values, scale, rel=1e-10):
    """Zero out tiny negative eigenvalues; raise on genuinely negative ones."""
    floor = -rel * max(scale, 1e-300)
    if np.any(values < floor):
        raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {values.min():.3e})")
    return np.where(values < 0, 0.0, values)
