"""Kronecker structure on M_N with N = n_1 * ... * n_m.

Conventions used throughout the package:

* ``vec`` stacks columns, so ``vec(u @ x @ v) == kron(v.T, u) @ vec(x)``.
* A superoperator is the N^2 x N^2 matrix acting on ``vec(x)``.
* ``reshuffle`` maps the superoperator of ``x -> a @ x @ b`` to the rank-one
  matrix ``outer((b.T).ravel(), a.ravel())``.
"""

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .linalg import as_matrix, fro, svd


@dataclass(frozen=True)
class TensorShape:
    dims: tuple

    def __init__(self, dims):
        dims = tuple(int(d) for d in np.atleast_1d(dims))
        if not dims:
            raise ValueError("at least one factor is required")
        if any(d < 2 for d in dims):
            raise ValueError(f"every factor dimension must be >= 2, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def N(self):
        return int(np.prod(self.dims))

    @property
    def m(self):
        return len(self.dims)

    def __len__(self):
        return len(self.dims)


def _shape(shape):
    return shape if isinstance(shape, TensorShape) else TensorShape(shape)


@dataclass(frozen=True)
class Superoperator:
    shape: TensorShape
    mat: np.ndarray

    def __post_init__(self):
        shape = _shape(self.shape)
        mat = as_matrix(self.mat, "superoperator")
        side = shape.N**2
        if mat.shape != (side, side):
            raise ValueError(f"superoperator for dims {shape.dims} must be {side}x{side}, got {mat.shape}")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "mat", mat)

    @property
    def N(self):
        return self.shape.N

    def __call__(self, x):
        x = as_matrix(x)
        if x.shape != (self.N, self.N):
            raise ValueError(f"expected {self.N}x{self.N} input, got {x.shape}")
        return unvec(self.mat @ vec(x), self.N, self.N)

    def compose(self, other):
        """``self`` after ``other``."""
        return Superoperator(self.shape, self.mat @ other.mat)


def kron(a, b):
    return np.kron(as_matrix(a, "a"), as_matrix(b, "b"))


def kron_multi(factors):
    factors = list(factors)
    if not factors:
        raise ValueError("kron_multi needs at least one factor")
    return reduce(kron, factors[1:], as_matrix(factors[0]))


def vec(a):
    return np.asarray(a).reshape(-1, order="F")


def unvec(v, rows, cols):
    v = np.asarray(v)
    if v.size != rows * cols:
        raise ValueError(f"cannot unvec {v.size} entries into {rows}x{cols}")
    return v.reshape((rows, cols), order="F")


def _split_square(x, shape):
    x = as_matrix(x)
    shape = _shape(shape)
    if x.shape != (shape.N, shape.N):
        raise ValueError(f"expected {shape.N}x{shape.N} for dims {shape.dims}, got {x.shape}")
    return x, shape


def partial_trace_first(x, shape):
    """tr_1 on M_m (x) M_n: ``tr_1(A (x) B) = tr(A) B``."""
    x, shape = _split_square(x, shape)
    if shape.m != 2:
        raise ValueError("partial_trace_first needs a two-factor shape")
    m, n = shape.dims
    return np.einsum("ijik->jk", x.reshape(m, n, m, n))


def partial_trace_second(x, shape):
    """tr_2 on M_m (x) M_n: ``tr_2(A (x) B) = tr(B) A``."""
    x, shape = _split_square(x, shape)
    if shape.m != 2:
        raise ValueError("partial_trace_second needs a two-factor shape")
    m, n = shape.dims
    return np.einsum("ijkj->ik", x.reshape(m, n, m, n))


def partial_transpose(x, shape, flags):
    """Transpose the flagged tensor factors of ``x`` (linear extension).

    Works as an axis swap on the rank-2m view, so no factor extraction is needed.
    """
    x, shape = _split_square(x, shape)
    flags = tuple(bool(f) for f in flags)
    if len(flags) != shape.m:
        raise ValueError(f"need {shape.m} flags, got {len(flags)}")
    m = shape.m
    t = x.reshape(shape.dims + shape.dims)
    axes = list(range(2 * m))
    for i, f in enumerate(flags):
        if f:
            axes[i], axes[m + i] = m + i, i
    return t.transpose(axes).reshape(shape.N, shape.N)


def partial_transpose_superop(shape, flags):
    """Permutation matrix P with ``P @ vec(x) == vec(partial_transpose(x, flags))``."""
    shape = _shape(shape)
    N = shape.N
    idx = np.arange(N * N).reshape((N, N), order="F")
    src = vec(partial_transpose(idx, shape, flags)).real.astype(int)
    p = np.zeros((N * N, N * N), dtype=np.complex128)
    p[np.arange(N * N), src] = 1.0
    return p


def transpose_superop(n):
    return partial_transpose_superop(TensorShape([n]), [True])


def superop_of_sandwich(u, v, shape):
    """Superoperator of ``x -> u @ x @ v``."""
    shape = _shape(shape)
    u = as_matrix(u, "u")
    v = as_matrix(v, "v")
    if u.shape != (shape.N, shape.N) or v.shape != (shape.N, shape.N):
        raise ValueError(f"u and v must be {shape.N}x{shape.N}")
    return Superoperator(shape, np.kron(v.T, u))


def identity_superop(shape):
    shape = _shape(shape)
    return Superoperator(shape, np.eye(shape.N**2, dtype=np.complex128))


def _mat(s):
    return s.mat if isinstance(s, Superoperator) else as_matrix(s)


def reshuffle(s):
    """Realignment ``R[(q, q'), (r, r')] = S[(q, r), (q', r')]``.

    Row index of S is ``q * N + r`` (column-stacked vec), so a sandwich
    ``kron(b.T, a)`` becomes ``outer((b.T).ravel(), a.ravel())``: rank one.
    """
    mat = _mat(s)
    N = int(round(np.sqrt(mat.shape[0])))
    if N * N != mat.shape[0] or mat.shape[0] != mat.shape[1]:
        raise ValueError("superoperator side must be a perfect square")
    return mat.reshape(N, N, N, N).transpose(0, 2, 1, 3).reshape(N * N, N * N)


def unreshuffle(r):
    """Inverse of :func:`reshuffle` (the same index swap)."""
    return reshuffle(r)


def nearest_kron_rank1(s):
    """Best ``(a, b)`` with ``s.mat ~ kron(b.T, a)``.

    Returns ``(a, b, residual)`` where ``residual`` is the relative Frobenius
    error of the rank-one fit.  The scale is split so ``||a||_F == ||b||_F``
    and the largest-modulus entry of ``a`` is real positive.
    """
    r = reshuffle(s)
    N = int(round(np.sqrt(r.shape[0])))
    total = fro(r)
    if total == 0.0:
        z = np.zeros((N, N), dtype=np.complex128)
        return z, z.copy(), 0.0
    f = svd(r)
    sigma = f.values[0]
    residual = float(np.sqrt(np.sum(f.values[1:] ** 2)) / total)
    # r ~ sigma * left0 * right0^*  with left0 = vec-row of b.T, conj(right0) = row of a
    bt = f.left[:, 0].reshape(N, N)
    a = f.right[:, 0].conj().reshape(N, N)
    pivot = a.ravel()[np.argmax(np.abs(a))]
    phase = pivot / abs(pivot)
    scale = np.sqrt(sigma)
    a = a / phase * scale
    b = bt.T * phase * scale
    return a, b, residual
