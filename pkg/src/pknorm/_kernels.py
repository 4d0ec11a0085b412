"""Compiled cyclic Jacobi kernels.

Two-sided Jacobi for Hermitian matrices and one-sided (Hestenes) Jacobi for
the SVD.  Kernels return unsorted results and a sweep count; ``-1`` means the
sweep cap was hit and the caller is expected to raise.
"""

import numpy as np
from numba import njit

MAX_SWEEPS = 60
OFF_TOL = 1e-14


@njit(cache=True)
def _rotation(app, aqq, apq):
    # 2x2 unitary G with G^* [[app, apq], [conj(apq), aqq]] G diagonal.
    r = abs(apq)
    e = apq / r
    theta = (aqq - app) / (2.0 * r)
    if theta >= 0.0:
        t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
    else:
        t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c
    g00 = complex(c, 0.0)
    g01 = complex(s, 0.0)
    g10 = -s * np.conj(e)
    g11 = c * np.conj(e)
    return g00, g01, g10, g11


@njit(cache=True)
def jacobi_eigh(a, want_vectors):
    """Eigen-decompose the Hermitian part of ``a`` (copied, not modified)."""
    n = a.shape[0]
    h = np.empty((n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            h[i, j] = 0.5 * (a[i, j] + np.conj(a[j, i]))
    v = np.eye(n, dtype=np.complex128)
    fro = 0.0
    for i in range(n):
        for j in range(n):
            fro += h[i, j].real ** 2 + h[i, j].imag ** 2
    fro = np.sqrt(fro)
    w = np.empty(n)
    if fro == 0.0:
        for i in range(n):
            w[i] = 0.0
        return w, v, 0
    skip = 1e-17 * fro
    sweeps = 0
    while True:
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += h[i, j].real ** 2 + h[i, j].imag ** 2
        if np.sqrt(off) <= OFF_TOL * fro:
            break
        if sweeps >= MAX_SWEEPS:
            return w, v, -1
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = h[p, q]
                if abs(apq) <= skip:
                    continue
                g00, g01, g10, g11 = _rotation(h[p, p].real, h[q, q].real, apq)
                for k in range(n):
                    hkp = h[k, p]
                    hkq = h[k, q]
                    h[k, p] = hkp * g00 + hkq * g10
                    h[k, q] = hkp * g01 + hkq * g11
                for k in range(n):
                    hpk = h[p, k]
                    hqk = h[q, k]
                    h[p, k] = np.conj(g00) * hpk + np.conj(g10) * hqk
                    h[q, k] = np.conj(g01) * hpk + np.conj(g11) * hqk
                h[p, q] = 0.0
                h[q, p] = 0.0
                h[p, p] = h[p, p].real
                h[q, q] = h[q, q].real
                if want_vectors:
                    for k in range(n):
                        vkp = v[k, p]
                        vkq = v[k, q]
                        v[k, p] = vkp * g00 + vkq * g10
                        v[k, q] = vkp * g01 + vkq * g11
    for i in range(n):
        w[i] = h[i, i].real
    return w, v, sweeps


@njit(cache=True)
def jacobi_eigvalsh_batch(stack):
    """Eigenvalues (unsorted) of each Hermitian matrix in a 3-d stack."""
    b, n, _ = stack.shape
    out = np.empty((b, n))
    worst = 0
    for i in range(b):
        w, _, sweeps = jacobi_eigh(stack[i], False)
        if sweeps < 0:
            return out, -1
        worst = max(worst, sweeps)
        out[i] = w
    return out, worst


@njit(cache=True)
def jacobi_svd(a, want_vectors):
    """One-sided Jacobi on the columns of ``a`` (rows >= cols assumed).

    Returns ``(w, v, sweeps)`` with ``a @ v = w`` and the columns of ``w``
    mutually orthogonal; singular values are the column norms of ``w``.
    """
    m, n = a.shape
    w = a.copy()
    v = np.eye(n, dtype=np.complex128)
    tol = 1e-15
    # rotations below this size cannot move entries at the scale of ``a``
    floor = 0.0
    for k in range(m):
        for j in range(n):
            floor += w[k, j].real ** 2 + w[k, j].imag ** 2
    floor *= 1e-34
    sweeps = 0
    while True:
        rotated = False
        if sweeps >= MAX_SWEEPS:
            return w, v, -1
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = 0.0
                beta = 0.0
                gamma = 0.0j
                for k in range(m):
                    alpha += w[k, p].real ** 2 + w[k, p].imag ** 2
                    beta += w[k, q].real ** 2 + w[k, q].imag ** 2
                    gamma += np.conj(w[k, p]) * w[k, q]
                if alpha == 0.0 or beta == 0.0:
                    continue
                if abs(gamma) <= tol * np.sqrt(alpha * beta) or abs(gamma) <= floor:
                    continue
                rotated = True
                g00, g01, g10, g11 = _rotation(alpha, beta, gamma)
                for k in range(m):
                    wkp = w[k, p]
                    wkq = w[k, q]
                    w[k, p] = wkp * g00 + wkq * g10
                    w[k, q] = wkp * g01 + wkq * g11
                if want_vectors:
                    for k in range(n):
                        vkp = v[k, p]
                        vkq = v[k, q]
                        v[k, p] = vkp * g00 + vkq * g10
                        v[k, q] = vkp * g01 + vkq * g11
        if not rotated:
            break
    return w, v, sweeps
