import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pknorm import linalg
from pknorm.linalg import (
    ConvergenceError,
    NotHermitianError,
    adjoint,
    as_matrix,
    eigvalsh,
    eigvalsh_batch,
    ginibre,
    hermitian_eigen,
    matmul,
    nearest_unitary,
    orthonormal_completion,
    random_hermitian,
    random_isometry,
    random_psd,
    random_unitary,
    rank_tol,
    singular_values,
    svd,
    unit,
)

sizes = st.integers(1, 6)
seeds = st.integers(0, 2**32 - 1)


def test_matmul_unit_calculus():
    x = ginibre(2, seed=0)
    np.testing.assert_allclose(matmul(np.eye(2), x), x)
    np.testing.assert_array_equal(matmul(unit(0, 1, 2), unit(1, 0, 2)), unit(0, 0, 2))
    np.testing.assert_array_equal(matmul(unit(1, 0, 2), unit(1, 0, 2)), np.zeros((2, 2)))
    with pytest.raises(ValueError):
        matmul(np.ones((2, 3)), np.ones((2, 3)))


def test_adjoint():
    np.testing.assert_array_equal(adjoint(np.diag([1, 1j])), np.diag([1, -1j]))
    s = np.array([[1.0, 2.0], [2.0, 5.0]])
    np.testing.assert_array_equal(adjoint(s), s)
    a = ginibre(3, 2, seed=1)
    np.testing.assert_array_equal(adjoint(adjoint(a)), a)


def test_as_matrix_rejects_bad_input():
    with pytest.raises(ValueError):
        as_matrix(np.zeros((0, 0)))
    with pytest.raises(ValueError):
        as_matrix(np.array([[1.0, np.nan]]))
    with pytest.raises(ValueError):
        as_matrix(np.ones(3))


def test_hermitian_eigen_examples():
    np.testing.assert_allclose(hermitian_eigen(np.diag([1.0, 5.0, 3.0])).values, [5, 3, 1])
    np.testing.assert_allclose(hermitian_eigen(np.array([[0, 1], [1, 0]])).values, [1, -1], atol=1e-15)


def test_hermitian_eigen_rejects():
    with pytest.raises(NotHermitianError):
        hermitian_eigen(np.array([[0, 1], [0, 0]]))
    with pytest.raises(NotHermitianError):
        hermitian_eigen(np.ones((2, 3)))


def test_hermitian_eigen_deterministic_ties():
    a = np.eye(3)
    e1, e2 = hermitian_eigen(a), hermitian_eigen(a)
    np.testing.assert_array_equal(e1.vectors, e2.vectors)
    np.testing.assert_array_equal(e1.values, [1, 1, 1])


@settings(max_examples=60, deadline=None)
@given(sizes, seeds)
def test_hermitian_eigen_matches_numpy(n, seed):
    h = random_hermitian(n, seed)
    e = hermitian_eigen(h)
    assert np.all(np.diff(e.values) <= 0)
    np.testing.assert_allclose(e.values, np.linalg.eigvalsh(h)[::-1], atol=1e-10 * (1 + np.linalg.norm(h)))
    assert np.linalg.norm(h @ e.vectors - e.vectors * e.values) <= 1e-10 * np.linalg.norm(h)
    assert np.linalg.norm(e.vectors.conj().T @ e.vectors - np.eye(n)) <= 1e-10
    np.testing.assert_allclose(eigvalsh(h), e.values, atol=1e-12 * (1 + np.linalg.norm(h)))


@settings(max_examples=30, deadline=None)
@given(sizes, seeds)
def test_psd_spectrum_nonnegative(n, seed):
    a = random_psd(n, seed, rank=max(1, n - 2))
    assert hermitian_eigen(a).values.min() >= -1e-10 * np.linalg.norm(a)


def test_eigvalsh_batch_matches_single():
    stack = np.stack([random_hermitian(4, s) for s in range(5)])
    batch = eigvalsh_batch(stack)
    for h, w in zip(stack, batch):
        np.testing.assert_allclose(w, np.linalg.eigvalsh(h)[::-1], atol=1e-12)


def test_svd_examples():
    f = svd(np.diag([3.0, 2.0, 1.0]))
    np.testing.assert_allclose(f.values, [3, 2, 1])
    # phase convention makes both factors the identity here
    np.testing.assert_allclose(f.left, np.eye(3), atol=1e-15)
    np.testing.assert_allclose(f.right, np.eye(3), atol=1e-15)
    np.testing.assert_allclose(svd(np.array([[-2.0]])).values, [2.0])


def test_svd_zero_matrix():
    f = svd(np.zeros((3, 2)))
    np.testing.assert_array_equal(f.values, [0, 0])
    assert linalg.is_unitary(f.left) and linalg.is_unitary(f.right)


@settings(max_examples=80, deadline=None)
@given(sizes, sizes, seeds)
def test_svd_invariants(m, n, seed):
    a = ginibre(m, n, seed)
    f = svd(a)
    scale = np.linalg.norm(a)
    assert np.all(np.diff(f.values) <= 0) and f.values.min() >= 0
    assert np.linalg.norm(a - f.reconstruct()) <= 1e-10 * scale
    assert linalg.is_unitary(f.left, 1e-10) and linalg.is_unitary(f.right, 1e-10)
    # eigen-of-Gram oracle from numpy
    gram = np.sort(np.linalg.eigvalsh(a.conj().T @ a))[::-1][: min(m, n)]
    np.testing.assert_allclose(f.values**2, np.clip(gram, 0, None), rtol=1e-9, atol=1e-12 * scale**2)
    np.testing.assert_allclose(singular_values(a), f.values, atol=1e-12 * scale)
    # phase: largest-modulus entry of each left vector is real positive
    k = min(m, n)
    idx = np.argmax(np.abs(f.left[:, :k]), axis=0)
    piv = f.left[idx, np.arange(k)]
    np.testing.assert_allclose(piv.imag, 0, atol=1e-12)
    assert np.all(piv.real > 0)


@settings(max_examples=40, deadline=None)
@given(sizes, seeds)
def test_singular_values_unitarily_invariant(n, seed):
    rng = np.random.default_rng(seed)
    a = ginibre(n, n, rng)
    u, v = random_unitary(n, rng), random_unitary(n, rng)
    np.testing.assert_allclose(singular_values(u @ a @ v), singular_values(a), atol=1e-9)


def test_svd_rank_deficient():
    rng = np.random.default_rng(3)
    a = ginibre(5, 2, rng) @ ginibre(2, 4, rng)
    f = svd(a)
    assert np.linalg.norm(a - f.reconstruct()) <= 1e-10 * np.linalg.norm(a)
    assert linalg.is_unitary(f.left) and linalg.is_unitary(f.right)


def test_orthonormal_completion():
    e1 = np.eye(3)[:, :1]
    w = orthonormal_completion(e1)
    assert linalg.is_unitary(w)
    np.testing.assert_array_equal(w[:, 0], e1[:, 0])
    u = random_unitary(4, 0)
    np.testing.assert_allclose(orthonormal_completion(u), u)
    q = random_isometry(4, 2, 1)
    w = orthonormal_completion(q)
    assert np.linalg.norm(w.conj().T @ w - np.eye(4)) <= 1e-10
    np.testing.assert_array_equal(w[:, :2], q)
    with pytest.raises(ValueError):
        orthonormal_completion(np.ones((3, 2)))


def test_random_unitary_contract():
    u1 = random_unitary(1, 5)
    assert abs(abs(u1[0, 0]) - 1) < 1e-15
    for n in range(1, 7):
        u = random_unitary(n, n)
        assert np.linalg.norm(u.conj().T @ u - np.eye(n)) <= 1e-12
    np.testing.assert_array_equal(random_unitary(4, 9), random_unitary(4, 9))


def test_random_unitary_haar_moments():
    # for Haar U(n), E|u_11|^2 = 1/n and E|u_11|^4 = 2/(n(n+1))
    n, trials = 3, 4000
    rng = np.random.default_rng(0)
    x = np.array([abs(random_unitary(n, rng)[0, 0]) ** 2 for _ in range(trials)])
    assert abs(x.mean() - 1 / n) < 0.02
    assert abs((x**2).mean() - 2 / (n * (n + 1))) < 0.02
    # the phase of an entry is uniform: its mean vanishes
    z = np.array([random_unitary(n, rng)[1, 2] for _ in range(trials)])
    assert abs(z.mean()) < 0.03


def test_rank_tol():
    assert rank_tol(unit(0, 0, 3) + unit(1, 1, 3)) == 2
    assert rank_tol(np.zeros((3, 3))) == 0
    u, v = ginibre(4, 1, seed=0), ginibre(4, 1, seed=1)
    assert rank_tol(u @ v.conj().T) == 1
    with pytest.raises(ValueError):
        rank_tol(np.eye(2), 0)


def test_nearest_unitary():
    a = ginibre(4, seed=2)
    w = nearest_unitary(a)
    assert linalg.is_unitary(w)
    # polar factor from numpy's SVD
    uu, _, vh = np.linalg.svd(a)
    np.testing.assert_allclose(w, uu @ vh, atol=1e-10)


def test_hermitian_power_and_clamp():
    a = np.diag([4.0, 1.0, 0.0])
    np.testing.assert_allclose(linalg.hermitian_power(a, 0.5), np.diag([2.0, 1.0, 0.0]), atol=1e-14)
    with pytest.raises(ValueError):
        linalg.clamp_psd(np.array([1.0, -0.1]), 1.0)
    np.testing.assert_array_equal(linalg.clamp_psd(np.array([1.0, -1e-13]), 1.0), [1.0, 0.0])


def test_sweep_cap_reports_convergence_error(monkeypatch):
    monkeypatch.setattr(linalg._kernels, "jacobi_eigh", lambda a, want: (np.zeros(2), None, -1))
    with pytest.raises(ConvergenceError):
        eigvalsh(np.eye(2))


def test_svd_converges_at_roundoff_floor():
    # rank one plus perturbations at and far below machine precision
    rng = np.random.default_rng(12)
    for _ in range(50):
        x, y = ginibre(4, 1, rng), ginibre(4, 1, rng)
        a = x @ y.conj().T + 1e-16 * ginibre(4, 4, rng) + 1e-33 * ginibre(4, 4, rng)
        f = svd(a)
        assert np.linalg.norm(a - f.reconstruct()) <= 1e-12 * np.linalg.norm(a)
        assert f.values[1] <= 1e-14 * f.values[0]
