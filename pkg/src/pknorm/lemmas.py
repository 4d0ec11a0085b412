"""Numerical verifiers for the inequalities and structural facts used to
characterize maps that preserve (p,k)-norms of tensor products.

Plain inequality checks return an :class:`IneqReport` whose ``slack`` is
documented per function (positive means the inequality has room).  Implication
checks ("hypothesis implies conclusion") are three-valued: a report is either
vacuous (hypothesis false), holds, or is violated.

Hypotheses quantified over a whole interval ("for all 0 < alpha < 1") are
checked on a finite grid plus the limit alpha -> 0+ (via first-order
eigenvalue perturbation); reports say so in ``details["grid_sampled"]``.
The check is not complete: a hypothesis failing only strictly between grid
points away from 0 goes unnoticed.
"""

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    as_matrix,
    clamp_psd,
    eigvalsh,
    eigvalsh_batch,
    fro,
    hermitian_eigen,
    hermitian_power,
    orthonormal_completion,
    singular_values,
    svd,
)
from .norms import pk_norm_pth_power, top_k_eigen_sum, top_k_power_sums

SLACK_TOL = 1e-9
ORTH_TOL = 1e-9
# conclusion residuals scale like the square root of a hypothesis defect
CONCLUSION_TOL = 1e-6
TIE_TOL = 1e-8
LIMIT_TOL = 1e-12
ZERO_TOL = 1e-10
DEFAULT_GRID = tuple(sorted({2.0**-j for j in range(1, 21)} | {j / 10 for j in range(1, 10)}))


class PreconditionError(ValueError):
    pass


@dataclass
class IneqReport:
    holds: bool
    slack: float
    vacuous: bool = False
    witness: dict | None = None
    details: dict = field(default_factory=dict)

    @property
    def status(self):
        if self.vacuous:
            return "vacuous"
        return "holds" if self.holds else "violated"


def _scaled_tol(lhs, rhs, tol=SLACK_TOL):
    return tol * (1.0 + abs(lhs) + abs(rhs))


def _inequality(lhs, rhs, tol=SLACK_TOL, **details):
    """Report for ``lhs >= rhs`` with slack ``lhs - rhs``."""
    slack = float(lhs - rhs)
    return IneqReport(
        holds=slack >= -_scaled_tol(lhs, rhs, tol),
        slack=slack,
        details={"lhs": float(lhs), "rhs": float(rhs), **details},
    )


def scalar_convexity_check(a, b, gamma, tol=SLACK_TOL):
    """``(a+b)^g + (a-b)^g >= 2 a^g`` for ``-a <= b <= a`` and ``g >= 1``."""
    if not -a <= b <= a:
        raise PreconditionError("need -a <= b <= a")
    if gamma < 1:
        raise PreconditionError("need gamma >= 1")
    return _inequality((a + b) ** gamma + (a - b) ** gamma, 2 * a**gamma, tol)


def _require_psd(a, name="matrix"):
    w = eigvalsh(a)
    try:
        clamp_psd(w, fro(a))
    except ValueError as exc:
        raise PreconditionError(f"{name} is not positive semidefinite") from exc


def psd_power_quadform_check(a, x, gamma, tol=SLACK_TOL):
    """``x^* a^g x >= (x^* a x)^g ||x||^(2(1-g))`` for PSD ``a``, ``g >= 1``."""
    a = as_matrix(a)
    x = np.asarray(x, dtype=np.complex128).ravel()
    if gamma < 1:
        raise PreconditionError("need gamma >= 1")
    if x.size != a.shape[0]:
        raise PreconditionError("vector length does not match matrix")
    nx2 = float(np.real(np.vdot(x, x)))
    if nx2 == 0.0:
        raise PreconditionError("x must be nonzero")
    _require_psd(a)
    lhs = float(np.real(np.vdot(x, hermitian_power(a, gamma) @ x)))
    q = max(float(np.real(np.vdot(x, a @ x))), 0.0)
    rhs = q**gamma * nx2 ** (1.0 - gamma)
    return _inequality(lhs, rhs, tol)


def orthogonal(a, b, tol=ORTH_TOL):
    """``a^* b = a b^* = 0`` up to ``tol * (1 + ||a|| ||b||)``."""
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise ValueError(f"need square matrices of equal shape, got {a.shape}, {b.shape}")
    bound = tol * (1.0 + fro(a) * fro(b))
    return fro(a.conj().T @ b) <= bound and fro(a @ b.conj().T) <= bound


def _orth_residuals(a, b):
    return fro(a.conj().T @ b), fro(a @ b.conj().T)


def simultaneous_block_diagonalize(a, b, tol=ORTH_TOL):
    """Unitaries ``u, v`` with ``u a v = A' (+) 0`` and ``u b v = 0 (+) B'``.

    ``split`` is the size of the leading block, equal to the numerical rank of
    ``a``.  Built from the singular vectors of ``a`` and ``b`` followed by an
    orthonormal completion.
    """
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if not orthogonal(a, b, tol):
        raise PreconditionError("inputs are not orthogonal")
    fa, fb = svd(a), svd(b)
    scale = max(fa.values[0], fb.values[0])
    if scale == 0.0:
        raise PreconditionError("a and b are both zero")
    ra = int(np.sum(fa.values > ZERO_TOL * scale))
    rb = int(np.sum(fb.values > ZERO_TOL * scale))

    def basis(first, second):
        second = second - first @ (first.conj().T @ second)
        # re-orthonormalize the second family (it is only orthogonal within tol)
        if second.shape[1]:
            g = hermitian_eigen(second.conj().T @ second)
            second = second @ (g.vectors / np.sqrt(g.values)) @ g.vectors.conj().T
        return orthonormal_completion(np.concatenate([first, second], axis=1))

    left = basis(fa.left[:, :ra], fb.left[:, :rb])
    right = basis(fa.right[:, :ra], fb.right[:, :rb])
    return left.conj().T, right, ra


def block_residuals(u, a, b, v, split):
    """Off-block mass of ``u a v`` (outside leading block) and ``u b v`` (outside trailing block)."""
    ua = u @ a @ v
    ub = u @ b @ v
    mask = np.zeros(ua.shape, dtype=bool)
    mask[:split, :split] = True
    tail = np.zeros(ua.shape, dtype=bool)
    tail[split:, split:] = True
    return fro(ua[~mask]), fro(ub[~tail])


def orthogonality_cancellation_check(a, b, c, tol=ORTH_TOL, conclusion_factor=100.0):
    """If ``(a+b) _|_ c`` and ``a _|_ b`` then ``a _|_ c`` and ``b _|_ c``."""
    a, b, c = (as_matrix(x) for x in (a, b, c))
    if not (orthogonal(a + b, c, tol) and orthogonal(a, b, tol)):
        return IneqReport(holds=True, slack=0.0, vacuous=True)
    res = (*_orth_residuals(a, c), *_orth_residuals(b, c))
    bound = conclusion_factor * tol * (1.0 + max(fro(a), fro(b)) * fro(c))
    slack = bound - max(res)
    ok = slack >= 0
    witness = None if ok else {"residuals": [float(r) for r in res]}
    return IneqReport(holds=ok, slack=float(slack), witness=witness, details={"residuals": [float(r) for r in res]})


def _check_hermitian_psd_pair(c, d):
    for name, x in (("c", c), ("d", d)):
        if fro(x - x.conj().T) > 1e-10 * max(fro(x), 1e-300):
            raise PreconditionError(f"{name} must be Hermitian")
    _require_psd(c + d, "c + d")
    _require_psd(c - d, "c - d")


def eigen_power_sum_ineq(c, d, gamma, k, tol=SLACK_TOL):
    """Top-k power sums: ``S(c+d) + S(c-d) >= 2 S(c)`` when ``-c <= d <= c``."""
    c = as_matrix(c, "c")
    d = as_matrix(d, "d")
    if gamma < 1:
        raise PreconditionError("need gamma >= 1")
    if not 1 <= k <= c.shape[0]:
        raise PreconditionError("need 1 <= k <= n")
    _check_hermitian_psd_pair(c, d)
    lhs = top_k_eigen_sum(c + d, k, gamma) + top_k_eigen_sum(c - d, k, gamma)
    rhs = 2 * top_k_eigen_sum(c, k, gamma)
    return _inequality(lhs, rhs, tol)


def counterexample_instance():
    """``(c, d)`` with ``c + d = diag(1,1,3,3)`` and ``c - d = diag(3,3,1,1)``."""
    return 2.0 * np.eye(4, dtype=np.complex128), np.diag([-1.0, -1.0, 1.0, 1.0]).astype(np.complex128)


def _top_k_small_power(a, k, power):
    w = clamp_psd(eigvalsh(a)[:k], fro(a))
    return float(np.sum(w**power))


def remark_counterexample(gamma, k=2):
    """The fixed 4x4 instance on which the ``0 < gamma < 1`` reversal fails.

    ``slack = LHS - RHS`` where LHS is the sum of top-k gamma-power sums of
    ``c + d`` and ``c - d`` and RHS is twice that of ``c``.  A reversed
    inequality would need ``slack <= 0``; ``holds`` reports ``slack >= 0``.
    """
    if not 0 < gamma < 1:
        raise PreconditionError("need 0 < gamma < 1")
    if not 1 <= k <= 4:
        raise PreconditionError("need 1 <= k <= 4")
    c, d = counterexample_instance()
    lhs = _top_k_small_power(c + d, k, gamma) + _top_k_small_power(c - d, k, gamma)
    rhs = 2 * _top_k_small_power(c, k, gamma)
    rep = _inequality(lhs, rhs, tol=0.0, gamma=float(gamma), k=int(k))
    rep.witness = {"c_plus_d": np.real(np.diag(c + d)).tolist(), "c_minus_d": np.real(np.diag(c - d)).tolist()}
    return rep


def pk_parallelogram_lower_bound(a, b, p, k, tol=SLACK_TOL):
    """``||a+b||^p + ||a-b||^p >= 2 sum_{i<=k} lambda_i^(p/2)(a^*a + b^*b)`` for p > 2."""
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if p <= 2:
        raise PreconditionError("p must exceed 2")
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise PreconditionError("need square matrices of equal shape")
    k = min(k, a.shape[0])
    lhs = pk_norm_pth_power(a + b, p, k) + pk_norm_pth_power(a - b, p, k)
    gram = a.conj().T @ a + b.conj().T @ b
    rhs = 2 * top_k_eigen_sum(gram, k, p / 2)
    return _inequality(lhs, rhs, tol)


def rank_bound_lemma_check(a, b, p, k, tol=SLACK_TOL, rank_tol_rel=1e-8):
    """Orthogonal ``a, b`` with additive p-th powers force ``rank(a+b) <= k``.

    Additivity is tested up to ``delta = tol * (1 + |lhs| + |rhs|)``, which
    cannot see a singular value ``s`` with ``s**p <= delta``.  The rank in the
    conclusion is therefore counted at that same resolution: singular values
    of ``a + b`` at or below ``max(delta**(1/p), rank_tol_rel * s_1)`` are
    treated as zero, and an ``a`` or ``b`` entirely below it makes the
    hypothesis undecidable (reported vacuous).
    """
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if fro(a) == 0 or fro(b) == 0:
        raise PreconditionError("a and b must be nonzero")
    if k < 2:
        raise PreconditionError("need k >= 2")
    lhs = pk_norm_pth_power(a + b, p, k)
    rhs = pk_norm_pth_power(a, p, k) + pk_norm_pth_power(b, p, k)
    delta = _scaled_tol(lhs, rhs, tol)
    resolution = delta ** (1.0 / p)
    additive = abs(lhs - rhs) <= delta
    orth = orthogonal(a, b)
    visible = min(singular_values(a)[0], singular_values(b)[0]) > resolution
    details = {
        "lhs": lhs,
        "rhs": rhs,
        "orthogonal": bool(orth),
        "additive": bool(additive),
        "resolution": resolution,
        "above_resolution": bool(visible),
    }
    if not (orth and additive and visible):
        return IneqReport(holds=True, slack=0.0, vacuous=True, details=details)
    sv = singular_values(a + b)
    r = int(np.sum(sv > max(resolution, rank_tol_rel * sv[0])))
    details["rank"] = r
    ok = r <= k
    return IneqReport(
        holds=ok,
        slack=float(k - r),
        witness=None if ok else {"rank": r, "k": k, "singular_values": sv.tolist()},
        details=details,
    )


def _grid(grid):
    g = np.asarray(DEFAULT_GRID if grid is None else grid, dtype=float)
    if np.any((g <= 0) | (g >= 1)):
        raise PreconditionError("grid points must lie in (0, 1)")
    return g


def _ell(values, k, tie_tol=TIE_TOL):
    """Largest l with values[k-1+l] equal to values[k-1] (relative tie tolerance)."""
    ref = values[k - 1]
    ell = 0
    for v in values[k:]:
        if abs(v - ref) <= tie_tol * max(abs(ref), 1e-300):
            ell += 1
        else:
            break
    return ell


def _perturbation_hypothesis(a, b, gamma, k, grid, tol):
    """Check of ``S(a + t b) <= S(a) + S(t b)`` with top-k gamma-power sums.

    Evaluated on the grid and in the limit t -> 0+.  Returns
    ``(grid_margin, limit_mass)``: the minimum of ``rhs - lhs + tol_scaled``
    over the grid (non-negative means every grid point passes) and the mass
    :func:`_limit_mass` that must vanish for the limit to pass.
    """
    stack = a[None, :, :] + grid[:, None, None] * b[None, :, :]
    lhs = top_k_power_sums(eigvalsh_batch(stack), k, gamma)
    base = top_k_power_sums(eigvalsh_batch(np.stack([a, b])), k, gamma)
    rhs = base[0] + grid**gamma * base[1]
    margin = float(np.min(rhs - lhs + tol * (1.0 + np.abs(lhs) + np.abs(rhs))))
    return margin, _limit_mass(a, b, k)


def _limit_mass(a, b, k):
    """Mass of PSD ``b`` on the eigen-clusters of ``a`` that feed the top-k sum.

    For gamma > 1 the right-hand side grows like t**gamma while the left-hand
    side grows like ``t * gamma * sum_c lambda_c**(gamma-1) * q_c``, where the
    sum runs over tie clusters c of positive eigenvalues meeting the top k and
    ``q_c`` is the sum of the top ``j_c`` eigenvalues of ``b`` compressed to
    the cluster (``j_c`` = cluster members among the top k).  The hypothesis
    therefore fails for small t exactly when some ``q_c > 0``; the largest
    ``q_c`` is returned.
    """
    eig = hermitian_eigen(a)
    lam = eig.values
    floor = ZERO_TOL * max(fro(a), 1e-300)
    mass = 0.0
    i = 0
    while i < k and lam[i] > floor:
        j = i + 1
        while j < len(lam) and abs(lam[j] - lam[i]) <= TIE_TOL * lam[i]:
            j += 1
        q = eig.vectors[:, i:j]
        c = q.conj().T @ b @ q
        comp = eigvalsh((c + c.conj().T) / 2)
        mass = max(mass, float(np.sum(comp[: min(j, k) - i])))
        i = j
    return mass


def _limit_tol(b):
    # b PSD: ||b x||^2 <= ||b|| x^* b x, so this keeps ||b x|| near 1e-6
    return LIMIT_TOL * (1.0 + fro(b))


def psd_perturbation_structure(a, b, gamma, k, alpha_grid=None, tol=SLACK_TOL):
    """Perturbation structure of PSD ``a`` by PSD ``b``.

    Hypothesis: ``S(a + t b) <= S(a) + S(t b)`` on the grid, with S the top-k
    gamma-power eigenvalue sum.  Conclusion: ``a _|_ b`` when ``lambda_k(a) = 0``;
    otherwise ``b`` vanishes on the top ``k + l`` eigenvectors of ``a``, where
    ``l`` counts eigenvalues tied with ``lambda_k(a)``.
    """
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if gamma <= 1:
        raise PreconditionError("need gamma > 1")
    n = a.shape[0]
    if b.shape != a.shape or not 1 <= k <= n:
        raise PreconditionError("need equal square shapes and 1 <= k <= n")
    _require_psd(a, "a")
    _require_psd(b, "b")
    grid = _grid(alpha_grid)
    margin, mass = _perturbation_hypothesis(a, b, gamma, k, grid, tol)
    eig = hermitian_eigen(a)
    lam = eig.values
    zero = lam[k - 1] <= ZERO_TOL * max(fro(a), 1e-300)
    details = {
        "grid_sampled": True,
        "grid_size": int(grid.size),
        "hypothesis_margin": margin,
        "limit_mass": mass,
    }
    hypothesis = margin >= 0 and mass <= _limit_tol(b)
    if zero:
        details["case"] = "a"
        residual = max(_orth_residuals(a, b))
        bound = CONCLUSION_TOL * (1.0 + fro(a) * fro(b))
    else:
        ell = _ell(lam, k)
        details["case"] = "b"
        details["ell"] = ell
        residual = fro(b @ eig.vectors[:, : k + ell])
        bound = CONCLUSION_TOL * (1.0 + fro(b))
    return _implication(hypothesis, residual, bound, details)


def _implication(hypothesis, residual, bound, details):
    details = {**details, "hypothesis_holds": bool(hypothesis), "conclusion_residual": float(residual)}
    conclusion = residual <= bound
    details["conclusion_holds"] = bool(conclusion)
    if not hypothesis:
        return IneqReport(holds=True, slack=0.0, vacuous=True, details=details)
    return IneqReport(
        holds=bool(conclusion),
        slack=float(bound - residual),
        witness=None if conclusion else {"conclusion_residual": float(residual)},
        details=details,
    )


def singular_perturbation_structure(t, s, p, k, x_grid=None, tol=SLACK_TOL):
    """Singular-value version: Gram and co-Gram hypotheses on the grid.

    Conclusion: ``t _|_ s`` when ``s_k(t) = 0``; otherwise, with
    ``t = U diag(s(t)) V^*``, the leading ``k + l`` rows and columns of
    ``U^* s V`` vanish.
    """
    t = as_matrix(t, "t")
    s = as_matrix(s, "s")
    if p <= 2:
        raise PreconditionError("p must exceed 2")
    n = t.shape[0]
    if s.shape != t.shape or t.shape[0] != t.shape[1]:
        raise PreconditionError("need square matrices of equal shape")
    k = min(k, n)
    grid = _grid(x_grid)
    gamma = p / 2
    th = t.conj().T
    sh = s.conj().T
    m1, q1 = _perturbation_hypothesis(th @ t, sh @ s, gamma, k, grid**2, tol)
    m2, q2 = _perturbation_hypothesis(t @ th, s @ sh, gamma, k, grid**2, tol)
    details = {
        "grid_sampled": True,
        "grid_size": int(grid.size),
        "hypothesis_margin": min(m1, m2),
        "limit_mass": max(q1, q2),
    }
    hypothesis = min(m1, m2) >= 0 and q1 <= _limit_tol(sh @ s) and q2 <= _limit_tol(s @ sh)
    f = svd(t)
    sv = f.values
    if sv[k - 1] <= ZERO_TOL * max(sv[0], 1e-300) or sv[0] == 0.0:
        details["case"] = "1"
        residual = max(_orth_residuals(t, s))
        bound = CONCLUSION_TOL * (1.0 + fro(t) * fro(s))
    else:
        ell = _ell(sv, k)
        details["case"] = "2"
        details["ell"] = ell
        r = k + ell
        rotated = f.left.conj().T @ s @ f.right
        residual = max(fro(rotated[:r, :]), fro(rotated[:, :r]))
        bound = CONCLUSION_TOL * (1.0 + fro(s))
    return _implication(hypothesis, residual, bound, details)

