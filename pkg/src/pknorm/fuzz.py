"""Seeded fuzz suites for the lemma verifiers.

Instance ``i`` of a suite run with ``seed`` draws from the stream
``(seed, suite_id, i)``, so any single instance can be replayed and results
do not depend on evaluation order.
"""

from dataclasses import dataclass, field

import numpy as np

from . import lemmas
from .linalg import fro, ginibre, hermitian_eigen, random_unitary

MAX_N = 6
SLACK_BINS = (-np.inf, -1e-9, 0.0, 1e-12, 1e-9, 1e-6, 1e-3, 1.0, 1e3, np.inf)
BLOCK_TOL = 1e-10


@dataclass
class SuiteResult:
    name: str
    trials: int
    seed: int
    violations: int
    vacuous: int
    min_slack: float | None
    histogram: list
    first_violation: dict | None = None
    notes: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.violations == 0


def _rng(seed, suite_id, i):
    return np.random.default_rng([seed, suite_id, i])


def _psd(rng, n, rank=None):
    g = ginibre(n, n if rank is None else rank, rng)
    return g @ g.conj().T


def _block(rng, n, rows, cols):
    """Ginibre entries on ``rows x cols`` of an n x n zero matrix."""
    out = np.zeros((n, n), dtype=np.complex128)
    out[np.ix_(rows, cols)] = ginibre(len(rows), len(cols), rng)
    return out


def _orthogonal_parts(rng, n, parts):
    """Matrices ``U X_j V`` with the X_j supported on disjoint diagonal blocks.

    ``parts`` lists the block sizes; the remaining indices stay zero.
    """
    u = random_unitary(n, rng)
    v = random_unitary(n, rng)
    perm = rng.permutation(n)
    out, start = [], 0
    for size in parts:
        idx = perm[start : start + size]
        out.append(u @ _block(rng, n, idx, idx) @ v)
        start += size
    return out


def _random_parts(rng, n, count):
    # random sizes summing to at most n, each may be zero
    cuts = np.sort(rng.integers(0, n + 1, size=count))
    return list(np.diff(np.concatenate([[0], cuts])))


def _case_scalar(rng):
    a = rng.uniform(0.0, 10.0)
    b = rng.uniform(-a, a)
    gamma = rng.uniform(1.0, 4.0)
    return lemmas.scalar_convexity_check(a, b, gamma)


def _case_quadform(rng):
    n = int(rng.integers(1, MAX_N + 1))
    a = _psd(rng, n, int(rng.integers(1, n + 1)))
    x = ginibre(n, 1, rng).ravel()
    if rng.random() < 0.1:
        # eigenvector: the equality case
        x = hermitian_eigen(a).vectors[:, int(rng.integers(n))]
    return lemmas.psd_power_quadform_check(a, x, rng.uniform(1.0, 4.0))


def _case_block_diag(rng):
    n = int(rng.integers(2, MAX_N + 1))
    sizes = _random_parts(rng, n, 2)
    if sizes[0] + sizes[1] == 0:
        sizes[0] = 1
    a, b = _orthogonal_parts(rng, n, sizes)
    u, v, split = lemmas.simultaneous_block_diagonalize(a, b)
    ra, rb = lemmas.block_residuals(u, a, b, v, split)
    eye = np.eye(n)
    unit = max(fro(u.conj().T @ u - eye), fro(v.conj().T @ v - eye))
    scale = fro(a) + fro(b)
    slack = min(BLOCK_TOL * scale - max(ra, rb), BLOCK_TOL - unit)
    return lemmas.IneqReport(
        holds=slack >= 0,
        slack=float(slack),
        details={"block_residuals": [float(ra), float(rb)], "unitarity": float(unit)},
    )


def _case_cancellation(rng):
    n = int(rng.integers(2, MAX_N + 1))
    a, b, c = _orthogonal_parts(rng, n, _random_parts(rng, n, 3))
    if rng.random() < 0.2:
        # break the hypothesis: the report must be vacuous or hold
        c = c + ginibre(n, n, rng)
    return lemmas.orthogonality_cancellation_check(a, b, c)


def _case_eigen_power(rng):
    n = int(rng.integers(1, MAX_N + 1))
    p = _psd(rng, n, int(rng.integers(1, n + 1)))
    q = _psd(rng, n, int(rng.integers(1, n + 1)))
    c, d = (p + q) / 2, (p - q) / 2
    if rng.random() < 0.05:
        d = np.zeros_like(c)
    return lemmas.eigen_power_sum_ineq(c, d, rng.uniform(1.0, 4.0), int(rng.integers(1, n + 1)))


def _case_remark(rng):
    return lemmas.remark_counterexample(rng.uniform(0.01, 0.99), 2)


def _case_parallelogram(rng):
    n = int(rng.integers(1, MAX_N + 1))
    a = ginibre(n, n, rng)
    b = ginibre(n, n, rng) * rng.uniform(0.0, 2.0)
    p = 2.0 + rng.uniform(1e-3, 4.0)
    return lemmas.pk_parallelogram_lower_bound(a, b, p, int(rng.integers(1, n + 1)))


def _case_rank_bound(rng):
    n = int(rng.integers(2, MAX_N + 1))
    k = int(rng.integers(2, n + 1))
    p = 2.0 + rng.uniform(1e-3, 4.0)
    if rng.random() < 0.75 or k == n:
        # combined rank <= k: hypothesis true by construction
        ra = int(rng.integers(1, k))
        rb = int(rng.integers(1, k - ra + 1))
    else:
        total = int(rng.integers(k + 1, n + 1))
        ra = int(rng.integers(1, total))
        rb = total - ra
    a, b = _orthogonal_parts(rng, n, [ra, rb])
    return lemmas.rank_bound_lemma_check(a, b, p, k)


def _spectral_layout(rng, n, k):
    """Eigenvalues ``lam`` of ``a``, the index set ``tail`` a perturbation may
    occupy, and the largest spectral norm it may have there.

    Either ``a`` has rank below ``k`` (``tail`` is its kernel, no norm limit),
    or ``tail`` indexes the eigenvalues strictly below the k-th one and the
    limit keeps them below it, so the top-k eigenvalues of ``a + t b`` are
    those of ``a`` for every t in (0, 1).
    """
    if rng.random() < 0.5 or k == n:
        r = int(rng.integers(0, k))
        lam = np.zeros(n)
        lam[:r] = rng.uniform(0.5, 3.0, size=r)
        return lam, np.arange(r, n), np.inf
    top = np.sort(rng.uniform(1.0, 3.0, size=k))[::-1]
    ell = int(rng.integers(0, n - k))
    rest = rng.uniform(0.0, 0.5 * top[-1], size=n - k - ell)
    lam = np.concatenate([top, np.full(ell, top[-1]), rest])
    return lam, np.arange(k + ell, n), top[-1] - rest.max()


def _scaled(rng, x, limit):
    if np.isfinite(limit):
        x = x * (rng.uniform(0.05, 0.95) * limit / np.linalg.norm(x, 2))
    return x


def _embed(n, tail, block):
    out = np.zeros((n, n), dtype=np.complex128)
    out[np.ix_(tail, tail)] = block
    return out


def _case_psd_perturbation(rng):
    n = int(rng.integers(2, MAX_N + 1))
    k = int(rng.integers(1, n + 1))
    gamma = rng.uniform(1.05, 3.0)
    if rng.random() < 0.2:
        a = _psd(rng, n, int(rng.integers(1, n + 1)))
        b = _psd(rng, n, int(rng.integers(1, n + 1)))
        return lemmas.psd_perturbation_structure(a, b, gamma, k)
    lam, tail, limit = _spectral_layout(rng, n, k)
    u = random_unitary(n, rng)
    bhat = _psd(rng, len(tail), int(rng.integers(1, len(tail) + 1)))
    a = (u * lam) @ u.conj().T
    b = u @ _embed(n, tail, _scaled(rng, bhat, limit)) @ u.conj().T
    return lemmas.psd_perturbation_structure(a, b, gamma, k)


def _case_singular_perturbation(rng):
    n = int(rng.integers(2, MAX_N + 1))
    k = int(rng.integers(1, n + 1))
    p = 2.0 + rng.uniform(0.1, 4.0)
    if rng.random() < 0.2:
        t, s = ginibre(n, n, rng), ginibre(n, n, rng)
        return lemmas.singular_perturbation_structure(t, s, p, k)
    # the layout describes squared singular values of t
    lam, tail, limit = _spectral_layout(rng, n, k)
    u = random_unitary(n, rng)
    v = random_unitary(n, rng)
    z = ginibre(len(tail), len(tail), rng)
    t = (u * np.sqrt(lam)) @ v.conj().T
    s = u @ _embed(n, tail, _scaled(rng, z, np.sqrt(limit))) @ v.conj().T
    return lemmas.singular_perturbation_structure(t, s, p, k)


# suite id, case generator, aliases
SUITES = {
    "scalar-convexity": (1, _case_scalar, ("lemma2.2",)),
    "psd-power-quadform": (2, _case_quadform, ("lemma2.3",)),
    "block-diagonalize": (3, _case_block_diag, ("lemma2.5",)),
    "orthogonality-cancellation": (4, _case_cancellation, ("lemma2.6",)),
    "eigen-power-sum": (5, _case_eigen_power, ("lemma2.7",)),
    "reversal-counterexample": (6, _case_remark, ("remark2.8",)),
    "pk-parallelogram": (7, _case_parallelogram, ("corollary2.9", "cor2.9")),
    "rank-bound": (8, _case_rank_bound, ("lemma2.10",)),
    "psd-perturbation": (9, _case_psd_perturbation, ("lemma2.11",)),
    "singular-perturbation": (10, _case_singular_perturbation, ("corollary2.12", "cor2.12")),
}
ALIASES = {alias: name for name, (_, _, aliases) in SUITES.items() for alias in aliases}


def suite_names():
    return sorted(SUITES)


def resolve(name):
    if name in SUITES:
        return [name]
    if name in ALIASES:
        return [ALIASES[name]]
    if name == "all":
        return suite_names()
    raise KeyError(f"unknown suite {name!r}; choose from {sorted(set(SUITES) | set(ALIASES) | {'all'})}")


def run_instance(name, seed, index):
    suite_id, case, _ = SUITES[name]
    return case(_rng(seed, suite_id, index))


def run_suite(name, trials=1000, seed=0):
    """Run ``trials`` instances of one suite; a violation is a report that does not hold."""
    (name,) = resolve(name)
    if trials < 1:
        raise ValueError("trials must be positive")
    slacks = np.empty(trials)
    live = np.ones(trials, dtype=bool)
    violations = vacuous = 0
    first = None
    for i in range(trials):
        rep = run_instance(name, seed, i)
        slacks[i] = rep.slack
        if rep.vacuous:
            vacuous += 1
            live[i] = False
        elif not rep.holds:
            violations += 1
            if first is None:
                first = {"index": i, "slack": float(rep.slack), "details": rep.details, "witness": rep.witness}
    counts, _ = np.histogram(slacks[live], bins=np.array(SLACK_BINS))
    edges = [float(e) for e in SLACK_BINS]
    histogram = [{"lo": lo, "hi": hi, "count": int(c)} for lo, hi, c in zip(edges[:-1], edges[1:], counts)]
    min_slack = float(slacks[live].min()) if live.any() else None
    return SuiteResult(name, trials, seed, violations, vacuous, min_slack, histogram, first)


def run_suites(name, trials=1000, seed=0):
    return [run_suite(n, trials, seed) for n in resolve(name)]
