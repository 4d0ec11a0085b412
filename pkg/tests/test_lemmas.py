import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pknorm import fuzz, lemmas
from pknorm.linalg import ginibre, is_unitary, random_psd, random_unitary, unit
from pknorm.lemmas import PreconditionError


def oracle_top_power(a, k, g):
    w = np.sort(np.linalg.eigvalsh(a))[::-1][:k]
    return np.sum(np.clip(w, 0, None) ** g)


def test_scalar_convexity():
    rep = lemmas.scalar_convexity_check(2, 1, 3)
    assert rep.slack == 12 and rep.holds
    assert lemmas.scalar_convexity_check(1.7, 0, 2.5).slack == 0
    with pytest.raises(PreconditionError):
        lemmas.scalar_convexity_check(1, 2, 2)
    with pytest.raises(PreconditionError):
        lemmas.scalar_convexity_check(2, 1, 0.5)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 100), st.floats(-1, 1), st.floats(1, 6))
def test_scalar_convexity_property(a, t, g):
    rep = lemmas.scalar_convexity_check(a, t * a, g)
    assert rep.slack >= -1e-12 * (1 + rep.details["lhs"] + rep.details["rhs"])


def test_quadform():
    rep = lemmas.psd_power_quadform_check(np.diag([4.0, 1.0]), np.array([1, 1]) / np.sqrt(2), 2)
    assert rep.slack == pytest.approx(2.25, abs=1e-12)
    a = random_psd(4, 0)
    w, v = np.linalg.eigh(a)
    assert abs(lemmas.psd_power_quadform_check(a, v[:, 2], 2.7).slack) <= 1e-12 * (1 + w[2] ** 2.7)
    with pytest.raises(PreconditionError):
        lemmas.psd_power_quadform_check(np.diag([1.0, -1.0]), np.ones(2), 2)
    with pytest.raises(PreconditionError):
        lemmas.psd_power_quadform_check(np.eye(2), np.zeros(2), 2)


def test_orthogonal():
    assert lemmas.orthogonal(unit(0, 1, 2), unit(1, 0, 2))
    a = ginibre(3, seed=0)
    assert not lemmas.orthogonal(a, a)
    assert lemmas.orthogonal(unit(0, 0, 2), unit(1, 1, 2))
    with pytest.raises(ValueError):
        lemmas.orthogonal(np.eye(2), np.eye(3))


def test_block_diagonalize_units():
    a, b = unit(0, 1, 2), unit(1, 0, 2)
    u, v, split = lemmas.simultaneous_block_diagonalize(a, b)
    assert split == 1
    ua, ub = u @ a @ v, u @ b @ v
    assert abs(abs(ua[0, 0]) - 1) < 1e-14 and abs(abs(ub[1, 1]) - 1) < 1e-14
    assert lemmas.block_residuals(u, a, b, v, split) == (0.0, 0.0)


def test_block_diagonalize_degenerate_and_errors():
    a = unit(0, 0, 3) + 2 * unit(1, 2, 3)
    u, v, split = lemmas.simultaneous_block_diagonalize(a, np.zeros((3, 3)))
    assert split == 2
    assert max(lemmas.block_residuals(u, a, np.zeros((3, 3)), v, split)) <= 1e-12
    with pytest.raises(PreconditionError):
        lemmas.simultaneous_block_diagonalize(np.eye(2), np.eye(2))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_block_diagonalize_random(seed):
    rep = fuzz.run_instance("block-diagonalize", seed, 0)
    assert rep.holds, rep.details


def test_cancellation():
    rep = lemmas.orthogonality_cancellation_check(unit(0, 0, 3), unit(1, 1, 3), unit(2, 2, 3))
    assert rep.status == "holds"
    rep = lemmas.orthogonality_cancellation_check(np.eye(2), np.eye(2), np.eye(2))
    assert rep.status == "vacuous"


def test_eigen_power_sum():
    c, d = 2 * np.eye(4), np.diag([-1.0, -1.0, 1.0, 1.0])
    assert lemmas.eigen_power_sum_ineq(c, d, 2, 2).slack == pytest.approx(20)
    p = random_psd(4, 1)
    assert abs(lemmas.eigen_power_sum_ineq(p, np.zeros((4, 4)), 2.3, 3).slack) <= 1e-12 * (1 + oracle_top_power(p, 3, 2.3))
    with pytest.raises(PreconditionError):
        lemmas.eigen_power_sum_ineq(np.eye(2), 2 * np.eye(2), 2, 1)
    with pytest.raises(PreconditionError):
        lemmas.eigen_power_sum_ineq(np.eye(2), np.zeros((2, 2)), 0.5, 1)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.floats(1, 4), st.integers(0, 2**32 - 1))
def test_eigen_power_sum_against_numpy(n, g, seed):
    rng = np.random.default_rng(seed)
    p, q = random_psd(n, rng), random_psd(n, rng)
    c, d = (p + q) / 2, (p - q) / 2
    k = int(rng.integers(1, n + 1))
    rep = lemmas.eigen_power_sum_ineq(c, d, g, k)
    expected = oracle_top_power(p, k, g) + oracle_top_power(q, k, g) - 2 * oracle_top_power(c, k, g)
    assert rep.slack == pytest.approx(expected, rel=1e-8, abs=1e-8)
    assert rep.holds


def test_reversal_counterexample():
    rep = lemmas.remark_counterexample(0.5)
    assert rep.details["lhs"] == pytest.approx(4 * np.sqrt(3), abs=1e-12)
    assert rep.details["rhs"] == pytest.approx(4 * np.sqrt(2), abs=1e-12)
    assert rep.slack == pytest.approx(4 * np.sqrt(3) - 4 * np.sqrt(2), abs=1e-12)
    assert lemmas.remark_counterexample(0.999).slack == pytest.approx(4 * 3**0.999 - 4 * 2**0.999, abs=1e-12)
    assert lemmas.remark_counterexample(0.25).slack == pytest.approx(4 * (3**0.25 - 2**0.25), abs=1e-12)
    # slack 4(3^g - 2^g) is increasing in g: positive on [0.2, 0.8], smallest at 0.2
    slacks = [lemmas.remark_counterexample(g).slack for g in np.linspace(0.2, 0.8, 61)]
    assert np.all(np.diff(slacks) > 0)
    assert slacks[0] == pytest.approx(4 * (3**0.2 - 2**0.2), abs=1e-12)
    assert slacks[0] == pytest.approx(0.38813, abs=1e-5)
    for g in (0, 1, 1.5, -0.2):
        with pytest.raises(PreconditionError):
            lemmas.remark_counterexample(g)


def test_parallelogram():
    a = ginibre(3, seed=2)
    assert abs(lemmas.pk_parallelogram_lower_bound(a, np.zeros((3, 3)), 3.5, 2).slack) <= 1e-10
    rep = lemmas.pk_parallelogram_lower_bound(unit(0, 0, 2), unit(1, 1, 2), 4, 2)
    assert rep.details["lhs"] == pytest.approx(4) and rep.details["rhs"] == pytest.approx(4)
    assert abs(rep.slack) <= 1e-12
    with pytest.raises(PreconditionError):
        lemmas.pk_parallelogram_lower_bound(a, a, 2, 2)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.floats(2.01, 6), st.integers(0, 2**32 - 1))
def test_parallelogram_against_numpy(n, p, seed):
    rng = np.random.default_rng(seed)
    a, b = ginibre(n, n, rng), ginibre(n, n, rng)
    k = int(rng.integers(1, n + 1))
    sv = lambda x: np.linalg.svd(x, compute_uv=False)[:k]
    lhs = np.sum(sv(a + b) ** p) + np.sum(sv(a - b) ** p)
    rhs = 2 * oracle_top_power(a.conj().T @ a + b.conj().T @ b, k, p / 2)
    rep = lemmas.pk_parallelogram_lower_bound(a, b, p, k)
    assert rep.slack == pytest.approx(lhs - rhs, rel=1e-8, abs=1e-8 * (1 + lhs))
    assert rep.holds


def test_rank_bound():
    rep = lemmas.rank_bound_lemma_check(unit(0, 0, 3), unit(1, 1, 3), 3, 2)
    assert rep.status == "holds" and rep.details["rank"] == 2
    rep = lemmas.rank_bound_lemma_check(unit(0, 0, 3), unit(1, 1, 3) + unit(2, 2, 3), 3, 2)
    assert rep.status == "vacuous"
    assert rep.details["lhs"] == pytest.approx(2) and rep.details["rhs"] == pytest.approx(3)
    with pytest.raises(PreconditionError):
        lemmas.rank_bound_lemma_check(np.zeros((2, 2)), np.eye(2), 3, 2)
    with pytest.raises(PreconditionError):
        lemmas.rank_bound_lemma_check(np.eye(2), np.eye(2), 3, 1)


def test_rank_bound_counts_at_hypothesis_resolution():
    # third singular value is invisible to the additivity test at p = 6
    a = np.diag([1.0, 0.0, 0.0, 0.0])
    b = np.diag([0.0, 1.0, 0.02, 0.0])
    rep = lemmas.rank_bound_lemma_check(a, b, 6, 2)
    assert rep.details["additive"] and rep.status == "holds"
    assert rep.details["rank"] == 2
    assert rep.details["resolution"] > 0.02


def test_psd_perturbation_examples():
    a, b = np.diag([1.0, 0, 0]), np.diag([0, 0, 1.0])
    rep = lemmas.psd_perturbation_structure(a, b, 2, 2)
    assert rep.status == "holds" and rep.details["case"] == "a"
    assert rep.details["grid_sampled"]
    rep = lemmas.psd_perturbation_structure(a, a, 2, 2)
    assert rep.status == "vacuous"
    rep = lemmas.psd_perturbation_structure(np.diag([3.0, 2, 2, 0.5]), np.diag([0, 0, 0, 0.3]), 2, 2)
    assert rep.status == "holds" and rep.details["case"] == "b" and rep.details["ell"] == 1
    with pytest.raises(PreconditionError):
        lemmas.psd_perturbation_structure(a, b, 1, 2)
    with pytest.raises(PreconditionError):
        lemmas.psd_perturbation_structure(-a, b, 2, 2)


def test_perturbation_limit_catches_what_the_grid_misses():
    # near gamma = 1 the violation only appears for alpha far below 2**-20
    a = np.diag([1.0, 0.0])
    b = np.array([[0.1, 0.0], [0.0, 1.0]])
    g = 1.05
    grid = np.array(lemmas.DEFAULT_GRID)
    lhs = (1 + grid * 0.1) ** g
    rhs = 1 + grid**g
    assert np.all(lhs <= rhs)
    rep = lemmas.psd_perturbation_structure(a, b, g, 1)
    assert rep.details["hypothesis_margin"] >= 0
    assert rep.details["limit_mass"] == pytest.approx(0.1)
    assert rep.status == "vacuous"


def test_singular_perturbation_examples():
    rep = lemmas.singular_perturbation_structure(unit(0, 0, 3), unit(2, 2, 3), 3, 2)
    assert rep.status == "holds" and rep.details["case"] == "1"
    rep = lemmas.singular_perturbation_structure(np.eye(3), np.zeros((3, 3)), 3, 2)
    assert rep.status == "holds" and rep.details["case"] == "2" and rep.details["ell"] == 1
    rep = lemmas.singular_perturbation_structure(np.eye(3), 0.1 * ginibre(3, seed=1), 3, 2)
    assert rep.status == "vacuous"
    with pytest.raises(PreconditionError):
        lemmas.singular_perturbation_structure(np.eye(2), np.eye(2), 2, 1)


def test_singular_perturbation_case_two_construction():
    u, v = random_unitary(4, 0), random_unitary(4, 1)
    t = u @ np.diag([3.0, 2.0, 0.5, 0.1]) @ v.conj().T
    s = u @ np.diag([0, 0, 0.4, 0.2]) @ v.conj().T
    rep = lemmas.singular_perturbation_structure(t, s, 4, 2)
    assert rep.status == "holds" and rep.details["case"] == "2"


@pytest.mark.parametrize("name", fuzz.suite_names())
def test_fuzz_suites_small(name):
    res = fuzz.run_suite(name, trials=300, seed=11)
    assert res.violations == 0, res.first_violation
    assert sum(b["count"] for b in res.histogram) == res.trials - res.vacuous


def test_fuzz_is_replayable():
    r1 = fuzz.run_suite("eigen-power-sum", 50, 3)
    r2 = fuzz.run_suite("lemma2.7", 50, 3)
    assert r1.min_slack == r2.min_slack and r1.histogram == r2.histogram
    # instances depend only on (seed, index), not on the run they are part of
    a = [fuzz.run_instance("pk-parallelogram", 5, i).slack for i in (7, 3)]
    b = [fuzz.run_instance("pk-parallelogram", 5, i).slack for i in (3, 7)]
    assert a == b[::-1]


def test_fuzz_resolution():
    assert fuzz.resolve("lemma2.11") == ["psd-perturbation"]
    assert fuzz.resolve("all") == fuzz.suite_names()
    with pytest.raises(KeyError):
        fuzz.resolve("lemma9.9")
