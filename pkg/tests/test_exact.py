import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import multivariate_normal, spearmanr

from rankdistort import (
    ClampCounter,
    DesignMatrix,
    SimulationConfig,
    arcsin_holder_gap,
    compute_hat_matrix,
    exact_cov,
    exact_matrix,
    exact_var,
    orthant_prob,
    simulate,
)
from rankdistort.errors import DegenerateDenominator, DomainError, IndexOutOfRange, TieDetected
from rankdistort.projection import HatMatrix

from conftest import design_battery, poly_hat, random_design


def test_orthant_prob_examples():
    assert orthant_prob(0.0) == 0.25
    assert orthant_prob(1.0) == 0.5
    assert orthant_prob(-1.0) == 0.0
    assert orthant_prob(0.5) == pytest.approx(1 / 3, abs=1e-15)
    assert orthant_prob(1 + 5e-13) == 0.5
    with pytest.raises(DomainError):
        orthant_prob(1 + 1e-9)


@pytest.mark.parametrize("rho", [-0.9, -0.3, 0.2, 0.75])
def test_orthant_prob_matches_bivariate_cdf(rho):
    cdf = multivariate_normal(mean=[0, 0], cov=[[1, rho], [rho, 1]]).cdf([0, 0])
    assert orthant_prob(rho) == pytest.approx(cdf, abs=1e-6)


def test_orthant_prob_scale_free():
    # only the correlation matters, not the scales
    cov = np.array([[4.0, -1.2], [-1.2, 0.9]])
    rho = cov[0, 1] / math.sqrt(cov[0, 0] * cov[1, 1])
    cdf = multivariate_normal(mean=[0, 0], cov=cov).cdf([0, 0])
    assert orthant_prob(rho) == pytest.approx(cdf, abs=1e-6)


@pytest.mark.parametrize("n", [3, 5, 9])
def test_intercept_only_is_zero(n):
    h = compute_hat_matrix(DesignMatrix(np.ones((n, 1))))
    for i in range(1, n + 1):
        assert abs(exact_var(h, i)) <= 1e-10
        for j in range(1, n + 1):
            assert abs(exact_cov(h, i, j)) <= 1e-10
    assert np.abs(exact_matrix(h).cov).max() <= 1e-10


def test_cov_symmetric_in_indices(rng):
    for _ in range(5):
        h = compute_hat_matrix(random_design(rng, 8, 3))
        for i, j in rng.integers(1, 9, size=(6, 2)):
            assert exact_cov(h, i, j) == pytest.approx(exact_cov(h, j, i), abs=1e-12)


def test_var_matches_general_formula(rng):
    h = compute_hat_matrix(random_design(rng, 8, 3))
    for i in range(1, 9):
        assert abs(exact_var(h, i) - exact_cov(h, i, i)) <= 1e-9


@pytest.mark.parametrize("design", design_battery(20), ids=lambda d: f"n{d.n}p{d.p}")
def test_distortion_matrix_invariants(design):
    h = compute_hat_matrix(design)
    counter = ClampCounter()
    cov = exact_matrix(h, counter=counter).cov
    n = h.n
    assert np.abs(cov - cov.T).max() <= 1e-9
    assert np.all(np.diag(cov) >= -1e-9)
    assert np.abs(cov.sum(axis=1)).max() <= 1e-8 * n
    ev = np.linalg.eigvalsh(cov)
    assert ev[0] >= -1e-7 * ev[-1]
    assert counter.max_excess <= 1e-12


def test_quadratic_row_sums():
    h = poly_hat(20, 2)
    cov = exact_matrix(h).cov
    assert np.abs(cov.sum(axis=1)).max() <= 1e-8 * 20


def test_worker_count_does_not_change_result():
    h = poly_hat(15, 2)
    ref = exact_matrix(h, workers=1).cov
    for w in (2, 3, 7):
        assert exact_matrix(h, workers=w).cov.tobytes() == ref.tobytes()


def test_invariant_under_column_transform(rng):
    d = random_design(rng, 7, 2)
    a = np.array([[2.0, 1.0], [0.5, -3.0]])
    h1 = compute_hat_matrix(d)
    h2 = compute_hat_matrix(DesignMatrix(d.entries @ a))
    # identical H gives bit-identical values
    assert exact_cov(h1, 2, 5) == exact_cov(HatMatrix(h1.entries.copy(), 2), 2, 5)
    assert abs(exact_cov(h1, 2, 5) - exact_cov(h2, 2, 5)) <= 1e-9


def test_permutation_equivariance(rng):
    d = random_design(rng, 9, 3)
    perm = rng.permutation(9)  # new row r is old row perm[r]
    h = compute_hat_matrix(d)
    hp = compute_hat_matrix(DesignMatrix(d.entries[perm]))
    where = np.argsort(perm)  # old row i sits at new row where[i]
    for i, j in [(1, 1), (2, 7), (9, 4)]:
        a = exact_cov(h, i, j)
        b = exact_cov(hp, where[i - 1] + 1, where[j - 1] + 1)
        assert abs(a - b) <= 1e-9


def test_tie_gate():
    h = compute_hat_matrix(DesignMatrix([[1, 0], [-1, 0], [0, 1]]))
    with pytest.raises(TieDetected):
        exact_cov(h, 1, 2)
    with pytest.raises(TieDetected):
        exact_var(h, 3)
    with pytest.raises(TieDetected):
        exact_matrix(h)


def test_degenerate_denominator_without_gate():
    from rankdistort.exact import _cov_unchecked

    h = compute_hat_matrix(DesignMatrix([[1, 0], [-1, 0], [0, 1]]))
    with pytest.raises(DegenerateDenominator):
        _cov_unchecked(h, 0, 2)


def test_index_checks():
    h = poly_hat(5, 1)
    with pytest.raises(IndexOutOfRange):
        exact_cov(h, 0, 1)
    with pytest.raises(IndexOutOfRange):
        exact_var(h, 6)


def test_high_leverage_pair_without_tie_matches_oracle():
    # two leverages >= 1/2 but tie-free by the pairwise check
    d = DesignMatrix([[1, 0], [1, 1], [1, 3], [1, 3.5]])
    h = compute_hat_matrix(d)
    res = simulate(SimulationConfig(d, 100_000, seed=11))
    cov = exact_matrix(h).cov
    z = np.abs(cov - res.mean_cov) / np.where(res.se_cov > 0, res.se_cov, 1)
    assert z.max() <= 4


def test_linear_70_rms_tracks_leverage():
    h = poly_hat(70, 1)
    rms = np.sqrt([exact_var(h, i) for i in range(1, 71)])
    assert spearmanr(rms, h.leverages).statistic >= 0.99
    # U-shape: largest at both ends, smallest in the middle
    assert rms[0] > rms[10] > rms[34] and rms[-1] > rms[-11] > rms[35]


def test_linear_70_full_matrix_timing():
    import time

    h = poly_hat(70, 1)
    t = time.perf_counter()
    cov = exact_matrix(h).cov
    assert time.perf_counter() - t < 60
    assert np.abs(cov.sum(axis=1)).max() <= 1e-8 * 70


def test_holder_gap_examples():
    assert arcsin_holder_gap(0.0, 0.0) == 0.0
    assert arcsin_holder_gap(1.0, 1 - 1e-6) < 0
    assert arcsin_holder_gap(1.0, -1.0) <= 1e-12
    with pytest.raises(DomainError):
        arcsin_holder_gap(1.5, 0.0)


@settings(max_examples=500)
@given(st.floats(-1, 1), st.floats(-1, 1))
def test_holder_gap_never_positive(x, y):
    assert arcsin_holder_gap(x, y) <= 1e-12
