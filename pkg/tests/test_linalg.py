import itertools
import math

import numpy as np
import pytest

from randcorr.linalg import (
    NotPositiveDefinite,
    check_correlation_matrix,
    cholesky,
    cholesky_log_det,
    is_positive_definite,
)
from randcorr.sampler import ModelParams, sample_correlation_matrix


def _cofactor_det(A):
    # Leibniz expansion; exact enough for the small sizes used here
    n = A.shape[0]
    total = []
    for perm in itertools.permutations(range(n)):
        inversions = sum(perm[a] > perm[b] for a in range(n) for b in range(a + 1, n))
        total.append((-1) ** inversions * math.prod(A[i, perm[i]] for i in range(n)))
    return math.fsum(total)


def test_identity():
    for d in (1, 2, 7):
        assert cholesky_log_det(np.eye(d)) == 0.0
        assert is_positive_definite(np.eye(d)) is True


def test_two_by_two_by_hand():
    R = np.array([[1.0, 0.6], [0.6, 1.0]])
    L = cholesky(R)
    np.testing.assert_allclose(L[1], [0.6, 0.8], atol=1e-15)
    assert cholesky_log_det(R) == pytest.approx(math.log(0.64), abs=1e-14)


def test_near_singular_rejected():
    rho = 1 - 1e-16
    R = np.array([[1.0, rho], [rho, 1.0]])
    with pytest.raises(NotPositiveDefinite):
        cholesky_log_det(R)
    assert is_positive_definite(R) is False


def test_negative_equicorrelation_not_pd():
    R = np.full((3, 3), -0.6)
    np.fill_diagonal(R, 1.0)
    assert np.linalg.eigvalsh(R).min() < 0  # brute-force oracle
    assert is_positive_definite(R) is False
    with pytest.raises(NotPositiveDefinite):
        cholesky(R)


@pytest.mark.parametrize("d", [2, 3, 5, 8])
def test_log_det_against_cofactor_expansion(d, rng):
    R = sample_correlation_matrix(ModelParams(d), rng, size=5)
    got = cholesky_log_det(R)
    for k in range(5):
        assert got[k] == pytest.approx(math.log(_cofactor_det(R[k])), abs=1e-12)
        L = cholesky(R[k])
        np.testing.assert_allclose(L @ L.T, R[k], atol=1e-14)
        assert np.allclose(L, np.tril(L))


def test_hadamard_bound(rng):
    R = sample_correlation_matrix(ModelParams(12), rng, size=500)
    assert np.all(cholesky_log_det(R) <= 0.0)
    assert np.all(is_positive_definite(R))


def test_batch_mask():
    bad = np.full((3, 3), -0.6)
    np.fill_diagonal(bad, 1.0)
    out = is_positive_definite(np.stack([np.eye(3), bad]))
    assert out.tolist() == [True, False]


@pytest.mark.parametrize("R", [
    np.ones((2, 3)),
    np.array([[2.0, 0.1], [0.1, 1.0]]),
    np.array([[1.0, 0.1], [0.2, 1.0]]),
])
def test_malformed_input(R):
    with pytest.raises(ValueError):
        check_correlation_matrix(R)
