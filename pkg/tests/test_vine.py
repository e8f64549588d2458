import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from randcorr.linalg import NotPositiveDefinite, cholesky_log_det
from randcorr.sampler import ModelParams, sample_correlation_matrix
from randcorr.vine import (
    InvalidVine,
    PartialCorrSet,
    VineEdge,
    VineSpec,
    build_dvine,
    log_det_from_partials,
    matrix_to_partials,
    partials_to_matrix,
    validate_vine,
)


def test_edge_normalization():
    e = VineEdge(3, 1, (2,))
    assert (e.e1, e.e2) == (1, 3)
    assert e.key == (1, 3, (2,))
    assert e.tree_level == 2
    assert e.constraint == frozenset({1, 2, 3})
    assert str(e) == "(1,3|2)"
    assert VineEdge(0, 4, (3, 1, 2)) == VineEdge(4, 0, (1, 2, 3))


@pytest.mark.parametrize("args", [(1, 1, ()), (0, 2, (2,)), (0, 3, (1, 1))])
def test_bad_edges(args):
    with pytest.raises(InvalidVine):
        VineEdge(*args)


def test_small_dvines():
    assert [e.key for e in build_dvine(2)] == [(0, 1, ())]
    assert [e.key for e in build_dvine(3)] == [(0, 1, ()), (1, 2, ()), (0, 2, (1,))]
    v4 = build_dvine(4)
    assert len(v4) == 6
    assert [len(t) for t in v4.trees] == [3, 2, 1]
    assert v4.is_dvine


def test_validator_accepts_dvines():
    for d in range(2, 51):
        spec = build_dvine(d)
        validate_vine(spec)
        assert len(spec) == d * (d - 1) // 2


def test_validator_rejects_duplicated_edge():
    spec = build_dvine(5)
    trees = [list(t) for t in spec.trees]
    trees[0][1] = trees[0][0]
    with pytest.raises(InvalidVine):
        validate_vine(VineSpec(5, tuple(tuple(t) for t in trees)))


def test_validator_rejects_non_proximate_tree():
    # tree 1 is the path 0-1-2-3; (0,3|1) would join (0,1) and (1,3), which is not in tree 1
    trees = (
        (VineEdge(0, 1), VineEdge(1, 2), VineEdge(2, 3)),
        (VineEdge(0, 2, (1,)), VineEdge(0, 3, (1,))),
        (VineEdge(2, 3, (0, 1)),),
    )
    with pytest.raises(InvalidVine):
        validate_vine(VineSpec(4, trees))


def test_validator_rejects_cycle_in_first_tree():
    trees = (
        (VineEdge(0, 1), VineEdge(1, 2), VineEdge(0, 2)),
        (VineEdge(0, 3, (1,)), VineEdge(1, 3, (2,))),
        (VineEdge(2, 3, (0, 1)),),
    )
    with pytest.raises(InvalidVine):
        validate_vine(VineSpec(4, trees))


def test_zero_partials_give_identity():
    for d in (2, 5, 9):
        np.testing.assert_array_equal(partials_to_matrix(build_dvine(d), np.zeros((d, d))), np.eye(d))


def test_hand_example_d3():
    spec = build_dvine(3)
    p = PartialCorrSet.from_mapping(spec, {(0, 1): 0.5, (1, 2): 0.5, (0, 2, (1,)): 0.0})
    R = partials_to_matrix(spec, p)
    assert R[0, 2] == pytest.approx(0.25, abs=1e-15)
    assert R[2, 0] == R[0, 2]
    back = matrix_to_partials(spec, R)
    assert back[(0, 2, (1,))] == pytest.approx(0.0, abs=1e-15)
    assert log_det_from_partials(back) == pytest.approx(math.log(0.5625), abs=1e-14)
    assert cholesky_log_det(R) == pytest.approx(math.log(0.5625), abs=1e-14)


def test_d2():
    spec = build_dvine(2)
    R = partials_to_matrix(spec, PartialCorrSet.from_mapping(spec, {(0, 1): 0.7}))
    np.testing.assert_array_equal(R, [[1.0, 0.7], [0.7, 1.0]])
    assert log_det_from_partials(np.array([[0, 0.6], [0, 0]])) == pytest.approx(math.log(0.64), abs=1e-14)


def test_identity_to_partials():
    p = matrix_to_partials(build_dvine(6), np.eye(6))
    assert all(v == 0.0 for v in p.values.ravel())
    assert log_det_from_partials(p) == 0.0


def test_mapping_interface():
    spec = build_dvine(4)
    p = PartialCorrSet(spec, np.triu(np.full((4, 4), 0.1), 1))
    assert len(p) == 6
    assert list(p) == list(spec.edges)
    assert p[VineEdge(0, 3, (1, 2))] == 0.1
    with pytest.raises(KeyError):
        p[(0, 3)]
    with pytest.raises(ValueError):
        p.values[0, 1] = 0.3


def test_partial_set_validation():
    spec = build_dvine(3)
    with pytest.raises(ValueError):
        PartialCorrSet.from_mapping(spec, {(0, 1): 0.5, (1, 2): 0.5})
    with pytest.raises(ValueError):
        PartialCorrSet.from_mapping(spec, {(0, 1): 0.5, (1, 2): 0.5, (0, 2, (1,)): 0.1, (0, 2): 0.1})
    with pytest.raises(ValueError):
        PartialCorrSet(spec, np.triu(np.full((3, 3), 1.0), 1))
    with pytest.raises(ValueError):
        PartialCorrSet(spec, np.triu(np.full((3, 3), np.nan), 1))


def test_non_pd_rejected():
    R = np.full((3, 3), -0.6)
    np.fill_diagonal(R, 1.0)
    with pytest.raises(NotPositiveDefinite):
        matrix_to_partials(build_dvine(3), R)


@pytest.mark.parametrize("d", [3, 6, 12])
def test_round_trip_sampled(d, rng):
    spec = build_dvine(d)
    R = sample_correlation_matrix(ModelParams(d), rng, size=1000)
    p = matrix_to_partials(spec, R)
    assert np.max(np.abs(partials_to_matrix(spec, p) - R)) < 1e-12


@pytest.mark.parametrize("d", [2, 4, 9, 15])
def test_determinant_identity(d, rng):
    R = sample_correlation_matrix(ModelParams(d), rng, size=300)
    p = matrix_to_partials(build_dvine(d), R)
    assert np.max(np.abs(log_det_from_partials(p) - cholesky_log_det(R))) <= 1e-10


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 7).flatmap(
    lambda d: arrays(float, (d, d), elements=st.floats(-0.9, 0.9))))
def test_round_trip_property(raw):
    d = raw.shape[0]
    spec = build_dvine(d)
    P = np.triu(raw, 1)
    R = partials_to_matrix(spec, P)
    assert np.allclose(R, R.T) and np.all(np.diag(R) == 1.0)
    assert np.all(np.abs(R[np.triu_indices(d, 1)]) < 1.0)
    back = matrix_to_partials(spec, R)
    np.testing.assert_allclose(back.values, P, atol=1e-9)
    assert log_det_from_partials(P) == pytest.approx(cholesky_log_det(R), abs=1e-9)
