import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from vecmk.errors import (
    BadGridSize,
    EmptySet,
    MetricAxiomError,
    NonzeroDiagonal,
    NotSymmetric,
    TooFewPoints,
    TriangleViolation,
    UnknownPoint,
    ZeroOffDiagonal,
)
from vecmk.space import from_coords, interval_grid, random_space, validate

coords = arrays(np.float64, st.tuples(st.integers(2, 7), st.just(2)),
                elements=st.floats(-10, 10, allow_nan=False, width=32), unique=True)


def test_smallest_space():
    s = validate([[0, 1], [1, 0]])
    assert s.size == 2 and s.diameter == 1.0 and s.labels == ("0", "1")


def test_not_symmetric():
    with pytest.raises(NotSymmetric) as exc:
        validate([[0, 1], [2, 0]])
    assert exc.value.indices == (0, 1)


def test_triangle_violation_reports_triple():
    with pytest.raises(TriangleViolation) as exc:
        validate([[0, 1, 3], [1, 0, 1], [3, 1, 0]])
    assert exc.value.indices == (0, 2, 1)


@pytest.mark.parametrize("dist, err", [
    ([[0]], TooFewPoints),
    ([[1, 1], [1, 0]], NonzeroDiagonal),
    ([[0, 0], [0, 0]], ZeroOffDiagonal),
    ([[0, 1, 2]], MetricAxiomError),
    ([[0, -1], [-1, 0]], MetricAxiomError),
    ([[0, np.inf], [np.inf, 0]], MetricAxiomError),
])
def test_axiom_errors(dist, err):
    with pytest.raises(err):
        validate(dist)


def test_tolerance_accepts_rounding():
    x = np.array([0.1, 0.2, 0.3])
    validate(np.abs(x[:, None] - x[None, :]))
    validate([[0, 1, 2 + 5e-13], [1, 0, 1], [2 + 5e-13, 1, 0]])


def test_labels():
    s = validate([[0, 2], [2, 0]], labels=["a", "b"])
    assert s.index("b") == 1 and s.index(0) == 0
    with pytest.raises(UnknownPoint):
        s.index("c")
    with pytest.raises(UnknownPoint):
        s.index(5)
    with pytest.raises(MetricAxiomError):
        validate([[0, 2], [2, 0]], labels=["a", "a"])


def test_distances_on_a_line():
    line = validate([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    assert line.dist_point_set(0, [1, 2]) == 1
    assert line.dist_point_set(1, [1, 2]) == 0
    four = interval_grid(3.0, 4)
    assert four.set_distance([0, 1], [3]) == 2
    assert four.set_distance([0, 1], [1, 2]) == 0
    assert four.set_distance([0], [3]) == 3
    with pytest.raises(EmptySet):
        four.dist_point_set(0, [])
    with pytest.raises(EmptySet):
        four.set_distance([], [1])


def test_interval_grid():
    g = interval_grid(1.0, 3)
    assert g.dist[0, 2] == 1 and g.dist[0, 1] == 0.5
    assert interval_grid(2.0, 5).diameter == 2.0
    assert interval_grid(1.0, 2).dist[0, 1] == 1.0
    for A, m in [(0.7, 11), (1.0, 101), (5.0, 7)]:
        assert interval_grid(A, m).diameter == A
    for bad in [(1.0, 1), (0.0, 3), (-1.0, 3), (1.0, 2.5)]:
        with pytest.raises(BadGridSize):
            interval_grid(*bad)


def test_metrics_from_coords():
    x = [[0, 0], [3, 4]]
    assert from_coords(x).dist[0, 1] == 5
    assert from_coords(x, metric="manhattan").dist[0, 1] == 7
    assert from_coords(x, metric="chebyshev").dist[0, 1] == 4
    with pytest.raises(MetricAxiomError):
        from_coords(x, metric="nope")


def test_space_is_read_only():
    s = validate([[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        s.dist[0, 1] = 3


@given(coords)
def test_constructed_spaces_revalidate(x):
    s = from_coords(x)
    assert np.array_equal(validate(s.dist).dist, s.dist)
    assert s.diameter >= s.dist.max()


@given(coords, st.data())
def test_point_set_distance_is_1_lipschitz(x, data):
    s = from_coords(x)
    m = s.size
    A = data.draw(st.sets(st.integers(0, m - 1), min_size=1))
    B = data.draw(st.sets(st.integers(0, m - 1), min_size=1))
    dA = s.distance_to_set(A)
    for i, j in itertools.combinations(range(m), 2):
        assert abs(dA[i] - dA[j]) <= s.dist[i, j] + 1e-12
    assert s.set_distance(A, B) == min(s.dist_point_set(a, B) for a in A)


def test_random_space_is_valid(rng):
    s = random_space(rng, 8, scale=2.0)
    assert s.size == 8 and s.diameter <= 2 * np.sqrt(2)
