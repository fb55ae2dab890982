import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from vecmk.errors import DimensionMismatch, FieldMismatch, SpaceMismatch, UnknownPoint
from vecmk.measures import (
    DiscreteVectorMeasure,
    dirac,
    dirac_difference,
    evaluate,
    measure_from_json,
    total_mass,
    total_variation,
)
from vecmk.space import interval_grid, validate

SPACE5 = interval_grid(2.0, 5)
atoms5 = arrays(np.float64, (5, 3), elements=st.floats(-10, 10, allow_nan=False))


def partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for p in partitions(rest):
        for k in range(len(p)):
            yield p[:k] + [[first] + p[k]] + p[k + 1:]
        yield [[first]] + p


def test_dirac():
    x = np.array([3.0, 4.0])
    mu = dirac(SPACE5, 2, x)
    assert np.array_equal(evaluate(mu, [2]), x)
    assert total_variation(mu) == 5
    assert np.array_equal(total_mass(mu), x)
    with pytest.raises(UnknownPoint):
        dirac(SPACE5, 9, x)


def test_dirac_difference():
    mu = dirac_difference(SPACE5, 0, 3, [0.6, 0.8])
    assert total_variation(mu) == pytest.approx(2.0)
    assert np.allclose(total_mass(mu), 0) and mu.is_balanced()
    assert np.allclose(evaluate(mu, range(5)), 0)


def test_evaluate_empty_and_labels():
    s = validate([[0, 1], [1, 0]], labels=["a", "b"])
    mu = DiscreteVectorMeasure(s, [[1.0, 2.0], [3.0, 4.0]])
    assert np.array_equal(mu.evaluate([]), [0, 0])
    assert np.array_equal(mu.evaluate(["b"]), [3, 4])


def test_arithmetic_and_errors():
    mu = DiscreteVectorMeasure(SPACE5, np.arange(10.0).reshape(5, 2))
    assert np.array_equal((mu + mu.scale(-1)).atoms, np.zeros((5, 2)))
    assert np.array_equal(total_mass(mu.scale(2)), 2 * total_mass(mu))
    assert np.array_equal((mu - mu).atoms, np.zeros((5, 2)))
    with pytest.raises(SpaceMismatch):
        mu + DiscreteVectorMeasure(interval_grid(2.0, 5), mu.atoms)
    with pytest.raises(DimensionMismatch):
        mu + DiscreteVectorMeasure(SPACE5, np.zeros((5, 3)))
    with pytest.raises(FieldMismatch):
        mu + DiscreteVectorMeasure(SPACE5, np.zeros((5, 2), dtype=complex))
    with pytest.raises(FieldMismatch):
        mu.scale(1j)
    with pytest.raises(DimensionMismatch):
        DiscreteVectorMeasure(SPACE5, np.zeros((4, 2)))


def test_scalar_times_vector():
    rng = np.random.default_rng(3)
    for _ in range(20):
        w, x = rng.normal(size=5), rng.normal(size=3)
        mu = DiscreteVectorMeasure.from_scalar(SPACE5, w, x)
        assert np.isclose(mu.total_variation(), np.abs(w).sum() * np.linalg.norm(x))


def test_balanced_part_and_json():
    mu = DiscreteVectorMeasure(SPACE5, np.arange(5.0))
    assert mu.balanced_part().is_balanced() and not mu.is_balanced()
    back = measure_from_json(SPACE5, mu.to_json())
    assert np.array_equal(back.atoms, mu.atoms)
    z = DiscreteVectorMeasure(SPACE5, np.ones((5, 1)) * (1 + 2j))
    assert np.array_equal(measure_from_json(SPACE5, z.to_json()).atoms, z.atoms)
    assert z.to_real().dim == 2 and z.to_real().total_variation() == pytest.approx(z.total_variation())


@given(atoms5, atoms5)
def test_variation_is_a_norm(a, b):
    mu, nu = DiscreteVectorMeasure(SPACE5, a), DiscreteVectorMeasure(SPACE5, b)
    assert (mu + nu).total_variation() <= mu.total_variation() + nu.total_variation() + 1e-9
    assert np.isclose(mu.scale(-2.5).total_variation(), 2.5 * mu.total_variation())
    assert np.array_equal(mu.evaluate(range(5)), mu.total_mass())
    assert np.array_equal((mu + nu).atoms, (nu + mu).atoms)


@given(atoms5, st.sets(st.integers(0, 4)), st.sets(st.integers(0, 4)))
def test_additivity(a, A, B):
    mu = DiscreteVectorMeasure(SPACE5, a)
    B = B - A
    assert np.allclose(mu.evaluate(A | B), mu.evaluate(A) + mu.evaluate(B))


def test_singleton_partition_attains_the_supremum():
    rng = np.random.default_rng(7)
    for m in range(2, 6):
        s = interval_grid(1.0, m)
        mu = DiscreteVectorMeasure(s, rng.normal(size=(m, 2)) + 1j * rng.normal(size=(m, 2)))
        tv = mu.total_variation()
        sums = [sum(np.linalg.norm(mu.evaluate(part)) for part in p)
                for p in partitions(list(range(m)))]
        assert max(sums) <= tv + 1e-12
        single = sum(np.linalg.norm(mu.evaluate([i])) for i in range(m))
        assert single == pytest.approx(tv, abs=1e-12)
    assert len(list(partitions(list(range(4))))) == 15
    assert len(list(itertools.islice(partitions(list(range(5))), 100))) == 52
