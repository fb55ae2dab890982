import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from vecmk.errors import DimensionMismatch, FieldMismatch, InputError
from vecmk.linalg import (
    as_vector,
    basis_vector,
    complexify_to_real,
    inner,
    norm,
    realify,
    vector_to_json,
)

finite = st.floats(-1e3, 1e3, allow_nan=False)
cvec = st.integers(1, 6).flatmap(lambda n: st.tuples(
    arrays(np.float64, n, elements=finite), arrays(np.float64, n, elements=finite)))


def test_inner_examples():
    e1 = basis_vector(3, 0)
    assert inner(e1, e1) == 1
    assert inner(np.array([1, 1j]), np.array([1j, 1])) == 0
    assert inner(np.array([2.0, 3.0]), np.zeros(2)) == 0


def test_inner_is_conjugate_linear_in_second_argument():
    x, y = np.array([1 + 2j, 3j]), np.array([2 - 1j, 1 + 1j])
    assert np.isclose(inner(x, 1j * y), -1j * inner(x, y))
    assert np.isclose(inner(x, y), np.conj(inner(y, x)))


def test_inner_errors():
    with pytest.raises(DimensionMismatch):
        inner(np.ones(2), np.ones(3))
    with pytest.raises(FieldMismatch):
        inner(np.ones(2), np.ones(2, dtype=complex))


def test_embedding_examples():
    assert np.array_equal(complexify_to_real(np.array([1 + 0j])), [1.0, 0.0])
    x, y = np.array([1, 1j]), np.array([1j, 1])
    assert complexify_to_real(x) @ complexify_to_real(y) == inner(x, y).real == 0
    r = np.array([1.0, 2.0])
    assert complexify_to_real(r) is r


def test_as_vector_parsing():
    assert as_vector([1, 2]).dtype == float
    z = as_vector([[1, 2], [0, -1]])
    assert np.array_equal(z, [1 + 2j, -1j])
    assert vector_to_json(z) == [[1.0, 2.0], [0.0, -1.0]]
    assert as_vector(3.0).shape == (1,)
    assert as_vector([1, 2], field="complex").dtype == complex
    with pytest.raises(FieldMismatch):
        as_vector([[1, 2]], field="real")
    with pytest.raises(InputError):
        as_vector([])
    with pytest.raises(InputError):
        as_vector([1, [1, 2]])
    with pytest.raises(InputError):
        as_vector([[1, 2, 3]])


@given(cvec)
def test_embedding_is_isometric(parts):
    x = parts[0] + 1j * parts[1]
    assert np.isclose(norm(complexify_to_real(x)), norm(x), rtol=1e-12, atol=1e-12)
    assert np.array_equal(realify(complexify_to_real(x)), x)


@given(cvec, cvec)
def test_real_part_of_inner_is_embedded_inner(p, q):
    n = min(len(p[0]), len(q[0]))
    x = (p[0] + 1j * p[1])[:n]
    y = (q[0] + 1j * q[1])[:n]
    lhs = inner(x, y).real
    rhs = complexify_to_real(x) @ complexify_to_real(y)
    assert abs(lhs - rhs) <= 1e-9 * (1 + norm(x) * norm(y))


@given(cvec, cvec)
def test_parallelogram_and_cauchy_schwarz(p, q):
    n = min(len(p[0]), len(q[0]))
    x = (p[0] + 1j * p[1])[:n]
    y = (q[0] + 1j * q[1])[:n]
    scale = 1 + norm(x) ** 2 + norm(y) ** 2
    lhs = norm(x + y) ** 2 + norm(x - y) ** 2
    assert abs(lhs - 2 * norm(x) ** 2 - 2 * norm(y) ** 2) <= 1e-12 * scale
    assert abs(inner(x, y)) <= norm(x) * norm(y) * (1 + 1e-12) + 1e-12
