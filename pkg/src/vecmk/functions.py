"""Vector-valued functions on a finite metric space and the vector integral."""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .errors import (
    DIsWholeSpace,
    DimensionMismatch,
    EmptyH,
    EqualPoints,
    FieldMismatch,
    HNotInsideD,
    InputError,
    SpaceMismatch,
)
from .linalg import as_vector, complexify_to_real, field_of, row_norms, vector_to_json
from .measures import DiscreteVectorMeasure
from .space import FiniteMetricSpace


class FunctionSample:
    """The values ``f(t)`` at every point of a finite space.

    On a finite space every function is simple and Lipschitz, so the sup
    norm and the Lipschitz constant are exact maxima.
    """

    __slots__ = ("space", "values")

    def __init__(self, space: FiniteMetricSpace, values):
        v = np.array(values)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2 or v.shape[0] != space.size:
            raise DimensionMismatch(
                f"expected {space.size} values, got array of shape {np.shape(values)}")
        v = v.astype(complex if np.iscomplexobj(v) else float)
        v.setflags(write=False)
        self.space = space
        self.values = v

    @classmethod
    def constant(cls, space: FiniteMetricSpace, v) -> "FunctionSample":
        v = as_vector(v)
        return cls(space, np.tile(v, (space.size, 1)))

    @classmethod
    def from_scalar(cls, space: FiniteMetricSpace, g, x=None) -> "FunctionSample":
        """The function ``g x`` for scalar ``g`` and vector ``x``."""
        x = np.ones(1) if x is None else as_vector(x)
        return cls(space, np.outer(np.asarray(g), x))

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def field(self) -> str:
        return field_of(self.values)

    def __repr__(self) -> str:
        return f"FunctionSample(m={self.space.size}, dim={self.dim}, field={self.field})"

    def sup_norm(self) -> float:
        return float(row_norms(self.values).max())

    def lip_constant(self) -> float:
        return lip_constant_of(self.values, self.space.dist)

    def bl_norm(self) -> float:
        return self.sup_norm() + self.lip_constant()

    def to_real(self) -> "FunctionSample":
        return FunctionSample(self.space, complexify_to_real(self.values))

    def __add__(self, other: "FunctionSample") -> "FunctionSample":
        _check_pair(self.space, self.values, other.space, other.values)
        return FunctionSample(self.space, self.values + other.values)

    def scale(self, alpha) -> "FunctionSample":
        return FunctionSample(self.space, self.values * alpha)

    __mul__ = scale
    __rmul__ = scale

    def to_json(self) -> dict:
        return {"values": [vector_to_json(v) for v in self.values]}


def lip_constant_of(values: np.ndarray, dist: np.ndarray) -> float:
    """Exact ``max_{i != j} ||v_i - v_j|| / d_ij`` over all pairs."""
    m = values.shape[0]
    i, j = np.triu_indices(m, 1)
    if i.size == 0:
        return 0.0
    return float((row_norms(values[i] - values[j]) / dist[i, j]).max())


def _check_pair(space_a, va, space_b, vb) -> None:
    if space_a is not space_b:
        raise SpaceMismatch("objects live on different spaces")
    if va.shape[1] != vb.shape[1]:
        raise DimensionMismatch(f"dimension {va.shape[1]} vs {vb.shape[1]}")
    if field_of(va) != field_of(vb):
        raise FieldMismatch(f"{field_of(va)} vs {field_of(vb)} scalars")


def sup_norm(f: FunctionSample) -> float:
    return f.sup_norm()


def lip_constant(f: FunctionSample) -> float:
    return f.lip_constant()


def bl_norm(f: FunctionSample) -> float:
    return f.bl_norm()


def integrate(f: FunctionSample, mu: DiscreteVectorMeasure):
    """``int f dmu = sum_i (f(t_i) | mu({t_i}))``.

    Linear in ``f`` and conjugate-linear in ``mu``. Returns a float for the
    real field and a complex number for the complex field.
    """
    _check_pair(f.space, f.values, mu.space, mu.atoms)
    s = np.sum(f.values * np.conj(mu.atoms))
    return complex(s) if np.iscomplexobj(s) else float(s)


def urysohn(space: FiniteMetricSpace, H: Iterable, D: Iterable) -> tuple[FunctionSample, float]:
    """Lipschitz Urysohn function for ``H`` inside ``D``.

    With ``C`` the complement of ``D``, ``g(t) = d(t, C) / (d(t, C) + d(t, H))``
    equals 1 on ``H`` and 0 on ``C``. Returns ``f = g / ||g||_BL`` (so that
    ``||f||_BL = 1``) together with ``M = 1 / ||g||_BL``, the value of ``f``
    on ``H``.
    """
    h = space.indices(H)
    dset = space.indices(D)
    if not h:
        raise EmptyH("H must be nonempty")
    if len(dset) == space.size:
        raise DIsWholeSpace("D must be a proper subset of the space")
    if not set(h) <= set(dset):
        raise HNotInsideD("H must be contained in D")
    comp = sorted(set(range(space.size)) - set(dset))
    to_c = space.distance_to_set(comp)
    to_h = space.distance_to_set(h)
    denom = to_c + to_h
    assert denom.min() >= space.set_distance(h, comp) > 0
    g = FunctionSample(space, to_c / denom)
    bl = g.bl_norm()
    return g.scale(1.0 / bl), 1.0 / bl


def separating_g(space: FiniteMetricSpace, a: int | str, b: int | str) -> FunctionSample:
    """Scalar function with ``g(a) = 0``, ``g(b) = 1`` and ``||g||_L <= 1 / d(a, b)``."""
    ia, ib = space.index(a), space.index(b)
    if ia == ib:
        raise EqualPoints("a and b must differ")
    da, db = space.dist[:, ia], space.dist[:, ib]
    return FunctionSample(space, da / (da + db))


def function_from_json(space: FiniteMetricSpace, obj) -> FunctionSample:
    values = obj["values"] if isinstance(obj, dict) else obj
    if len(values) != space.size:
        raise InputError(f"expected {space.size} values, got {len(values)}")
    vecs = [as_vector(v) for v in values]
    if len({v.size for v in vecs}) != 1:
        raise DimensionMismatch("values have different dimensions")
    cplx = any(np.iscomplexobj(v) for v in vecs)
    return FunctionSample(space, np.array(vecs, dtype=complex if cplx else float))
