"""Atomic vector measures on a finite metric space."""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .errors import DimensionMismatch, FieldMismatch, InputError, SpaceMismatch
from .linalg import COMPLEX, REAL, as_vector, complexify_to_real, field_of, row_norms, vector_to_json
from .space import FiniteMetricSpace

BALANCE_RTOL = 1e-10


class DiscreteVectorMeasure:
    """One atom (a vector) per point of the space; zero atoms are allowed.

    ``mu(A)`` is the sum of the atoms in ``A``. The variation over the whole
    space is the sum of the atom norms, since the partition into singletons
    attains the supremum over partitions.
    """

    __slots__ = ("space", "atoms")

    def __init__(self, space: FiniteMetricSpace, atoms):
        a = np.array(atoms)
        if a.ndim == 1:
            a = a[:, None]
        if a.ndim != 2 or a.shape[0] != space.size:
            raise DimensionMismatch(
                f"expected {space.size} atoms, got array of shape {np.shape(atoms)}")
        if a.shape[1] < 1:
            raise DimensionMismatch("atoms need dimension at least 1")
        a = a.astype(complex if np.iscomplexobj(a) else float)
        a.setflags(write=False)
        self.space = space
        self.atoms = a

    @classmethod
    def zero(cls, space: FiniteMetricSpace, n: int = 1, field: str = REAL) -> "DiscreteVectorMeasure":
        return cls(space, np.zeros((space.size, n), dtype=complex if field == COMPLEX else float))

    @classmethod
    def from_scalar(cls, space: FiniteMetricSpace, weights, x=None) -> "DiscreteVectorMeasure":
        """The measure ``mu x`` for a scalar measure ``mu`` and a vector ``x``."""
        w = np.asarray(weights)
        x = np.ones(1) if x is None else as_vector(x)
        return cls(space, np.outer(w, x))

    @property
    def dim(self) -> int:
        return self.atoms.shape[1]

    @property
    def field(self) -> str:
        return field_of(self.atoms)

    def __repr__(self) -> str:
        return f"DiscreteVectorMeasure(m={self.space.size}, dim={self.dim}, field={self.field})"

    def evaluate(self, A: Iterable[int | str]) -> np.ndarray:
        idx = self.space.indices(A)
        return self.atoms[idx].sum(axis=0) if idx else np.zeros_like(self.atoms[0])

    def total_variation(self) -> float:
        return float(row_norms(self.atoms).sum())

    def total_mass(self) -> np.ndarray:
        return self.atoms.sum(axis=0)

    def is_balanced(self, rtol: float = BALANCE_RTOL) -> bool:
        """Membership in the zero-mass subspace, up to float cancellation."""
        return float(np.linalg.norm(self.total_mass())) <= rtol * max(1.0, self.total_variation())

    def balanced_part(self) -> "DiscreteVectorMeasure":
        """Subtract the mean atom so that the total mass is exactly (numerically) zero."""
        return DiscreteVectorMeasure(self.space, self.atoms - self.atoms.mean(axis=0))

    def to_real(self) -> "DiscreteVectorMeasure":
        """Same measure with complex atoms embedded in the real space of twice the dimension."""
        if self.field == REAL:
            return self
        return DiscreteVectorMeasure(self.space, complexify_to_real(self.atoms))

    def _check(self, other: "DiscreteVectorMeasure") -> None:
        if other.space is not self.space:
            raise SpaceMismatch("measures live on different spaces")
        if other.dim != self.dim:
            raise DimensionMismatch(f"dimension {self.dim} vs {other.dim}")
        if other.field != self.field:
            raise FieldMismatch(f"{self.field} vs {other.field} measures")

    def __add__(self, other: "DiscreteVectorMeasure") -> "DiscreteVectorMeasure":
        self._check(other)
        return DiscreteVectorMeasure(self.space, self.atoms + other.atoms)

    def __sub__(self, other: "DiscreteVectorMeasure") -> "DiscreteVectorMeasure":
        self._check(other)
        return DiscreteVectorMeasure(self.space, self.atoms - other.atoms)

    def __neg__(self) -> "DiscreteVectorMeasure":
        return DiscreteVectorMeasure(self.space, -self.atoms)

    def scale(self, alpha) -> "DiscreteVectorMeasure":
        if np.iscomplexobj(alpha) and self.field == REAL and np.imag(alpha) != 0:
            raise FieldMismatch("complex scalar applied to a real measure")
        a = self.atoms * (alpha if self.field == COMPLEX else np.real(alpha))
        return DiscreteVectorMeasure(self.space, a)

    __mul__ = scale
    __rmul__ = scale

    def to_json(self) -> dict:
        return {"atoms": [vector_to_json(a) for a in self.atoms]}


def dirac(space: FiniteMetricSpace, t: int | str, x) -> DiscreteVectorMeasure:
    """Atom ``x`` at point ``t``, zero elsewhere."""
    x = as_vector(x)
    atoms = np.zeros((space.size, x.size), dtype=x.dtype)
    atoms[space.index(t)] = x
    return DiscreteVectorMeasure(space, atoms)


def dirac_difference(space: FiniteMetricSpace, a: int | str, b: int | str, x) -> DiscreteVectorMeasure:
    """``delta_a x - delta_b x``."""
    return dirac(space, a, x) - dirac(space, b, x)


def add(mu: DiscreteVectorMeasure, nu: DiscreteVectorMeasure) -> DiscreteVectorMeasure:
    return mu + nu


def scale(mu: DiscreteVectorMeasure, alpha) -> DiscreteVectorMeasure:
    return mu.scale(alpha)


def evaluate(mu: DiscreteVectorMeasure, A: Iterable[int | str]) -> np.ndarray:
    return mu.evaluate(A)


def total_variation(mu: DiscreteVectorMeasure) -> float:
    return mu.total_variation()


def total_mass(mu: DiscreteVectorMeasure) -> np.ndarray:
    return mu.total_mass()


def measure_from_json(space: FiniteMetricSpace, obj) -> DiscreteVectorMeasure:
    atoms = obj["atoms"] if isinstance(obj, dict) else obj
    if len(atoms) != space.size:
        raise InputError(f"expected {space.size} atoms, got {len(atoms)}")
    vecs = [as_vector(a) for a in atoms]
    if len({v.size for v in vecs}) != 1:
        raise DimensionMismatch("atoms have different dimensions")
    cplx = any(np.iscomplexobj(v) for v in vecs)
    return DiscreteVectorMeasure(space, np.array(vecs, dtype=complex if cplx else float))
