"""Finite metric spaces: validation, point/set distances, interval grids."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
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

METRIC_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """A validated finite metric space.

    Points are addressed by their index ``0..m-1``; ``labels`` exist for I/O.
    Build instances through :func:`validate`, :func:`from_coords` or
    :func:`interval_grid` rather than calling the constructor directly.
    """

    labels: tuple[str, ...]
    dist: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return self.size

    def index(self, point: int | str) -> int:
        """Resolve an index or a label to an index."""
        if isinstance(point, (int, np.integer)) and not isinstance(point, bool):
            if 0 <= point < self.size:
                return int(point)
            raise UnknownPoint(f"point index {point} out of range 0..{self.size - 1}")
        try:
            return self.labels.index(str(point))
        except ValueError:
            raise UnknownPoint(f"unknown point {point!r}") from None

    def indices(self, points: Iterable[int | str]) -> list[int]:
        return sorted({self.index(p) for p in points})

    @cached_property
    def diameter(self) -> float:
        return float(self.dist.max())

    def dist_point_set(self, t: int | str, A: Iterable[int | str]) -> float:
        """Distance from point ``t`` to the nonempty set ``A``."""
        idx = self.indices(A)
        if not idx:
            raise EmptySet("distance to an empty set is undefined")
        return float(self.dist[self.index(t), idx].min())

    def set_distance(self, A: Iterable[int | str], B: Iterable[int | str]) -> float:
        """Smallest distance between a point of ``A`` and a point of ``B``."""
        ia, ib = self.indices(A), self.indices(B)
        if not ia or not ib:
            raise EmptySet("set distance needs two nonempty sets")
        return float(self.dist[np.ix_(ia, ib)].min())

    def distance_to_set(self, A: Iterable[int | str]) -> np.ndarray:
        """Vector of ``d(t, A)`` for every point ``t``."""
        idx = self.indices(A)
        if not idx:
            raise EmptySet("distance to an empty set is undefined")
        return self.dist[:, idx].min(axis=1)

    def to_json(self) -> dict:
        return {"labels": list(self.labels), "dist": self.dist.tolist()}


def validate(dist, labels: Sequence | None = None, tol: float = METRIC_TOL) -> FiniteMetricSpace:
    """Check the metric axioms and return the space.

    Raises the first violated axiom in the order: shape, diagonal, symmetry,
    positivity, triangle inequality. A triangle violation reports the triple
    ``(i, k, j)`` with ``dist[i, k] > dist[i, j] + dist[j, k] + tol``, the
    lexicographically smallest one.
    """
    d = np.array(dist, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise MetricAxiomError(f"distance matrix must be square, got shape {d.shape}")
    m = d.shape[0]
    if m < 2:
        raise TooFewPoints(f"a metric space needs at least two points, got {m}")
    if not np.all(np.isfinite(d)):
        raise MetricAxiomError("distance matrix has non-finite entries")
    if np.any(d < 0):
        i, j = np.argwhere(d < 0)[0]
        raise MetricAxiomError(f"negative distance at ({i}, {j})", (int(i), int(j)))

    diag = np.abs(np.diag(d)) > tol
    if diag.any():
        i = int(np.argmax(diag))
        raise NonzeroDiagonal(f"dist[{i}][{i}] = {d[i, i]} is not zero", (i, i))

    asym = np.abs(d - d.T) > tol
    if asym.any():
        i, j = np.argwhere(asym)[0]
        raise NotSymmetric(f"dist[{i}][{j}] = {d[i, j]} != dist[{j}][{i}] = {d[j, i]}",
                           (int(i), int(j)))

    off = ~np.eye(m, dtype=bool)
    zero = off & (d <= tol)
    if zero.any():
        i, j = np.argwhere(zero)[0]
        raise ZeroOffDiagonal(f"distinct points {i} and {j} are at distance zero",
                              (int(i), int(j)))

    for i in range(m):
        # via[k, j] = d[i, j] + d[j, k]; violation when d[i, k] exceeds it
        via = d[i][None, :] + d.T
        bad = d[i][:, None] > via + tol
        if bad.any():
            k, j = np.argwhere(bad)[0]
            raise TriangleViolation(
                f"dist[{i}][{k}] = {d[i, k]} > dist[{i}][{j}] + dist[{j}][{k}] = {via[k, j]}",
                (i, int(k), int(j)),
            )

    if labels is None:
        labels = [str(i) for i in range(m)]
    labels = tuple(str(x) for x in labels)
    if len(labels) != m:
        raise MetricAxiomError(f"{len(labels)} labels for {m} points")
    if len(set(labels)) != m:
        raise MetricAxiomError("point labels must be unique")
    d.setflags(write=False)
    return FiniteMetricSpace(labels, d)


def from_coords(coords, labels: Sequence | None = None, metric: str = "euclidean") -> FiniteMetricSpace:
    """Derive the distance matrix from point coordinates, then validate."""
    x = np.asarray(coords, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    diff = x[:, None, :] - x[None, :, :]
    if metric == "euclidean":
        d = np.sqrt((diff ** 2).sum(axis=-1))
    elif metric in ("manhattan", "cityblock"):
        d = np.abs(diff).sum(axis=-1)
    elif metric in ("chebyshev", "max"):
        d = np.abs(diff).max(axis=-1)
    else:
        raise MetricAxiomError(f"unknown metric {metric!r}")
    return validate(d, labels)


def interval_grid(A: float, m: int) -> FiniteMetricSpace:
    """``m`` equally spaced points of ``[0, A]`` with the absolute-difference metric."""
    if not (isinstance(m, (int, np.integer)) and m >= 2):
        raise BadGridSize(f"grid needs at least two points, got {m!r}")
    if not A > 0:
        raise BadGridSize(f"interval length must be positive, got {A!r}")
    x = np.linspace(0.0, float(A), int(m))
    x[-1] = float(A)
    return validate(np.abs(x[:, None] - x[None, :]), labels=[repr(float(v)) for v in x])


def random_space(rng: np.random.Generator, m: int, scale: float = 1.0, dim: int = 2) -> FiniteMetricSpace:
    """Random Euclidean point cloud in ``[0, scale]^dim``."""
    return from_coords(rng.uniform(0.0, scale, size=(m, dim)))
