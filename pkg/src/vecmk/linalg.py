"""Coordinate Hilbert space helpers.

Vectors are plain 1-D numpy arrays: ``float64`` for the real field and
``complex128`` for the complex one. Stacks of vectors (atoms of a measure,
values of a function) are 2-D arrays whose rows are the vectors.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, FieldMismatch, InputError

REAL = "real"
COMPLEX = "complex"


def field_of(x: np.ndarray) -> str:
    return COMPLEX if np.iscomplexobj(x) else REAL


def as_vector(data, field: str | None = None) -> np.ndarray:
    """Coerce ``data`` to a Hilbert-space vector.

    Accepts a sequence of numbers, or of ``[re, im]`` pairs for complex
    entries. ``field`` forces the scalar field when given.
    """
    if isinstance(data, np.ndarray) and data.ndim == 1:
        x = data
    else:
        x = _parse_entries(data)
    if field == COMPLEX:
        return np.asarray(x, dtype=complex)
    if field == REAL:
        if np.iscomplexobj(x):
            if np.any(np.imag(x) != 0):
                raise FieldMismatch("complex entries in a real vector")
            x = np.real(x)
        return np.asarray(x, dtype=float)
    return np.asarray(x, dtype=complex if np.iscomplexobj(x) else float)


def _parse_entries(data) -> np.ndarray:
    if np.isscalar(data):
        data = [data]
    entries = list(data)
    if not entries:
        raise InputError("a vector needs at least one entry")
    if all(isinstance(e, (list, tuple)) for e in entries):
        if not all(len(e) == 2 for e in entries):
            raise InputError("complex entries must be [re, im] pairs")
        return np.array([complex(float(a), float(b)) for a, b in entries])
    if any(isinstance(e, (list, tuple)) for e in entries):
        raise InputError("mixed real and [re, im] entries")
    return np.asarray(entries)


def vector_to_json(x: np.ndarray) -> list:
    if np.iscomplexobj(x):
        return [[float(v.real), float(v.imag)] for v in x]
    return [float(v) for v in x]


def check_compatible(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape[-1] != y.shape[-1]:
        raise DimensionMismatch(f"dimension {x.shape[-1]} vs {y.shape[-1]}")
    if field_of(x) != field_of(y):
        raise FieldMismatch(f"{field_of(x)} vs {field_of(y)} scalars")


def inner(x: np.ndarray, y: np.ndarray):
    """``(x|y) = sum_i x_i conj(y_i)``; linear in ``x``, antilinear in ``y``."""
    check_compatible(x, y)
    if np.iscomplexobj(x):
        return complex(np.sum(x * np.conj(y)))
    return float(np.dot(x, y))


def norm(x: np.ndarray) -> float:
    return float(np.linalg.norm(x))


def row_norms(a: np.ndarray) -> np.ndarray:
    """Norm of every vector in a stack (last axis is the vector axis)."""
    return np.sqrt(np.sum(np.abs(a) ** 2, axis=-1))


def complexify_to_real(x: np.ndarray) -> np.ndarray:
    """Interleaved ``(Re, Im)`` embedding of ``C^n`` into ``R^{2n}``.

    Works on the last axis, so stacks of vectors embed row by row. Real
    input is returned unchanged. ``Re (x|y)`` equals the real inner product of
    the embeddings, and norms are preserved.
    """
    x = np.asarray(x)
    if not np.iscomplexobj(x):
        return x
    out = np.empty(x.shape[:-1] + (2 * x.shape[-1],), dtype=float)
    out[..., 0::2] = x.real
    out[..., 1::2] = x.imag
    return out


def realify(x: np.ndarray) -> np.ndarray:
    """Inverse of :func:`complexify_to_real`."""
    return x[..., 0::2] + 1j * x[..., 1::2]


def basis_vector(n: int, i: int = 0, field: str = REAL) -> np.ndarray:
    e = np.zeros(n, dtype=complex if field == COMPLEX else float)
    e[i] = 1
    return e
