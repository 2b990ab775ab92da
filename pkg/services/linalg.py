"""
Linear Algebra over F_q

Dot products, bilinear forms, determinants, the generalised wedge product
and the volume function. Vectors and matrices are galois field arrays;
the *_batch variants work on stacks of them.
"""
import logging
from typing import Sequence

import galois
import numpy as np

from models import BilinearForm, FieldSpec
from services.errors import DimensionError

logger = logging.getLogger(__name__)


def as_ints(array: galois.FieldArray) -> np.ndarray:
    """Element indices of a field array as a plain integer array."""
    return np.asarray(array.view(np.ndarray), dtype=np.int64)


def dot(u: galois.FieldArray, v: galois.FieldArray) -> galois.FieldArray:
    """u_1 v_1 + ... + u_d v_d."""
    if u.ndim != 1 or u.shape != v.shape:
        raise DimensionError(f'dot needs two vectors of equal length, got {u.shape} and {v.shape}')
    return (u[np.newaxis, :] @ v[:, np.newaxis])[0, 0]


def make_form(spec: FieldSpec, gram) -> BilinearForm:
    """Validated bilinear form from a square integer matrix."""
    return BilinearForm(spec, tuple(tuple(int(c) % spec.q for c in row) for row in gram))


def bilinear_eval(form: BilinearForm, x: galois.FieldArray, y: galois.FieldArray) -> galois.FieldArray:
    """x^T M y."""
    if x.shape != (form.d,) or y.shape != (form.d,):
        raise DimensionError(f'form of dimension {form.d} applied to {x.shape} and {y.shape}')
    my = (form.matrix @ y[:, np.newaxis])[:, 0]
    return dot(x, my)


def det(matrix: galois.FieldArray) -> galois.FieldArray:
    """
    Determinant by elimination.

    For each column the first nonzero entry at or below the diagonal is the
    pivot; a row swap flips the sign; entries below the pivot are cleared.
    """
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionError(f'determinant of a non-square matrix {matrix.shape}')
    GF = type(matrix)
    n = matrix.shape[0]
    work = matrix.copy()
    result = GF(1)
    for col in range(n):
        pivot_row = next((r for r in range(col, n) if work[r, col] != 0), None)
        if pivot_row is None:
            return GF(0)
        if pivot_row != col:
            work[[col, pivot_row]] = work[[pivot_row, col]]
            result = -result
        pivot = work[col, col]
        result = result * pivot
        for r in range(col + 1, n):
            if work[r, col] != 0:
                work[r] = work[r] - (work[r, col] / pivot) * work[col]
    return result


def det_batch(stack: galois.FieldArray) -> galois.FieldArray:
    """Determinants of an (N, k, k) stack by cofactor expansion along row 0."""
    GF = type(stack)
    n, k = stack.shape[0], stack.shape[-1]
    if k == 0:
        return GF.Ones(n)
    if k == 1:
        return stack[:, 0, 0]
    total = GF.Zeros(n)
    for j in range(k):
        keep = [c for c in range(k) if c != j]
        minor = det_batch(stack[:, 1:, :][:, :, keep])
        term = stack[:, 0, j] * minor
        total = total - term if j % 2 else total + term
    return total


def wedge_batch(stack: galois.FieldArray) -> galois.FieldArray:
    """
    Wedge products of an (N, d-1, d) stack of row tuples.

    Coordinate j (0-based) is (-1)^j times the minor with column j deleted,
    the expansion of the formal determinant along its symbolic first row.
    """
    n, rows, d = stack.shape
    if rows != d - 1:
        raise DimensionError(f'wedge needs d-1 = {d - 1} vectors of dimension {d}, got {rows}')
    coords = []
    for j in range(d):
        keep = [c for c in range(d) if c != j]
        minor = det_batch(stack[:, :, keep])
        coords.append(as_ints(-minor if j % 2 else minor))
    return type(stack)(np.stack(coords, axis=-1))


def wedge(vectors: Sequence[galois.FieldArray]) -> galois.FieldArray:
    """u^2 ∧ ... ∧ u^d for d-1 vectors of dimension d."""
    rows = _stack_rows(vectors)
    if rows.ndim != 2 or rows.shape[0] != rows.shape[1] - 1:
        raise DimensionError(f'wedge needs d-1 vectors of dimension d, got shape {rows.shape}')
    return wedge_batch(rows[np.newaxis])[0]


def vol(vectors: Sequence[galois.FieldArray]) -> galois.FieldArray:
    """x^1 · (x^2 ∧ ... ∧ x^d), equal to the determinant of the row matrix."""
    rows = _stack_rows(vectors)
    if rows.ndim != 2 or rows.shape[0] != rows.shape[1]:
        raise DimensionError(f'vol needs d vectors of dimension d, got shape {rows.shape}')
    return dot(rows[0], wedge(rows[1:]))


def vol_batch(stack: galois.FieldArray) -> galois.FieldArray:
    """Volumes of an (N, d, d) stack via dot against the wedge of rows 2..d."""
    wedges = wedge_batch(stack[:, 1:, :])
    first = stack[:, 0, :]
    total = first[:, 0] * wedges[:, 0]
    for j in range(1, stack.shape[-1]):
        total = total + first[:, j] * wedges[:, j]
    return total


def _stack_rows(vectors) -> galois.FieldArray:
    if isinstance(vectors, galois.FieldArray):
        return vectors
    vectors = list(vectors)
    if not vectors:
        raise DimensionError('no vectors given')
    GF = type(vectors[0])
    return GF(np.stack([as_ints(v) for v in vectors]))
