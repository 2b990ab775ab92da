"""
Grassmannian Service

Enumerates the k-dimensional subspaces of F_q^d in canonical RREF form,
builds orthogonal hyperplanes x^⊥, and intersects point sets with
subspaces.
"""
import itertools
import logging
from functools import lru_cache
from typing import List, Sequence, Tuple

import galois
import numpy as np

from models import FieldSpec, PointSet, Subspace, SubspaceFamily
from services.errors import DimensionError, FieldError, SubspaceMembershipError
from services.linalg import as_ints, wedge
from services.parallel import parallel_map

logger = logging.getLogger(__name__)


def gaussian_binomial(k: int, d: int, q: int) -> int:
    """Number of k-dimensional subspaces of F_q^d."""
    if not 0 <= k <= d:
        raise DimensionError(f'k={k} must lie in [0, d={d}]')
    numerator, denominator = 1, 1
    for i in range(k):
        numerator *= q ** (d - i) - 1
        denominator *= q ** (k - i) - 1
    return numerator // denominator


def _pattern_members(spec: FieldSpec, d: int, pivots: Tuple[int, ...]) -> List[Subspace]:
    """All RREF bases with the given pivot columns."""
    k = len(pivots)
    free = [(i, j) for i, piv in enumerate(pivots) for j in range(piv + 1, d) if j not in pivots]
    members = []
    for values in itertools.product(range(spec.q), repeat=len(free)):
        rows = [[0] * d for _ in range(k)]
        for i, piv in enumerate(pivots):
            rows[i][piv] = 1
        for (i, j), value in zip(free, values):
            rows[i][j] = value
        members.append(Subspace(spec, d, tuple(tuple(row) for row in rows)))
    return members


def enumerate_subspaces(k: int, d: int, spec: FieldSpec) -> SubspaceFamily:
    """
    Every k-dimensional subspace of F_q^d exactly once.

    Pivot patterns are generated independently (and may run on several
    threads); the final sort makes the order canonical.
    """
    if not 0 <= k <= d:
        raise DimensionError(f'k={k} must lie in [0, d={d}]')
    patterns = list(itertools.combinations(range(d), k))
    batches = parallel_map(lambda pivots: _pattern_members(spec, d, pivots), patterns)
    members = sorted((m for batch in batches for m in batch), key=Subspace.sort_key)
    logger.debug(f'Enumerated {len(members)} subspaces of dimension {k} in {spec}^{d}')
    return SubspaceFamily(spec, k, d, tuple(members))


def canonical_subspace(spec: FieldSpec, rows) -> Subspace:
    """Subspace spanned by the given rows, held by its RREF basis."""
    matrix = spec.array(rows)
    if matrix.ndim != 2:
        raise DimensionError(f'spanning rows must form a matrix, got shape {matrix.shape}')
    d = matrix.shape[1]
    reduced = as_ints(matrix.row_reduce())
    basis = tuple(tuple(int(c) for c in row) for row in reduced if row.any())
    return Subspace(spec, d, basis)


def _as_vector(spec: FieldSpec, x) -> galois.FieldArray:
    if isinstance(x, galois.FieldArray):
        return x
    return spec.array(list(x))


def hyperplane_of(x, spec: FieldSpec) -> Subspace:
    """The hyperplane x^⊥ = {y : x·y = 0} for a nonzero x."""
    x = _as_vector(spec, x)
    d = x.shape[0]
    nonzero = np.flatnonzero(as_ints(x))
    if nonzero.size == 0:
        raise FieldError('x^⊥ is undefined for the zero vector')
    c = int(nonzero[0])
    GF = type(x)
    rows = GF.Zeros((d - 1, d))
    for r, j in enumerate(j for j in range(d) if j != c):
        rows[r, j] = 1
        rows[r, c] = -(x[j] / x[c])
    return canonical_subspace(spec, as_ints(rows))


def normal_of(H: Subspace) -> galois.FieldArray:
    """Wedge of the canonical basis of a hyperplane; H is its orthogonal complement."""
    if H.dim_k != H.d - 1:
        raise DimensionError(f'normal_of needs a hyperplane, got dimension {H.dim_k} in {H.d}')
    return wedge(H.array)


def membership_mask(points: galois.FieldArray, H: Subspace) -> np.ndarray:
    """Boolean mask of the rows of `points` lying in H (zero residual after elimination)."""
    if points.shape[-1] != H.d:
        raise DimensionError(f'points of dimension {points.shape[-1]} against a subspace of F_q^{H.d}')
    if points.shape[0] == 0:
        return np.zeros(0, dtype=bool)
    if H.dim_k == 0:
        return ~as_ints(points).any(axis=1)
    coords = points[:, list(H.pivots)]
    residual = points - coords @ H.array
    return ~as_ints(residual).any(axis=1)


def intersect_set(E: PointSet, H: Subspace) -> PointSet:
    """E ∩ H."""
    if E.d != H.d:
        raise DimensionError(f'point set in F_q^{E.d} against a subspace of F_q^{H.d}')
    mask = membership_mask(E.array, H)
    return PointSet(E.spec, E.d, tuple(p for p, keep in zip(E.points, mask) if keep))


def coordinates_in_basis(H: Subspace, P: PointSet) -> galois.FieldArray:
    """
    Coordinates of each point of P in the canonical basis of H.

    With an RREF basis the coordinate of a point on basis row i is simply
    its entry in pivot column i.
    """
    if P.d != H.d:
        raise DimensionError(f'point set in F_q^{P.d} against a subspace of F_q^{H.d}')
    mask = membership_mask(P.array, H)
    if not mask.all():
        outside = P.points[int(np.flatnonzero(~mask)[0])]
        raise SubspaceMembershipError(f'point {outside} does not lie in the subspace')
    if len(P) == 0:
        return P.spec.GF.Zeros((0, H.dim_k))
    return P.array[:, list(H.pivots)]


def intersection_sizes(E: PointSet, family: Sequence[Subspace]) -> List[int]:
    """|E ∩ H| for each member of a family, in family order."""
    points = E.array
    return [int(membership_mask(points, H).sum()) for H in family]


@lru_cache(maxsize=32)
def hyperplane_family(spec: FieldSpec, d: int) -> SubspaceFamily:
    """G(d-1, d), cached per field and dimension."""
    return enumerate_subspaces(d - 1, d, spec)
