"""
Point Set Service

Reads and writes the point-set file format and builds the standard point
sets used by the checks (full space, coordinate hyperplane, random
subsets).

File format:

    volset-pointset v1
    p=<int> k=<int> d=<int> [mod=<c0,c1,...,ck>]
    <d element indices per line>
"""
import logging
import re
from typing import Optional

import numpy as np

from models import FieldSpec, PointSet
from services.errors import DimensionError, PointSetFormatError, VolsetError
from services.gf import make_field
from services.grassmann import hyperplane_of, intersect_set

logger = logging.getLogger(__name__)

MAGIC = 'volset-pointset v1'
_INDEX = re.compile(r'[0-9]+')
_HEADER = re.compile(r'^p=(\d+) k=(\d+) d=(\d+)(?: mod=(\d+(?:,\d+)*))?$')


def parse_pointset(text: str) -> PointSet:
    """
    Parse a point-set file.

    Args:
        text: Full file contents

    Returns:
        PointSet over the validated field

    Raises:
        PointSetFormatError: on any malformed line, with its line number
    """
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines or lines[0].strip() != MAGIC:
        raise PointSetFormatError(f'first line must be exactly {MAGIC!r}', 1)
    if len(lines) < 2:
        raise PointSetFormatError('missing field header', 2)

    match = _HEADER.match(lines[1].strip())
    if not match:
        raise PointSetFormatError(f'bad header {lines[1]!r}; expected "p=<int> k=<int> d=<int> [mod=...]"', 2)
    p, k, d = int(match.group(1)), int(match.group(2)), int(match.group(3))
    modulus = [int(c) for c in match.group(4).split(',')] if match.group(4) else None
    try:
        spec = make_field(p, k, modulus)
    except VolsetError as e:
        raise PointSetFormatError(e.message, 2) from e
    if d < 2:
        raise PointSetFormatError(f'dimension d={d} must be at least 2', 2)

    seen = {}
    for number, line in enumerate(lines[2:], start=3):
        fields = line.split()
        if len(fields) != d:
            raise PointSetFormatError(f'expected {d} coordinates, found {len(fields)}', number)
        if not all(_INDEX.fullmatch(f) for f in fields):
            raise PointSetFormatError(f'coordinates must be plain decimal integers in {line!r}', number)
        point = tuple(int(f) for f in fields)
        if any(not 0 <= c < spec.q for c in point):
            raise PointSetFormatError(f'element index outside [0, {spec.q}) in {line!r}', number)
        if point in seen:
            raise PointSetFormatError(f'duplicate point {point} (first on line {seen[point]})', number)
        seen[point] = number

    logger.debug(f'Parsed {len(seen)} points in {spec}^{d}')
    return PointSet.from_vectors(spec, d, seen)


def emit_pointset(E: PointSet) -> str:
    """Canonical file text: header plus points in sorted order."""
    header = f'p={E.spec.p} k={E.spec.k} d={E.d}'
    if E.spec.modulus is not None:
        header += ' mod=' + ','.join(str(c) for c in E.spec.modulus)
    body = [' '.join(str(c) for c in point) for point in E.points]
    return '\n'.join([MAGIC, header, *body]) + '\n'


def vectors_from_indices(spec: FieldSpec, d: int, indices) -> np.ndarray:
    """Decode point numbers in [0, q^d) into coordinates (base-q digits, first coordinate least significant)."""
    indices = np.asarray(indices, dtype=np.int64)
    powers = spec.q ** np.arange(d, dtype=np.int64)
    return (indices[:, np.newaxis] // powers) % spec.q


def full_space(spec: FieldSpec, d: int) -> PointSet:
    """All q^d points of F_q^d."""
    return PointSet.from_vectors(spec, d, vectors_from_indices(spec, d, np.arange(spec.q**d)).tolist())


def coordinate_hyperplane(spec: FieldSpec, d: int) -> PointSet:
    """{y : y_d = 0}, a hyperplane through the origin with q^(d-1) points."""
    coords = vectors_from_indices(spec, d - 1, np.arange(spec.q ** (d - 1)))
    padded = np.hstack([coords, np.zeros((coords.shape[0], 1), dtype=np.int64)])
    return PointSet.from_vectors(spec, d, padded.tolist())


def random_subset(spec: FieldSpec, d: int, size: int, rng: np.random.Generator) -> PointSet:
    """A uniform random subset of F_q^d with exactly `size` distinct points."""
    total = spec.q**d
    if not 0 <= size <= total:
        raise DimensionError(f'cannot draw {size} distinct points from {total}')
    chosen = rng.choice(total, size=size, replace=False)
    return PointSet.from_vectors(spec, d, vectors_from_indices(spec, d, chosen).tolist())


def hyperplane_subset(spec: FieldSpec, d: int, size: int, rng: np.random.Generator) -> PointSet:
    """A random subset of a random hyperplane through the origin."""
    if not 0 <= size <= spec.q ** (d - 1):
        raise DimensionError(f'a hyperplane of F_q^{d} holds at most {spec.q ** (d - 1)} points, not {size}')
    normal_index = int(rng.integers(1, spec.q**d))
    normal = vectors_from_indices(spec, d, [normal_index])[0]
    plane = intersect_set(full_space(spec, d), hyperplane_of(normal.tolist(), spec))
    chosen = rng.choice(len(plane), size=size, replace=False)
    return PointSet.from_vectors(spec, d, (plane.points[int(i)] for i in chosen))


def load_pointset(path: str, expected_d: Optional[int] = None) -> PointSet:
    with open(path, 'r', encoding='utf-8') as handle:
        E = parse_pointset(handle.read())
    if expected_d is not None and E.d != expected_d:
        raise DimensionError(f'{path}: expected d={expected_d}, file has d={E.d}')
    logger.info(f'Loaded {len(E)} points from {path}')
    return E
