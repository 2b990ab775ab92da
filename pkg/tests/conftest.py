"""
Shared test fixtures.
"""
import numpy as np
import pytest

from models import PointSet
from services.gf import make_field
from services.pointsets import emit_pointset


@pytest.fixture
def gf3():
    return make_field(3)


@pytest.fixture
def gf5():
    return make_field(5)


@pytest.fixture
def gf7():
    return make_field(7)


@pytest.fixture
def gf9():
    return make_field(3, 2, [1, 0, 1])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def points():
    """Build a PointSet from a field and a list of tuples."""
    def build(spec, vectors, d=None):
        vectors = [tuple(v) for v in vectors]
        return PointSet.from_vectors(spec, d if d is not None else len(vectors[0]), vectors)
    return build


@pytest.fixture
def pointset_file(tmp_path):
    """Write a PointSet to a canonical file and return its path."""
    counter = {'n': 0}

    def write(E, name=None):
        counter['n'] += 1
        path = tmp_path / (name or f'set{counter["n"]}.txt')
        path.write_text(emit_pointset(E), encoding='utf-8')
        return str(path)
    return write
