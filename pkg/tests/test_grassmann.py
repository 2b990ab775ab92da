"""
Tests for subspace enumeration, hyperplanes and intersections.
"""
import numpy as np
import pytest

from models import PointSet
from services.errors import DimensionError, FieldError, SubspaceMembershipError
from services.gf import make_field
from services.grassmann import (
    canonical_subspace,
    coordinates_in_basis,
    enumerate_subspaces,
    gaussian_binomial,
    hyperplane_family,
    hyperplane_of,
    intersect_set,
    intersection_sizes,
    membership_mask,
    normal_of,
)
from services.linalg import as_ints, dot
from services.pointsets import full_space, random_subset


class TestGaussianBinomial:
    def test_examples(self):
        assert gaussian_binomial(2, 3, 3) == 13
        assert gaussian_binomial(1, 3, 3) == 13
        assert gaussian_binomial(1, 2, 5) == 6
        assert gaussian_binomial(0, 4, 7) == 1
        assert gaussian_binomial(3, 4, 5) == 156

    def test_out_of_range(self):
        with pytest.raises(DimensionError):
            gaussian_binomial(4, 3, 3)


class TestEnumeration:
    @pytest.mark.parametrize('d', [1, 2, 3, 4])
    def test_counts_match_gaussian_binomial(self, gf3, d):
        for k in range(d + 1):
            assert len(enumerate_subspaces(k, d, gf3)) == gaussian_binomial(k, d, 3)

    def test_examples(self, gf3, gf5):
        assert len(enumerate_subspaces(1, 2, gf3)) == 4
        assert len(enumerate_subspaces(2, 3, gf3)) == 13
        assert len(enumerate_subspaces(1, 2, gf5)) == 6

    def test_full_space_is_unique(self, gf5):
        family = enumerate_subspaces(3, 3, gf5)
        assert len(family) == 1
        assert family.members[0].basis == ((1, 0, 0), (0, 1, 0), (0, 0, 1))

    def test_members_are_rref_and_distinct(self, gf3):
        family = enumerate_subspaces(2, 4, gf3)
        assert len(set(family.members)) == len(family)
        for H in family:
            pivots = H.pivots
            assert list(pivots) == sorted(set(pivots))
            for i, row in enumerate(H.basis):
                assert row[pivots[i]] == 1
                assert all(other[pivots[i]] == 0 for j, other in enumerate(H.basis) if j != i)
            assert canonical_subspace(gf3, H.basis) == H

    def test_order_is_canonical(self, gf3):
        family = enumerate_subspaces(2, 3, gf3)
        assert list(family.members) == sorted(family.members, key=lambda H: H.sort_key())

    def test_k_out_of_range(self, gf3):
        with pytest.raises(DimensionError):
            enumerate_subspaces(3, 2, gf3)


class TestHyperplanes:
    def test_coordinate_normal(self, gf3):
        H = hyperplane_of((1, 0, 0), gf3)
        assert H.basis == ((0, 1, 0), (0, 0, 1))
        assert len(intersect_set(full_space(gf3, 3), H)) == 9

    def test_diagonal_normal(self, gf3):
        assert hyperplane_of((1, 1), gf3).basis == ((1, 2),)

    def test_zero_vector_rejected(self, gf3):
        with pytest.raises(FieldError):
            hyperplane_of((0, 0, 0), gf3)

    def test_defining_property_exhaustive(self, gf3):
        space = full_space(gf3, 3)
        for x in space.without_zero():
            plane = intersect_set(space, hyperplane_of(x, gf3))
            assert len(plane) == 9
            xs = gf3.array(list(x))
            assert all(int(dot(xs, gf3.array(list(y)))) == 0 for y in plane)

    def test_scaling_invariance(self, gf5, rng):
        for _ in range(20):
            x = rng.integers(0, 5, size=3)
            if not x.any():
                continue
            lam = int(rng.integers(1, 5))
            assert hyperplane_of(x.tolist(), gf5) == hyperplane_of(((lam * x) % 5).tolist(), gf5)

    def test_normal_round_trip(self, gf5):
        for H in hyperplane_family(gf5, 3):
            normal = as_ints(normal_of(H))
            assert normal.any()
            assert hyperplane_of(normal.tolist(), gf5) == H

    def test_normal_needs_hyperplane(self, gf3):
        line = canonical_subspace(gf3, [[1, 0, 0]])
        with pytest.raises(DimensionError):
            normal_of(line)

    @pytest.mark.parametrize('d', [3, 4])
    def test_each_nonzero_vector_lies_in_expected_number(self, gf3, d):
        nonzero = full_space(gf3, d).without_zero()
        counts = np.zeros(len(nonzero), dtype=int)
        for H in hyperplane_family(gf3, d):
            counts += membership_mask(nonzero.array, H)
        assert set(counts.tolist()) == {(3 ** (d - 1) - 1) // 2}


class TestIntersection:
    def test_point_outside_its_orthogonal(self, gf3, points):
        E = points(gf3, [(1, 0, 0)])
        assert len(intersect_set(E, hyperplane_of((1, 0, 0), gf3))) == 0

    def test_incidence_sum(self, gf3, rng):
        family = hyperplane_family(gf3, 3)
        for _ in range(10):
            E = random_subset(gf3, 3, int(rng.integers(1, 28)), rng).without_zero()
            assert sum(intersection_sizes(E, family.members)) == 4 * len(E)

    def test_distributes_over_union(self, gf3, rng):
        H = hyperplane_of((1, 2, 1), gf3)
        A = random_subset(gf3, 3, 10, rng)
        B = random_subset(gf3, 3, 12, rng)
        union = PointSet.from_vectors(gf3, 3, A.points + B.points)
        expected = set(intersect_set(A, H).points) | set(intersect_set(B, H).points)
        assert set(intersect_set(union, H).points) == expected

    def test_bounded_by_hyperplane_size(self, gf5, rng):
        E = random_subset(gf5, 3, 80, rng)
        assert max(intersection_sizes(E, hyperplane_family(gf5, 3).members)) <= 25

    def test_dimension_mismatch(self, gf3, points):
        with pytest.raises(DimensionError):
            intersect_set(points(gf3, [(1, 0)]), hyperplane_of((1, 0, 0), gf3))


class TestCoordinates:
    def test_coordinate_plane(self, gf5, points):
        H = hyperplane_of((0, 0, 1), gf5)
        coords = coordinates_in_basis(H, points(gf5, [(2, 3, 0)]))
        assert as_ints(coords).tolist() == [[2, 3]]

    def test_point_outside(self, gf5, points):
        H = hyperplane_of((0, 0, 1), gf5)
        with pytest.raises(SubspaceMembershipError):
            coordinates_in_basis(H, points(gf5, [(2, 3, 1)]))

    def test_reconstruction_and_injectivity(self, rng):
        gf3 = make_field(3)
        space = full_space(gf3, 4)
        family = hyperplane_family(gf3, 4)
        for _ in range(10):
            H = family.members[int(rng.integers(0, len(family)))]
            plane = intersect_set(space, H)
            chosen = rng.choice(len(plane), size=int(rng.integers(1, len(plane) + 1)), replace=False)
            P = PointSet.from_vectors(gf3, 4, (plane.points[int(i)] for i in chosen))
            coords = coordinates_in_basis(H, P)
            assert np.array_equal(as_ints(coords @ H.array), as_ints(P.array))
            assert len({tuple(row) for row in as_ints(coords).tolist()}) == len(P)
