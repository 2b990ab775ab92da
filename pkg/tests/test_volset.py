"""
Tests for volume sets, determinant sets, cross products and incidences.
"""
import numpy as np
import pytest

from models import BilinearForm, PointSet
from services.errors import BudgetExceeded, DimensionError
from services.gf import make_field
from services.grassmann import coordinates_in_basis, hyperplane_family, hyperplane_of, intersect_set
from services.linalg import as_ints, det
from services.pointsets import coordinate_hyperplane, full_space, random_subset
from services.proofcheck import meets_star_bound, star_bound_operands
from services.volset import VOLUME_MODES, VolumeSetService, volset_service

E3 = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]


def random_nonempty(spec, d, rng, largest):
    return random_subset(spec, d, int(rng.integers(1, largest + 1)), rng)


class TestVolumeSet:
    @pytest.mark.parametrize('mode', VOLUME_MODES)
    def test_standard_basis(self, gf5, points, mode):
        assert volset_service.volume_set(points(gf5, E3), mode).sorted() == [0, 1, 4]

    @pytest.mark.parametrize('mode', VOLUME_MODES)
    def test_coordinate_hyperplane_is_degenerate(self, gf3, mode):
        assert volset_service.volume_set(coordinate_hyperplane(gf3, 3), mode).sorted() == [0]

    @pytest.mark.parametrize('mode', VOLUME_MODES)
    def test_full_space_covers(self, gf3, mode):
        assert volset_service.volume_set(full_space(gf3, 3), mode).sorted() == [0, 1, 2]

    def test_single_point(self, gf5, points):
        assert volset_service.volume_set(points(gf5, [(1, 2, 3)])).sorted() == [0]

    def test_empty_rejected(self, gf3):
        with pytest.raises(DimensionError):
            volset_service.volume_set(PointSet.from_vectors(gf3, 3, []))

    def test_unknown_mode(self, gf3, points):
        with pytest.raises(ValueError):
            volset_service.volume_set(points(gf3, E3), 'magic')

    def test_modes_agree_on_random_sets(self, gf3, rng):
        for _ in range(20):
            E = random_nonempty(gf3, 3, rng, 15)
            results = {mode: volset_service.volume_set(E, mode).elements for mode in VOLUME_MODES}
            assert len(set(results.values())) == 1, results

    def test_modes_agree_in_extension_field(self, gf9, rng):
        for _ in range(5):
            E = random_nonempty(gf9, 2, rng, 8)
            results = {mode: volset_service.volume_set(E, mode).elements for mode in VOLUME_MODES}
            assert len(set(results.values())) == 1, results

    def test_monotone_under_inclusion(self, gf3, rng):
        for _ in range(10):
            E = random_nonempty(gf3, 3, rng, 12)
            extra = random_nonempty(gf3, 3, rng, 6)
            bigger = PointSet.from_vectors(gf3, 3, E.points + extra.points)
            assert volset_service.volume_set(E).elements <= volset_service.volume_set(bigger).elements

    @pytest.mark.parametrize('mode', VOLUME_MODES)
    def test_budget_exceeded(self, gf3, mode):
        service = VolumeSetService(budget=10)
        with pytest.raises(BudgetExceeded) as info:
            service.volume_set(full_space(gf3, 3), mode)
        assert info.value.budget == 10

    def test_budget_override_per_call(self, gf3):
        with pytest.raises(BudgetExceeded):
            volset_service.volume_set(full_space(gf3, 3), 'naive', budget=100)


class TestDeterminantSet:
    def test_full_plane(self, gf3):
        assert volset_service.determinant_set_star(full_space(gf3, 2)).sorted() == [1, 2]

    def test_swap_gives_negative(self, gf5, points):
        star = volset_service.determinant_set_star(points(gf5, [(1, 0), (0, 1)]))
        assert star.zero_stripped
        assert star.sorted() == [1, 4]

    def test_line_has_empty_star(self, gf5, points):
        assert len(volset_service.determinant_set_star(points(gf5, [(1, 2), (2, 4), (3, 1)]))) == 0

    def test_inside_hyperplane(self, gf5):
        H = hyperplane_of((0, 0, 1), gf5)
        star = volset_service.determinant_set_star(coordinate_hyperplane(gf5, 3), H)
        assert star.sorted() == [1, 2, 3, 4]

    @pytest.mark.parametrize('d', [3, 4])
    def test_basis_change_inside_hyperplanes(self, gf3, d, rng):
        GF = gf3.GF
        family = hyperplane_family(gf3, d)
        space = full_space(gf3, d)
        for _ in range(50):
            H = family.members[int(rng.integers(len(family)))]
            members = intersect_set(space, H).points
            chosen = rng.choice(len(members), size=int(rng.integers(d, len(members) + 1)), replace=False)
            P = PointSet.from_vectors(gf3, d, [members[i] for i in sorted(chosen)])
            coords = coordinates_in_basis(H, P)
            assert np.array_equal(as_ints(coords @ H.array), as_ints(P.array))
            while True:
                A = gf3.array(rng.integers(0, 3, size=(d - 1, d - 1)))
                if int(det(A)) != 0:
                    break
            recombined = coords @ np.linalg.inv(A)
            assert np.array_equal(as_ints(recombined @ (A @ H.array)), as_ints(P.array))
            before = volset_service.determinant_set_star(P, H)
            after = volset_service.dstar_of_coordinates(recombined)
            assert len(after) == len(before)
            scale = GF(1) / det(A)
            assert after.elements == frozenset(int(GF(delta) * scale) for delta in before.elements)


class TestWedgeCounter:
    def test_two_basis_vectors(self, gf5, points):
        g = volset_service.wedge_counter(points(gf5, [(0, 1, 0), (0, 0, 1)]))
        assert g[(1, 0, 0)] == 1
        assert g[(4, 0, 0)] == 1
        assert g[(0, 0, 0)] == 2
        assert g[(0, 1, 0)] == 0

    @pytest.mark.parametrize('d', [3, 4])
    def test_total_counts_every_tuple(self, gf3, rng, d):
        E = random_nonempty(gf3, d, rng, 12)
        assert volset_service.wedge_counter(E).total == len(E) ** (d - 1)

    def test_support_matches_cross_product_set(self, gf5, rng):
        for _ in range(5):
            E = random_nonempty(gf5, 3, rng, 20)
            support = volset_service.wedge_counter(E).support() - {(0, 0, 0)}
            assert support == volset_service.cross_product_set(E).vectors

    def test_wedges_orthogonal_to_arguments(self, gf5, rng):
        E = random_nonempty(gf5, 3, rng, 10)
        for w in volset_service.cross_product_set(E).vectors:
            # some pair of points of E is orthogonal to w
            dots = as_ints(E.array @ gf5.array(list(w)))
            assert (dots == 0).sum() >= 2


class TestCrossProductSet:
    def test_full_space(self, gf3):
        cross = volset_service.cross_product_set(full_space(gf3, 3))
        assert len(cross) == 26
        assert (0, 0, 0) not in cross

    def test_basis_pair(self, gf5, points):
        cross = volset_service.cross_product_set(points(gf5, [(1, 0, 0), (0, 1, 0)]))
        assert cross.sorted() == [(0, 0, 1), (0, 0, 4)]

    def test_unknown_mode(self, gf3, points):
        with pytest.raises(ValueError):
            volset_service.cross_product_set(points(gf3, E3), 'naive')

    def test_decomposed_matches_wedge(self, gf3, rng):
        for _ in range(20):
            E = random_nonempty(gf3, 3, rng, 27)
            assert volset_service.cross_product_set(E, 'decomposed') == volset_service.cross_product_set(E)


class TestHyperplaneDecomposition:
    def check_identity(self, E):
        direct = volset_service.cross_product_set(E)
        decomposed, records = volset_service.decomposed_cross_product(E)
        assert len(direct) == sum(len(r.dstar) for r in records)
        assert direct == decomposed

    def test_records_follow_canonical_order(self, gf3):
        records = volset_service.hyperplane_decomposition(full_space(gf3, 3))
        assert len(records) == 13
        assert [r.subspace for r in records] == sorted((r.subspace for r in records), key=lambda H: H.sort_key())
        assert all(r.size == 9 and r.dstar.sorted() == [1, 2] for r in records)

    def test_identity_f3_cubed(self, gf3, rng):
        for _ in range(50):
            self.check_identity(random_nonempty(gf3, 3, rng, 27))

    def test_identity_f5_cubed(self, gf5, rng):
        for _ in range(50):
            self.check_identity(random_nonempty(gf5, 3, rng, 40))

    def test_identity_f3_fourth_small_sets(self, gf3, rng):
        for _ in range(10):
            self.check_identity(random_nonempty(gf3, 4, rng, 15))

    @pytest.mark.slow
    def test_identity_f3_fourth(self, gf3, rng):
        for _ in range(50):
            self.check_identity(random_nonempty(gf3, 4, rng, 81))

    @pytest.mark.slow
    def test_identity_many_sets(self, gf5, rng):
        for _ in range(200):
            self.check_identity(random_nonempty(gf5, 3, rng, 125))

    def test_line_restriction(self, gf5, rng):
        GF = gf5.GF
        for _ in range(10):
            E = random_nonempty(gf5, 3, rng, 60)
            cross = volset_service.cross_product_set(E)
            x = tuple(int(c) for c in rng.integers(0, 5, size=3))
            if not any(x):
                continue
            line = volset_service.line_restriction(E, x)
            expected = {int(GF(line.scale) * GF(delta)) for delta in line.dstar.elements}
            assert line.multipliers.elements == frozenset(expected)
            on_line = {lam for lam in range(1, 5) if tuple(as_ints(GF(lam) * GF(list(x))).tolist()) in cross}
            assert line.multipliers.elements == frozenset(on_line)
            assert len(line.multipliers) == len(line.dstar)


class TestDotProducts:
    def test_example(self, gf3, points):
        E = points(gf3, [(1, 0)])
        F = points(gf3, [(1, 0), (0, 1), (2, 2)])
        assert volset_service.dot_product_set(E, F).sorted() == [0, 1, 2]

    def test_empty_operand(self, gf3, points):
        empty = PointSet.from_vectors(gf3, 2, [])
        assert len(volset_service.dot_product_set(empty, points(gf3, [(1, 1)]))) == 0

    def test_dimension_mismatch(self, gf3, points):
        with pytest.raises(DimensionError):
            volset_service.dot_product_set(points(gf3, [(1, 1)]), points(gf3, [(1, 1, 1)]))

    def test_large_product_covers_nonzero(self, gf5, rng):
        for _ in range(10):
            E = random_subset(gf5, 2, 12, rng)
            F = random_subset(gf5, 2, 12, rng)
            assert set(range(1, 5)) <= volset_service.dot_product_set(E, F).elements


class TestIncidenceCount:
    def test_full_plane_over_f3(self, gf3):
        E = full_space(gf3, 2)
        table = volset_service.incidence_count(E, E, BilinearForm.identity(gf3, 2))
        assert table.counts == {0: 33, 1: 24, 2: 24}
        assert table.scaled_deviation(1) == -9

    def test_counts_sum_to_product(self, gf5, rng):
        E = random_subset(gf5, 3, 30, rng)
        F = random_subset(gf5, 3, 17, rng)
        table = volset_service.incidence_count(E, F, BilinearForm.identity(gf5, 3))
        assert sum(table.counts.values()) == 30 * 17
        assert set(table.counts) == set(range(5))

    def test_form_dimension_mismatch(self, gf3, points):
        E = points(gf3, [(1, 1)])
        with pytest.raises(DimensionError):
            volset_service.incidence_count(E, E, BilinearForm.identity(gf3, 3))

    @pytest.mark.parametrize('gram', [None, [[0, 1], [1, 0]], [[1, 0], [0, 2]]])
    def test_deviation_bound(self, gf5, rng, gram):
        form = BilinearForm.identity(gf5, 2) if gram is None else BilinearForm(gf5, tuple(map(tuple, gram)))
        for _ in range(20):
            E = random_nonempty(gf5, 2, rng, 25)
            F = random_nonempty(gf5, 2, rng, 25)
            table = volset_service.incidence_count(E, F, form)
            for t in range(1, 5):
                assert table.scaled_deviation(t) ** 2 <= len(E) * len(F) * 5**3

    @pytest.mark.parametrize('d', [2, 3])
    def test_deviation_bound_random_forms(self, gf7, rng, d):
        forms = [BilinearForm.identity(gf7, d)]
        while len(forms) < 4:
            gram = rng.integers(0, 7, size=(d, d))
            if int(det(gf7.array(gram))) != 0:
                forms.append(BilinearForm(gf7, tuple(map(tuple, gram.tolist()))))
        for form in forms:
            for _ in range(30):
                E = random_nonempty(gf7, d, rng, 7**d)
                F = random_nonempty(gf7, d, rng, 7**d)
                table = volset_service.incidence_count(E, F, form)
                for t in range(1, 7):
                    assert table.scaled_deviation(t) ** 2 <= len(E) * len(F) * 7 ** (d + 1)

    @pytest.mark.slow
    def test_deviation_bound_many_triples(self, gf3, rng):
        for _ in range(200):
            E = random_nonempty(gf3, 3, rng, 27)
            F = random_nonempty(gf3, 3, rng, 27)
            table = volset_service.incidence_count(E, F, BilinearForm.identity(gf3, 3))
            for t in (1, 2):
                assert table.scaled_deviation(t) ** 2 <= len(E) * len(F) * 3**4


class TestBStar:
    def test_basis(self, gf5, points):
        E = points(gf5, [(1, 0), (0, 1)])
        assert volset_service.bstar(E, BilinearForm.identity(gf5, 2)).sorted() == [1]

    def test_needs_plane(self, gf5, points):
        E = points(gf5, E3)
        with pytest.raises(DimensionError):
            volset_service.bstar(E, BilinearForm.identity(gf5, 3))

    def test_star_bound_examples(self):
        assert meets_star_bound(0, 5, 5)
        assert meets_star_bound(4, 24, 5)
        assert not meets_star_bound(0, 100, 5)
        assert not meets_star_bound(1, 24, 5)
        assert star_bound_operands(1, 3, 3) == (27, 0)
        assert star_bound_operands(1, 24, 5) == (125, 71**2)

    def test_star_bound_counts_the_zero_vector(self, gf5, points):
        # the origin counts towards |E|
        E = points(gf5, [(0, 0), (1, 0), (2, 0), (3, 0), (4, 0), (0, 1)])
        star = volset_service.bstar(E, BilinearForm.identity(gf5, 2))
        assert star.sorted() == [1, 2, 3, 4]
        assert star_bound_operands(len(star), len(E), 5) == (16 * 125, 0)
        assert not meets_star_bound(0, len(E), 5)

    @pytest.mark.parametrize('p,k', [(5, 1), (3, 2)])
    def test_star_bound_on_random_sets(self, p, k, rng):
        spec = make_field(p, k)
        form = BilinearForm.identity(spec, 2)
        for _ in range(100):
            E = random_nonempty(spec, 2, rng, spec.q**2)
            star = volset_service.bstar(E, form)
            assert meets_star_bound(len(star), len(E), spec.q)

    @pytest.mark.slow
    def test_star_bound_gf25(self, rng):
        spec = make_field(5, 2)
        form = BilinearForm.identity(spec, 2)
        for _ in range(100):
            E = random_nonempty(spec, 2, rng, spec.q**2)
            star = volset_service.bstar(E, form)
            assert meets_star_bound(len(star), len(E), spec.q)


class TestCoverageSearch:
    def assert_witnesses_recompute(self, spec, certificate):
        for t, rows in certificate.witnesses.items():
            assert int(det(spec.array(rows))) == t

    def test_full_space(self, gf3):
        certificate = volset_service.coverage_search(full_space(gf3, 3), seed=1)
        assert certificate.covered
        assert certificate.exhaustive
        self.assert_witnesses_recompute(gf3, certificate)

    def test_rank_deficient_shortcut(self, gf5):
        certificate = volset_service.coverage_search(coordinate_hyperplane(gf5, 3))
        assert certificate.rank_deficient
        assert certificate.exhaustive
        assert certificate.covered_values == [0]

    def test_empty_set(self, gf3):
        certificate = volset_service.coverage_search(PointSet.from_vectors(gf3, 3, []))
        assert certificate.witnesses == {}
        assert certificate.exhaustive

    def test_sampling_then_fallback(self, gf5):
        service = VolumeSetService(sample_budget=10)
        certificate = service.coverage_search(full_space(gf5, 3), seed=3)
        assert certificate.covered
        self.assert_witnesses_recompute(gf5, certificate)

    def test_seeded_search_is_reproducible(self, gf5, rng):
        E = random_subset(gf5, 3, 60, rng)
        service = VolumeSetService(sample_budget=100)
        first = service.coverage_search(E, seed=9)
        second = service.coverage_search(E, seed=9)
        assert first.witnesses == second.witnesses

    def test_truncated_search_reports_missing(self, gf3):
        service = VolumeSetService(budget=0, sample_budget=0)
        certificate = service.coverage_search(full_space(gf3, 3))
        assert certificate.covered_values == [0]
        assert not certificate.exhaustive
        assert certificate.red_flag

    def test_agrees_with_volume_set(self, gf3, rng):
        for _ in range(10):
            E = random_nonempty(gf3, 3, rng, 15)
            certificate = volset_service.coverage_search(E)
            assert set(certificate.covered_values) == volset_service.volume_set(E).elements
            self.assert_witnesses_recompute(gf3, certificate)
