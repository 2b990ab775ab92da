"""
Volume Set Service

Computes the set-valued objects and counters over a point set E ⊆ F_q^d:
vol(E) by three independent routes, D*, g_E, F*_E, E·F, the incidence
counts nu_t and B*(E), plus the witness-producing coverage search.
"""
import logging
from collections import Counter
from typing import Iterator, List, Optional, Set, Tuple

import galois
import numpy as np

from config import Config
from models import (
    BilinearForm,
    CountTable,
    CoverageCertificate,
    HyperplaneRecord,
    LineRestriction,
    PointSet,
    ScalarSet,
    Subspace,
    Vector,
    VectorSet,
    WedgeCounter,
)
from services.errors import BudgetExceeded, DimensionError
from services.grassmann import (
    coordinates_in_basis,
    hyperplane_family,
    hyperplane_of,
    intersect_set,
    normal_of,
)
from services.linalg import as_ints, det_batch, wedge_batch
from services.parallel import parallel_map

logger = logging.getLogger(__name__)

VOLUME_MODES = ('naive', 'wedge', 'decomposed')


class VolumeSetService:
    """Service for exact volume-set and incidence computations."""

    def __init__(self, budget: Optional[int] = None, sample_budget: Optional[int] = None,
                 chunk: Optional[int] = None):
        self.budget = budget if budget is not None else Config.BUDGET
        self.sample_budget = sample_budget if sample_budget is not None else Config.SAMPLE_BUDGET
        self.chunk = chunk if chunk is not None else Config.CHUNK

    def _tuples(self, n: int, r: int, what: str, budget: Optional[int] = None) -> Iterator[np.ndarray]:
        """
        Index arrays of all ordered r-tuples from range(n), chunk by chunk.

        Tuples come in lexicographic order. Work is charged as it is done:
        a caller that stops early never pays for the remainder, and running
        past the budget raises BudgetExceeded.
        """
        budget = self.budget if budget is None else budget
        total = n**r
        for start in range(0, total, self.chunk):
            stop = min(start + self.chunk, total)
            if stop > budget:
                raise BudgetExceeded(what, total, budget)
            flat = np.arange(start, stop, dtype=np.int64)
            yield np.stack(np.unravel_index(flat, (n,) * r), axis=-1)

    def volume_set(self, E: PointSet, mode: str = 'wedge', budget: Optional[int] = None) -> ScalarSet:
        """
        vol(E) = {vol(x^1, ..., x^d) : x^j in E}.

        Args:
            E: Nonempty point set
            mode: naive (all d-tuples), wedge (wedge images of (d-1)-tuples
                dotted against E) or decomposed (F*_E from the hyperplane
                decomposition, then E · F*_E plus 0)
            budget: Tuple budget override

        Returns:
            ScalarSet with zero_stripped = False
        """
        if mode not in VOLUME_MODES:
            raise ValueError(f'unknown volume mode {mode!r}; expected one of {VOLUME_MODES}')
        if len(E) == 0:
            raise DimensionError('the volume set of an empty point set is undefined')
        logger.info(f'Computing vol(E) for |E|={len(E)} in {E.spec}^{E.d} ({mode} mode)')

        if mode == 'naive':
            values = self._volume_naive(E, budget)
        else:
            if mode == 'wedge':
                wedges = self._wedge_images(E, budget)
            else:
                wedges = self.decomposed_cross_product(E, budget)[0].vectors
            values = self._volume_from_wedges(E, wedges)

        logger.info(f'|vol(E)| = {len(values)}')
        return ScalarSet(frozenset(values), zero_stripped=False)

    def _volume_naive(self, E: PointSet, budget: Optional[int]) -> Set[int]:
        points, q, d = E.array, E.spec.q, E.d
        values: Set[int] = set()
        for idx in self._tuples(len(E), d, 'naive volume enumeration', budget):
            values.update(np.unique(as_ints(det_batch(points[idx]))).tolist())
            if len(values) == q:
                break
        return values

    def _wedge_images(self, E: PointSet, budget: Optional[int] = None) -> Set[Vector]:
        """Distinct nonzero wedge values over E^(d-1)."""
        points, d = E.array, E.d
        limit = E.spec.q**d - 1
        seen: Set[Vector] = set()
        for idx in self._tuples(len(E), d - 1, 'wedge enumeration', budget):
            wedges = as_ints(wedge_batch(points[idx]))
            wedges = wedges[wedges.any(axis=1)]
            if wedges.size:
                seen.update(map(tuple, np.unique(wedges, axis=0).tolist()))
            if len(seen) == limit:
                break
        return seen

    def _volume_from_wedges(self, E: PointSet, wedges) -> Set[int]:
        """E · W together with 0 (identical rows always give a singular matrix)."""
        values = {0}
        if wedges:
            W = E.spec.array(sorted(wedges))
            values.update(np.unique(as_ints(E.array @ W.T)).tolist())
        return values

    def dstar_of_coordinates(self, coords: galois.FieldArray, budget: Optional[int] = None) -> ScalarSet:
        """Nonzero determinants of all k x k matrices whose rows are coordinate vectors."""
        n, k = coords.shape
        q = type(coords).order
        values: Set[int] = set()
        for idx in self._tuples(n, k, 'D* enumeration', budget):
            dets = as_ints(det_batch(coords[idx]))
            values.update(np.unique(dets[dets != 0]).tolist())
            if len(values) == q - 1:
                break
        return ScalarSet(frozenset(values), zero_stripped=True)

    def determinant_set_star(self, P: PointSet, H: Optional[Subspace] = None,
                             budget: Optional[int] = None) -> ScalarSet:
        """
        D*_{P,k}: nonzero determinants of coordinate matrices of k-tuples of P.

        Args:
            P: Points lying in H (or in F_q^d itself when H is None)
            H: The k-dimensional subspace whose canonical basis gives coordinates

        Returns:
            ScalarSet with zero_stripped = True
        """
        coords = P.array if H is None else coordinates_in_basis(H, P)
        return self.dstar_of_coordinates(coords, budget)

    def wedge_counter(self, E: PointSet, budget: Optional[int] = None) -> WedgeCounter:
        """g_E(x) for every x, over all ordered (d-1)-tuples of E."""
        counts: Counter = Counter()
        points = E.array
        for idx in self._tuples(len(E), E.d - 1, 'wedge counting', budget):
            wedges = as_ints(wedge_batch(points[idx]))
            rows, multiplicity = np.unique(wedges, axis=0, return_counts=True)
            for row, m in zip(rows.tolist(), multiplicity.tolist()):
                counts[tuple(row)] += m
        logger.info(f'g_E has support {len(counts)} over {sum(counts.values())} tuples')
        return WedgeCounter(E.d, dict(counts))

    def cross_product_set(self, E: PointSet, mode: str = 'wedge', budget: Optional[int] = None) -> VectorSet:
        """F*_E, the nonzero wedge values of E."""
        if mode == 'decomposed':
            return self.decomposed_cross_product(E, budget)[0]
        if mode != 'wedge':
            raise ValueError(f'unknown cross-product mode {mode!r}')
        return VectorSet(frozenset(self._wedge_images(E, budget)))

    def hyperplane_decomposition(self, E: PointSet, budget: Optional[int] = None) -> List[HyperplaneRecord]:
        """|E ∩ H| and D*_{E∩H, d-1} for every H in G(d-1, d), in canonical order."""
        family = hyperplane_family(E.spec, E.d)

        def analyse(H: Subspace) -> HyperplaneRecord:
            P = intersect_set(E, H)
            dstar = self.determinant_set_star(P, H, budget)
            normal = tuple(as_ints(normal_of(H)).tolist())
            return HyperplaneRecord(H, len(P), dstar, normal)

        records = parallel_map(analyse, family.members)
        logger.info(f'Decomposed E over {len(records)} hyperplanes')
        return records

    def decomposed_cross_product(self, E: PointSet,
                                 budget: Optional[int] = None) -> Tuple[VectorSet, List[HyperplaneRecord]]:
        """
        F*_E assembled hyperplane by hyperplane.

        For H with canonical basis v^1..v^{d-1}, any u^i in H satisfy
        u^1 ∧ ... ∧ u^{d-1} = det(coordinates) · (v^1 ∧ ... ∧ v^{d-1}),
        so F*_E meets the normal line of H exactly in D* times that normal.
        """
        records = self.hyperplane_decomposition(E, budget)
        GF = E.spec.GF
        vectors: Set[Vector] = set()
        for record in records:
            normal = GF(list(record.normal))
            for delta in record.dstar.elements:
                vectors.add(tuple(as_ints(GF(delta) * normal).tolist()))
        return VectorSet(frozenset(vectors)), records

    def line_restriction(self, E: PointSet, x, budget: Optional[int] = None) -> LineRestriction:
        """
        Compare {λ : λx in F*_E} with D*_{E ∩ x^⊥, d-1}.

        A nonzero wedge is orthogonal to its arguments, so a wedge parallel
        to x only arises from points of x^⊥; the multipliers are therefore
        read off the wedge images of E ∩ x^⊥.
        """
        GF = E.spec.GF
        x = tuple(int(c) for c in x)
        H = hyperplane_of(x, E.spec)
        P = intersect_set(E, H)
        dstar = self.determinant_set_star(P, H, budget)

        j = next(i for i, c in enumerate(x) if c)
        normal = normal_of(H)
        scale = int(normal[j] / GF(x[j]))

        multipliers = set()
        for w in self._wedge_images(P, budget):
            multipliers.add(int(GF(w[j]) / GF(x[j])))
        return LineRestriction(x, ScalarSet(frozenset(multipliers), True), dstar, scale)

    def dot_product_set(self, E: PointSet, F: PointSet) -> ScalarSet:
        """E · F = {u · v : u in E, v in F}."""
        _check_same_space(E, F)
        if not len(E) or not len(F):
            return ScalarSet(frozenset())
        values = np.unique(as_ints(E.array @ F.array.T))
        return ScalarSet(frozenset(values.tolist()))

    def _form_values(self, E: PointSet, F: PointSet, form: BilinearForm) -> np.ndarray:
        _check_same_space(E, F)
        if form.d != E.d:
            raise DimensionError(f'form of dimension {form.d} on points of dimension {E.d}')
        if not len(E) or not len(F):
            return np.zeros((len(E), len(F)), dtype=np.int64)
        return as_ints(E.array @ form.matrix @ F.array.T)

    def incidence_count(self, E: PointSet, F: PointSet, form: BilinearForm) -> CountTable:
        """nu_t(E, F) = #{(x, y) in E × F : B(x, y) = t} for every t."""
        values = self._form_values(E, F, form)
        counts = np.bincount(values.ravel(), minlength=E.spec.q)
        table = {t: int(n) for t, n in enumerate(counts.tolist())}
        return CountTable(form, len(E), len(F), table)

    def bstar(self, E: PointSet, form: BilinearForm) -> ScalarSet:
        """B*(E) = {B(x, y) : x, y in E} without 0, for E in F_q^2."""
        if E.d != 2:
            raise DimensionError(f'B*(E) is defined for d = 2, got d = {E.d}')
        values = np.unique(self._form_values(E, E, form))
        return ScalarSet(frozenset(v for v in values.tolist() if v), zero_stripped=True)

    def coverage_search(self, E: PointSet, seed: Optional[int] = None, sample_budget: Optional[int] = None,
                        budget: Optional[int] = None) -> CoverageCertificate:
        """
        Find a witness d-tuple for as many t in F_q as possible.

        The value 0 is witnessed by d copies of one point. A set of rank
        below d has vol(E) = {0} exactly. When E^(d-1) is larger than the
        sample budget, (d-1)-tuples are first sampled uniformly from a seeded
        stream and their wedges dotted against E; any value still missing
        triggers deterministic enumeration of (d-1)-tuples up to the budget.
        Stops as soon as all q values are witnessed.
        """
        seed = Config.SEED if seed is None else seed
        sample_budget = self.sample_budget if sample_budget is None else sample_budget
        budget = self.budget if budget is None else budget
        spec, d, n, q = E.spec, E.d, len(E), E.spec.q

        certificate = CoverageCertificate(spec, d, n, {}, seed=seed)
        if n == 0:
            certificate.exhaustive = True
            return certificate
        certificate.witnesses[0] = (E.points[0],) * d
        if int(np.linalg.matrix_rank(E.array)) < d:
            logger.info('E spans a proper subspace; vol(E) = {0}')
            certificate.exhaustive = True
            certificate.rank_deficient = True
            return certificate

        points = E.array
        seen: Set[Vector] = set()

        def absorb(idx: np.ndarray):
            wedges = as_ints(wedge_batch(points[idx]))
            keep = wedges.any(axis=1)
            wedges, idx = wedges[keep], idx[keep]
            if not wedges.size:
                return
            rows, first = np.unique(wedges, axis=0, return_index=True)
            fresh = [i for i, row in enumerate(map(tuple, rows.tolist())) if row not in seen]
            if not fresh:
                return
            seen.update(tuple(rows[i].tolist()) for i in fresh)
            origins = idx[first[fresh]]
            values = as_ints(points @ spec.array(rows[fresh]).T)
            for t in sorted(certificate.missing):
                hits = np.argwhere(values == t)
                if hits.size:
                    i, c = hits[0]
                    certificate.witnesses[t] = (E.points[int(i)],) + tuple(E.points[int(j)] for j in origins[c])

        total = n ** (d - 1)
        if total > sample_budget:
            rng = np.random.default_rng(seed)
            drawn = 0
            while not certificate.covered and drawn < sample_budget:
                m = min(self.chunk, sample_budget - drawn)
                absorb(rng.integers(0, n, size=(m, d - 1)))
                drawn += m
            logger.debug(f'Sampling phase drew {drawn} tuples, witnessed {len(certificate.witnesses)}/{q}')

        if certificate.covered:
            certificate.exhaustive = True
            return certificate

        if total > budget:
            logger.warning(f'Deterministic fallback truncated: {total} tuples exceed budget {budget}')
        enumerated = 0
        for idx in self._tuples(n, d - 1, 'coverage fallback', budget=max(total, 1)):
            if enumerated + len(idx) > budget:
                break
            absorb(idx)
            enumerated += len(idx)
            if certificate.covered:
                break
        certificate.exhaustive = certificate.covered or enumerated == total
        return certificate


def _check_same_space(E: PointSet, F: PointSet):
    if E.d != F.d or E.spec != F.spec:
        raise DimensionError(f'point sets live in {E.spec}^{E.d} and {F.spec}^{F.d}')


# Singleton instance
volset_service = VolumeSetService()
