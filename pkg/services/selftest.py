"""
Self Test

One-command desk validation: runs the invariant suites at q in {3, 5} and
d in {2, 3} against independent oracles and returns one record per check.
"""
import logging
from typing import Callable, Dict, List

import numpy as np

from models import BilinearForm, FieldSpec
from services.errors import VolsetError
from services.gf import coefficients, index_from_coefficients, make_field
from services.grassmann import enumerate_subspaces, gaussian_binomial
from services.linalg import det, vol
from services.pointsets import random_subset
from services.proofcheck import proofcheck_service
from services.volset import VOLUME_MODES, volset_service

logger = logging.getLogger(__name__)

FIELDS = ((3, 1), (5, 1), (3, 2))
DIMENSIONS = (2, 3)


def _field_axioms(spec: FieldSpec) -> bool:
    GF = spec.GF
    a = GF(np.arange(spec.q))
    x, y = a[:, np.newaxis], a[np.newaxis, :]
    commutative = np.array_equal(x + y, y + x) and np.array_equal(x * y, y * x)
    triples = all(
        np.array_equal(c * (x + y), c * x + c * y) and np.array_equal((x * y) * c, x * (y * c))
        for c in a
    )
    inverses = all(int(v * (GF(1) / v)) == 1 for v in a[1:])
    fermat = bool(np.all(a[1:] ** (spec.q - 1) == 1))
    round_trip = all(index_from_coefficients(spec, coefficients(spec, i)) == i for i in range(spec.q))
    return commutative and triples and inverses and fermat and round_trip


def _vol_matches_det(spec: FieldSpec, d: int, rng: np.random.Generator, samples: int = 100) -> bool:
    for _ in range(samples):
        rows = spec.array(rng.integers(0, spec.q, size=(d, d)))
        if int(vol(rows)) != int(det(rows)):
            return False
    return True


def _modes_agree(spec: FieldSpec, d: int, rng: np.random.Generator) -> bool:
    E = random_subset(spec, d, min(6, spec.q**d), rng)
    results = {mode: volset_service.volume_set(E, mode) for mode in VOLUME_MODES}
    return len({r.elements for r in results.values()}) == 1


def _gaussian_counts(spec: FieldSpec, d: int) -> bool:
    return all(
        len(enumerate_subspaces(k, d, spec)) == gaussian_binomial(k, d, spec.q)
        for k in range(d + 1)
    )


def _decomposition_identity(spec: FieldSpec, d: int, rng: np.random.Generator) -> bool:
    E = random_subset(spec, d, spec.q ** (d - 1), rng)
    direct = volset_service.cross_product_set(E)
    decomposed, records = volset_service.decomposed_cross_product(E)
    return len(direct) == sum(len(r.dstar) for r in records) and direct == decomposed


def _incidence_bound(spec: FieldSpec, d: int, rng: np.random.Generator) -> bool:
    total = spec.q**d
    E = random_subset(spec, d, int(rng.integers(1, total + 1)), rng)
    F = random_subset(spec, d, int(rng.integers(1, total + 1)), rng)
    trace = proofcheck_service.trace_incidence_bound(E, F, BilinearForm.identity(spec, d))
    return trace.overall


def _sharpness(spec: FieldSpec, d: int) -> bool:
    return proofcheck_service.sharpness_demo(spec, d).covered_values == [0]


def run_selftest(seed: int = 0) -> List[Dict]:
    """
    Run every suite once.

    Returns:
        List of {'name', 'passed'} records plus 'error' for checks that raised
    """
    rng = np.random.default_rng(seed)
    checks: List[tuple] = []
    for p, k in FIELDS:
        spec = make_field(p, k)
        checks.append((f'field axioms {spec}', lambda spec=spec: _field_axioms(spec)))
        for d in DIMENSIONS:
            label = f'{spec}^{d}'
            checks.extend([
                (f'vol equals det {label}', lambda spec=spec, d=d: _vol_matches_det(spec, d, rng)),
                (f'volume modes agree {label}', lambda spec=spec, d=d: _modes_agree(spec, d, rng)),
                (f'subspace counts {label}', lambda spec=spec, d=d: _gaussian_counts(spec, d)),
                (f'cross-product decomposition {label}', lambda spec=spec, d=d: _decomposition_identity(spec, d, rng)),
                (f'incidence bound {label}', lambda spec=spec, d=d: _incidence_bound(spec, d, rng)),
                (f'hyperplane sharpness {label}', lambda spec=spec, d=d: _sharpness(spec, d)),
            ])

    results = []
    for name, check in checks:
        results.append(_run(name, check))
    failed = [r['name'] for r in results if not r['passed']]
    if failed:
        logger.error(f'Self test failures: {failed}')
    else:
        logger.info(f'Self test passed ({len(results)} checks)')
    return results


def _run(name: str, check: Callable[[], bool]) -> Dict:
    try:
        return {'name': name, 'passed': bool(check())}
    except (VolsetError, ArithmeticError, ValueError) as e:
        logger.error(f'Self test {name} raised: {e}')
        return {'name': name, 'passed': False, 'error': str(e)}
