"""
Finite Field Service

Construction of GF(p^k) for odd prime powers and exact element arithmetic
under the canonical index encoding: the coefficients c_0 .. c_{k-1} of an
element are the base-p digits of its index, c_0 least significant.
"""
import itertools
import logging
from typing import List, Optional, Sequence, Tuple

import galois

from models import FieldElement, FieldSpec
from services.errors import FieldError

logger = logging.getLogger(__name__)

OPERATIONS = ('add', 'sub', 'mul', 'div', 'neg', 'inv')


def _is_irreducible(p: int, coeffs: Sequence[int]) -> bool:
    """Irreducibility over F_p of the polynomial with low-degree-first coefficients."""
    poly = galois.Poly(list(reversed(coeffs)), field=galois.GF(p))
    return poly.is_irreducible()


def smallest_irreducible(p: int, k: int) -> Tuple[int, ...]:
    """
    Lexicographically smallest monic irreducible polynomial of degree k.

    Coefficients are compared low degree first, so itertools.product order
    (first position varies slowest) is exactly the search order.
    """
    for lower in itertools.product(range(p), repeat=k):
        if lower[0] == 0:
            continue  # divisible by x
        coeffs = lower + (1,)
        if _is_irreducible(p, coeffs):
            return coeffs
    raise FieldError(f'no irreducible polynomial of degree {k} over F_{p}')


def make_field(p: int, k: int = 1, modulus: Optional[Sequence[int]] = None) -> FieldSpec:
    """
    Build a validated FieldSpec for GF(p^k).

    Args:
        p: Odd prime characteristic
        k: Extension degree (k >= 1)
        modulus: Optional monic degree-k modulus, coefficients low degree first

    Returns:
        FieldSpec with the modulus pinned whenever k > 1
    """
    if not isinstance(p, int) or p < 2 or not galois.is_prime(p):
        raise FieldError(f'p={p} is not a prime')
    if p == 2:
        raise FieldError('even characteristic unsupported')
    if not isinstance(k, int) or k < 1:
        raise FieldError(f'exponent k={k} must be a positive integer')

    if k == 1:
        if modulus is not None:
            raise FieldError('a modulus only applies to extension fields (k > 1)')
        return FieldSpec(p, 1, None)

    if modulus is None:
        coeffs = smallest_irreducible(p, k)
        logger.debug(f'Default modulus for GF({p}^{k}): {coeffs}')
    else:
        coeffs = tuple(int(c) for c in modulus)
        if len(coeffs) != k + 1:
            raise FieldError(f'modulus {list(coeffs)} does not have degree {k}')
        if coeffs[-1] != 1:
            raise FieldError(f'modulus {list(coeffs)} is not monic')
        if any(not 0 <= c < p for c in coeffs):
            raise FieldError(f'modulus {list(coeffs)} has coefficients outside [0, {p})')
        if not _is_irreducible(p, coeffs):
            raise FieldError(f'modulus {list(coeffs)} is reducible over F_{p}')
    return FieldSpec(p, k, coeffs)


def field_arith(a: FieldElement, b: Optional[FieldElement], op: str) -> FieldElement:
    """
    Apply one field operation.

    Args:
        a: First operand
        b: Second operand (ignored for neg and inv)
        op: One of add, sub, mul, div, neg, inv

    Returns:
        The exact result under the canonical encoding
    """
    if op not in OPERATIONS:
        raise FieldError(f'unknown field operation {op!r}')
    if op in ('neg', 'inv'):
        return a.apply(op)
    if b is None or b.spec != a.spec:
        raise FieldError(f'operation {op} needs a second operand from {a.spec}')
    return a.apply(op, b)


def enumerate_field(spec: FieldSpec) -> List[FieldElement]:
    """All q elements in increasing index order."""
    return [FieldElement(spec, i) for i in range(spec.q)]


def coefficients(spec: FieldSpec, index: int) -> Tuple[int, ...]:
    """Base-p little-endian digits of an element index."""
    if not 0 <= index < spec.q:
        raise FieldError(f'element index {index} out of range for {spec}')
    digits = []
    for _ in range(spec.k):
        index, digit = divmod(index, spec.p)
        digits.append(digit)
    return tuple(digits)


def index_from_coefficients(spec: FieldSpec, coeffs: Sequence[int]) -> int:
    if len(coeffs) != spec.k or any(not 0 <= c < spec.p for c in coeffs):
        raise FieldError(f'coefficients {list(coeffs)} do not describe an element of {spec}')
    return sum(c * spec.p**i for i, c in enumerate(coeffs))
