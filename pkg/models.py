"""
Domain Models

Defines the value types shared by the services: fields and their
elements, point sets, bilinear forms, subspaces, the set-valued results
and counters, proof traces and coverage certificates, and reports.

Field data are always carried as canonical element indices (ints) so that
every model is hashable and serialises without loss.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Any, Dict, FrozenSet, Iterator, List, Optional, Tuple, Type

import galois
import numpy as np

from services.errors import DimensionError, FieldError, SingularFormError

# A point of F_q^d as a tuple of element indices
Vector = Tuple[int, ...]


@lru_cache(maxsize=None)
def _galois_field(p: int, k: int, modulus: Optional[Tuple[int, ...]]) -> Type[galois.FieldArray]:
    """Build (once) the galois array class for GF(p^k) with the given modulus."""
    if k == 1:
        return galois.GF(p)
    prime_field = galois.GF(p)
    # galois wants coefficients highest degree first
    poly = galois.Poly(list(reversed(modulus)), field=prime_field)
    return galois.GF(p**k, irreducible_poly=poly)


def jsonable(value: Any) -> Any:
    """Convert exact values to report-friendly primitives."""
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else f'{value.numerator}/{value.denominator}'
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    return value


@dataclass(frozen=True)
class FieldSpec:
    """The field F_q = GF(p^k); `modulus` is c_0..c_k, low degree first."""

    p: int
    k: int = 1
    modulus: Optional[Tuple[int, ...]] = None

    @property
    def q(self) -> int:
        return self.p**self.k

    @property
    def GF(self) -> Type[galois.FieldArray]:
        return _galois_field(self.p, self.k, self.modulus)

    def element(self, index: int) -> 'FieldElement':
        return FieldElement(self, index)

    def array(self, values) -> galois.FieldArray:
        """Wrap element indices (any nesting) as a field array."""
        return self.GF(np.asarray(values, dtype=np.int64))

    def __str__(self) -> str:
        return f'GF({self.p}^{self.k})' if self.k > 1 else f'GF({self.p})'

    def to_dict(self) -> dict:
        data = {'p': self.p, 'k': self.k, 'q': self.q}
        if self.modulus is not None:
            data['modulus'] = list(self.modulus)
        return data


@dataclass(frozen=True)
class FieldElement:
    """An element of a FieldSpec, stored by canonical index."""

    spec: FieldSpec
    index: int

    def __post_init__(self):
        if not 0 <= self.index < self.spec.q:
            raise FieldError(f'element index {self.index} out of range for {self.spec}')

    def _coerce(self, other) -> 'FieldElement':
        if isinstance(other, FieldElement):
            if other.spec != self.spec:
                raise FieldError(f'cannot combine elements of {self.spec} and {other.spec}')
            return other
        if isinstance(other, int):
            return FieldElement(self.spec, other)
        return NotImplemented

    def apply(self, op: str, other: Optional['FieldElement'] = None) -> 'FieldElement':
        """Evaluate a field operation through the galois arithmetic."""
        GF = self.spec.GF
        a = GF(self.index)
        if op == 'neg':
            result = -a
        elif op == 'inv':
            if self.index == 0:
                raise ZeroDivisionError(f'inverse of zero in {self.spec}')
            result = GF(1) / a
        else:
            if other is None:
                raise FieldError(f'operation {op!r} needs two operands')
            b = GF(other.index)
            if op == 'add':
                result = a + b
            elif op == 'sub':
                result = a - b
            elif op == 'mul':
                result = a * b
            elif op == 'div':
                if other.index == 0:
                    raise ZeroDivisionError(f'division by zero in {self.spec}')
                result = a / b
            else:
                raise FieldError(f'unknown field operation {op!r}')
        return FieldElement(self.spec, int(result))

    def __add__(self, other):
        other = self._coerce(other)
        return other if other is NotImplemented else self.apply('add', other)

    def __sub__(self, other):
        other = self._coerce(other)
        return other if other is NotImplemented else self.apply('sub', other)

    def __mul__(self, other):
        other = self._coerce(other)
        return other if other is NotImplemented else self.apply('mul', other)

    def __truediv__(self, other):
        other = self._coerce(other)
        return other if other is NotImplemented else self.apply('div', other)

    def __neg__(self):
        return self.apply('neg')

    def __pow__(self, exponent: int):
        return FieldElement(self.spec, int(self.spec.GF(self.index) ** exponent))

    def __int__(self) -> int:
        return self.index

    def __repr__(self) -> str:
        return f'<FieldElement {self.index} of {self.spec}>'


@dataclass(frozen=True)
class PointSet:
    """A finite subset of F_q^d; points are distinct and sorted."""

    spec: FieldSpec
    d: int
    points: Tuple[Vector, ...]

    @classmethod
    def from_vectors(cls, spec: FieldSpec, d: int, vectors) -> 'PointSet':
        cleaned = set()
        for vector in vectors:
            vector = tuple(int(c) for c in vector)
            if len(vector) != d:
                raise DimensionError(f'point {vector} does not have dimension {d}')
            if any(not 0 <= c < spec.q for c in vector):
                raise FieldError(f'point {vector} has a coordinate outside [0, {spec.q})')
            cleaned.add(vector)
        return cls(spec, d, tuple(sorted(cleaned)))

    @classmethod
    def from_array(cls, spec: FieldSpec, array) -> 'PointSet':
        ints = np.asarray(array.view(np.ndarray) if isinstance(array, galois.FieldArray) else array)
        d = ints.shape[1]
        return cls.from_vectors(spec, d, (tuple(row) for row in ints.tolist()))

    @cached_property
    def array(self) -> galois.FieldArray:
        """The points as an (n, d) field array."""
        if not self.points:
            return self.spec.GF.Zeros((0, self.d))
        return self.spec.array(self.points)

    @property
    def has_zero(self) -> bool:
        return (0,) * self.d in self._lookup

    @cached_property
    def _lookup(self) -> FrozenSet[Vector]:
        return frozenset(self.points)

    def without_zero(self) -> 'PointSet':
        return PointSet(self.spec, self.d, tuple(v for v in self.points if any(v)))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Vector]:
        return iter(self.points)

    def __contains__(self, vector) -> bool:
        return tuple(vector) in self._lookup

    def to_dict(self) -> dict:
        return {
            'field': self.spec.to_dict(),
            'd': self.d,
            'size': len(self.points),
            'points': [list(v) for v in self.points],
        }


@dataclass(frozen=True)
class BilinearForm:
    """B(x, y) = x^T M y with a nonsingular Gram matrix M."""

    spec: FieldSpec
    gram: Tuple[Vector, ...]

    def __post_init__(self):
        d = len(self.gram)
        if d == 0 or any(len(row) != d for row in self.gram):
            raise DimensionError('Gram matrix must be square and nonempty')
        if int(np.linalg.det(self.matrix)) == 0:
            raise SingularFormError(f'Gram matrix {[list(r) for r in self.gram]} is singular')

    @classmethod
    def identity(cls, spec: FieldSpec, d: int) -> 'BilinearForm':
        return cls(spec, tuple(tuple(int(i == j) for j in range(d)) for i in range(d)))

    @property
    def d(self) -> int:
        return len(self.gram)

    @property
    def matrix(self) -> galois.FieldArray:
        return self.spec.array(self.gram)

    @property
    def is_dot(self) -> bool:
        return self == BilinearForm.identity(self.spec, self.d)

    def to_dict(self) -> dict:
        return {'gram': [list(row) for row in self.gram], 'dot': self.is_dot}


@dataclass(frozen=True)
class Subspace:
    """A k-dimensional subspace held by its canonical RREF basis."""

    spec: FieldSpec
    d: int
    basis: Tuple[Vector, ...]

    @property
    def dim_k(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> Tuple[int, ...]:
        return tuple(next(j for j, c in enumerate(row) if c) for row in self.basis)

    @property
    def size(self) -> int:
        return self.spec.q**self.dim_k

    @cached_property
    def array(self) -> galois.FieldArray:
        if not self.basis:
            return self.spec.GF.Zeros((0, self.d))
        return self.spec.array(self.basis)

    def sort_key(self):
        return (self.pivots, self.basis)

    def to_dict(self) -> dict:
        return {'k': self.dim_k, 'basis': [list(row) for row in self.basis]}


@dataclass(frozen=True)
class SubspaceFamily:
    """Subspaces of one dimension k inside F_q^d, canonically ordered."""

    spec: FieldSpec
    k: int
    d: int
    members: Tuple[Subspace, ...]

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[Subspace]:
        return iter(self.members)

    def to_dict(self) -> dict:
        return {
            'k': self.k,
            'd': self.d,
            'count': len(self.members),
            'members': [m.to_dict()['basis'] for m in self.members],
        }


@dataclass(frozen=True)
class ScalarSet:
    """A set of field elements; `zero_stripped` marks starred sets."""

    elements: FrozenSet[int]
    zero_stripped: bool = False

    def __post_init__(self):
        if self.zero_stripped and 0 in self.elements:
            raise FieldError('a zero-stripped set cannot contain 0')

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, value) -> bool:
        return int(value) in self.elements

    def sorted(self) -> List[int]:
        return sorted(self.elements)

    def to_dict(self) -> dict:
        return {'size': len(self.elements), 'zero_stripped': self.zero_stripped, 'values': self.sorted()}


@dataclass(frozen=True)
class VectorSet:
    """A set of vectors of F_q^d (the cross-product set)."""

    vectors: FrozenSet[Vector]

    def __len__(self) -> int:
        return len(self.vectors)

    def __contains__(self, vector) -> bool:
        return tuple(vector) in self.vectors

    def sorted(self) -> List[Vector]:
        return sorted(self.vectors)

    def to_dict(self) -> dict:
        return {'size': len(self.vectors), 'vectors': [list(v) for v in self.sorted()]}


@dataclass(frozen=True)
class WedgeCounter:
    """g_E: multiplicity of each wedge value over all ordered (d-1)-tuples."""

    d: int
    counts: Dict[Vector, int]

    def __getitem__(self, vector) -> int:
        return self.counts.get(tuple(vector), 0)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def support(self) -> FrozenSet[Vector]:
        return frozenset(v for v, n in self.counts.items() if n)

    def to_dict(self) -> dict:
        return {
            'total': self.total,
            'counts': [[list(v), n] for v, n in sorted(self.counts.items())],
        }


@dataclass(frozen=True)
class CountTable:
    """Exact incidence counts nu_t(E, F) for every t in F_q."""

    form: BilinearForm
    size_e: int
    size_f: int
    counts: Dict[int, int]

    @property
    def q(self) -> int:
        return self.form.spec.q

    @property
    def main_term(self) -> Fraction:
        return Fraction(self.size_e * self.size_f, self.q)

    def scaled_deviation(self, t: int) -> int:
        """q * nu_t - |E||F|, i.e. q times the remainder term."""
        return self.q * self.counts.get(t, 0) - self.size_e * self.size_f

    def deviation(self, t: int) -> Fraction:
        return Fraction(self.scaled_deviation(t), self.q)

    def to_dict(self) -> dict:
        return {
            'form': self.form.to_dict(),
            'size_e': self.size_e,
            'size_f': self.size_f,
            'main_term': jsonable(self.main_term),
            'table': [
                {'t': t, 'nu': self.counts.get(t, 0), 'scaled_deviation': self.scaled_deviation(t)}
                for t in range(self.q)
            ],
        }


@dataclass(frozen=True)
class HeavyFamily:
    """Hyperplanes H with |E ∩ H| above a threshold, with their counts."""

    threshold: int
    members: Tuple[Tuple[Subspace, int], ...]

    def __len__(self) -> int:
        return len(self.members)

    @property
    def total(self) -> int:
        return sum(count for _, count in self.members)

    def to_dict(self) -> dict:
        return {
            'threshold': self.threshold,
            'count': len(self.members),
            'total_incidences': self.total,
            'members': [{'basis': h.to_dict()['basis'], 'size': n} for h, n in self.members],
        }


_RELATIONS = {
    '=': lambda a, b: a == b,
    '>': lambda a, b: a > b,
    '>=': lambda a, b: a >= b,
    '<': lambda a, b: a < b,
    '<=': lambda a, b: a <= b,
}


@dataclass
class ProofStep:
    label: str
    lhs: Any
    relation: str
    rhs: Any
    passed: bool
    note: str = ''

    def to_dict(self) -> dict:
        data = {
            'label': self.label,
            'lhs': jsonable(self.lhs),
            'relation': self.relation,
            'rhs': jsonable(self.rhs),
            'pass': bool(self.passed),
        }
        if self.note:
            data['note'] = self.note
        return data


@dataclass
class ProofTrace:
    """An ordered record of displayed inequalities evaluated on one set."""

    name: str
    parameters: Dict[str, Any] = field(default_factory=dict)
    steps: List[ProofStep] = field(default_factory=list)

    def add(self, label: str, lhs, relation: str, rhs, note: str = '', passed: Optional[bool] = None) -> ProofStep:
        """Record a step; the pass flag is computed from the relation unless given."""
        if passed is None:
            passed = _RELATIONS[relation](lhs, rhs)
        step = ProofStep(label, lhs, relation, rhs, bool(passed), note)
        self.steps.append(step)
        return step

    def step(self, label: str) -> ProofStep:
        return next(s for s in self.steps if s.label == label)

    @property
    def overall(self) -> bool:
        return all(s.passed for s in self.steps)

    def to_dict(self) -> dict:
        return {
            'name': self.name,
            'parameters': {k: jsonable(v) for k, v in self.parameters.items()},
            'overall': self.overall,
            'steps': [s.to_dict() for s in self.steps],
        }


@dataclass
class CoverageCertificate:
    """Witness d-tuples for every value of vol(E) found by a search."""

    spec: FieldSpec
    d: int
    size: int
    witnesses: Dict[int, Tuple[Vector, ...]]
    exhaustive: bool = False
    rank_deficient: bool = False
    seed: Optional[int] = None
    verified: bool = True

    @property
    def missing(self) -> FrozenSet[int]:
        return frozenset(range(self.spec.q)) - frozenset(self.witnesses)

    @property
    def covered(self) -> bool:
        return not self.missing

    @property
    def covered_values(self) -> List[int]:
        return sorted(self.witnesses)

    @property
    def hypothesis_met(self) -> bool:
        # the statement starts at d = 3; in the plane a coordinate line has q points and vol = {0}
        return self.d >= 3 and self.size >= (self.d - 1) * self.spec.q ** (self.d - 1)

    @property
    def in_proof_range(self) -> bool:
        return self.spec.q > self.d

    @property
    def red_flag(self) -> bool:
        return (self.hypothesis_met and not self.covered) or not self.verified

    def to_dict(self) -> dict:
        return {
            'field': self.spec.to_dict(),
            'd': self.d,
            'size': self.size,
            'hypothesis_met': self.hypothesis_met,
            'in_proof_range': self.in_proof_range,
            'seed': self.seed,
            'exhaustive': self.exhaustive,
            'rank_deficient': self.rank_deficient,
            'covered': self.covered,
            'covered_values': self.covered_values,
            'missing': sorted(self.missing),
            'verified': self.verified,
            'red_flag': self.red_flag,
            'witnesses': [
                {'t': t, 'tuple': [list(v) for v in self.witnesses[t]]} for t in self.covered_values
            ],
        }


@dataclass(frozen=True)
class ScanRow:
    size: int
    trials: int
    covered: int
    exhaustive: int

    @property
    def frequency(self) -> Fraction:
        return Fraction(self.covered, self.trials) if self.trials else Fraction(0)

    def to_dict(self) -> dict:
        return {
            'size': self.size,
            'trials': self.trials,
            'covered': self.covered,
            'frequency': round(float(self.frequency), 6),
            'exhaustive_trials': self.exhaustive,
        }


@dataclass(frozen=True)
class ScanTable:
    spec: FieldSpec
    d: int
    seed: int
    family: str
    rows: Tuple[ScanRow, ...]

    def to_dict(self) -> dict:
        return {
            'field': self.spec.to_dict(),
            'd': self.d,
            'seed': self.seed,
            'family': self.family,
            'theorem_threshold': (self.d - 1) * self.spec.q ** (self.d - 1),
            'table': [row.to_dict() for row in self.rows],
        }


@dataclass
class Report:
    """A self-contained record of one command invocation."""

    command: str
    parameters: Dict[str, Any]
    results: Dict[str, Any]
    tool: str = 'volset'
    version: str = ''
    timing: Optional[float] = None
    exit_code: int = 0

    def to_dict(self) -> dict:
        data = {
            'tool': self.tool,
            'version': self.version,
            'command': self.command,
            'parameters': self.parameters,
            'results': self.results,
        }
        if self.timing is not None:
            data['timing'] = {'seconds': round(self.timing, 3)}
        return data


@dataclass(frozen=True)
class HyperplaneRecord:
    """One member H of G(d-1, d) with |E ∩ H| and D*_{E∩H, d-1}."""

    subspace: Subspace
    size: int
    dstar: ScalarSet
    normal: Vector

    def to_dict(self) -> dict:
        return {
            'basis': self.subspace.to_dict()['basis'],
            'normal': list(self.normal),
            'size': self.size,
            'dstar': self.dstar.sorted(),
        }


@dataclass(frozen=True)
class LineRestriction:
    """F*_E on the line through x compared with D*_{E ∩ x^⊥, d-1}."""

    x: Vector
    multipliers: ScalarSet
    dstar: ScalarSet
    scale: int

    def to_dict(self) -> dict:
        return {
            'x': list(self.x),
            'multipliers': self.multipliers.sorted(),
            'dstar': self.dstar.sorted(),
            'scale': self.scale,
        }
