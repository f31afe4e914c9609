# slopes.py - Slope conditions, slope subspaces and word spans

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .cartan import (
    CartanData,
    DegreeVector,
    SlopeVector,
    require_finite_type,
    scaling_patterns,
    unit_vector,
    vectors_up_to,
)
from .exceptions import EmptyBand, Inhomogeneous
from .laurent import (
    LaurentPoly,
    MonomialOrbit,
    PrefixConstraint,
    orbit_decompose,
    orbit_enumerate,
    orbit_sum,
    scaled_order,
    wheel_constraints,
)
from .linalg import ModularPolicy, QqMatrix, matrix_rank, nullspace, policy_for
from .scalars import QuadraticSurd, qq
from .shuffle import (
    MINUS,
    PLUS,
    ShuffleElement,
    Word,
    standard_denominator_degree,
    word_to_element,
)

logger = logging.getLogger(__name__)

KINDS = (">=", ">", "<=", "<")


def both_scaled(m: Sequence[int]) -> int:
    """Denominator factors with both variables scaled"""
    return sum(m[i] * m[j] for i, j in itertools.combinations(range(len(m)), 2))


def touched(n: Sequence[int], m: Sequence[int]) -> int:
    """Denominator factors with at least one scaled variable"""
    return sum(
        n[i] * n[j] - (n[i] - m[i]) * (n[j] - m[j])
        for i, j in itertools.combinations(range(len(n)), 2)
    )


def _family(sign: str, kind: str) -> Tuple[str, int]:
    """(end, direction): which xi-limit a kind constrains and the sign applied to p"""
    if kind not in KINDS:
        raise ValueError(f"slope kind must be one of {KINDS}, got {kind!r}")
    lower = kind.startswith(">")
    if sign == PLUS:
        return ("min", 1) if lower else ("max", 1)
    return ("max", -1) if lower else ("min", -1)


def _trivial_for(end: str, direction: int, p: SlopeVector) -> bool:
    """Whether an infinite slope makes the family vacuous"""
    effective = direction * p.infinity
    return effective < 0 if end == "min" else effective > 0


@dataclass
class SlopeConstraintSet:
    """Support conditions on numerator orbits for one (sign, p, kind) at hdeg n"""

    sign: str
    n: DegreeVector
    constraints: List[PrefixConstraint] = field(default_factory=list)
    lower: List[Optional[int]] = field(default_factory=list)
    upper: List[Optional[int]] = field(default_factory=list)

    @classmethod
    def empty(cls, sign: str, n: Sequence[int]) -> "SlopeConstraintSet":
        n = tuple(n)
        return cls(sign, n, [], [None] * len(n), [None] * len(n))

    @classmethod
    def build(cls, sign: str, p: SlopeVector, kind: str, n: Sequence[int]) -> "SlopeConstraintSet":
        result = cls.empty(sign, n)
        end, direction = _family(sign, kind)
        if p.is_infinite:
            if _trivial_for(end, direction, p):
                return result
            raise ValueError(f"slope {kind} {p} admits no element")
        strict = kind in (">", "<")
        for m in scaling_patterns(result.n):
            base = p.dot(m) * direction
            threshold = base + (both_scaled(m) if end == "min" else touched(result.n, m))
            result.constraints.append(PrefixConstraint(m, end, threshold, strict))
        for i, count in enumerate(result.n):
            if not count:
                continue
            threshold = p.entries[i] * direction + (
                0 if end == "min" else touched(result.n, unit_vector(len(result.n), i))
            )
            if end == "min":
                result.lower[i] = threshold.floor() + 1 if strict else threshold.ceil()
            else:
                result.upper[i] = threshold.ceil() - 1 if strict else threshold.floor()
        return result

    def merged(self, other: "SlopeConstraintSet") -> "SlopeConstraintSet":
        def pick(a, b, choose):
            if a is None:
                return b
            if b is None:
                return a
            return choose(a, b)

        return SlopeConstraintSet(
            self.sign,
            self.n,
            self.constraints + other.constraints,
            [pick(a, b, max) for a, b in zip(self.lower, other.lower)],
            [pick(a, b, min) for a, b in zip(self.upper, other.upper)],
        )

    def admits(self, orbit: MonomialOrbit) -> bool:
        return all(c.admits(orbit) for c in self.constraints)

    def enumerate(self, total_degree: int) -> List[MonomialOrbit]:
        return orbit_enumerate(self.n, total_degree, self.lower, self.upper, self.constraints)


def _compare(value: int, threshold: QuadraticSurd, end: str, strict: bool) -> bool:
    if end == "min":
        return value > threshold if strict else value >= threshold
    return value < threshold if strict else value <= threshold


def slope_test(element: ShuffleElement, p: SlopeVector, kind: str) -> bool:
    if element.is_zero():
        return True
    if not element.numerator.is_homogeneous():
        raise Inhomogeneous(f"slope test needs a homogeneous element, got {element}")
    end, direction = _family(element.sign, kind)
    if p.is_infinite:
        return _trivial_for(end, direction, p)
    strict = kind in (">", "<")
    n = element.hdeg
    for m in scaling_patterns(n):
        order = scaled_order(element.numerator, m, end)
        threshold = p.dot(m) * direction + (both_scaled(m) if end == "min" else touched(n, m))
        if not _compare(order, threshold, end, strict):
            return False
    return True


def limit_order(element: ShuffleElement, scaled: Sequence[int], end: str) -> int:
    """xi-order (end="min") or xi-degree (end="max") of rho/Delta when the variables
    at positions `scaled` are multiplied by xi, counted factor by factor"""
    scaled = set(scaled)
    pick = min if end == "min" else max
    numerator = pick(sum(e for k, e in enumerate(exps) if k in scaled) for exps in element.numerator.terms)
    colors = [i for i, count in enumerate(element.hdeg) for _ in range(count)]
    denominator = 0
    for x, y in itertools.combinations(range(len(colors)), 2):
        if colors[x] == colors[y]:
            continue
        hits = (x in scaled) + (y in scaled)
        if end == "min":
            denominator += hits == 2
        else:
            denominator += hits >= 1
    return numerator - denominator


# Bases


@dataclass
class SubspaceBasis:
    cartan: CartanData
    sign: str
    n: DegreeVector
    d: int
    orbits: List[MonomialOrbit]
    wheel: QqMatrix
    dim: int
    provenance: str = "rational"
    _kernel: Optional[List[List]] = None

    def kernel(self) -> List[List]:
        if self._kernel is None:
            if self.wheel.nrows:
                self._kernel = nullspace(self.wheel)
            else:
                self._kernel = [
                    [qq(int(k == j)) for k in range(len(self.orbits))]
                    for j in range(len(self.orbits))
                ]
        return self._kernel

    def elements(self) -> List[ShuffleElement]:
        elements = []
        for vector in self.kernel():
            numerator = LaurentPoly.zero(self.n)
            for coefficient, orbit in zip(vector, self.orbits):
                if coefficient:
                    numerator = numerator + orbit_sum(orbit).scale(coefficient)
            elements.append(ShuffleElement(self.cartan, self.sign, self.n, numerator))
        return elements

    def as_json(self) -> Dict:
        return {
            "sign": self.sign,
            "n": list(self.n),
            "d": self.d,
            "dim": self.dim,
            "orbits": [orbit.as_list() for orbit in self.orbits],
        }


def _rational_basis(
    c: CartanData,
    constraints: SlopeConstraintSet,
    d: int,
    mode: str = "exact",
    policy: Optional[ModularPolicy] = None,
) -> SubspaceBasis:
    require_finite_type(c)
    n = constraints.n
    orbits = constraints.enumerate(d + standard_denominator_degree(n))
    wheel = wheel_constraints(c, n, orbits)
    rank = matrix_rank(wheel, mode, policy_for(sum(n), mode, policy)) if wheel.nrows else 0
    basis = SubspaceBasis(c, constraints.sign, n, d, orbits, wheel, len(orbits) - rank)
    logger.debug(
        f"[DIMS] {constraints.sign} n={list(n)} d={d}: {len(orbits)} orbits, "
        f"wheel rank {rank}, dim {basis.dim}"
    )
    return basis


def basis_minus_strictneg(
    c: CartanData, n: Sequence[int], d: int, mode: str = "exact", policy=None
) -> SubspaceBasis:
    """S^-_{<0} at (-n, d)"""
    zero = SlopeVector.of([0] * c.rank)
    return _rational_basis(c, SlopeConstraintSet.build(MINUS, zero, "<", n), d, mode, policy)


def basis_plus_geq(
    c: CartanData, p: SlopeVector, n: Sequence[int], d: int, mode: str = "exact", policy=None
) -> SubspaceBasis:
    return _rational_basis(c, SlopeConstraintSet.build(PLUS, p, ">=", n), d, mode, policy)


def _below(p1: SlopeVector, p2: SlopeVector) -> bool:
    if p1.infinity > 0 or p2.infinity < 0:
        return False
    if p1.infinity < 0 or p2.infinity > 0:
        return True
    return all(a < b for a, b in zip(p1.entries, p2.entries))


def basis_minus_band(
    c: CartanData,
    p1: SlopeVector,
    p2: SlopeVector,
    n: Sequence[int],
    d: int,
    mode: str = "exact",
    policy=None,
) -> SubspaceBasis:
    """S^-_{>p1} cap S^-_{<p2} at (-n, d)"""
    if not _below(p1, p2):
        raise EmptyBand(f"band needs p1 < p2 componentwise, got p1={p1} p2={p2}")
    constraints = SlopeConstraintSet.build(MINUS, p1, ">", n).merged(
        SlopeConstraintSet.build(MINUS, p2, "<", n)
    )
    return _rational_basis(c, constraints, d, mode, policy)


def slope_subalgebra_dim(
    c: CartanData, p: SlopeVector, n: Sequence[int], mode: str = "exact", policy=None
) -> int:
    """dim B_{p|n}"""
    require_finite_type(c)
    n = tuple(n)
    if not any(n):
        return 1
    level = p.dot(n)
    if not level.is_integer():
        return 0
    constraints = SlopeConstraintSet.build(PLUS, p, ">=", n).merged(
        SlopeConstraintSet.build(PLUS, p, "<=", n)
    )
    return _rational_basis(c, constraints, int(level), mode, policy).dim


# Word spans


def _compositions(parts: int, total: int, floors: Sequence[int]):
    if parts == 0:
        if total == 0:
            yield ()
        return
    rest_floor = sum(floors[1:])
    for value in range(floors[0], total - rest_floor + 1):
        for tail in _compositions(parts - 1, total - value, floors[1:]):
            yield (value,) + tail


def span_words(
    rank: int, n: Sequence[int], d: int, letter_floor: Union[int, Sequence[int]] = 0, sign: str = PLUS
) -> List[Word]:
    floors = [letter_floor] * rank if isinstance(letter_floor, int) else list(letter_floor)
    orderings = sorted(set(itertools.permutations(
        [i for i in range(rank) for _ in range(n[i])]
    )))
    words = []
    for ordering in orderings:
        for degrees in _compositions(len(ordering), d, [floors[i] for i in ordering]):
            words.append(Word(tuple(zip(ordering, degrees)), sign))
    return words


def orbit_matrix(elements: Sequence[ShuffleElement], labels: Sequence[str]) -> QqMatrix:
    """Rows: elements in monomial-orbit coordinates"""
    coordinates = [orbit_decompose(e.numerator) for e in elements]
    columns = sorted(set().union(*coordinates)) if coordinates else []
    return QqMatrix(
        [[row.get(orbit, qq(0)) for orbit in columns] for row in coordinates],
        row_labels=labels,
        col_labels=[str(orbit) for orbit in columns],
    )


def word_span_dim(
    c: CartanData,
    n: Sequence[int],
    d: int,
    letter_floor: Union[int, Sequence[int]] = 0,
    mode: str = "exact",
    policy=None,
) -> int:
    n = tuple(n)
    if not any(n):
        return int(d == 0)
    words = span_words(c.rank, n, d, letter_floor)
    if not words:
        return 0
    elements = [word_to_element(c, w) for w in words]
    matrix = orbit_matrix(elements, [str(w) for w in words])
    return matrix_rank(matrix, mode, policy_for(sum(n), mode, policy))


def word_span_b0_dims(
    c: CartanData, bound: Sequence[int], mode: str = "exact", policy=None
) -> Dict[DegreeVector, int]:
    """Dimensions of the span of words in degree-0 letters, for all n <= bound"""
    dims = {n: word_span_dim(c, n, 0, 0, mode, policy) for n in vectors_up_to(bound)}
    logger.info(f"[DIMS] word-span B_0 dims up to {list(bound)}: {len(dims)} cells")
    return dims
