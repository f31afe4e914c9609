# cartan.py - Cartan data, root systems, a-coefficients and slope vectors

import itertools
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from typing import Dict, List, Optional, Sequence, Tuple

from django.conf import settings

from .exceptions import (
    GcdViolation,
    IntegralityViolation,
    MissingDimensionTable,
    NonSymmetric,
    NotFiniteType,
    PositivityViolation,
    SignViolation,
    UnknownCartanType,
)
from .scalars import QuadraticSurd

logger = logging.getLogger(__name__)

DegreeVector = Tuple[int, ...]


# Degree vectors


def zero_vector(rank: int) -> DegreeVector:
    return (0,) * rank


def unit_vector(rank: int, i: int) -> DegreeVector:
    return tuple(1 if k == i else 0 for k in range(rank))


def vec_add(m: Sequence[int], n: Sequence[int]) -> DegreeVector:
    return tuple(a + b for a, b in zip(m, n))


def vec_sub(m: Sequence[int], n: Sequence[int]) -> DegreeVector:
    return tuple(a - b for a, b in zip(m, n))


def vec_le(m: Sequence[int], n: Sequence[int]) -> bool:
    """Componentwise partial order m <= n"""
    return all(a <= b for a, b in zip(m, n))


def dot(m: Sequence[int], n: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(m, n))


def vectors_up_to(bound: Sequence[int], include_zero: bool = True) -> List[DegreeVector]:
    """All 0 <= n <= bound in lexicographic order"""
    vectors = [tuple(v) for v in itertools.product(*(range(b + 1) for b in bound))]
    if not include_zero:
        vectors = [v for v in vectors if any(v)]
    return vectors


def scaling_patterns(n: Sequence[int]) -> List[DegreeVector]:
    """All 0 < m <= n"""
    return vectors_up_to(n, include_zero=False)


# Cartan data


@dataclass(frozen=True)
class CartanData:
    """Symmetrized Cartan matrix (d_ij) with d_ii even and gcd 2"""

    d: Tuple[Tuple[int, ...], ...]
    finite_type_tag: Optional[str] = None

    @property
    def rank(self) -> int:
        return len(self.d)

    @property
    def colors(self) -> Tuple[int, ...]:
        return tuple(range(1, self.rank + 1))

    def entry(self, i: int, j: int) -> int:
        return self.d[i][j]

    def cartan_integer(self, i: int, j: int) -> int:
        """a_ij = 2 d_ij / d_ii"""
        return 2 * self.d[i][j] // self.d[i][i]

    @property
    def label(self) -> str:
        return self.finite_type_tag or "custom"

    def as_json(self) -> Dict:
        return {"d": [list(row) for row in self.d], "type": self.finite_type_tag}

    def __str__(self):
        return f"{self.label} {[list(row) for row in self.d]}"


def validate_cartan(d: Sequence[Sequence[int]], tag: Optional[str] = None) -> CartanData:
    rows = [list(row) for row in d]
    rank = len(rows)
    if rank == 0 or any(len(row) != rank for row in rows):
        raise NonSymmetric("Cartan matrix must be square and non-empty")
    if any(not isinstance(x, int) or isinstance(x, bool) for row in rows for x in row):
        raise NonSymmetric("Cartan matrix entries must be integers")
    for i, j in itertools.product(range(rank), repeat=2):
        if rows[i][j] != rows[j][i]:
            raise NonSymmetric(f"d[{i + 1}][{j + 1}] != d[{j + 1}][{i + 1}]")
    for i in range(rank):
        if rows[i][i] <= 0 or rows[i][i] % 2:
            raise PositivityViolation(
                f"d[{i + 1}][{i + 1}] = {rows[i][i]} must be positive and even"
            )
    gcd = reduce(math.gcd, (rows[i][i] for i in range(rank)))
    if gcd != 2:
        raise GcdViolation(f"gcd of the diagonal is {gcd}, expected 2")
    for i, j in itertools.product(range(rank), repeat=2):
        if i == j:
            continue
        if rows[i][j] > 0:
            raise SignViolation(f"off-diagonal d[{i + 1}][{j + 1}] = {rows[i][j]} > 0")
        if (2 * rows[i][j]) % rows[i][i]:
            raise IntegralityViolation(
                f"2 d[{i + 1}][{j + 1}] / d[{i + 1}][{i + 1}] is not an integer"
            )
    return CartanData(tuple(tuple(row) for row in rows), tag)


CATALOG: Dict[str, List[List[int]]] = {
    "A1": [[2]],
    "A2": [[2, -1], [-1, 2]],
    "A3": [[2, -1, 0], [-1, 2, -1], [0, -1, 2]],
    "A4": [[2, -1, 0, 0], [-1, 2, -1, 0], [0, -1, 2, -1], [0, 0, -1, 2]],
    "B2": [[4, -2], [-2, 2]],
    "B3": [[4, -2, 0], [-2, 4, -2], [0, -2, 2]],
    "C3": [[2, -1, 0], [-1, 2, -2], [0, -2, 4]],
    "D4": [[2, -1, 0, 0], [-1, 2, -1, -1], [0, -1, 2, 0], [0, -1, 0, 2]],
    "G2": [[6, -3], [-3, 2]],
}

CATALOG_ROOTS: Dict[str, List[DegreeVector]] = {
    "A1": [(1,)],
    "A2": [(1, 0), (0, 1), (1, 1)],
    "A3": [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (0, 1, 1), (1, 1, 1)],
    "B2": [(1, 0), (0, 1), (1, 1), (1, 2)],
    "G2": [(1, 0), (0, 1), (1, 1), (1, 2), (1, 3), (2, 3)],
}


def cartan_from_catalog(name: str) -> CartanData:
    key = name.strip().upper()
    if key not in CATALOG:
        raise UnknownCartanType(
            f"unknown Cartan type {name!r}; choose one of {', '.join(sorted(CATALOG))}"
        )
    return validate_cartan(CATALOG[key], tag=key)


def cartan_from_json(payload: Dict) -> CartanData:
    if not isinstance(payload, dict) or "d" not in payload:
        raise NonSymmetric('Cartan JSON must be an object {"d": [[...]]}')
    tag = payload.get("type")
    cartan = validate_cartan(payload["d"])
    if tag and tag in CATALOG and [list(r) for r in cartan.d] == CATALOG[tag]:
        return CartanData(cartan.d, tag)
    # recognize catalog matrices supplied verbatim
    for name, matrix in CATALOG.items():
        if [list(r) for r in cartan.d] == matrix:
            return CartanData(cartan.d, name)
    return cartan


def bilinear(c: CartanData, m: Sequence[int], n: Sequence[int]) -> int:
    """(m, n) = sum_ij m_i d_ij n_j"""
    return sum(m[i] * c.d[i][j] * n[j] for i in range(c.rank) for j in range(c.rank))


# Root systems


@dataclass(frozen=True)
class RootSystem:
    cartan: CartanData
    positive_roots: Tuple[DegreeVector, ...]

    def __len__(self):
        return len(self.positive_roots)

    def __contains__(self, n):
        return tuple(n) in self.positive_roots

    @property
    def highest_root(self) -> DegreeVector:
        return max(self.positive_roots, key=lambda root: (sum(root), root))

    def heights(self) -> Dict[DegreeVector, int]:
        return {root: sum(root) for root in self.positive_roots}


def reflect(c: CartanData, i: int, beta: Sequence[int]) -> DegreeVector:
    """s_i(beta) = beta - <beta, alpha_i^vee> alpha_i"""
    coroot_pairing = sum(beta[j] * c.cartan_integer(i, j) for j in range(c.rank))
    return tuple(b - coroot_pairing if k == i else b for k, b in enumerate(beta))


def reflection_closure(c: CartanData, cap: Optional[int] = None) -> List[DegreeVector]:
    cap = cap or settings.LOOPCHAR_ROOT_CLOSURE_CAP
    simple = [unit_vector(c.rank, i) for i in range(c.rank)]
    found = set(simple)
    frontier = list(simple)
    while frontier:
        new_frontier = []
        for beta in frontier:
            for i in range(c.rank):
                gamma = reflect(c, i, beta)
                if any(x < 0 for x in gamma) or gamma in found:
                    continue
                found.add(gamma)
                new_frontier.append(gamma)
                if len(found) > cap:
                    raise NotFiniteType(
                        f"reflection closure of {c} exceeded {cap} positive roots"
                    )
        frontier = new_frontier
    return sorted(found, key=lambda root: (sum(root), tuple(-x for x in root)))


@lru_cache(maxsize=None)
def positive_roots(c: CartanData) -> RootSystem:
    tag = c.finite_type_tag
    if tag in CATALOG_ROOTS and [list(r) for r in c.d] == CATALOG[tag]:
        roots = list(CATALOG_ROOTS[tag])
    else:
        roots = reflection_closure(c)
    logger.debug(f"[ROOTS] {c.label}: {len(roots)} positive roots")
    return RootSystem(c, tuple(roots))


def require_finite_type(c: CartanData) -> RootSystem:
    return positive_roots(c)


# a-coefficients


@dataclass
class ACoefficientTable:
    entries: Dict[DegreeVector, int]
    bound: DegreeVector
    mode: str = "finite"
    verified: bool = True

    def value(self, n: Sequence[int]) -> int:
        return self.entries.get(tuple(n), 0)

    def support(self) -> List[DegreeVector]:
        return [n for n, a in sorted(self.entries.items()) if a]


def a_table(
    c: CartanData,
    bound: Sequence[int],
    mode: str = "finite",
    b_dims: Optional[Dict[DegreeVector, int]] = None,
) -> ACoefficientTable:
    bound = tuple(bound)
    if mode == "finite":
        roots = positive_roots(c)
        entries = {n: int(n in roots) for n in vectors_up_to(bound, include_zero=False)}
        return ACoefficientTable(entries, bound, mode)
    if mode == "recursion":
        if b_dims is None:
            raise MissingDimensionTable("recursion mode needs a B_{0|n} dimension table")
        from .characters import a_from_b_dims

        table = a_from_b_dims(b_dims, bound)
        table.mode = mode
        return table
    if mode == "exploratory":
        from .characters import a_from_b_dims
        from .slopes import word_span_b0_dims

        table = a_from_b_dims(word_span_b0_dims(c, bound), bound)
        table.mode = mode
        table.verified = False
        return table
    raise ValueError(f"unknown a-table mode {mode!r}")


# Slope vectors


@dataclass(frozen=True)
class SlopeVector:
    """p in Q(sqrt 2)^I, or one of the sentinels -inf / +inf"""

    entries: Tuple[QuadraticSurd, ...] = ()
    infinity: int = 0

    @classmethod
    def of(cls, values: Sequence) -> "SlopeVector":
        return cls(tuple(QuadraticSurd.coerce(v) for v in values))

    @classmethod
    def minus_infinity(cls) -> "SlopeVector":
        return cls((), -1)

    @classmethod
    def plus_infinity(cls) -> "SlopeVector":
        return cls((), 1)

    @property
    def is_infinite(self) -> bool:
        return self.infinity != 0

    def dot(self, n: Sequence[int]) -> QuadraticSurd:
        if self.is_infinite:
            raise ValueError("cannot pair an infinite slope with a degree vector")
        return sum((p * k for p, k in zip(self.entries, n)), QuadraticSurd(0))

    def shifted(self, r: Sequence[int]) -> "SlopeVector":
        if self.is_infinite:
            return self
        return SlopeVector(tuple(p + k for p, k in zip(self.entries, r)))

    def __neg__(self):
        if self.is_infinite:
            return SlopeVector((), -self.infinity)
        return SlopeVector(tuple(-p for p in self.entries))

    def __str__(self):
        if self.is_infinite:
            return "inf" if self.infinity > 0 else "-inf"
        return ",".join(str(p) for p in self.entries)


@dataclass
class GenericityVerdict:
    generic: bool
    bound: DegreeVector
    generator: Optional[DegreeVector] = None
    witnesses: Optional[Tuple[DegreeVector, DegreeVector]] = None
    integral_vectors: List[DegreeVector] = field(default_factory=list)
    note: str = "decided within the bounded window only"


def _primitive(v: Sequence[int]) -> Tuple[DegreeVector, int]:
    g = reduce(math.gcd, (abs(x) for x in v))
    primitive = tuple(x // g for x in v)
    if next(x for x in primitive if x) < 0:
        primitive = tuple(-x for x in primitive)
        g = -g
    return primitive, g


def is_generic(p: SlopeVector, bound: Sequence[int]) -> GenericityVerdict:
    """Decide whether {n : |n| <= bound, p.n in Z} lies in a single Z m.

    Witness pairs prefer vectors with fewer nonzero coordinates, then smaller norm, so
    coordinate multiples such as (2,0) and (0,2) are reported first.
    """
    bound = tuple(bound)
    window = itertools.product(*(range(-b, b + 1) for b in bound))
    # one representative per +-pair
    candidates = sorted(
        (n for n in window if any(n) and next(x for x in n if x) > 0),
        key=lambda n: (
            sum(1 for x in n if x),
            sum(abs(x) for x in n),
            tuple(-x for x in n),
        ),
    )
    integral = [n for n in candidates if p.dot(n).is_integer()]
    if not integral:
        return GenericityVerdict(True, bound, None, None, integral)
    direction, _ = _primitive(integral[0])
    multiples = []
    for n in integral:
        primitive, k = _primitive(n)
        if primitive != direction:
            return GenericityVerdict(False, bound, None, (integral[0], n), integral)
        multiples.append(abs(k))
    step = reduce(math.gcd, multiples)
    generator = tuple(step * x for x in direction)
    return GenericityVerdict(True, bound, generator, None, integral)
