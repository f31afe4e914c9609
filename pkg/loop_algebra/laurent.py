# laurent.py - Sparse colored Laurent polynomials, orbit bases and wheel constraints

import itertools
import logging
import random
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from django.conf import settings
from sympy.utilities.iterables import multiset_permutations

from .cartan import CartanData, DegreeVector
from .exceptions import InfinitePolytope, Inhomogeneous, ZeroPolynomial
from .linalg import QqMatrix
from .scalars import ONE, QuadraticSurd, QqScalar, format_qq, q, qq

logger = logging.getLogger(__name__)

Exponents = Tuple[int, ...]
Bound = Optional[Union[int, Sequence[Optional[int]]]]


def color_offsets(n: Sequence[int]) -> List[int]:
    offsets, total = [], 0
    for count in n:
        offsets.append(total)
        total += count
    return offsets


@dataclass(frozen=True)
class VarId:
    """Variable z_{color, slot}; both indices start at 0"""

    color: int
    slot: int

    def __str__(self):
        return f"z[{self.color + 1},{self.slot + 1}]"


def variables(n: Sequence[int]) -> List[VarId]:
    return [VarId(i, a) for i, count in enumerate(n) for a in range(count)]


def position(n: Sequence[int], color: int, slot: int) -> int:
    return color_offsets(n)[color] + slot


class LaurentPoly:
    """Map from exponent vectors to Q(q) coefficients over the variables of n"""

    __slots__ = ("ambient", "_terms")

    def __init__(self, ambient: Sequence[int], terms: Optional[Dict] = None):
        self.ambient = tuple(ambient)
        size = sum(self.ambient)
        self._terms: Dict[Exponents, QqScalar] = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != size:
                raise ValueError(f"exponent vector {exps} does not fit ambient {self.ambient}")
            coeff = qq(coeff)
            if coeff:
                self._terms[exps] = coeff

    # constructors

    @classmethod
    def zero(cls, ambient) -> "LaurentPoly":
        return cls(ambient)

    @classmethod
    def constant(cls, ambient, value=1) -> "LaurentPoly":
        return cls(ambient, {(0,) * sum(ambient): value})

    @classmethod
    def monomial(cls, ambient, exps: Sequence[int], coeff=1) -> "LaurentPoly":
        return cls(ambient, {tuple(exps): coeff})

    @classmethod
    def variable(cls, ambient, color: int, slot: int, power: int = 1) -> "LaurentPoly":
        exps = [0] * sum(ambient)
        exps[position(ambient, color, slot)] = power
        return cls(ambient, {tuple(exps): 1})

    @classmethod
    def _raw(cls, ambient, terms: Dict[Exponents, QqScalar]) -> "LaurentPoly":
        poly = cls.__new__(cls)
        poly.ambient = ambient
        poly._terms = terms
        return poly

    # access

    @property
    def nvars(self) -> int:
        return sum(self.ambient)

    @property
    def terms(self) -> Dict[Exponents, QqScalar]:
        return self._terms

    def items(self) -> List[Tuple[Exponents, QqScalar]]:
        return sorted(self._terms.items())

    def coefficient(self, exps: Sequence[int]) -> QqScalar:
        return self._terms.get(tuple(exps), qq(0))

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.ambient == other.ambient and self._terms == other._terms
        if not other:
            return not self._terms
        return NotImplemented

    def __hash__(self):
        return hash((self.ambient, frozenset(self._terms.items())))

    # arithmetic

    def _check(self, other: "LaurentPoly"):
        if self.ambient != other.ambient:
            raise ValueError(f"ambient mismatch {self.ambient} vs {other.ambient}")

    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(self.ambient, other)
        self._check(other)
        terms = dict(self._terms)
        for exps, coeff in other._terms.items():
            value = terms.get(exps)
            value = coeff if value is None else value + coeff
            if value:
                terms[exps] = value
            else:
                terms.pop(exps, None)
        return LaurentPoly._raw(self.ambient, terms)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw(self.ambient, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(self.ambient, other)
        return self + (-other)

    def scale(self, factor) -> "LaurentPoly":
        factor = qq(factor)
        if not factor:
            return LaurentPoly(self.ambient)
        return LaurentPoly._raw(self.ambient, {e: c * factor for e, c in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            return self.scale(other)
        self._check(other)
        terms: Dict[Exponents, QqScalar] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                exps = tuple(a + b for a, b in zip(e1, e2))
                value = terms.get(exps)
                terms[exps] = c1 * c2 if value is None else value + c1 * c2
        return LaurentPoly._raw(self.ambient, {e: c for e, c in terms.items() if c})

    def __rmul__(self, other):
        return self.scale(other)

    def times_monomial(self, exps: Sequence[int], coeff=ONE) -> "LaurentPoly":
        coeff = qq(coeff)
        return LaurentPoly._raw(
            self.ambient,
            {
                tuple(a + b for a, b in zip(e, exps)): c * coeff
                for e, c in self._terms.items()
            },
        )

    # degrees

    def total_degrees(self) -> set:
        return {sum(exps) for exps in self._terms}

    def is_homogeneous(self) -> bool:
        return len(self.total_degrees()) <= 1

    def total_degree(self) -> int:
        degrees = self.total_degrees()
        if not degrees:
            raise ZeroPolynomial("the zero polynomial has no total degree")
        if len(degrees) > 1:
            raise Inhomogeneous(f"total degrees {sorted(degrees)} are mixed")
        return degrees.pop()

    # variable maps

    def permuted(self, perm: Sequence[int]) -> "LaurentPoly":
        """Send variable k to position perm[k]"""
        terms = {}
        for exps, coeff in self._terms.items():
            image = [0] * len(exps)
            for k, e in enumerate(exps):
                image[perm[k]] = e
            terms[tuple(image)] = coeff
        return LaurentPoly._raw(self.ambient, terms)

    def embedded(self, ambient: Sequence[int], positions: Sequence[int]) -> "LaurentPoly":
        """Place variable k at positions[k] inside a larger ambient"""
        size = sum(ambient)
        terms = {}
        for exps, coeff in self._terms.items():
            image = [0] * size
            for k, e in enumerate(exps):
                image[positions[k]] = e
            terms[tuple(image)] = coeff
        return LaurentPoly._raw(tuple(ambient), terms)

    def divide_linear(self, x: int, y: int, c: QqScalar = ONE) -> Tuple["LaurentPoly", bool]:
        """Divide by (z_x - c z_y); returns (quotient, exact)"""
        c = qq(c)
        slices: Dict[int, Dict[Exponents, QqScalar]] = {}
        for exps, coeff in self._terms.items():
            rest = exps[:x] + (0,) + exps[x + 1:]
            slices.setdefault(exps[x], {})[rest] = coeff
        if not slices:
            return LaurentPoly(self.ambient), True
        low, high = min(slices), max(slices)
        quotient: Dict[Exponents, QqScalar] = {}
        carry: Dict[Exponents, QqScalar] = {}
        # synthetic division in z_x from the top slice down
        for k in range(high, low - 1, -1):
            current = dict(slices.get(k, {}))
            for rest, coeff in carry.items():
                shifted = rest[:y] + (rest[y] + 1,) + rest[y + 1:]
                value = current.get(shifted)
                current[shifted] = coeff * c if value is None else value + coeff * c
            current = {r: v for r, v in current.items() if v}
            if k == low:
                remainder = current
                break
            for rest, coeff in current.items():
                quotient[rest[:x] + (k - 1,) + rest[x + 1:]] = coeff
            carry = current
        return LaurentPoly._raw(self.ambient, quotient), not remainder

    def evaluate_at(self, values: Sequence[QqScalar]) -> QqScalar:
        total = qq(0)
        for exps, coeff in self._terms.items():
            term = coeff
            for v, e in zip(values, exps):
                if e:
                    term *= qq(v) ** e
            total += term
        return total

    def __repr__(self):
        return f"LaurentPoly({self.ambient}, {self})"

    def __str__(self):
        if not self._terms:
            return "0"
        names = [str(v) for v in variables(self.ambient)]
        pieces = []
        for exps, coeff in sorted(self._terms.items(), reverse=True):
            factors = [f"({format_qq(coeff)})"]
            for name, e in zip(names, exps):
                if e == 1:
                    factors.append(name)
                elif e:
                    factors.append(f"{name}^{e}")
            pieces.append(" * ".join(factors))
        return " + ".join(pieces)


# Color symmetry


def color_permutations(n: Sequence[int]) -> Iterator[Tuple[int, ...]]:
    offsets = color_offsets(n)
    blocks = [
        list(itertools.permutations(range(offsets[i], offsets[i] + count)))
        for i, count in enumerate(n)
    ]
    for choice in itertools.product(*blocks):
        yield tuple(itertools.chain.from_iterable(choice))


def symmetrize(f: LaurentPoly) -> LaurentPoly:
    """Sum of f over all color-preserving permutations, without prefactor"""
    total = LaurentPoly.zero(f.ambient)
    for perm in color_permutations(f.ambient):
        total = total + f.permuted(perm)
    return total


def adjacent_transpositions(n: Sequence[int]) -> Iterator[Tuple[int, ...]]:
    size = sum(n)
    for i, offset in enumerate(color_offsets(n)):
        for a in range(n[i] - 1):
            perm = list(range(size))
            perm[offset + a], perm[offset + a + 1] = offset + a + 1, offset + a
            yield tuple(perm)


def is_color_symmetric(f: LaurentPoly) -> bool:
    return all(f.permuted(perm) == f for perm in adjacent_transpositions(f.ambient))


# Monomial orbits


@dataclass(frozen=True, order=True)
class MonomialOrbit:
    """Per color, the sorted multiset of exponents"""

    blocks: Tuple[Tuple[int, ...], ...]

    @classmethod
    def of(cls, exps: Sequence[int], n: Sequence[int]) -> "MonomialOrbit":
        offsets = color_offsets(n)
        return cls(
            tuple(
                tuple(sorted(exps[offsets[i]:offsets[i] + count]))
                for i, count in enumerate(n)
            )
        )

    @property
    def ambient(self) -> DegreeVector:
        return tuple(len(block) for block in self.blocks)

    @property
    def total_degree(self) -> int:
        return sum(sum(block) for block in self.blocks)

    def representative(self) -> Exponents:
        return tuple(itertools.chain.from_iterable(self.blocks))

    def monomials(self) -> Iterator[Exponents]:
        per_color = [
            [tuple(p) for p in multiset_permutations(list(block))] if block else [()]
            for block in self.blocks
        ]
        for choice in itertools.product(*per_color):
            yield tuple(itertools.chain.from_iterable(choice))

    def prefix_sum(self, m: Sequence[int], end: str) -> int:
        """Sum over colors of the m_i smallest (end="min") or largest exponents"""
        total = 0
        for block, k in zip(self.blocks, m):
            if k:
                total += sum(block[:k]) if end == "min" else sum(block[len(block) - k:])
        return total

    def as_list(self) -> List[List[int]]:
        return [list(block) for block in self.blocks]

    def __str__(self):
        return "|".join(",".join(str(e) for e in block) for block in self.blocks)


def orbit_sum(orbit: MonomialOrbit) -> LaurentPoly:
    return LaurentPoly(orbit.ambient, {exps: 1 for exps in orbit.monomials()})


def orbit_decompose(f: LaurentPoly) -> Dict[MonomialOrbit, QqScalar]:
    """Orbit coordinates of a color-symmetric polynomial"""
    coordinates: Dict[MonomialOrbit, QqScalar] = {}
    for exps, coeff in f.terms.items():
        orbit = MonomialOrbit.of(exps, f.ambient)
        if orbit.representative() == exps:
            coordinates[orbit] = coeff
    return dict(sorted(coordinates.items()))


@dataclass(frozen=True)
class PrefixConstraint:
    """prefix_sum(m, end) >= threshold for "min", <= threshold for "max" """

    m: DegreeVector
    end: str
    threshold: QuadraticSurd
    strict: bool = False

    def admits(self, orbit: MonomialOrbit) -> bool:
        return self.holds(orbit.prefix_sum(self.m, self.end))

    def holds(self, value) -> bool:
        if self.end == "min":
            return value > self.threshold if self.strict else value >= self.threshold
        return value < self.threshold if self.strict else value <= self.threshold

    def __str__(self):
        op = {("min", False): ">=", ("min", True): ">", ("max", False): "<=", ("max", True): "<"}
        return f"{self.end}{list(self.m)} {op[(self.end, self.strict)]} {self.threshold}"


def _per_color(bound: Bound, rank: int) -> List[Optional[int]]:
    if bound is None or isinstance(bound, int):
        return [bound] * rank
    values = list(bound)
    if len(values) != rank:
        raise ValueError(f"expected {rank} per-color bounds, got {values}")
    return values


def orbit_enumerate(
    n: Sequence[int],
    total_degree: int,
    lower: Bound = None,
    upper: Bound = None,
    constraints: Iterable[PrefixConstraint] = (),
) -> List[MonomialOrbit]:
    n = tuple(n)
    rank = len(n)
    lo, hi = _per_color(lower, rank), _per_color(upper, rank)
    active = [i for i in range(rank) if n[i]]
    if not active:
        return [MonomialOrbit(((),) * rank)] if total_degree == 0 else []
    if all(lo[i] is not None for i in active):
        floor_total = sum(n[i] * lo[i] for i in active)
        for i in active:
            derived = total_degree - (floor_total - lo[i])
            hi[i] = derived if hi[i] is None else min(hi[i], derived)
    elif all(hi[i] is not None for i in active):
        ceiling_total = sum(n[i] * hi[i] for i in active)
        for i in active:
            derived = total_degree - (ceiling_total - hi[i])
            lo[i] = derived if lo[i] is None else max(lo[i], derived)
    else:
        raise InfinitePolytope(
            f"exponent polytope for n={list(n)} needs a bound on every color"
        )

    slot_color = [i for i in range(rank) for _ in range(n[i])]
    size = len(slot_color)
    # remaining[k] = (same-color slots after k, min and max of the later colors)
    later_min, later_max = [0] * (rank + 1), [0] * (rank + 1)
    for i in range(rank - 1, -1, -1):
        later_min[i] = later_min[i + 1] + (n[i] * lo[i] if n[i] else 0)
        later_max[i] = later_max[i + 1] + (n[i] * hi[i] if n[i] else 0)
    offsets = color_offsets(n)
    constraints = list(constraints)
    found: List[MonomialOrbit] = []

    def feasible(acc: List[int], color: int) -> bool:
        """Prefix constraints with colors up to `color` placed and the rest at their best"""
        for constraint in constraints:
            m, end = constraint.m, constraint.end
            value = 0
            for j in range(rank):
                if not m[j]:
                    continue
                if j <= color:
                    block = acc[offsets[j]:offsets[j] + n[j]]
                    value += sum(block[:m[j]]) if end == "min" else sum(block[n[j] - m[j]:])
                else:
                    value += m[j] * (hi[j] if end == "min" else lo[j])
            if not constraint.holds(value):
                return False
        return True

    def walk(k: int, prev: Optional[int], remaining: int, acc: List[int]):
        if k == size:
            if remaining == 0:
                orbit = MonomialOrbit.of(acc, n)
                if all(c.admits(orbit) for c in constraints):
                    found.append(orbit)
            return
        color = slot_color[k]
        low = lo[color] if prev is None or slot_color[k - 1] != color else max(lo[color], prev)
        same_after = offsets[color] + n[color] - k - 1
        for value in range(low, hi[color] + 1):
            rest_min = value * same_after + later_min[color + 1]
            rest_max = hi[color] * same_after + later_max[color + 1]
            if remaining - value < rest_min:
                break
            if remaining - value > rest_max:
                continue
            acc.append(value)
            if (k + 1 < size and slot_color[k + 1] == color) or feasible(acc, color):
                walk(k + 1, value, remaining - value, acc)
            acc.pop()

    walk(0, None, total_degree, [])
    return sorted(found)


# Scaling orders


def _scaled_sum(exps: Exponents, slots: Sequence[int]) -> int:
    return sum(exps[k] for k in slots)


def first_slots(n: Sequence[int], m: Sequence[int]) -> List[int]:
    offsets = color_offsets(n)
    return [offsets[i] + a for i in range(len(n)) for a in range(m[i])]


def scaled_order(
    f: LaurentPoly, m: Sequence[int], end: str, check_slots: Optional[bool] = None
) -> int:
    """Extreme xi-order of f when the first m_i variables of each color are scaled"""
    if not f:
        raise ZeroPolynomial("scaled order of the zero polynomial")
    pick = min if end == "min" else max
    slots = first_slots(f.ambient, m)
    order = pick(_scaled_sum(exps, slots) for exps in f.terms)
    if check_slots is None:
        check_slots = settings.LOOPCHAR_DEBUG_SLOTS
    if check_slots:
        rng = random.Random(settings.LOOPCHAR_SEED)
        offsets = color_offsets(f.ambient)
        other = [
            offsets[i] + a
            for i, count in enumerate(f.ambient)
            for a in sorted(rng.sample(range(count), m[i]))
        ]
        other_order = pick(_scaled_sum(exps, other) for exps in f.terms)
        if other_order != order:
            logger.error(f"[SCALING] slot choice changed the {end} order of {f}")
            raise ValueError("scaled order depends on the slot choice; f is not color-symmetric")
    return order


# Wheel conditions


@dataclass(frozen=True)
class WheelInstance:
    """z_{i,k} -> w q^{k d_ii} for k < length, z_{j,0} -> w q^{-d_ij}"""

    i: int
    j: int
    length: int

    def weights(self, c: CartanData, n: Sequence[int]) -> Dict[int, int]:
        offsets = color_offsets(n)
        weights = {offsets[self.i] + k: k * c.d[self.i][self.i] for k in range(self.length)}
        weights[offsets[self.j]] = -c.d[self.i][self.j]
        return weights

    def __str__(self):
        return f"wheel({self.i + 1},{self.j + 1})"


def wheel_instances(c: CartanData, n: Sequence[int]) -> List[WheelInstance]:
    instances = []
    for i, j in itertools.permutations(range(c.rank), 2):
        length = 1 - c.cartan_integer(i, j)
        if n[i] >= length and n[j] >= 1:
            instances.append(WheelInstance(i, j, length))
    return instances


def wheel_residuals(
    f: LaurentPoly, c: CartanData, instance: WheelInstance
) -> Dict[Tuple[int, Exponents], QqScalar]:
    """Coefficients of f after the wheel substitution, keyed by (w-power, free exponents)"""
    weights = instance.weights(c, f.ambient)
    free = [k for k in range(f.nvars) if k not in weights]
    residuals: Dict[Tuple[int, Exponents], QqScalar] = {}
    for exps, coeff in f.terms.items():
        key = (sum(exps[k] for k in weights), tuple(exps[k] for k in free))
        value = coeff * q ** sum(w * exps[k] for k, w in weights.items())
        residuals[key] = residuals[key] + value if key in residuals else value
    return {key: value for key, value in residuals.items() if value}


def wheel_constraints(
    c: CartanData, n: Sequence[int], orbit_basis: Sequence[MonomialOrbit]
) -> QqMatrix:
    """Rows: linear functionals on orbit-sum coordinates that must vanish"""
    n = tuple(n)
    rows: Dict[Tuple[int, Tuple[int, Exponents]], Dict[int, QqScalar]] = {}
    for index, instance in enumerate(wheel_instances(c, n)):
        for column, orbit in enumerate(orbit_basis):
            for key, value in wheel_residuals(orbit_sum(orbit), c, instance).items():
                row = rows.setdefault((index, key), {})
                row[column] = row[column] + value if column in row else value
    keys = sorted(key for key, row in rows.items() if any(row.values()))
    matrix = QqMatrix(
        [[rows[key].get(col, qq(0)) for col in range(len(orbit_basis))] for key in keys],
        row_labels=[f"{key[0]}:{key[1]}" for key in keys],
        col_labels=[str(orbit) for orbit in orbit_basis],
    )
    logger.debug(
        f"[WHEEL] n={list(n)}: {matrix.nrows} constraint rows on {len(orbit_basis)} orbits"
    )
    return matrix
