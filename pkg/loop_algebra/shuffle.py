# shuffle.py - Shuffle algebra elements, products and generator words

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, List, Sequence, Tuple

from .cartan import CartanData, DegreeVector, require_finite_type, unit_vector, vec_add
from .exceptions import LoopAlgebraError, MixedSigns, ShuffleCancellationError, ZeroPolynomial
from .laurent import LaurentPoly, color_offsets, wheel_instances, wheel_residuals
from .scalars import ONE, QqScalar, format_qq, q, qq

logger = logging.getLogger(__name__)

PLUS = "plus"
MINUS = "minus"
SIGNS = (PLUS, MINUS)


def standard_denominator_degree(n: Sequence[int]) -> int:
    """Number of factors (z_ia - z_jb), i < j, in the standard denominator"""
    return sum(n[i] * n[j] for i, j in itertools.combinations(range(len(n)), 2))


@dataclass(frozen=True)
class ZetaFactor:
    """(x - q^{-d_ij}) / (x - 1)"""

    i: int
    j: int
    d_ij: int

    @property
    def trivial(self) -> bool:
        return self.d_ij == 0

    def shift_coefficient(self) -> QqScalar:
        return q ** (-self.d_ij)

    def __str__(self):
        if self.trivial:
            return "1"
        return f"(x - {format_qq(self.shift_coefficient())})/(x - 1)"


def zeta_factor(c: CartanData, i: int, j: int) -> ZetaFactor:
    return ZetaFactor(i, j, c.d[i][j])


@dataclass(frozen=True)
class ShuffleElement:
    """numerator / prod_{i<j}(z_ia - z_jb) in S^plus or S^minus"""

    cartan: CartanData
    sign: str
    hdeg: DegreeVector
    numerator: LaurentPoly

    def __post_init__(self):
        if self.sign not in SIGNS:
            raise ValueError(f"sign must be one of {SIGNS}, got {self.sign!r}")
        if self.numerator.ambient != tuple(self.hdeg):
            raise ValueError(
                f"numerator ambient {self.numerator.ambient} does not match hdeg {self.hdeg}"
            )

    @property
    def denominator_degree(self) -> int:
        return standard_denominator_degree(self.hdeg)

    @property
    def vdeg(self) -> int:
        return self.numerator.total_degree() - self.denominator_degree

    def is_zero(self) -> bool:
        return not self.numerator

    def _like(self, numerator: LaurentPoly) -> "ShuffleElement":
        return ShuffleElement(self.cartan, self.sign, self.hdeg, numerator)

    def __add__(self, other: "ShuffleElement") -> "ShuffleElement":
        if (other.sign, other.hdeg) != (self.sign, self.hdeg):
            raise ValueError("can only add elements of the same sign and hdeg")
        return self._like(self.numerator + other.numerator)

    def __sub__(self, other: "ShuffleElement") -> "ShuffleElement":
        return self + other.scale(-1)

    def scale(self, factor) -> "ShuffleElement":
        return self._like(self.numerator.scale(factor))

    def __mul__(self, other: "ShuffleElement") -> "ShuffleElement":
        return shuffle_product(self, other)

    def __str__(self):
        letter = "E" if self.sign == PLUS else "F"
        return f"{letter}[{','.join(map(str, self.hdeg))}]({self.numerator})"


@dataclass(frozen=True)
class Word:
    """Generator word e_{i1,d1} ... e_{ik,dk} (or f); colors start at 0"""

    letters: Tuple[Tuple[int, int], ...]
    sign: str = PLUS

    def hdeg(self, rank: int) -> DegreeVector:
        counts = [0] * rank
        for color, _ in self.letters:
            counts[color] += 1
        return tuple(counts)

    @property
    def total_degree(self) -> int:
        return sum(d for _, d in self.letters)

    @property
    def colors(self) -> Tuple[int, ...]:
        return tuple(color for color, _ in self.letters)

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        letter = "e" if self.sign == PLUS else "f"
        return " ".join(f"{letter}[{i + 1},{d}]" for i, d in self.letters) or "1"


def unit(c: CartanData, sign: str = PLUS) -> ShuffleElement:
    hdeg = (0,) * c.rank
    return ShuffleElement(c, sign, hdeg, LaurentPoly.constant(hdeg))


def generator(c: CartanData, i: int, d: int, sign: str = PLUS) -> ShuffleElement:
    hdeg = unit_vector(c.rank, i)
    return ShuffleElement(c, sign, hdeg, LaurentPoly.variable(hdeg, i, 0, d))


def _vandermonde(ambient: Sequence[int], positions_by_color: Sequence[Sequence[int]]) -> LaurentPoly:
    size = sum(ambient)
    result = LaurentPoly.constant(ambient)
    for slots in positions_by_color:
        for x, y in itertools.combinations(slots, 2):
            result = result * _binomial(ambient, size, x, y, ONE)
    return result


def _binomial(ambient, size: int, x: int, y: int, c: QqScalar) -> LaurentPoly:
    ex, ey = [0] * size, [0] * size
    ex[x], ey[y] = 1, 1
    return LaurentPoly(ambient, {tuple(ex): 1, tuple(ey): -c})


def _shuffles(a: Sequence[int], b: Sequence[int]) -> Iterator[Tuple[Tuple[int, ...], int]]:
    """Color-preserving (a, b)-shuffles as (position map, sign)"""
    offsets = color_offsets(vec_add(a, b))
    per_color = []
    for i, (ai, bi) in enumerate(zip(a, b)):
        options = []
        for chosen in itertools.combinations(range(ai + bi), ai):
            rest = [k for k in range(ai + bi) if k not in chosen]
            image = [offsets[i] + k for k in list(chosen) + rest]
            parity = sum(s - k for k, s in enumerate(chosen)) % 2
            options.append((image, parity))
        per_color.append(options)
    for choice in itertools.product(*per_color):
        perm = tuple(itertools.chain.from_iterable(image for image, _ in choice))
        parity = sum(p for _, p in choice) % 2
        yield perm, -1 if parity else 1


def _product_in_v(left: ShuffleElement, right: ShuffleElement) -> LaurentPoly:
    c = left.cartan
    a, b = left.hdeg, right.hdeg
    n = vec_add(a, b)
    size = sum(n)
    offsets = color_offsets(n)
    left_slots = [[offsets[i] + k for k in range(a[i])] for i in range(c.rank)]
    right_slots = [[offsets[i] + a[i] + k for k in range(b[i])] for i in range(c.rank)]
    left_positions = list(itertools.chain.from_iterable(left_slots))
    right_positions = list(itertools.chain.from_iterable(right_slots))

    f = left.numerator.embedded(n, left_positions) * right.numerator.embedded(n, right_positions)
    for i in range(c.rank):
        for x in left_slots[i]:
            for j in range(c.rank):
                for y in right_slots[j]:
                    f = f * _binomial(n, size, x, y, q ** (-c.d[i][j]))
    f = f * _vandermonde(n, left_slots) * _vandermonde(n, right_slots)
    if sum(a[i] * b[j] for i in range(c.rank) for j in range(i)) % 2:
        f = -f

    total = LaurentPoly.zero(n)
    for perm, sign in _shuffles(a, b):
        moved = f.permuted(perm)
        total = total + (moved if sign > 0 else -moved)

    for i in range(c.rank):
        slots = range(offsets[i], offsets[i] + n[i])
        for x, y in itertools.combinations(slots, 2):
            total, exact = total.divide_linear(x, y, ONE)
            if not exact:
                logger.error(
                    f"[SHUFFLE] Vandermonde factor (z{x} - z{y}) does not divide the "
                    f"symmetrized product of {left} and {right}"
                )
                raise ShuffleCancellationError(
                    f"same-color factor failed to cancel in hdeg {list(n)}"
                )
    return total


def shuffle_product(left: ShuffleElement, right: ShuffleElement) -> ShuffleElement:
    if left.sign != right.sign:
        raise MixedSigns(f"cannot multiply a {left.sign} element by a {right.sign} element")
    if left.cartan != right.cartan:
        raise LoopAlgebraError("operands use different Cartan data")
    if left.sign == MINUS:
        # S^minus multiplies in the opposite algebra
        numerator = _product_in_v(right, left)
    else:
        numerator = _product_in_v(left, right)
    return ShuffleElement(left.cartan, left.sign, vec_add(left.hdeg, right.hdeg), numerator)


@lru_cache(maxsize=4096)
def word_to_element(c: CartanData, word: Word) -> ShuffleElement:
    if not word.letters:
        return unit(c, word.sign)
    prefix = word_to_element(c, Word(word.letters[:-1], word.sign))
    color, degree = word.letters[-1]
    return shuffle_product(prefix, generator(c, color, degree, word.sign))


def shift(element: ShuffleElement, r: Sequence[int]) -> ShuffleElement:
    """sigma_r: multiply by prod z_ia^{r_i} on S^plus and z_ia^{-r_i} on S^minus"""
    direction = 1 if element.sign == PLUS else -1
    exps = [direction * r[i] for i, count in enumerate(element.hdeg) for _ in range(count)]
    return element._like(element.numerator.times_monomial(exps))


def wheel_check(element: ShuffleElement) -> bool:
    require_finite_type(element.cartan)
    for instance in wheel_instances(element.cartan, element.hdeg):
        if wheel_residuals(element.numerator, element.cartan, instance):
            logger.debug(f"[WHEEL] {element} fails {instance}")
            return False
    return True


def degrees(element: ShuffleElement) -> Tuple[Tuple[int, ...], int]:
    """(signed hdeg, vdeg) of a homogeneous element"""
    if element.is_zero():
        raise ZeroPolynomial("the zero element has no vertical degree")
    direction = 1 if element.sign == PLUS else -1
    return tuple(direction * k for k in element.hdeg), element.vdeg


def from_polynomial(
    c: CartanData, sign: str, numerator: LaurentPoly
) -> ShuffleElement:
    return ShuffleElement(c, sign, numerator.ambient, numerator)


def linear_combination(
    elements: Sequence[ShuffleElement], coefficients: Sequence[QqScalar]
) -> ShuffleElement:
    total = elements[0].scale(0)
    for element, coefficient in zip(elements, coefficients):
        if coefficient:
            total = total + element.scale(qq(coefficient))
    return total


def words_of(
    rank: int, n: Sequence[int], degrees_allowed: Sequence[Sequence[int]], sign: str = PLUS
) -> List[Word]:
    """All words of hdeg n whose letter of color i has degree in degrees_allowed[i]"""
    orderings = sorted(set(itertools.permutations(
        [i for i in range(rank) for _ in range(n[i])]
    )))
    words = []
    for ordering in orderings:
        for choice in itertools.product(*(degrees_allowed[i] for i in ordering)):
            words.append(Word(tuple(zip(ordering, choice)), sign))
    return words
