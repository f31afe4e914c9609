# scalars.py - Exact coefficient arithmetic over Q(q) and Q(sqrt 2)

import logging
import math
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import sympy
from sympy.parsing.sympy_parser import (
    convert_xor,
    parse_expr,
    standard_transformations,
)
from sympy.polys.domains import ZZ
from sympy.polys.fields import FracElement, field
from sympy.polys.polyerrors import BasePolynomialError

from .exceptions import BadSpecialization, DivisionByZero, LiteralParseError

logger = logging.getLogger(__name__)

# The rational function field Q(q); elements are kept as gcd-reduced ratios of
# integer polynomials with a positive leading denominator coefficient.
QQ_Q, q = field("q", ZZ)
Q_SYMBOL = QQ_Q.symbols[0]

QqScalar = FracElement
Rational = Union[int, Fraction]

MIN_PRIME = 2**30


def qq(value) -> QqScalar:
    """Coerce an int, Fraction or field element into Q(q)"""
    if isinstance(value, FracElement):
        return value
    if isinstance(value, Fraction):
        return QQ_Q(value.numerator) / QQ_Q(value.denominator)
    return QQ_Q(int(value))


def q_power(k: int) -> QqScalar:
    return q**k


ZERO = QQ_Q(0)
ONE = QQ_Q(1)


def qq_arith(a: QqScalar, b: QqScalar, op: str) -> QqScalar:
    a, b = qq(a), qq(b)
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        if not b:
            raise DivisionByZero(f"cannot divide {format_qq(a)} by zero")
        return a / b
    raise ValueError(f"unknown operation {op!r}")


# Prime-field evaluation


def check_prime(prime: int, factorial_bound: int = 0):
    if prime <= MIN_PRIME:
        raise ValueError(f"prime {prime} must exceed 2^30")
    if factorial_bound and prime <= math.factorial(factorial_bound):
        raise ValueError(f"prime {prime} must exceed {factorial_bound}!")


@dataclass(frozen=True)
class ModEval:
    """Evaluation point q -> q_value in GF(prime)"""

    prime: int
    q_value: int
    order_guard: int = 0
    factorial_bound: int = 0

    def __post_init__(self):
        check_prime(self.prime, self.factorial_bound)
        if self.q_value % self.prime == 0:
            raise ValueError("q_value must be a nonzero residue")
        if not self.passes_order_guard():
            raise ValueError(
                f"q_value {self.q_value} has multiplicative order <= {self.order_guard}"
            )

    def passes_order_guard(self) -> bool:
        power = 1
        for _ in range(self.order_guard):
            power = power * self.q_value % self.prime
            if power == 1:
                return False
        return True

    @classmethod
    def draw(
        cls,
        prime: int,
        rng: random.Random,
        order_guard: int = 64,
        factorial_bound: int = 0,
    ) -> "ModEval":
        check_prime(prime, factorial_bound)
        while True:
            candidate = rng.randrange(2, prime - 1)
            try:
                return cls(prime, candidate, order_guard, factorial_bound)
            except ValueError:
                logger.debug(f"[MODEVAL] Re-drawing q_value {candidate} mod {prime}")


def _eval_poly(poly, point: ModEval) -> int:
    total = 0
    for (k,), coeff in poly.terms():
        total += int(coeff) * pow(point.q_value, k, point.prime)
    return total % point.prime


def specialize(a: QqScalar, point: ModEval) -> int:
    a = qq(a)
    denominator = _eval_poly(a.denom, point)
    if denominator == 0:
        raise BadSpecialization(
            f"denominator {format_qq(QQ_Q(a.denom))} vanishes at q={point.q_value} "
            f"mod {point.prime}"
        )
    numerator = _eval_poly(a.numer, point)
    return numerator * pow(denominator, -1, point.prime) % point.prime


# Text formats


def _format_poly(poly) -> str:
    terms = sorted(((k, int(c)) for (k,), c in poly.terms()), reverse=True)
    if not terms:
        return "0"
    pieces = []
    for k, c in terms:
        if k == 0:
            piece = str(c)
        else:
            power = "q" if k == 1 else f"q^{k}"
            if c == 1:
                piece = power
            elif c == -1:
                piece = f"-{power}"
            else:
                piece = f"{c}*{power}"
        if pieces and not piece.startswith("-"):
            piece = "+" + piece
        pieces.append(piece)
    return "".join(pieces)


def format_qq(a: QqScalar) -> str:
    """Render an element of Q(q) as e.g. "q^2+1" or "(q^2-1)/q" """
    a = qq(a)
    numerator = _format_poly(a.numer)
    if a.denom == 1:
        return numerator
    denominator = _format_poly(a.denom)
    if len(a.numer.terms()) > 1:
        numerator = f"({numerator})"
    if len(a.denom.terms()) > 1:
        denominator = f"({denominator})"
    return f"{numerator}/{denominator}"


def _qq_from_polynomial_expr(expr) -> QqScalar:
    poly = sympy.Poly(expr, Q_SYMBOL, domain="QQ")
    result = ZERO
    for (k,), coeff in poly.terms():
        coeff = sympy.Rational(coeff)
        result += qq(Fraction(int(coeff.p), int(coeff.q))) * q**k
    return result


def qq_from_expr(expr) -> QqScalar:
    """Convert a sympy expression in the symbol q into Q(q)"""
    try:
        numerator, denominator = sympy.fraction(sympy.together(expr))
        return _qq_from_polynomial_expr(numerator) / _qq_from_polynomial_expr(
            denominator
        )
    except (BasePolynomialError, ZeroDivisionError, TypeError) as exc:
        raise LiteralParseError(f"not a rational function of q: {expr}") from exc


def parse_qq(text: str) -> QqScalar:
    try:
        expr = parse_expr(
            text.strip(),
            local_dict={"q": Q_SYMBOL},
            transformations=standard_transformations + (convert_xor,),
        )
    except (SyntaxError, TypeError, sympy.SympifyError) as exc:
        raise LiteralParseError(f"cannot parse scalar literal {text!r}") from exc
    return qq_from_expr(expr)


# The ordered field Q(sqrt 2)

_SURD_LITERAL = re.compile(
    r"^(?P<a>[+-]?\d+(?:/\d+)?)?"
    r"(?:(?P<sign>[+-])?(?P<b>\d+(?:/\d+)?)?\*?(?:√2|sqrt\(2\)|sqrt2))?$"
)


class QuadraticSurd:
    """Exact number rational + surd * sqrt(2)"""

    __slots__ = ("rational", "surd")

    def __init__(self, rational: Rational = 0, surd: Rational = 0):
        object.__setattr__(self, "rational", Fraction(rational))
        object.__setattr__(self, "surd", Fraction(surd))

    def __setattr__(self, name, value):
        raise AttributeError("QuadraticSurd is immutable")

    @classmethod
    def coerce(cls, value) -> "QuadraticSurd":
        if isinstance(value, QuadraticSurd):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(value)
        raise TypeError(f"cannot use {value!r} as a quadratic surd")

    @classmethod
    def parse(cls, text: str) -> "QuadraticSurd":
        compact = re.sub(r"\s+", "", text)
        match = _SURD_LITERAL.match(compact)
        if not compact or not match:
            raise LiteralParseError(f"cannot parse slope coordinate {text!r}")
        a, sign, b = match.group("a"), match.group("sign"), match.group("b")
        has_surd = any(tag in compact for tag in ("√2", "sqrt"))
        if not has_surd:
            return cls(Fraction(a))
        if sign is None and b is None and a is not None:
            # "2√2": the leading number is the surd coefficient
            a, b = None, a
        coefficient = Fraction(b) if b is not None else Fraction(1)
        if sign == "-":
            coefficient = -coefficient
        return cls(Fraction(a) if a is not None else 0, coefficient)

    # arithmetic

    def __add__(self, other):
        try:
            other = QuadraticSurd.coerce(other)
        except TypeError:
            return NotImplemented
        return QuadraticSurd(self.rational + other.rational, self.surd + other.surd)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticSurd(-self.rational, -self.surd)

    def __sub__(self, other):
        try:
            other = QuadraticSurd.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            other = QuadraticSurd.coerce(other)
        except TypeError:
            return NotImplemented
        return QuadraticSurd(
            self.rational * other.rational + 2 * self.surd * other.surd,
            self.rational * other.surd + self.surd * other.rational,
        )

    __rmul__ = __mul__

    # order

    def sign(self) -> int:
        a, b = self.rational, self.surd
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return (b > 0) - (b < 0)
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # opposite signs: compare a^2 with 2 b^2
        if a > 0:
            return 1 if a * a > 2 * b * b else -1
        return 1 if 2 * b * b > a * a else -1

    def _compare(self, other) -> int:
        return (self - QuadraticSurd.coerce(other)).sign()

    def __eq__(self, other):
        try:
            return self._compare(other) == 0
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self.surd == 0:
            return hash(self.rational)
        return hash((self.rational, self.surd))

    def __lt__(self, other):
        return self._compare(other) < 0

    def __le__(self, other):
        return self._compare(other) <= 0

    def __gt__(self, other):
        return self._compare(other) > 0

    def __ge__(self, other):
        return self._compare(other) >= 0

    def __float__(self):
        return float(self.rational) + float(self.surd) * math.sqrt(2)

    def is_integer(self) -> bool:
        return self.surd == 0 and self.rational.denominator == 1

    def floor(self) -> int:
        k = math.floor(float(self))
        while self < k:
            k -= 1
        while self >= k + 1:
            k += 1
        return k

    def ceil(self) -> int:
        return -((-self).floor())

    def __int__(self):
        if not self.is_integer():
            raise ValueError(f"{self} is not an integer")
        return int(self.rational)

    def __repr__(self):
        return f"QuadraticSurd({self})"

    def __str__(self):
        if self.surd == 0:
            return str(self.rational)
        if self.surd == 1:
            surd = "√2"
        elif self.surd == -1:
            surd = "-√2"
        else:
            surd = f"{self.surd}√2"
        if self.rational == 0:
            return surd
        if not surd.startswith("-"):
            surd = "+" + surd
        return f"{self.rational}{surd}"


def as_surd(value: Optional[Union[Rational, QuadraticSurd]]) -> QuadraticSurd:
    return QuadraticSurd.coerce(0 if value is None else value)
