import random
from fractions import Fraction

from django.test import SimpleTestCase

from loop_algebra.exceptions import BadSpecialization, DivisionByZero, LiteralParseError
from loop_algebra.scalars import (
    ModEval,
    QuadraticSurd,
    format_qq,
    parse_qq,
    q,
    qq,
    qq_arith,
    specialize,
)

PRIME = 2147483647


class QqArithmeticTest(SimpleTestCase):
    def test_gcd_reduction(self):
        self.assertEqual((q**2 - 1) / (q - 1), q + 1)

    def test_division_by_zero(self):
        with self.assertRaises(DivisionByZero):
            qq_arith(q, 0, "/")

    def test_format(self):
        self.assertEqual(format_qq(1 + q**2), "q^2+1")
        self.assertEqual(format_qq(qq(-1)), "-1")
        self.assertEqual(format_qq(qq(0)), "0")
        self.assertEqual(format_qq((q**2 - 1) / q), "(q^2-1)/q")

    def test_parse(self):
        self.assertEqual(parse_qq("q^2+1"), q**2 + 1)
        self.assertEqual(parse_qq("1 + q^-2"), (q**2 + 1) / q**2)
        self.assertEqual(parse_qq("3/2"), qq(Fraction(3, 2)))

    def test_parse_rejects_other_symbols(self):
        with self.assertRaises(LiteralParseError):
            parse_qq("q + x")


class SpecializeTest(SimpleTestCase):
    def test_polynomial(self):
        self.assertEqual(specialize(q + 1, ModEval(PRIME, 5, order_guard=0)), 6)

    def test_rational_function(self):
        point = ModEval(PRIME, 2, order_guard=0)
        self.assertEqual(specialize((q**2 - 1) / q, point), 3 * pow(2, -1, PRIME) % PRIME)

    def test_vanishing_denominator(self):
        with self.assertRaises(BadSpecialization):
            specialize(1 / (q - 5), ModEval(PRIME, 5, order_guard=0))

    def test_small_prime_rejected(self):
        with self.assertRaises(ValueError):
            ModEval(101, 5)

    def test_order_guard(self):
        # 2 has order 31 modulo 2^31 - 1
        with self.assertRaises(ValueError):
            ModEval(PRIME, 2, order_guard=64)

    def test_draw_is_seeded(self):
        first = ModEval.draw(PRIME, random.Random(7))
        second = ModEval.draw(PRIME, random.Random(7))
        self.assertEqual(first, second)
        self.assertTrue(first.passes_order_guard())

    def test_prime_must_exceed_variable_factorial(self):
        # 12! < 2^31 - 1 < 13!
        self.assertEqual(ModEval(PRIME, 5, factorial_bound=12).factorial_bound, 12)
        with self.assertRaises(ValueError):
            ModEval(PRIME, 5, factorial_bound=13)
        with self.assertRaises(ValueError):
            ModEval.draw(PRIME, random.Random(7), factorial_bound=13)


class QuadraticSurdTest(SimpleTestCase):
    def test_parse_and_str(self):
        self.assertEqual(str(QuadraticSurd.parse("1+√2")), "1+√2")
        self.assertEqual(str(QuadraticSurd.parse("1 - sqrt(2)")), "1-√2")
        self.assertEqual(QuadraticSurd.parse("1/2"), Fraction(1, 2))
        self.assertEqual(QuadraticSurd.parse("2√2"), QuadraticSurd(0, 2))

    def test_bad_literal(self):
        with self.assertRaises(LiteralParseError):
            QuadraticSurd.parse("pi")

    def test_exact_comparisons(self):
        root = QuadraticSurd(0, 1)
        self.assertTrue(1 < root < 2)
        self.assertEqual(root.floor(), 1)
        self.assertEqual(root.ceil(), 2)
        self.assertEqual(root * root, 2)
        self.assertFalse((1 + root).is_integer())
        self.assertTrue(((1 + root) + (1 - root)).is_integer())

    def test_sign_of_close_values(self):
        # 99/70 is a convergent of sqrt 2 from above
        self.assertEqual((QuadraticSurd(Fraction(99, 70)) - QuadraticSurd(0, 1)).sign(), 1)
        self.assertEqual((QuadraticSurd(Fraction(140, 99)) - QuadraticSurd(0, 1)).sign(), -1)
