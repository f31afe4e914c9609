import json
import tempfile
from fractions import Fraction
from pathlib import Path

from django.test import SimpleTestCase

from loop_algebra.cartan import SlopeVector
from loop_algebra.exceptions import LiteralParseError
from loop_algebra.laurent import LaurentPoly
from loop_algebra.parsers import (
    load_cartan,
    parse_dimension_table,
    parse_polynomial,
    parse_slope,
    parse_vector,
    parse_word,
)
from loop_algebra.scalars import QuadraticSurd, q
from loop_algebra.shuffle import MINUS, PLUS, Word


class WordLiteralTest(SimpleTestCase):
    def test_plus_word(self):
        self.assertEqual(parse_word("e[1,0] e[2,-1]", 2), Word(((0, 0), (1, -1)), PLUS))
        self.assertEqual(parse_word("e[1, 0]*e[1, 2]", 1), Word(((0, 0), (0, 2)), PLUS))

    def test_minus_word(self):
        self.assertEqual(parse_word("f[1,3]", 1), Word(((0, 3),), MINUS))

    def test_rejections(self):
        for text in ["e[1,0] f[1,0]", "e[3,0]", "e[0,1]", "e[1,0] x", ""]:
            with self.subTest(text=text):
                with self.assertRaises(LiteralParseError):
                    parse_word(text, 2)


class PolynomialLiteralTest(SimpleTestCase):
    def test_coefficients_in_q(self):
        f = parse_polynomial("(1+q^-2) * z[1,1] * z[1,2]")
        self.assertEqual(f, LaurentPoly((2,), {(1, 1): 1 + q**-2}))

    def test_laurent_exponents_and_hdeg(self):
        f = parse_polynomial("z[1,1]^-1 - z[2,1]", hdeg=(1, 1))
        self.assertEqual(f, LaurentPoly((1, 1), {(-1, 0): 1, (0, 1): -1}))

    def test_rank_pads_missing_colors(self):
        self.assertEqual(parse_polynomial("q", rank=2).ambient, (0, 0))
        self.assertEqual(parse_polynomial("z[1,1]", rank=2).ambient, (1, 0))

    def test_rejections(self):
        cases = [
            ("z[1,1]^(1/2)", None),
            ("z[1,3]", (2,)),
            ("z[0,1]", None),
            ("sin(z[1,1])", None),
            ("z[1,1] +* 2", None),
        ]
        for text, hdeg in cases:
            with self.subTest(text=text):
                with self.assertRaises(LiteralParseError):
                    parse_polynomial(text, hdeg)


class VectorAndSlopeTest(SimpleTestCase):
    def test_vectors(self):
        self.assertEqual(parse_vector("1,2"), (1, 2))
        self.assertEqual(parse_vector("[1, 2]"), (1, 2))
        self.assertEqual(parse_vector("(1 -2)"), (1, -2))
        with self.assertRaises(LiteralParseError):
            parse_vector("1 2 3", rank=2)
        with self.assertRaises(LiteralParseError):
            parse_vector("a,b")

    def test_slopes(self):
        self.assertEqual(parse_slope("-inf"), SlopeVector.minus_infinity())
        self.assertEqual(parse_slope("∞"), SlopeVector.plus_infinity())
        half = Fraction(1, 2)
        self.assertEqual(parse_slope("1/2,1/2", rank=2), SlopeVector.of([half, half]))
        surd = parse_slope("1+√2, 1-√2")
        self.assertEqual(surd.entries, (QuadraticSurd(1, 1), QuadraticSurd(1, -1)))
        with self.assertRaises(LiteralParseError):
            parse_slope("1,2", rank=3)


class FileInputTest(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.root = Path(self.tmp.name)

    def write(self, name, payload):
        path = self.root / name
        path.write_text(payload if isinstance(payload, str) else json.dumps(payload))
        return str(path)

    def test_cartan_sources(self):
        self.assertEqual(load_cartan("a2").label, "A2")
        path = self.write("b2.json", {"d": [[4, -2], [-2, 2]]})
        self.assertEqual(load_cartan(cartan_file=path).label, "B2")
        with self.assertRaises(LiteralParseError):
            load_cartan()
        with self.assertRaises(LiteralParseError):
            load_cartan("A1", path)
        with self.assertRaises(LiteralParseError):
            load_cartan(cartan_file=self.write("broken.json", "{"))

    def test_dimension_tables(self):
        mapping = self.write("dims.json", {"0,0": 1, "1,0": 1})
        rows = self.write("rows.json", [{"n": [0, 0], "dim": 1}, {"n": [1, 1], "dim": 2}])
        self.assertEqual(parse_dimension_table(mapping, 2), {(0, 0): 1, (1, 0): 1})
        self.assertEqual(parse_dimension_table(rows, 2), {(0, 0): 1, (1, 1): 2})
        with self.assertRaises(LiteralParseError):
            parse_dimension_table(self.write("bad.json", [{"n": [0, 0]}]), 2)
        with self.assertRaises(LiteralParseError):
            parse_dimension_table(self.write("scalar.json", "3"), 2)
