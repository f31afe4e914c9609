import random

from django.test import SimpleTestCase, override_settings

from loop_algebra.cartan import SlopeVector, cartan_from_catalog
from loop_algebra.exceptions import CapInstability, EmptyTestFamily, ZeroConstantDivisor
from loop_algebra.pairing import (
    Binomial,
    RegimeIntegrand,
    coefficients_at,
    constant_term,
    gram_for_key,
    gram_for_Lr,
    pair_word,
    pair_word_antipode,
    pair_words,
)
from loop_algebra.scalars import ModEval, q, qq
from loop_algebra.shuffle import MINUS, Word, generator, shift, word_to_element
from loop_algebra.slopes import span_words


def ratio_integrand(ranks):
    """(z2 - z1) / (z2 - q^-2 z1)"""
    return RegimeIntegrand({(0, 1): qq(1), (1, 0): qq(-1)}, [Binomial(1, 0, q**-2)], ranks)


def double_pole_integrand():
    """z1^3 z2^-1 / (z2 - q^-2 z1)^2 with |z1| >> |z2|"""
    return RegimeIntegrand({(3, -1): qq(1)}, [Binomial(1, 0, q**-2)] * 2, (0, 1))


def shifted(word, r):
    return Word(tuple((i, d + r[i]) for i, d in word.letters), word.sign)


class ConstantTermTest(SimpleTestCase):
    def test_monomial_without_constant(self):
        self.assertEqual(constant_term(RegimeIntegrand({(-1, 1): qq(1)}, [], (0, 1))), 0)

    def test_nonzero_total_degree(self):
        self.assertEqual(constant_term(RegimeIntegrand({(1, 0): qq(1)}, [], (0, 1))), 0)

    def test_regimes(self):
        self.assertEqual(constant_term(ratio_integrand((1, 0)), slack=0, certify=True), 1)
        self.assertEqual(constant_term(ratio_integrand((0, 1)), slack=0, certify=True), q**2)

    @override_settings(LOOPCHAR_CAP_SLACK=3, LOOPCHAR_CERTIFY_CAPS=True)
    def test_settings_drive_the_cap(self):
        self.assertEqual(constant_term(ratio_integrand((0, 1))), q**2)

    def test_zero_constant(self):
        integrand = RegimeIntegrand({(0, 1): qq(1)}, [Binomial(1, 0, qq(0))], (0, 1))
        with self.assertRaises(ZeroConstantDivisor):
            constant_term(integrand, slack=0)

    def test_repeated_factor_needs_several_steps(self):
        self.assertEqual(constant_term(double_pole_integrand()), 2 * q**6)

    def test_several_coefficients_from_one_expansion(self):
        values = coefficients_at(double_pole_integrand(), [(0, 0), (1, -1), (2, 0)])
        self.assertEqual(values, {(0, 0): 2 * q**6, (1, -1): q**4, (2, 0): 0})

    def test_zero_slack_is_exact(self):
        exact = constant_term(double_pole_integrand(), slack=0, certify=True)
        for slack in (1, 2, 5):
            with self.subTest(slack=slack):
                self.assertEqual(constant_term(double_pole_integrand(), slack=slack), exact)

    def test_short_cap_is_caught(self):
        # spread 4 plus two denominators: slack -6 leaves a cap of 0
        with self.assertRaises(CapInstability):
            constant_term(double_pole_integrand(), slack=-6, certify=True)
        self.assertEqual(constant_term(double_pole_integrand(), slack=-6, certify=False), 0)

    def test_regime_needs_distinct_ranks(self):
        with self.assertRaises(ValueError):
            constant_term(ratio_integrand((0, 0)))


class PairingTest(SimpleTestCase):
    def setUp(self):
        self.a1 = cartan_from_catalog("A1")

    def test_degree_zero_words(self):
        minus = word_to_element(self.a1, Word(((0, 0), (0, 0)), MINUS))
        self.assertEqual(pair_word(Word(((0, 0), (0, 0))), minus), q**2 + 1)

    def test_antipode_single_letter(self):
        value = pair_word_antipode(Word(((0, -1),)), generator(self.a1, 0, 1, MINUS))
        self.assertEqual(value, -1)

    def test_mismatched_degrees(self):
        f = generator(self.a1, 0, 0, MINUS)
        self.assertEqual(pair_word(Word(((0, 1),)), f), 0)
        self.assertEqual(pair_word_antipode(Word(((0, 0), (0, 0))), f), 0)


class PairingSymmetryTest(SimpleTestCase):
    def setUp(self):
        self.rng = random.Random(11)
        self.cases = []
        for name, n in (("A1", (2,)), ("A2", (1, 1)), ("A2", (2, 1))):
            c = cartan_from_catalog(name)
            for d in (-1, 0, 2):
                minus = self.rng.choice(span_words(c.rank, n, d, letter_floor=-1, sign=MINUS))
                plus = span_words(c.rank, n, -d, letter_floor=-3)
                sample = self.rng.sample(plus, min(4, len(plus)))
                self.cases.append((c, word_to_element(c, minus), sample))

    def test_shift_invariance(self):
        for c, element, words in self.cases:
            r = tuple(self.rng.randint(-2, 2) for _ in range(c.rank))
            moved = shift(element, r)
            for word in words:
                with self.subTest(rank=c.rank, word=str(word), r=r):
                    self.assertEqual(pair_word(shifted(word, r), moved), pair_word(word, element))
                    self.assertEqual(
                        pair_word_antipode(shifted(word, r), moved), pair_word_antipode(word, element)
                    )

    def test_batch_matches_single_words(self):
        for c, element, words in self.cases:
            with self.subTest(rank=c.rank, hdeg=element.hdeg):
                self.assertEqual(pair_words(words, element), [pair_word(w, element) for w in words])
                self.assertEqual(
                    pair_words(words, element, antipode=True),
                    [pair_word_antipode(w, element) for w in words],
                )

    def test_single_letter_regimes_agree(self):
        a2 = cartan_from_catalog("A2")
        for color in (0, 1):
            for d in (-2, 0, 3):
                with self.subTest(color=color, d=d):
                    f = generator(a2, color, d, MINUS)
                    word = Word(((color, -d),))
                    self.assertEqual(pair_word(word, f), -pair_word_antipode(word, f))


class GramTest(SimpleTestCase):
    def setUp(self):
        self.a1 = cartan_from_catalog("A1")

    def test_single_variable(self):
        gram = gram_for_Lr(self.a1, (1,), (1,), 1, early_stop=False)
        self.assertEqual(gram.matrix.as_strings(), [["-1"]])
        self.assertEqual(gram.rank(), 1)

    def test_two_variables(self):
        gram = gram_for_Lr(self.a1, (1,), (2,), 2, early_stop=False)
        self.assertEqual(gram.matrix.shape, (1, 1))
        self.assertEqual(gram.rank(), 1)

    def test_empty_family(self):
        gram = gram_for_Lr(self.a1, (0,), (1,), 1)
        self.assertEqual(gram.rank(), 0)
        self.assertIsNone(gram.metadata["dim_columns"])
        with self.assertRaises(EmptyTestFamily):
            gram_for_Lr(self.a1, (0,), (1,), 1, allow_empty=False)

    def test_early_stop_keeps_the_rank(self):
        full = gram_for_Lr(self.a1, (2,), (2,), 3, early_stop=False)
        short = gram_for_Lr(self.a1, (2,), (2,), 3, early_stop=True)
        self.assertEqual(short.rank(), full.rank())
        self.assertLessEqual(short.matrix.nrows, full.matrix.nrows)
        self.assertEqual(short.candidate_rows, full.candidate_rows)

    def test_modular_export(self):
        gram = gram_for_Lr(self.a1, (1,), (1,), 1, early_stop=False)
        payload = gram.as_json(ModEval(2147483647, 5))
        self.assertEqual(payload["entries"], [[2147483646]])
        self.assertEqual(payload["modular"]["q_value"], 5)

    def test_key_matches_lr_for_integral_shift(self):
        lr = gram_for_Lr(self.a1, (1,), (2,), 2, early_stop=False)
        key = gram_for_key(self.a1, SlopeVector.minus_infinity(), SlopeVector.of([1]), (2,), 0)
        self.assertEqual(key.rank(), lr.rank())
