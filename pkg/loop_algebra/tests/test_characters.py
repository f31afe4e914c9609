import random

from django.test import SimpleTestCase

from loop_algebra.cartan import SlopeVector, cartan_from_catalog, vectors_up_to
from loop_algebra.characters import (
    CharacterSeries,
    a_from_b_dims,
    b_dim_series,
    band_dim_series,
    band_product,
    chi_product,
    chi_refined,
    compute_cell,
    conj_product,
    dims_slope_geq0,
    expand_product,
    key_dims,
    lr_dim,
    slope_product,
    verify_theorem,
    word_span_series,
)
from loop_algebra.exceptions import MissingDimensionTable, NonIntegerSolution


class ExpandProductTest(SimpleTestCase):
    def test_geometric_series(self):
        terms = expand_product([((1,), 1, 1)], (3,), 5)
        self.assertEqual(terms, {((0,), 0): 1, ((1,), 1): 1, ((2,), 2): 1, ((3,), 3): 1})

    def test_exponent_counts_multisets(self):
        terms = expand_product([((1,), 0, 2)], (2,))
        self.assertEqual(terms[((2,), 0)], 3)

    def test_negative_exponent(self):
        with self.assertRaises(ValueError):
            expand_product([((1,), 0, -1)], (2,))


class ProductFormulaTest(SimpleTestCase):
    def setUp(self):
        self.a1 = cartan_from_catalog("A1")
        self.a2 = cartan_from_catalog("A2")

    def test_a1_rank_one(self):
        chi = chi_product(self.a1, (1,), (3,), 3)
        self.assertEqual(chi.coefficients, {((0,), 0): 1, ((1,), 1): 1, ((2,), 2): 1, ((3,), 3): 1})
        self.assertEqual(chi.convention, "q^-n v^d")

    def test_a1_rank_two(self):
        chi = chi_product(self.a1, (2,), (3,), 4)
        self.assertEqual([chi.get((2,), d) for d in range(5)], [0, 0, 1, 1, 1])
        self.assertEqual([chi.get((3,), d) for d in range(5)], [0, 0, 0, 1, 1])

    def test_a2(self):
        chi = chi_product(self.a2, (1, 1), (2, 2), 4)
        self.assertEqual(chi.get((1, 1), 1), 1)
        self.assertEqual(chi.get((1, 1), 2), 2)

    def test_nonpositive_shift_is_trivial(self):
        for r in [(0,), (-2,)]:
            with self.subTest(r=r):
                self.assertEqual(chi_product(self.a1, r, (3,), 3).coefficients, {((0,), 0): 1})

    def test_unrefined_collapses_v(self):
        refined = chi_product(self.a2, (1, 1), (2, 2), 6)
        unrefined = chi_product(self.a2, (1, 1), (2, 2), 6, refined=False)
        self.assertFalse(unrefined.refined)
        self.assertEqual(refined.collapse_v().coefficients, unrefined.coefficients)

    def test_partition_counts(self):
        dims = conj_product(self.a1, (4,), 6)
        self.assertEqual(dims.get((2,), 1), 1)
        self.assertEqual(dims.get((2,), 2), 2)
        self.assertEqual(dims.get((4,), 4), 5)
        self.assertEqual(dims.convention, "q^n v^d")

    def test_slope_product(self):
        ones = slope_product(self.a1, SlopeVector.of([1]), (4,))
        self.assertEqual([ones.get((k,)) for k in range(5)], [1, 1, 1, 1, 1])

    def test_band_product_natural(self):
        key = band_product(
            self.a1, SlopeVector.minus_infinity(), SlopeVector.of([1]), (2,), 0, 2, natural=True
        )
        self.assertEqual(key.get((1,), 0), 1)
        self.assertEqual(key.get((2,), 0), 1)
        self.assertEqual(key.get((1,), 1), 0)


class ShiftMonotonicityTest(SimpleTestCase):
    def test_coefficients_grow_with_r(self):
        cases = [
            (cartan_from_catalog("A1"), [(-1,), (0,), (1,), (2,), (3,)], (4,)),
            (cartan_from_catalog("A2"), [(1, 0), (1, 1), (2, 1)], (2, 2)),
        ]
        for c, shifts, n_max in cases:
            series = [chi_product(c, r, n_max, 5) for r in shifts]
            for smaller, larger, r in zip(series, series[1:], shifts[1:]):
                for n, d in larger.cells():
                    with self.subTest(r=r, n=n, d=d):
                        self.assertLessEqual(smaller.get(n, d), larger.get(n, d))


class AFromBDimsTest(SimpleTestCase):
    def test_a1(self):
        table = a_from_b_dims({(0,): 1, (1,): 1, (2,): 1, (3,): 1}, (3,))
        self.assertEqual(table.entries, {(1,): 1, (2,): 0, (3,): 0})

    def test_a2(self):
        dims = {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 2}
        table = a_from_b_dims(dims, (1, 1))
        self.assertEqual(table.entries, {(1, 0): 1, (0, 1): 1, (1, 1): 1})

    def test_all_zero(self):
        table = a_from_b_dims({(0,): 1, (1,): 0, (2,): 0}, (2,))
        self.assertEqual(set(table.entries.values()), {0})

    def test_inconsistent_tables(self):
        with self.assertRaises(NonIntegerSolution):
            a_from_b_dims({(0,): 1, (1,): 2, (2,): 1}, (2,))
        with self.assertRaises(NonIntegerSolution):
            a_from_b_dims({(0,): 2, (1,): 1}, (1,))
        with self.assertRaises(MissingDimensionTable):
            a_from_b_dims({(0,): 1}, (1,))

    def test_inverse_of_the_product(self):
        rng = random.Random(17)
        for bound in ((4,), (2, 2), (3, 1)):
            for trial in range(5):
                entries = {n: rng.randint(0, 2) for n in vectors_up_to(bound, include_zero=False)}
                terms = expand_product([(n, 0, a) for n, a in entries.items()], bound)
                dims = {n: terms.get((n, 0), 0) for n in vectors_up_to(bound)}
                with self.subTest(bound=bound, trial=trial):
                    table = a_from_b_dims(dims, bound)
                    self.assertEqual(table.entries, entries)
                    again = expand_product([(n, 0, a) for n, a in table.entries.items()], bound)
                    self.assertEqual({n: again.get((n, 0), 0) for n in vectors_up_to(bound)}, dims)


class CellTest(SimpleTestCase):
    def setUp(self):
        self.a1 = cartan_from_catalog("A1")

    def test_lr_dims(self):
        self.assertEqual(lr_dim(self.a1, (1,), (0,), 0), 1)
        self.assertEqual(lr_dim(self.a1, (1,), (1,), 0), 0)
        self.assertEqual(lr_dim(self.a1, (1,), (2,), 2), 1)
        self.assertEqual(lr_dim(cartan_from_catalog("A2"), (1, 1), (1, 1), 1), 1)

    def test_refined_series(self):
        chi = chi_refined(self.a1, (1,), (2,), 2)
        self.assertIsInstance(chi, CharacterSeries)
        self.assertEqual(chi.get((1,), 1), 1)
        self.assertEqual(chi.get((2,), 1), 0)

    def test_unknown_kind(self):
        with self.assertRaises(ValueError):
            compute_cell("gram", self.a1, {}, (1,), 0)


class DimensionSweepTest(SimpleTestCase):
    def setUp(self):
        self.a1 = cartan_from_catalog("A1")

    def test_slope_geq0_matches_conj_product(self):
        computed = dims_slope_geq0(self.a1, (2,), 2)
        formula = conj_product(self.a1, (2,), 2)
        for k in (1, 2):
            for d in range(3):
                with self.subTest(n=k, d=d):
                    self.assertEqual(computed.get((k,), d), formula.get((k,), d))
        self.assertEqual(computed.get((2,), 2), 2)

    def test_b_subalgebra_matches_slope_product(self):
        p = SlopeVector.of([1])
        computed = b_dim_series(self.a1, p, (3,))
        self.assertFalse(computed.refined)
        self.assertEqual(computed.coefficients, slope_product(self.a1, p, (3,)).coefficients)

    def test_band_matches_band_product(self):
        p1, p2 = SlopeVector.of([-1]), SlopeVector.of([1])
        computed = band_dim_series(self.a1, p1, p2, (2,), -1, 1)
        formula = band_product(self.a1, p1, p2, (2,), -1, 1)
        for k in (1, 2):
            for d in (-1, 0, 1):
                with self.subTest(n=k, d=d):
                    self.assertEqual(computed.get((k,), d), formula.get((k,), d))

    def test_key_agrees_with_shifted_character(self):
        key = key_dims(self.a1, SlopeVector.minus_infinity(), SlopeVector.of([1]), (2,), 2)
        chi = chi_product(self.a1, (1,), (2,), 2)
        for k in range(3):
            for d in range(k + 1):
                with self.subTest(n=k, d=d):
                    self.assertEqual(key.get((k,), d), chi.get((k,), k - d))

    def test_word_span(self):
        series = word_span_series(self.a1, (2,), 2)
        self.assertEqual(series.convention, "q^n v^d")
        self.assertEqual(series.get((2,), 1), 1)
        self.assertEqual(series.get((2,), 2), 2)
        self.assertEqual(series.get((1,), 2), 1)


class VerifyTheoremTest(SimpleTestCase):
    def setUp(self):
        self.a1 = cartan_from_catalog("A1")

    def test_a1_small_window(self):
        report = verify_theorem(self.a1, (1,), (3,), 3)
        self.assertTrue(report.passed, [cell.as_json() for cell in report.failures])
        self.assertEqual(len(report.cells), 16)
        self.assertEqual(report.as_json()["kind"], "theorem")

    def test_negative_shift(self):
        report = verify_theorem(self.a1, (-1,), (2,), 2)
        self.assertTrue(report.passed)
        self.assertEqual({cell.formula for cell in report.cells if any(cell.n)}, {0})

    def test_unrefined(self):
        report = verify_theorem(self.a1, (1,), (2,), 2, unrefined=True)
        self.assertTrue(report.extras["unrefined_complete"])
        for row in report.extras["unrefined"]:
            self.assertEqual(row["computed"], row["formula"])

    def test_cell_values_hook(self):
        calls = []

        def cell_values(cells):
            calls.append(len(cells))
            return {cell: 0 for cell in cells}

        report = verify_theorem(self.a1, (1,), (1,), 1, cell_values=cell_values)
        self.assertEqual(calls, [4])
        self.assertFalse(report.passed)
        self.assertEqual(len(report.failures), 2)


class TheoremWindowTest(SimpleTestCase):
    def assertPasses(self, report):
        self.assertTrue(report.passed, [cell.as_json() for cell in report.failures])

    def test_a1_window(self):
        a1 = cartan_from_catalog("A1")
        for r in range(-1, 4):
            with self.subTest(r=r):
                self.assertPasses(verify_theorem(a1, (r,), (6,), 8))

    def test_a2_windows(self):
        a2 = cartan_from_catalog("A2")
        for r in [(1, 1), (1, 0), (2, 1), (0, -1)]:
            with self.subTest(r=r):
                self.assertPasses(verify_theorem(a2, r, (2, 2), 5))

    def test_b2_window(self):
        self.assertPasses(verify_theorem(cartan_from_catalog("B2"), (1, 1), (2, 2), 4))
