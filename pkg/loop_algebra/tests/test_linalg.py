import random

from django.test import SimpleTestCase, override_settings

from loop_algebra.exceptions import AllSpecializationsBad, RankInstability
from loop_algebra.linalg import (
    IncrementalModularRank,
    ModularPolicy,
    QqMatrix,
    matrix_rank,
    nullspace,
    policy_for,
    rank_exact,
    rank_modular,
)
from loop_algebra.scalars import ModEval, q

PRIME = 2147483647


class ExactRankTest(SimpleTestCase):
    def test_dependent_rows(self):
        self.assertEqual(rank_exact(QqMatrix([[q, 1], [q**2, q]])), 1)

    def test_full_rank_with_fractions(self):
        m = QqMatrix([[1 / (q + 1), 1], [1, q], [q, q**2 + 1]])
        self.assertEqual(rank_exact(m), 2)

    def test_empty_shapes(self):
        self.assertEqual(matrix_rank(QqMatrix([], ncols=3)), 0)
        self.assertEqual(matrix_rank(QqMatrix([[], []])), 0)
        self.assertEqual(rank_exact(QqMatrix([[0, 0], [0, 0]])), 0)

    def test_unknown_mode(self):
        with self.assertRaises(ValueError):
            matrix_rank(QqMatrix([[1]]), mode="fast")


class NullspaceTest(SimpleTestCase):
    def test_single_relation(self):
        basis = nullspace(QqMatrix([[1, -1]]))
        self.assertEqual(basis, [[1, 1]])

    def test_identity_has_trivial_kernel(self):
        self.assertEqual(nullspace(QqMatrix([[1, 0], [0, 1]])), [])

    def test_kernel_over_q(self):
        m = QqMatrix([[1, q, q**2], [q, q**2, q**3]])
        basis = nullspace(m)
        self.assertEqual(len(basis), 2)
        for vector in basis:
            self.assertFalse(any(m.apply(vector)))


class ColumnOrderTest(SimpleTestCase):
    def setUp(self):
        rng = random.Random(23)
        self.rng = rng
        self.matrices = []
        for _ in range(6):
            rows = [
                [rng.randint(-2, 2) * q ** rng.randint(-1, 2) + rng.randint(-1, 1) for _ in range(5)]
                for _ in range(3)
            ]
            rows.append([a - q * b for a, b in zip(rows[0], rows[2])])
            self.matrices.append(rows)

    def test_rank_and_kernel_survive_column_shuffles(self):
        for rows in self.matrices:
            m = QqMatrix(rows)
            kernel = nullspace(m)
            perm = list(range(m.ncols))
            self.rng.shuffle(perm)
            shuffled = QqMatrix([[row[k] for k in perm] for row in rows])
            with self.subTest(rows=m.as_strings(), perm=perm):
                self.assertEqual(rank_exact(shuffled), rank_exact(m))
                shuffled_kernel = nullspace(shuffled)
                self.assertEqual(len(shuffled_kernel), len(kernel))
                self.assertEqual(len(kernel) + rank_exact(m), m.ncols)
                for vector in shuffled_kernel:
                    self.assertFalse(any(shuffled.apply(vector)))
                    restored = [0] * m.ncols
                    for position, k in enumerate(perm):
                        restored[k] = vector[position]
                    self.assertFalse(any(m.apply(restored)))


class ModularRankTest(SimpleTestCase):
    def setUp(self):
        self.policy = ModularPolicy(num_points=3, primes=[PRIME], seed=7)

    def test_adversarial_point_is_outvoted(self):
        policy = ModularPolicy(points=[ModEval(PRIME, 1), ModEval(PRIME, 2)])
        report = rank_modular(QqMatrix([[q - 1]]), policy)
        self.assertEqual(report.rank, 1)
        self.assertFalse(report.stable)
        self.assertEqual([entry["rank"] for entry in report.ranks], [0, 1])

    def test_random_matrices_agree_with_exact(self):
        rng = random.Random(11)
        for _ in range(5):
            rows = [[rng.randint(-2, 2) * q ** rng.randint(0, 2) for _ in range(4)] for _ in range(3)]
            rows.append([a + b for a, b in zip(rows[0], rows[1])])
            m = QqMatrix(rows)
            with self.subTest(rows=m.as_strings()):
                self.assertEqual(matrix_rank(m, "modular", self.policy), rank_exact(m))
                self.assertEqual(matrix_rank(m, "both", self.policy), rank_exact(m))

    def test_zero_matrix(self):
        self.assertEqual(matrix_rank(QqMatrix([[0, 0]]), "modular", self.policy), 0)

    def test_every_point_bad(self):
        policy = ModularPolicy(points=[ModEval(PRIME, 2)])
        with self.assertRaises(AllSpecializationsBad):
            rank_modular(QqMatrix([[1 / (q - 2)]]), policy)

    def test_both_mode_flags_disagreement(self):
        policy = ModularPolicy(points=[ModEval(PRIME, 1)])
        with self.assertRaises(RankInstability):
            matrix_rank(QqMatrix([[q - 1]]), "both", policy)

    @override_settings(LOOPCHAR_SEED=3, LOOPCHAR_MODULAR_POINTS=2, LOOPCHAR_PRIMES=str(PRIME))
    def test_policy_from_settings(self):
        policy = ModularPolicy.from_settings(num_points=4)
        self.assertEqual(policy.seed, 3)
        self.assertEqual(policy.num_points, 4)
        self.assertEqual(policy.primes, [PRIME])
        self.assertEqual(policy.draw_points(), policy.draw_points())


class IncrementalRankTest(SimpleTestCase):
    def test_rank_grows_only_on_new_directions(self):
        tracker = IncrementalModularRank(ModEval(PRIME, 5))
        self.assertEqual(tracker.add([1, q]), 1)
        self.assertEqual(tracker.add([q, q**2]), 1)
        self.assertEqual(tracker.add([0, 1]), 2)

    def test_bad_point_disables_tracking(self):
        tracker = IncrementalModularRank(ModEval(PRIME, 2))
        tracker.add([1, 0])
        tracker.add([1 / (q - 2), 1])
        self.assertFalse(tracker.usable)
        self.assertEqual(tracker.rank, 1)


class VariableCountTest(SimpleTestCase):
    def test_primes_must_exceed_the_factorial(self):
        big = 2**61 - 1
        policy = ModularPolicy(primes=[PRIME, big], seed=1)
        self.assertEqual(policy.for_variables(12).primes, [PRIME, big])
        restricted = policy.for_variables(13)
        self.assertEqual(restricted.factorial_bound, 13)
        self.assertEqual(restricted.primes, [big])
        self.assertTrue(all(point.prime == big for point in restricted.draw_points()))
        with self.assertRaises(AllSpecializationsBad):
            policy.for_variables(20)

    def test_explicit_points_are_kept(self):
        policy = ModularPolicy(points=[ModEval(PRIME, 5)])
        self.assertIs(policy.for_variables(20), policy)

    def test_exact_mode_needs_no_policy(self):
        self.assertIsNone(policy_for(20, "exact"))
        self.assertEqual(policy_for(3, "modular", ModularPolicy(primes=[PRIME])).factorial_bound, 3)
