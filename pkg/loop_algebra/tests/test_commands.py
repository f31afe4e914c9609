import json
import tempfile
from io import StringIO
from pathlib import Path
from unittest import mock

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase, override_settings

from loop_algebra.characters import CellResult, VerificationReport
from loop_algebra.exceptions import AllSpecializationsBad
from loop_algebra.models import VerificationRun


def run(name, **options):
    out = StringIO()
    call_command(name, stdout=out, stderr=StringIO(), **options)
    return out.getvalue()


class VerifyTheoremCommandTest(TestCase):
    def test_a1_window_passes(self):
        payload = json.loads(run("verify_theorem", type="A1", r="1", max_n="2", max_d=2))
        self.assertTrue(payload["passed"])
        self.assertEqual(payload["config"]["r"], "1")
        self.assertNotIn("seconds", payload["cells"][0])

    def test_unknown_type(self):
        with self.assertRaises(CommandError) as ctx:
            run("verify_theorem", type="X9", r="1", max_n="1", max_d=1)
        self.assertEqual(ctx.exception.returncode, 2)

    def test_report_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "report.json"
            summary = run("verify_theorem", type="A1", r="-1", max_n="2", max_d=1, out=str(path))
            self.assertIn("PASS", summary)
            self.assertTrue(json.loads(path.read_text())["passed"])

    def test_mismatch_exit_code(self):
        report = VerificationReport(
            "theorem", "A1", {"r": [1]}, {"n_max": [1]}, "exact", [CellResult((1,), 1, 0, 1, "exact")]
        )
        target = "loop_algebra.management.commands.verify_theorem.VerificationService.verify_theorem"
        with mock.patch(target, return_value=report):
            with self.assertRaises(CommandError) as ctx:
                run("verify_theorem", type="A1", r="1", max_n="1", max_d=1, record=True)
        self.assertEqual(ctx.exception.returncode, 1)
        self.assertFalse(VerificationRun.objects.get().passed)

    def test_engine_errors_map_to_exit_codes(self):
        target = "loop_algebra.management.commands.verify_theorem.VerificationService.verify_theorem"
        with mock.patch(target, side_effect=AllSpecializationsBad("every point is bad")):
            with self.assertRaises(CommandError) as ctx:
                run("verify_theorem", type="A1", r="1", max_n="1", max_d=1, mode="modular")
        self.assertEqual(ctx.exception.returncode, 3)

    @override_settings(LOOPCHAR_RECORD_RUNS=True)
    def test_runs_are_recorded(self):
        run("verify_theorem", type="A1", r="1", max_n="1", max_d=1, seed=3)
        recorded = VerificationRun.objects.get()
        self.assertEqual(recorded.command, "verify_theorem")
        self.assertEqual(recorded.cartan_label, "A1")
        self.assertTrue(recorded.passed)
        self.assertEqual(recorded.config["seed"], 3)


class PairCommandTest(TestCase):
    def test_degree_zero_words(self):
        output = run("pair", type="A1", word="e[1,0] e[1,0]", minus="f[1,0] f[1,0]")
        self.assertEqual(output.strip(), "q^2+1")

    def test_antipode(self):
        output = run("pair", type="A1", word="e[1,-1]", minus="f[1,1]", antipode=True)
        self.assertEqual(output.strip(), "-1")

    def test_bad_literal(self):
        with self.assertRaises(CommandError) as ctx:
            run("pair", type="A1", word="e[1,0] f[1,0]", minus="f[1,0]")
        self.assertEqual(ctx.exception.returncode, 2)


class DimsCommandTest(TestCase):
    def test_slope_geq0(self):
        payload = json.loads(run("dims", space="slope-geq0", type="A1", max_n="3", max_d=3))
        self.assertTrue(payload["passed"])
        cells = {(tuple(cell["n"]), cell["d"]): cell["computed"] for cell in payload["cells"]}
        self.assertEqual(cells[((2,), 2)], 2)
        self.assertEqual(cells[((3,), 3)], 3)

    def test_b_subalgebra(self):
        payload = json.loads(run("dims", space="b", type="A1", p="1", max_n="3"))
        self.assertTrue(payload["passed"])
        self.assertEqual({cell["computed"] for cell in payload["cells"]}, {1})
        self.assertTrue(payload["genericity"]["generic"])

    def test_csv(self):
        output = run("dims", space="slope-geq0", type="A1", max_n="1", max_d=1, format="csv")
        lines = output.strip().splitlines()
        self.assertEqual(lines[0], "n,d,computed,formula,passed,mode,confirmed_exact,seconds")
        self.assertEqual(len(lines), 5)


class RootsAndATableCommandTest(TestCase):
    def test_roots(self):
        payload = json.loads(run("roots", type="B2"))
        self.assertEqual(payload["count"], 4)
        self.assertEqual(payload["highest_root"], [1, 2])

    def test_roots_csv(self):
        output = run("roots", type="A2", format="csv")
        self.assertEqual(output.splitlines()[0], "root,height,norm")

    def test_a_table(self):
        payload = json.loads(run("a_table", type="A2", bound="2"))
        self.assertEqual(payload["support"], [[0, 1], [1, 0], [1, 1]])
        self.assertTrue(payload["verified"])

    def test_recursion_from_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "dims.json"
            path.write_text(json.dumps({"0": 1, "1": 1, "2": 1}))
            payload = json.loads(
                run("a_table", type="A1", bound="2", a_mode="recursion", dims_file=str(path))
            )
        self.assertEqual(payload["entries"], [{"n": [1], "a": 1}, {"n": [2], "a": 0}])
