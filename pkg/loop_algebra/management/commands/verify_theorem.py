# management/commands/verify_theorem.py

from loop_algebra.serializers import VerifyTheoremConfigSerializer
from loop_algebra.services import VerificationService

from ._base import LoopAlgebraCommand


class Command(LoopAlgebraCommand):
    help = "Compare the refined character of L^r with its product formula cell by cell"

    serializer_class = VerifyTheoremConfigSerializer
    command_name = "verify_theorem"

    def add_command_arguments(self, parser):
        parser.add_argument("--r", required=True, help="Integer vector r, e.g. 1 or 1,1")
        parser.add_argument("--max-n", required=True, help="Window bound on n (one entry broadcasts)")
        parser.add_argument("--max-d", type=int, required=True, help="Window bound on d")
        parser.add_argument(
            "--unrefined", action="store_true", help="Also compare the v-collapsed characters"
        )

    def compute(self, config, serializer):
        report = VerificationService.verify_theorem(
            config["cartan"],
            config["r"],
            config["max_n"],
            config["max_d"],
            mode=config["mode"],
            policy=config["policy"],
            unrefined=config["unrefined"],
            with_timing=config["with_timing"],
        )
        return report.as_json(), report.passed

    def render_summary(self, payload, passed):
        failures = sum(1 for cell in payload["cells"] if not cell["pass"])
        verdict = "PASS" if passed else f"FAIL ({failures} cells)"
        return f"verify_theorem on {payload['cartan']} r={payload['r']}: {verdict}"
