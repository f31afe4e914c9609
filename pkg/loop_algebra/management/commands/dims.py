# management/commands/dims.py

from loop_algebra.serializers import DIMS_SPACES, DimsConfigSerializer
from loop_algebra.services import DimensionService

from ._base import LoopAlgebraCommand


class Command(LoopAlgebraCommand):
    help = "Sweep graded dimensions of a slope subspace and compare with its product formula"

    serializer_class = DimsConfigSerializer
    command_name = "dims"

    def add_command_arguments(self, parser):
        parser.add_argument("--space", required=True, choices=DIMS_SPACES)
        parser.add_argument("--max-n", required=True, help="Window bound on n (one entry broadcasts)")
        parser.add_argument("--max-d", type=int, help="Upper bound on d")
        parser.add_argument("--d-min", type=int, help="Lower bound on d (band only)")
        parser.add_argument("--r", help="Integer vector r (lr)")
        parser.add_argument("--p", help="Slope vector, e.g. 1/2,1/2 or 1+√2,1-√2 (b-subalgebra)")
        parser.add_argument("--p1", help="Lower slope or -inf (band, key)")
        parser.add_argument("--p2", help="Upper slope or inf (band, key)")
        parser.add_argument(
            "--show-basis", action="store_true", help="Include each cell's orbit basis (slope-geq0)"
        )

    def compute(self, config, serializer):
        report = DimensionService.sweep(
            config["space"],
            config["cartan"],
            config["params"],
            config["max_n"],
            d_max=config.get("max_d"),
            d_min=config["d_min"],
            mode=config["mode"],
            policy=config["policy"],
            with_timing=config["with_timing"],
            show_basis=config["show_basis"],
        )
        return report.as_json(), report.passed
