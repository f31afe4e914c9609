# management/commands/a_table.py

from loop_algebra.serializers import A_TABLE_MODES, ATableConfigSerializer
from loop_algebra.services import ATableService

from ._base import LoopAlgebraCommand


class Command(LoopAlgebraCommand):
    help = "Tabulate the exponents a_n of the graded-dimension product"

    serializer_class = ATableConfigSerializer
    command_name = "a_table"
    mode_flag = "--rank-mode"

    def add_command_arguments(self, parser):
        parser.add_argument("--bound", required=True, help="Bound on n (one entry broadcasts)")
        parser.add_argument(
            "--mode",
            dest="a_mode",
            choices=A_TABLE_MODES,
            default="finite",
            help="finite: positive-root rule; recursion: from --dims-file; exploratory: word spans",
        )
        parser.add_argument("--dims-file", help="JSON table of B_0 dimensions for recursion mode")

    def compute(self, config, serializer):
        payload = ATableService.build(
            config["cartan"], config["bound"], config["a_mode"], config.get("dims_file")
        )
        return payload, None
