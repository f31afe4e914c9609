# management/commands/roots.py

from loop_algebra.serializers import RunConfigSerializer
from loop_algebra.services import CartanService

from ._base import LoopAlgebraCommand


class Command(LoopAlgebraCommand):
    help = "List the positive roots of a finite-type Cartan matrix"

    serializer_class = RunConfigSerializer
    command_name = "roots"

    def compute(self, config, serializer):
        return CartanService.roots_report(config["cartan"]), None

    def render_summary(self, payload, passed):
        return f"{payload['cartan']}: {payload['count']} positive roots"
