# management/commands/pair.py

from loop_algebra.serializers import PairConfigSerializer
from loop_algebra.services import PairingService

from ._base import LoopAlgebraCommand


class Command(LoopAlgebraCommand):
    help = "Evaluate the pairing of an e-word with a minus-side element"

    serializer_class = PairConfigSerializer
    command_name = "pair"

    def add_command_arguments(self, parser):
        parser.add_argument("--word", required=True, help='e-word, e.g. "e[1,0] e[1,0]"')
        parser.add_argument(
            "--minus",
            required=True,
            help='f-word such as "f[1,0] f[1,0]" or a numerator polynomial in z[i,a]',
        )
        parser.add_argument("--hdeg", help="Horizontal degree of a polynomial --minus literal")
        parser.add_argument(
            "--antipode", action="store_true", help="Pair against the antipode of the element"
        )

    def compute(self, config, serializer):
        value = PairingService.evaluate(config["word"], config["element"], config["antipode"])
        payload = {
            "kind": "pair",
            "cartan": config["cartan"].label,
            "word": str(config["word"]),
            "minus": str(config["element"]),
            "antipode": config["antipode"],
            "value": value,
        }
        return payload, None

    def emit(self, payload, text, fmt):
        if fmt == "json":
            self.stdout.write(payload["value"])
        else:
            super().emit(payload, text, fmt)
