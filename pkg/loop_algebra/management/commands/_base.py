# management/commands/_base.py

import logging
import time

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from loop_algebra.exceptions import INVALID_INPUT, LoopAlgebraError
from loop_algebra.linalg import RANK_MODES
from loop_algebra.services import ReportService

logger = logging.getLogger(__name__)

MISMATCH = 1


class LoopAlgebraCommand(BaseCommand):
    """Validates flags, runs the engine, writes the report and maps errors to exit codes"""

    serializer_class = None
    command_name = None
    mode_flag = "--mode"

    def add_arguments(self, parser):
        source = parser.add_mutually_exclusive_group()
        source.add_argument("--type", help="Catalog Cartan type, e.g. A1, A2, B2, G2")
        source.add_argument("--cartan-file", help='JSON file {"d": [[...]]} with a symmetrized Cartan matrix')
        parser.add_argument(
            self.mode_flag, dest="mode", choices=RANK_MODES, default="exact", help="Rank computation mode"
        )
        parser.add_argument("--seed", type=int, help="Seed for every random choice")
        parser.add_argument("--primes", help="Comma-separated primes above 2^30 for modular ranks")
        parser.add_argument("--points", type=int, help="Specialization points per modular rank")
        parser.add_argument("--out", help="Write the report to this file")
        parser.add_argument("--format", choices=("json", "csv"), default="json")
        parser.add_argument("--record", action="store_true", help="Persist this run in the database")
        parser.add_argument("--with-timing", action="store_true", help="Add per-cell timings")
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def compute(self, config, serializer):
        """Return (report payload, passed or None)"""
        raise NotImplementedError

    def emit(self, payload, text, fmt):
        self.stdout.write(text, ending="")

    def render_summary(self, payload, passed):
        if passed is None:
            return f"{self.command_name} finished"
        return f"{self.command_name}: {'PASS' if passed else 'FAIL'}"

    def handle(self, *args, **options):
        started = time.perf_counter()
        fields = self.serializer_class().fields
        data = {key: value for key, value in options.items() if key in fields and value is not None}
        serializer = self.serializer_class(data=data)
        if not serializer.is_valid():
            raise CommandError(f"invalid input: {dict(serializer.errors)}", returncode=INVALID_INPUT)
        config = serializer.validated_data
        cartan = config["cartan"]

        try:
            payload, passed = self.compute(config, serializer)
        except LoopAlgebraError as exc:
            logger.error(f"[{self.command_name.upper()}] {type(exc).__name__}: {exc}", exc_info=True)
            self._record(config, serializer, cartan, {"error": str(exc)}, None, exc.exit_code, started)
            raise CommandError(f"{type(exc).__name__}: {exc}", returncode=exc.exit_code) from exc

        payload = {**payload, "config": serializer.echo()}
        text = ReportService.write(payload, config.get("out"), config["format"])
        if config.get("out"):
            self.stdout.write(self.style.SUCCESS(self.render_summary(payload, passed)))
        else:
            self.emit(payload, text, config["format"])

        exit_code = MISMATCH if passed is False else 0
        self._record(config, serializer, cartan, payload, passed, exit_code, started)
        if passed is False:
            raise CommandError(
                f"{self.command_name}: mismatch against the product formula", returncode=MISMATCH
            )

    def _record(self, config, serializer, cartan, payload, passed, exit_code, started):
        if not (config.get("record") or settings.LOOPCHAR_RECORD_RUNS):
            return
        ReportService.record(
            self.command_name,
            cartan.label,
            serializer.echo(),
            payload,
            passed,
            exit_code,
            time.perf_counter() - started,
        )
