# services.py - Orchestration layer between management commands and the engine

import csv
import io
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from celery import group
from django.conf import settings
from rest_framework.renderers import JSONRenderer

from .cartan import (
    CartanData,
    SlopeVector,
    a_table,
    bilinear,
    dot,
    is_generic,
    positive_roots,
    unit_vector,
    vectors_up_to,
)
from .characters import (
    Cell,
    CharacterSeries,
    DimSeries,
    VerificationReport,
    band_product,
    build_report,
    chi_product,
    conj_product,
    confirm_exact,
    slope_product,
    verify_theorem,
)
from .linalg import ModularPolicy
from .models import VerificationRun
from .pairing import pair_word, pair_word_antipode
from .parsers import load_cartan, parse_dimension_table
from .scalars import format_qq
from .serializers import CellRowSerializer, VerificationRunSerializer
from .shuffle import ShuffleElement, Word
from .slopes import basis_plus_geq
from .tasks import compute_cell_task, encode_params

logger = logging.getLogger(__name__)


class CartanService:
    """Loading Cartan data and describing its root system"""

    @staticmethod
    def load(type_name: Optional[str] = None, cartan_file: Optional[str] = None) -> CartanData:
        cartan = load_cartan(type_name, cartan_file)
        logger.info(f"[CARTAN] Loaded {cartan}")
        return cartan

    @staticmethod
    def roots_report(c: CartanData) -> Dict[str, Any]:
        roots = positive_roots(c)
        return {
            "kind": "roots",
            "cartan": c.label,
            "d": [list(row) for row in c.d],
            "rank": c.rank,
            "count": len(roots),
            "positive_roots": [
                {"root": list(root), "height": height, "norm": bilinear(c, root, root)}
                for root, height in roots.heights().items()
            ],
            "highest_root": list(roots.highest_root),
            "simple_pairings": [
                [bilinear(c, unit_vector(c.rank, i), unit_vector(c.rank, j)) for j in range(c.rank)]
                for i in range(c.rank)
            ],
        }


class CellService:
    """Fan-out of per-cell computations through Celery"""

    @staticmethod
    def policy_payload(policy: Optional[ModularPolicy]) -> Dict[str, Any]:
        if policy is None:
            return {}
        return {
            "seed": policy.seed,
            "primes": list(policy.primes),
            "num_points": policy.num_points,
            "order_guard": policy.order_guard,
        }

    @staticmethod
    def run(
        kind: str,
        c: CartanData,
        params: Dict[str, Any],
        cells: Sequence[Cell],
        mode: str = "exact",
        policy: Optional[ModularPolicy] = None,
    ) -> Tuple[Dict[Cell, int], Dict[Cell, float]]:
        """Values and timings per cell, sorted by (n, d)"""
        arguments = [
            (kind, c.as_json(), encode_params(params), list(n), d, mode, CellService.policy_payload(policy))
            for n, d in cells
        ]
        if settings.CELERY_TASK_ALWAYS_EAGER:
            results = [compute_cell_task(*args) for args in arguments]
        else:
            logger.info(f"[VERIFY] Dispatching {len(arguments)} {kind} cells to workers")
            results = group(compute_cell_task.s(*args) for args in arguments).apply_async().get()
        results.sort(key=lambda row: (row["n"], row["d"] if row["d"] is not None else 0))
        values = {(tuple(row["n"]), row["d"]): row["value"] for row in results}
        timings = {(tuple(row["n"]), row["d"]): row["seconds"] for row in results}
        return values, timings


class VerificationService:
    @staticmethod
    def verify_theorem(
        c: CartanData,
        r: Sequence[int],
        n_max: Sequence[int],
        d_max: int,
        mode: str = "exact",
        policy: Optional[ModularPolicy] = None,
        unrefined: bool = False,
        with_timing: bool = False,
    ) -> VerificationReport:
        params = {"r": list(r)}
        timings: Dict[Cell, float] = {}

        def cell_values(cells):
            values, seconds = CellService.run("lr", c, params, cells, mode, policy)
            timings.update(seconds)
            return values

        report = verify_theorem(
            c, r, n_max, d_max, mode, policy, unrefined=unrefined, cell_values=cell_values
        )
        if with_timing:
            for cell in report.cells:
                cell.seconds = timings.get((cell.n, cell.d))
        return report


class DimensionService:
    SPACES = ("slope-geq0", "b-subalgebra", "band", "key", "word-span", "lr")
    ALIASES = {"b": "b-subalgebra"}

    @staticmethod
    def _computed(kind, c, params, series: CharacterSeries, mode, policy, with_timing):
        values, timings = CellService.run(kind, c, params, series.cells(), mode, policy)
        series.coefficients = {cell: v for cell, v in values.items() if v}
        return series, (timings if with_timing else None)

    @staticmethod
    def sweep(
        space: str,
        c: CartanData,
        params: Dict[str, Any],
        n_max: Sequence[int],
        d_max: Optional[int] = None,
        d_min: int = 0,
        mode: str = "exact",
        policy: Optional[ModularPolicy] = None,
        with_timing: bool = False,
        show_basis: bool = False,
    ) -> VerificationReport:
        space = DimensionService.ALIASES.get(space, space)
        n_max = tuple(n_max)
        seed = policy.seed if policy else None
        extras: Dict[str, Any] = {}

        if space == "lr":
            return VerificationService.verify_theorem(
                c, params["r"], n_max, d_max, mode, policy, with_timing=with_timing
            )
        if space == "slope-geq0":
            kind = "slope-geq0"
            computed, timings = DimensionService._computed(
                kind, c, {}, DimSeries({}, n_max, (0, d_max)), mode, policy, with_timing
            )
            formula = conj_product(c, n_max, d_max)
            if show_basis:
                zero = SlopeVector.of([0] * c.rank)
                extras["bases"] = [
                    basis_plus_geq(c, zero, n, d, mode, policy).as_json()
                    for n, d in sorted(computed.coefficients)
                    if any(n)
                ]
        elif space == "b-subalgebra":
            kind = "b"
            computed, timings = DimensionService._computed(
                kind, c, params, DimSeries({}, n_max), mode, policy, with_timing
            )
            formula = slope_product(c, params["p"], n_max)
            verdict = is_generic(params["p"], n_max)
            extras["genericity"] = {
                "generic": verdict.generic,
                "generator": list(verdict.generator) if verdict.generator else None,
                "witnesses": [list(w) for w in verdict.witnesses] if verdict.witnesses else None,
                "note": verdict.note,
            }
        elif space == "band":
            kind = "band"
            computed, timings = DimensionService._computed(
                kind, c, params, DimSeries({}, n_max, (d_min, d_max)), mode, policy, with_timing
            )
            formula = band_product(c, params["p1"], params["p2"], n_max, d_min, d_max)
        elif space == "key":
            kind = "key"
            computed, timings = DimensionService._computed(
                kind, c, params, DimSeries({}, n_max, (0, d_max)), mode, policy, with_timing
            )
            formula = band_product(c, params["p1"], params["p2"], n_max, 0, d_max, natural=True)
            p1, p2 = params["p1"], params["p2"]
            if p1.infinity < 0 and not p2.is_infinite and all(x.is_integer() for x in p2.entries):
                extras["lr_cross_check"] = DimensionService._lr_cross_check(
                    c, [int(x) for x in p2.entries], computed
                )
        elif space == "word-span":
            kind = "word-span"
            computed, timings = DimensionService._computed(
                kind, c, {}, DimSeries({}, n_max, (0, d_max)), mode, policy, with_timing
            )
            formula, _ = DimensionService._computed(
                "slope-geq0", c, {}, DimSeries({}, n_max, (0, d_max)), mode, policy, False
            )
            extras["gaps"] = [
                {"n": list(n), "d": d, "word_span": computed.get(n, d), "rational": formula.get(n, d)}
                for n, d in computed.cells()
                if computed.get(n, d) != formula.get(n, d)
            ]
        else:
            raise ValueError(f"unknown dimension space {space!r}")

        report = build_report(space, c, encode_params(params), computed, formula, mode, timings)
        report.extras.update(extras)
        if space == "word-span":
            report.notes.append("word-span dimensions are compared with rational slope >= 0 dimensions")
        confirm_exact(report, kind, c, params, seed=seed)
        logger.info(f"[DIMS] {space} sweep on {c.label}: passed={report.passed}")
        return report

    @staticmethod
    def _lr_cross_check(c: CartanData, r: Sequence[int], key: DimSeries) -> List[Dict[str, Any]]:
        """Compare key cells (n, d) with L^r product cells (n, r.n - d)"""
        top = max(dot(r, n) for n in vectors_up_to(key.n_max))
        chi = chi_product(c, r, key.n_max, max(top, 0))
        return [
            {"n": list(n), "d": d, "key": key.get(n, d), "lr": chi.get(n, dot(r, n) - d)}
            for n, d in key.cells()
        ]


class PairingService:
    @staticmethod
    def evaluate(word: Word, element: ShuffleElement, antipode: bool = False) -> str:
        value = pair_word_antipode(word, element) if antipode else pair_word(word, element)
        rendered = format_qq(value)
        logger.info(f"[PAIRING] <{word}, {'S' if antipode else ''}({element})> = {rendered}")
        return rendered


class ATableService:
    @staticmethod
    def build(
        c: CartanData,
        bound: Sequence[int],
        mode: str = "finite",
        dims_file: Optional[str] = None,
    ) -> Dict[str, Any]:
        b_dims = parse_dimension_table(dims_file, c.rank) if dims_file else None
        table = a_table(c, bound, mode, b_dims=b_dims)
        payload = {
            "kind": "a-table",
            "cartan": c.label,
            "mode": table.mode,
            "bound": list(table.bound),
            "verified": table.verified,
            "entries": [{"n": list(n), "a": a} for n, a in sorted(table.entries.items())],
            "support": [list(n) for n in table.support()],
            "notes": [],
        }
        if not table.verified:
            payload["notes"].append("exploratory: word-span dimensions, unverified beyond finite type")
        return payload


class ReportService:
    @staticmethod
    def render(payload: Dict[str, Any], fmt: str = "json") -> str:
        if fmt == "csv":
            return ReportService.to_csv(payload)
        return JSONRenderer().render(payload, renderer_context={"indent": 2}).decode() + "\n"

    @staticmethod
    def to_csv(payload: Dict[str, Any]) -> str:
        rows = payload.get("cells") or payload.get("entries") or payload.get("positive_roots")
        if not rows:
            rows = [{k: v for k, v in payload.items() if not isinstance(v, (dict, list))}]
        buffer = io.StringIO()
        if "computed" in rows[0]:
            data = CellRowSerializer(rows, many=True).data
        else:
            data = [
                {k: (",".join(map(str, v)) if isinstance(v, list) else v) for k, v in row.items()}
                for row in rows
            ]
        writer = csv.DictWriter(buffer, fieldnames=list(data[0].keys()), lineterminator="\n")
        writer.writeheader()
        writer.writerows(data)
        return buffer.getvalue()

    @staticmethod
    def write(payload: Dict[str, Any], out: Optional[str], fmt: str = "json") -> str:
        text = ReportService.render(payload, fmt)
        if out:
            Path(out).write_text(text)
            logger.info(f"[REPORT] Wrote {fmt} report to {out}")
        return text

    @staticmethod
    def record(
        command: str,
        cartan_label: str,
        config: Dict[str, Any],
        payload: Dict[str, Any],
        passed: Optional[bool],
        exit_code: int,
        elapsed_seconds: float,
    ) -> VerificationRun:
        serializer = VerificationRunSerializer(
            data={
                "command": command,
                "cartan_label": cartan_label,
                "config": config,
                "report": payload,
                "passed": passed,
                "exit_code": exit_code,
                "elapsed_seconds": round(elapsed_seconds, 6),
            }
        )
        serializer.is_valid(raise_exception=True)
        run = serializer.save()
        logger.info(f"[REPORT] Recorded run {run.pk}: {run}")
        return run
