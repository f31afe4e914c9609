import logging
import time

from celery import shared_task

from .cartan import cartan_from_json
from .characters import compute_cell
from .linalg import ModularPolicy
from .parsers import parse_slope

logger = logging.getLogger(__name__)

SLOPE_PARAMS = ("p", "p1", "p2")


def encode_params(params):
    """Cell parameters in a JSON-safe form for the broker"""
    return {key: str(value) if key in SLOPE_PARAMS else value for key, value in params.items()}


def decode_params(params):
    return {
        key: parse_slope(value) if key in SLOPE_PARAMS else value for key, value in params.items()
    }


@shared_task
def compute_cell_task(kind, cartan_json, params, n, d, mode="exact", policy=None):
    """Compute one (n, d) cell of a character or dimension table"""
    cartan = cartan_from_json(cartan_json)
    policy = ModularPolicy.from_settings(**(policy or {}))
    started = time.perf_counter()
    value = compute_cell(kind, cartan, decode_params(params), tuple(n), d, mode, policy)
    seconds = round(time.perf_counter() - started, 6)
    logger.debug(f"[VERIFY] {kind} cell n={list(n)} d={d} on {cartan.label}: {value} ({seconds}s)")
    return {"n": list(n), "d": d, "value": value, "seconds": seconds}
