# characters.py - Refined characters, product formulas and verification reports

import logging
import math
import random
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from django.conf import settings

from .cartan import (
    ACoefficientTable,
    CartanData,
    DegreeVector,
    SlopeVector,
    a_table,
    dot,
    require_finite_type,
    vec_add,
    vectors_up_to,
)
from .exceptions import MissingDimensionTable, NonIntegerSolution, RankInstability
from .linalg import ModularPolicy
from .pairing import gram_for_key, gram_for_Lr
from .slopes import basis_minus_band, basis_plus_geq, slope_subalgebra_dim, word_span_dim

logger = logging.getLogger(__name__)

Cell = Tuple[DegreeVector, Optional[int]]
Factor = Tuple[DegreeVector, int, int]


@dataclass
class CharacterSeries:
    """Integer coefficients indexed by (n, d); d is None once v has been collapsed"""

    coefficients: Dict[Cell, int]
    n_max: DegreeVector
    d_range: Optional[Tuple[int, int]] = None
    convention: str = "q^-n v^d"

    @property
    def refined(self) -> bool:
        return self.d_range is not None

    def get(self, n: Sequence[int], d: Optional[int] = None) -> int:
        return self.coefficients.get((tuple(n), d), 0)

    def cells(self) -> List[Cell]:
        if not self.refined:
            return [(n, None) for n in vectors_up_to(self.n_max)]
        low, high = self.d_range
        return [(n, d) for n in vectors_up_to(self.n_max) for d in range(low, high + 1)]

    def collapse_v(self) -> "CharacterSeries":
        collapsed: Dict[Cell, int] = {}
        for (n, _), value in self.coefficients.items():
            collapsed[(n, None)] = collapsed.get((n, None), 0) + value
        return type(self)(collapsed, self.n_max, None, self.convention.replace(" v^d", ""))

    def as_json(self) -> Dict[str, Any]:
        return {
            "convention": self.convention,
            "window": {"n_max": list(self.n_max), "d_range": list(self.d_range or []) or None},
            "coefficients": [
                {"n": list(n), "d": d, "value": self.get(n, d)} for n, d in self.cells()
            ],
        }


class DimSeries(CharacterSeries):
    """Graded dimensions in the q^n v^d convention"""

    def __init__(self, coefficients, n_max, d_range=None, convention="q^n v^d"):
        super().__init__(coefficients, n_max, d_range, convention)


# Product expansions


def expand_product(
    factors: Iterable[Factor],
    n_max: Sequence[int],
    d_max: Optional[int] = None,
) -> Dict[Cell, int]:
    """prod (1 - x^n v^d)^{-a} truncated to n <= n_max (and d <= d_max when every
    factor has d >= 0)"""
    factors = [(tuple(n), d, a) for n, d, a in factors if a]
    n_max = tuple(n_max)
    cut_d = d_max is not None and all(d >= 0 for _, d, _ in factors)
    terms: Dict[Cell, int] = {(tuple(0 for _ in n_max), 0): 1}
    for n, d, a in factors:
        if a < 0:
            raise ValueError(f"negative exponent {a} for factor at n={list(n)}")
        expanded = dict(terms)
        for (m, e), value in terms.items():
            k, power_n, power_d = 1, vec_add(m, n), e + d
            while all(x <= y for x, y in zip(power_n, n_max)):
                if cut_d and power_d > d_max:
                    break
                key = (power_n, power_d)
                expanded[key] = expanded.get(key, 0) + value * math.comb(a + k - 1, k)
                k, power_n, power_d = k + 1, vec_add(power_n, n), power_d + d
        terms = expanded
    return terms


def _window(terms: Dict[Cell, int], d_range: Tuple[int, int]) -> Dict[Cell, int]:
    low, high = d_range
    return {(n, d): v for (n, d), v in terms.items() if low <= d <= high and v}


def _integers_between(low, high) -> Tuple[Optional[int], Optional[int]]:
    """Integers strictly between two slope values; None marks an open end"""
    first = None if low is None else low.floor() + 1
    last = None if high is None else high.ceil() - 1
    return first, last


def _band_range(p1: SlopeVector, p2: SlopeVector, n: Sequence[int]):
    low = None if p1.infinity < 0 else p1.dot(n)
    high = None if p2.infinity > 0 else p2.dot(n)
    return _integers_between(low, high)


def _default_table(c: CartanData, n_max: Sequence[int], table: Optional[ACoefficientTable]):
    return table if table is not None else a_table(c, n_max)


def chi_product(
    c: CartanData,
    r: Sequence[int],
    n_max: Sequence[int],
    d_max: int,
    refined: bool = True,
    table: Optional[ACoefficientTable] = None,
) -> CharacterSeries:
    """prod_n prod_{d=1}^{max(0, r.n)} (1 - q^-n v^d)^{-a_n}"""
    table = _default_table(c, n_max, table)
    factors = [
        (n, d, table.value(n))
        for n in vectors_up_to(n_max, include_zero=False)
        for d in range(1, max(0, dot(r, n)) + 1)
    ]
    if refined:
        terms = expand_product(factors, n_max, d_max)
        return CharacterSeries(_window(terms, (0, d_max)), tuple(n_max), (0, d_max))
    return CharacterSeries(expand_product(factors, n_max), tuple(n_max)).collapse_v()


def conj_product(
    c: CartanData, n_max: Sequence[int], d_max: int, table: Optional[ACoefficientTable] = None
) -> DimSeries:
    """prod_n prod_{d>=0} (1 - q^n v^d)^{-a_n}"""
    table = _default_table(c, n_max, table)
    factors = [
        (n, d, table.value(n))
        for n in vectors_up_to(n_max, include_zero=False)
        for d in range(0, d_max + 1)
    ]
    terms = expand_product(factors, n_max, d_max)
    return DimSeries(_window(terms, (0, d_max)), tuple(n_max), (0, d_max))


def slope_product(
    c: CartanData, p: SlopeVector, n_max: Sequence[int], table: Optional[ACoefficientTable] = None
) -> DimSeries:
    """prod_{p.n integral} (1 - q^n v^{p.n})^{-a_n}, with v collapsed"""
    table = _default_table(c, n_max, table)
    factors = []
    for n in vectors_up_to(n_max, include_zero=False):
        level = p.dot(n)
        if level.is_integer():
            factors.append((n, int(level), table.value(n)))
    return DimSeries(expand_product(factors, n_max), tuple(n_max)).collapse_v()


def band_product(
    c: CartanData,
    p1: SlopeVector,
    p2: SlopeVector,
    n_max: Sequence[int],
    d_min: int,
    d_max: int,
    natural: bool = False,
    table: Optional[ACoefficientTable] = None,
) -> DimSeries:
    """prod_n prod_{p1.n < d < p2.n} (1 - q^n v^d)^{-a_n}; natural keeps d >= 0 only"""
    table = _default_table(c, n_max, table)
    uses = max(sum(n_max) - 1, 0)
    ranges = {n: _band_range(p1, p2, n) for n in vectors_up_to(n_max, include_zero=False)}
    if natural:
        ranges = {n: (0 if lo is None else max(lo, 0), hi) for n, (lo, hi) in ranges.items()}
    uppers = [hi for lo, hi in ranges.values() if hi is not None]
    lowers = [lo for lo, hi in ranges.values() if lo is not None]
    factors = []
    for n, (lo, hi) in ranges.items():
        if lo is None and hi is None:
            raise ValueError("band with two infinite ends has no finite expansion")
        if lo is None:
            lo = d_min - uses * max(uppers + [0])
        if hi is None:
            hi = d_max - uses * min(lowers + [0])
        factors.extend((n, d, table.value(n)) for d in range(lo, hi + 1))
    terms = expand_product(factors, n_max, d_max)
    return DimSeries(_window(terms, (d_min, d_max)), tuple(n_max), (d_min, d_max))


# Cells


def lr_dim(
    c: CartanData,
    r: Sequence[int],
    n: Sequence[int],
    d: int,
    mode: str = "exact",
    policy: Optional[ModularPolicy] = None,
) -> int:
    """dim of S^-_{<0} / J^r at (-n, d)"""
    require_finite_type(c)
    n = tuple(n)
    if not any(n):
        return int(d == 0)
    if d <= 0:
        return 0
    return gram_for_Lr(c, r, n, d, mode, policy).rank(mode, policy)


def key_dim(
    c: CartanData,
    p1: SlopeVector,
    p2: SlopeVector,
    n: Sequence[int],
    d: int,
    mode: str = "exact",
    policy: Optional[ModularPolicy] = None,
) -> int:
    require_finite_type(c)
    n = tuple(n)
    if not any(n):
        return int(d == 0)
    return gram_for_key(c, p1, p2, n, d, mode, policy).rank(mode, policy)


CELL_KINDS = ("lr", "slope-geq0", "b", "key", "band", "word-span")


def compute_cell(
    kind: str,
    c: CartanData,
    params: Dict[str, Any],
    n: Sequence[int],
    d: Optional[int],
    mode: str = "exact",
    policy: Optional[ModularPolicy] = None,
) -> int:
    if kind == "lr":
        return lr_dim(c, params["r"], n, d, mode, policy)
    if kind == "slope-geq0":
        zero = SlopeVector.of([0] * c.rank)
        return basis_plus_geq(c, zero, n, d, mode, policy).dim
    if kind == "b":
        return slope_subalgebra_dim(c, params["p"], n, mode, policy)
    if kind == "key":
        return key_dim(c, params["p1"], params["p2"], n, d, mode, policy)
    if kind == "band":
        if not any(n):
            return int(d == 0)
        return basis_minus_band(c, params["p1"], params["p2"], n, -d, mode, policy).dim
    if kind == "word-span":
        return word_span_dim(c, n, d, 0, mode, policy)
    raise ValueError(f"unknown cell kind {kind!r}")


def _computed_series(
    kind: str,
    c: CartanData,
    params: Dict[str, Any],
    cells: Sequence[Cell],
    mode: str,
    policy: Optional[ModularPolicy],
    timings: Optional[Dict[Cell, float]] = None,
) -> Dict[Cell, int]:
    values = {}
    for n, d in cells:
        started = time.perf_counter()
        values[(n, d)] = compute_cell(kind, c, params, n, d, mode, policy)
        if timings is not None:
            timings[(n, d)] = round(time.perf_counter() - started, 6)
    return values


def chi_refined(
    c: CartanData,
    r: Sequence[int],
    n_max: Sequence[int],
    d_max: int,
    mode: str = "exact",
    policy: Optional[ModularPolicy] = None,
) -> CharacterSeries:
    series = CharacterSeries({}, tuple(n_max), (0, d_max))
    values = _computed_series("lr", c, {"r": list(r)}, series.cells(), mode, policy)
    series.coefficients = {cell: v for cell, v in values.items() if v}
    return series


def dims_slope_geq0(
    c: CartanData, n_max: Sequence[int], d_max: int, mode: str = "exact", policy=None
) -> DimSeries:
    series = DimSeries({}, tuple(n_max), (0, d_max))
    values = _computed_series("slope-geq0", c, {}, series.cells(), mode, policy)
    series.coefficients = {cell: v for cell, v in values.items() if v}
    return series


def b_dim_series(
    c: CartanData, p: SlopeVector, n_max: Sequence[int], mode: str = "exact", policy=None
) -> DimSeries:
    series = DimSeries({}, tuple(n_max))
    values = _computed_series("b", c, {"p": p}, series.cells(), mode, policy)
    series.coefficients = {cell: v for cell, v in values.items() if v}
    return series


def key_dims(
    c: CartanData,
    p1: SlopeVector,
    p2: SlopeVector,
    n_max: Sequence[int],
    d_max: int,
    mode: str = "exact",
    policy=None,
) -> DimSeries:
    series = DimSeries({}, tuple(n_max), (0, d_max))
    values = _computed_series("key", c, {"p1": p1, "p2": p2}, series.cells(), mode, policy)
    series.coefficients = {cell: v for cell, v in values.items() if v}
    return series


def band_dim_series(
    c: CartanData,
    p1: SlopeVector,
    p2: SlopeVector,
    n_max: Sequence[int],
    d_min: int,
    d_max: int,
    mode: str = "exact",
    policy=None,
) -> DimSeries:
    series = DimSeries({}, tuple(n_max), (d_min, d_max))
    values = _computed_series("band", c, {"p1": p1, "p2": p2}, series.cells(), mode, policy)
    series.coefficients = {cell: v for cell, v in values.items() if v}
    return series


def word_span_series(
    c: CartanData, n_max: Sequence[int], d_max: int, mode: str = "exact", policy=None
) -> DimSeries:
    """Dimensions of the span of words in letters of degree >= 0"""
    series = DimSeries({}, tuple(n_max), (0, d_max))
    values = _computed_series("word-span", c, {}, series.cells(), mode, policy)
    series.coefficients = {cell: v for cell, v in values.items() if v}
    return series


# a-coefficients from B_0 dimensions


def a_from_b_dims(b_dims: Dict[DegreeVector, Any], bound: Sequence[int]) -> ACoefficientTable:
    """Solve prod (1 - x^n)^{-a_n} = sum dim B_{0|n} x^n degree by degree"""
    bound = tuple(bound)
    zero = tuple(0 for _ in bound)
    dims = {tuple(n): v for n, v in b_dims.items()}
    if dims.get(zero) != 1:
        raise NonIntegerSolution(f"dim B_0 at n=0 must be 1, got {dims.get(zero)}")
    order = sorted(vectors_up_to(bound, include_zero=False), key=lambda n: (sum(n), n))
    entries: Dict[DegreeVector, int] = {}
    product: Dict[Cell, int] = {(zero, 0): 1}
    for n in order:
        if n not in dims:
            raise MissingDimensionTable(f"no B_0 dimension for n={list(n)}")
        target = dims[n]
        if isinstance(target, float):
            if not target.is_integer():
                raise NonIntegerSolution(f"dimension {target} at n={list(n)} is not an integer")
            target = int(target)
        value = target - product.get((n, 0), 0)
        if value < 0:
            raise NonIntegerSolution(
                f"a-value {value} at n={list(n)} is negative; the dimension table is inconsistent"
            )
        entries[n] = value
        if value:
            product = _multiply(product, expand_product([(n, 0, value)], bound), bound)
    return ACoefficientTable(entries, bound, mode="recursion")


def _multiply(left: Dict[Cell, int], right: Dict[Cell, int], bound: Sequence[int]) -> Dict[Cell, int]:
    result: Dict[Cell, int] = {}
    for (m, _), a in left.items():
        for (n, _), b in right.items():
            total = vec_add(m, n)
            if all(x <= y for x, y in zip(total, bound)):
                result[(total, 0)] = result.get((total, 0), 0) + a * b
    return result


# Reports


@dataclass
class CellResult:
    n: DegreeVector
    d: Optional[int]
    computed: int
    formula: int
    mode: str
    seconds: Optional[float] = None
    confirmed: Optional[bool] = None

    @property
    def passed(self) -> bool:
        return self.computed == self.formula

    def as_json(self) -> Dict[str, Any]:
        payload = {
            "n": list(self.n),
            "d": self.d,
            "computed": self.computed,
            "formula": self.formula,
            "pass": self.passed,
            "mode": self.mode,
        }
        if self.confirmed is not None:
            payload["confirmed_exact"] = self.confirmed
        if self.seconds is not None:
            payload["seconds"] = self.seconds
        return payload


@dataclass
class VerificationReport:
    kind: str
    cartan: str
    params: Dict[str, Any]
    window: Dict[str, Any]
    mode: str
    cells: List[CellResult]
    notes: List[str] = field(default_factory=list)
    extras: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(cell.passed for cell in self.cells)

    @property
    def failures(self) -> List[CellResult]:
        return [cell for cell in self.cells if not cell.passed]

    def as_json(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "cartan": self.cartan,
            **self.params,
            "window": self.window,
            "mode": self.mode,
            "passed": self.passed,
            "cells": [cell.as_json() for cell in self.cells],
            "notes": self.notes,
            **self.extras,
        }


def build_report(
    kind: str,
    c: CartanData,
    params: Dict[str, Any],
    computed: CharacterSeries,
    formula: CharacterSeries,
    mode: str,
    timings: Optional[Dict[Cell, float]] = None,
) -> VerificationReport:
    cells = [
        CellResult(
            n, d, computed.get(n, d), formula.get(n, d), mode,
            seconds=(timings or {}).get((n, d)),
        )
        for n, d in computed.cells()
    ]
    window = {"n_max": list(computed.n_max)}
    if computed.d_range is not None:
        window["d_min"], window["d_max"] = computed.d_range
    report = VerificationReport(kind, c.label, params, window, mode, cells)
    report.notes.append(f"all comparisons are restricted to the window {window}")
    logger.info(
        f"[VERIFY] {kind} on {c.label}: {len(cells) - len(report.failures)}/{len(cells)} "
        f"cells pass"
    )
    return report


def confirm_exact(
    report: VerificationReport,
    kind: str,
    c: CartanData,
    params: Dict[str, Any],
    count: Optional[int] = None,
    seed: Optional[int] = None,
) -> None:
    """Recompute failing cells and a seeded sample of the rest with exact ranks"""
    if report.mode != "modular":
        return
    count = settings.LOOPCHAR_CONFIRM_CELLS if count is None else count
    seed = settings.LOOPCHAR_SEED if seed is None else seed
    nontrivial = [cell for cell in report.cells if cell.passed and cell.computed]
    rng = random.Random(seed)
    sample = rng.sample(nontrivial, min(count, len(nontrivial)))
    for cell in report.failures + sample:
        exact = compute_cell(kind, c, params, cell.n, cell.d, "exact")
        cell.confirmed = exact == cell.computed
        if not cell.confirmed:
            logger.error(
                f"[VERIFY] Modular value {cell.computed} at n={list(cell.n)} d={cell.d} "
                f"differs from exact value {exact}"
            )
            raise RankInstability(
                f"modular and exact ranks disagree at n={list(cell.n)}, d={cell.d}"
            )
    report.notes.append(f"{len(report.failures) + len(sample)} cells confirmed in exact mode")


def verify_theorem(
    c: CartanData,
    r: Sequence[int],
    n_max: Sequence[int],
    d_max: int,
    mode: str = "exact",
    policy: Optional[ModularPolicy] = None,
    unrefined: bool = False,
    with_timing: bool = False,
    cell_values: Optional[Callable[[Sequence[Cell]], Dict[Cell, int]]] = None,
) -> VerificationReport:
    """Compare the refined character of L^r with its product formula cell by cell"""
    require_finite_type(c)
    params = {"r": list(r)}
    computed = CharacterSeries({}, tuple(n_max), (0, d_max))
    timings: Optional[Dict[Cell, float]] = {} if with_timing else None
    if cell_values is not None:
        values = cell_values(computed.cells())
    else:
        values = _computed_series("lr", c, params, computed.cells(), mode, policy, timings)
    computed.coefficients = {cell: v for cell, v in values.items() if v}
    formula = chi_product(c, r, n_max, d_max, refined=True)
    report = build_report("theorem", c, params, computed, formula, mode, timings)
    confirm_exact(report, "lr", c, params, seed=policy.seed if policy else None)
    if unrefined:
        left, right = computed.collapse_v(), chi_product(c, r, n_max, d_max, refined=False)
        report.extras["unrefined"] = [
            {"n": list(n), "computed": left.get(n), "formula": right.get(n)}
            for n, _ in left.cells()
        ]
        complete = d_max >= max((dot(r, n) for n in vectors_up_to(n_max)), default=0)
        report.extras["unrefined_complete"] = complete
        if not complete:
            report.notes.append("unrefined values of the computed side are limited to d <= d_max")
    return report
