# linalg.py - Exact and modular rank over Q(q)

import logging
import math
import random
from dataclasses import dataclass, field, replace
from functools import reduce
from typing import Any, Dict, List, Optional, Sequence, Tuple

from django.conf import settings

from .exceptions import AllSpecializationsBad, BadSpecialization, RankInstability
from .scalars import QQ_Q, ModEval, QqScalar, format_qq, qq, specialize

logger = logging.getLogger(__name__)

ZZ_Q = QQ_Q.ring


class QqMatrix:
    """Dense matrix over Q(q) with unique row and column labels"""

    def __init__(
        self,
        rows: Sequence[Sequence[Any]],
        row_labels: Optional[Sequence[str]] = None,
        col_labels: Optional[Sequence[str]] = None,
        ncols: Optional[int] = None,
    ):
        self.rows: List[List[QqScalar]] = [[qq(v) for v in row] for row in rows]
        widths = {len(row) for row in self.rows}
        if len(widths) > 1:
            raise ValueError(f"rows have different lengths {sorted(widths)}")
        if widths:
            self.ncols = widths.pop()
        else:
            self.ncols = ncols if ncols is not None else len(col_labels or ())
        self.row_labels = list(row_labels) if row_labels is not None else [
            f"r{k}" for k in range(len(self.rows))
        ]
        self.col_labels = list(col_labels) if col_labels is not None else [
            f"c{k}" for k in range(self.ncols)
        ]
        if len(self.row_labels) != self.nrows or len(self.col_labels) != self.ncols:
            raise ValueError("label count does not match the matrix shape")
        if len(set(self.row_labels)) != self.nrows or len(set(self.col_labels)) != self.ncols:
            raise ValueError("matrix labels must be unique")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.nrows, self.ncols

    def entry(self, i: int, j: int) -> QqScalar:
        return self.rows[i][j]

    def transpose(self) -> "QqMatrix":
        return QqMatrix(
            [list(col) for col in zip(*self.rows)] if self.rows else [],
            row_labels=self.col_labels,
            col_labels=self.row_labels,
            ncols=self.nrows,
        )

    def is_zero(self) -> bool:
        return not any(v for row in self.rows for v in row)

    def apply(self, vector: Sequence[QqScalar]) -> List[QqScalar]:
        return [sum((a * qq(b) for a, b in zip(row, vector)), qq(0)) for row in self.rows]

    def as_strings(self) -> List[List[str]]:
        return [[format_qq(v) for v in row] for row in self.rows]

    def __repr__(self):
        return f"QqMatrix({self.nrows}x{self.ncols})"


# Exact rank


def _integral_row(row: Sequence[QqScalar]) -> Dict[int, Any]:
    entries = {j: v for j, v in enumerate(row) if v}
    if not entries:
        return {}
    common = reduce(lambda a, b: a.lcm(b), (v.denom for v in entries.values()))
    return {j: v.numer * common.exquo(v.denom) for j, v in entries.items()}


def _entry_size(poly) -> int:
    return len(poly.terms()) + poly.degree()


def _choose_pivot(active: List[Dict[int, Any]]) -> Tuple[int, int]:
    col_count: Dict[int, int] = {}
    for row in active:
        for j in row:
            col_count[j] = col_count.get(j, 0) + 1
    best = None
    for i, row in enumerate(active):
        for j, value in row.items():
            key = ((len(row) - 1) * (col_count[j] - 1), _entry_size(value), i, j)
            if best is None or key < best:
                best = key
    return best[2], best[3]


def rank_exact(m: QqMatrix) -> int:
    """Fraction-free elimination on integer-polynomial rows"""
    active = [row for row in (_integral_row(r) for r in m.rows) if row]
    previous = ZZ_Q.one
    rank = 0
    while active:
        i, j = _choose_pivot(active)
        pivot_row = active.pop(i)
        pivot = pivot_row[j]
        reduced = []
        for row in active:
            factor = row.get(j)
            updated = {}
            for col in set(row) | set(pivot_row):
                if col == j:
                    continue
                value = pivot * row.get(col, ZZ_Q.zero)
                if factor is not None:
                    value -= factor * pivot_row.get(col, ZZ_Q.zero)
                if value:
                    updated[col] = value.exquo(previous)
            if updated:
                reduced.append(updated)
        previous = pivot
        active = reduced
        rank += 1
    logger.debug(f"[LINALG] exact rank {rank} for {m.nrows}x{m.ncols}")
    return rank


def nullspace(m: QqMatrix) -> List[List[QqScalar]]:
    """Basis of the right kernel, read off a reduced row echelon form"""
    rows = [list(row) for row in m.rows]
    pivots: List[int] = []
    r = 0
    for col in range(m.ncols):
        pick = next((k for k in range(r, len(rows)) if rows[k][col]), None)
        if pick is None:
            continue
        rows[r], rows[pick] = rows[pick], rows[r]
        inverse = 1 / rows[r][col]
        rows[r] = [v * inverse for v in rows[r]]
        for k in range(len(rows)):
            if k != r and rows[k][col]:
                factor = rows[k][col]
                rows[k] = [a - factor * b for a, b in zip(rows[k], rows[r])]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    basis = []
    for free in (c for c in range(m.ncols) if c not in pivots):
        vector = [qq(0)] * m.ncols
        vector[free] = qq(1)
        for k, col in enumerate(pivots):
            vector[col] = -rows[k][free]
        if any(m.apply(vector)):
            raise ArithmeticError(f"kernel vector for column {free} failed verification")
        basis.append(vector)
    return basis


# Modular rank


def rank_mod(rows: Sequence[Sequence[int]], prime: int) -> int:
    work = [[v % prime for v in row] for row in rows]
    rank = 0
    ncols = len(work[0]) if work else 0
    for col in range(ncols):
        pick = next((k for k in range(rank, len(work)) if work[k][col]), None)
        if pick is None:
            continue
        work[rank], work[pick] = work[pick], work[rank]
        inverse = pow(work[rank][col], -1, prime)
        for k in range(rank + 1, len(work)):
            if work[k][col]:
                factor = work[k][col] * inverse % prime
                work[k] = [(a - factor * b) % prime for a, b in zip(work[k], work[rank])]
        rank += 1
    return rank


def _parse_primes(raw) -> List[int]:
    if isinstance(raw, str):
        return [int(p) for p in raw.split(",") if p.strip()]
    return [int(p) for p in raw]


@dataclass
class ModularPolicy:
    num_points: int = 3
    primes: List[int] = field(default_factory=lambda: [2147483647])
    seed: int = 0
    order_guard: int = 64
    factorial_bound: int = 0
    points: Optional[List[ModEval]] = None

    @classmethod
    def from_settings(cls, **overrides) -> "ModularPolicy":
        values = dict(
            num_points=settings.LOOPCHAR_MODULAR_POINTS,
            primes=_parse_primes(settings.LOOPCHAR_PRIMES),
            seed=settings.LOOPCHAR_SEED,
            order_guard=settings.LOOPCHAR_ORDER_GUARD,
        )
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def for_variables(self, count: int) -> "ModularPolicy":
        """Copy restricted to primes above count!"""
        if self.points is not None:
            return self
        primes = [p for p in self.primes if p > math.factorial(count)]
        if not primes:
            raise AllSpecializationsBad(
                f"no configured prime exceeds {count}!; pass larger primes for {count} variables"
            )
        return replace(self, primes=primes, factorial_bound=count)

    def draw_points(self, attempt: int = 0) -> List[ModEval]:
        if self.points is not None:
            return list(self.points)
        rng = random.Random(f"{self.seed}:{attempt}")
        return [
            ModEval.draw(
                self.primes[k % len(self.primes)],
                rng,
                order_guard=self.order_guard,
                factorial_bound=self.factorial_bound,
            )
            for k in range(self.num_points)
        ]



def policy_for(count: int, mode: str, policy: Optional[ModularPolicy] = None):
    """Policy for a rank over `count` variables; exact mode needs none"""
    if mode == "exact":
        return policy
    return (policy or ModularPolicy.from_settings()).for_variables(count)


@dataclass
class ModularRank:
    rank: int
    ranks: List[Dict[str, Any]]
    stable: bool
    note: str = ""

    def as_dict(self) -> Dict[str, Any]:
        return {"rank": self.rank, "stable": self.stable, "points": self.ranks, "note": self.note}


def rank_at(m: QqMatrix, point: ModEval) -> int:
    rows = [[specialize(v, point) for v in row] for row in m.rows]
    return rank_mod(rows, point.prime)


def rank_modular(m: QqMatrix, policy: Optional[ModularPolicy] = None) -> ModularRank:
    """Maximum rank over the specializations; disagreement marks the result unstable"""
    policy = policy or ModularPolicy.from_settings()
    attempts = 1 if policy.points is not None else 3
    for attempt in range(attempts):
        report, good = [], []
        for point in policy.draw_points(attempt):
            entry = {"prime": point.prime, "q_value": point.q_value}
            try:
                entry["rank"] = rank_at(m, point)
                good.append(entry["rank"])
            except BadSpecialization as exc:
                entry["rank"] = None
                entry["error"] = str(exc)
                logger.warning(f"[LINALG] Bad specialization q={point.q_value}: {exc}")
            report.append(entry)
        if good:
            stable = len(set(good)) == 1
            note = "" if stable else f"ranks {sorted(set(good))} differ across points"
            if not stable:
                logger.warning(f"[LINALG] Unstable modular rank: {note}")
            return ModularRank(max(good), report, stable, note)
    raise AllSpecializationsBad(
        f"every drawn q_value hits a denominator of the {m.nrows}x{m.ncols} matrix; re-seed"
    )


class IncrementalModularRank:
    """Rank mod p of a growing row set at one fixed point"""

    def __init__(self, point: ModEval):
        self.point = point
        self.echelon: Dict[int, List[int]] = {}
        self.usable = True

    @property
    def rank(self) -> int:
        return len(self.echelon)

    def add(self, row: Sequence[QqScalar]) -> int:
        if not self.usable:
            return self.rank
        prime = self.point.prime
        try:
            values = [specialize(v, self.point) for v in row]
        except BadSpecialization:
            logger.debug("[LINALG] Incremental rank disabled by a bad specialization")
            self.usable = False
            return self.rank
        for col in range(len(values)):
            if not values[col]:
                continue
            pivot = self.echelon.get(col)
            if pivot is None:
                inverse = pow(values[col], -1, prime)
                self.echelon[col] = [v * inverse % prime for v in values]
                break
            factor = values[col]
            values = [(a - factor * b) % prime for a, b in zip(values, pivot)]
        return self.rank


RANK_MODES = ("exact", "modular", "both")


def matrix_rank(m: QqMatrix, mode: str = "exact", policy: Optional[ModularPolicy] = None) -> int:
    if mode not in RANK_MODES:
        raise ValueError(f"rank mode must be one of {RANK_MODES}, got {mode!r}")
    if m.nrows == 0 or m.ncols == 0:
        return 0
    if mode == "exact":
        return rank_exact(m)
    report = rank_modular(m, policy)
    if mode == "modular":
        return report.rank
    exact = rank_exact(m)
    if exact != report.rank:
        logger.error(
            f"[LINALG] Modular rank {report.rank} disagrees with exact rank {exact} "
            f"on {m.nrows}x{m.ncols}: {report.as_dict()}"
        )
        raise RankInstability(
            f"modular rank {report.rank} != exact rank {exact} for a {m.nrows}x{m.ncols} matrix"
        )
    return exact
