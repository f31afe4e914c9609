# pairing.py - Constant terms in nested regimes, Hopf pairings and Gram matrices

import logging
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple

from django.conf import settings

from .cartan import CartanData, SlopeVector
from .exceptions import (
    AllSpecializationsBad,
    CapInstability,
    EmptyTestFamily,
    ZeroConstantDivisor,
)
from .laurent import LaurentPoly, color_offsets
from .linalg import IncrementalModularRank, ModularPolicy, QqMatrix, matrix_rank, policy_for
from .scalars import ModEval, QqScalar, format_qq, q, qq, specialize
from .shuffle import ShuffleElement, Word
from .slopes import basis_minus_band, basis_minus_strictneg, span_words

logger = logging.getLogger(__name__)

Exponents = Tuple[int, ...]


@dataclass(frozen=True)
class Binomial:
    """Denominator factor (z_x - c z_y)"""

    x: int
    y: int
    c: QqScalar

    def __str__(self):
        return f"(z{self.x + 1} - ({format_qq(self.c)})*z{self.y + 1})"


@dataclass
class RegimeIntegrand:
    """numerator / prod(denominators), expanded in the regime where variable k has
    magnitude rank ranks[k] (rank 0 is the largest)"""

    numerator: Dict[Exponents, QqScalar]
    denominators: List[Binomial]
    ranks: Tuple[int, ...]

    @property
    def nvars(self) -> int:
        return len(self.ranks)

    def total_degrees(self) -> set:
        return {sum(exps) - len(self.denominators) for exps in self.numerator}

    def order(self) -> List[int]:
        """Variables from the most to the least dominant"""
        if len(set(self.ranks)) != len(self.ranks):
            raise ValueError(f"regime ranks {self.ranks} must be distinct")
        return sorted(range(self.nvars), key=lambda k: self.ranks[k])


def _series(integrand: RegimeIntegrand, factor: Binomial):
    """(leading exponent shift, leading coefficient, ratio shift, ratio coefficient)"""
    if not factor.c:
        raise ZeroConstantDivisor(f"denominator {factor} has a zero constant")
    if factor.x == factor.y:
        raise ValueError(f"denominator {factor} does not separate two variables")
    size = integrand.nvars
    lead, ratio = [0] * size, [0] * size
    if integrand.ranks[factor.x] < integrand.ranks[factor.y]:
        # z_x dominates: z_x^{-1} sum c^t (z_y / z_x)^t
        lead[factor.x] = -1
        ratio[factor.y], ratio[factor.x] = 1, -1
        return lead, qq(1), ratio, factor.c
    lead[factor.y] = -1
    ratio[factor.x], ratio[factor.y] = 1, -1
    return lead, -1 / factor.c, ratio, 1 / factor.c


def _suffix_sums(exps: Sequence[int], order: Sequence[int]) -> List[int]:
    """sums[s] = total exponent of the variables at regime positions >= s"""
    sums = [0] * (len(order) + 1)
    for s in range(len(order) - 1, -1, -1):
        sums[s] = sums[s + 1] + exps[order[s]]
    return sums


def _expand_at(
    integrand: RegimeIntegrand, targets: Sequence[Exponents], cap: int
) -> Tuple[Dict[Exponents, QqScalar], bool]:
    """Coefficients of the regime expansion at each target exponent, and whether the cap
    cut a series short.

    Factors are expanded by their dominated variable, least dominant first. A series step
    moves one unit of exponent from a more dominant variable to a less dominant one, so
    the exponent sums over regime suffixes never decrease, and once every factor that
    raises a variable has been expanded its exponent is final.
    """
    size = integrand.nvars
    order = integrand.order()
    position = {k: s for s, k in enumerate(order)}

    def suffix_key(exps: Sequence[int], s: int) -> Exponents:
        return tuple(exps[order[k]] for k in range(s, size))

    totals = {sum(t) for t in targets}
    finished = [{suffix_key(t, s) for t in targets} for s in range(size + 1)]
    suffix_max = [max(_suffix_sums(t, order)[s] for t in targets) for s in range(size + 1)]
    room: List[Dict[Exponents, int]] = [{} for _ in range(size)]
    for t in targets:
        for s in range(size):
            key, value = suffix_key(t, s + 1), t[order[s]]
            room[s][key] = max(room[s].get(key, value), value)

    def within(exps: Sequence[int]) -> bool:
        sums = _suffix_sums(exps, order)
        return all(sums[s] <= suffix_max[s] for s in range(1, size))

    expansions = [_series(integrand, factor) for factor in integrand.denominators]
    shift = [0] * size
    scalar = qq(1)
    for lead, coefficient, _, _ in expansions:
        shift = [a + b for a, b in zip(shift, lead)]
        scalar = scalar * coefficient
    terms: Dict[Exponents, QqScalar] = {}
    for exps, coeff in integrand.numerator.items():
        moved = tuple(a + b for a, b in zip(exps, shift))
        if sum(moved) in totals and within(moved):
            terms[moved] = terms[moved] + coeff * scalar if moved in terms else coeff * scalar

    stages: Dict[int, List[Tuple[int, int, QqScalar]]] = {}
    for _, _, ratio, base in expansions:
        x, y = ratio.index(-1), ratio.index(1)
        stages.setdefault(position[y], []).append((x, y, base))

    truncated = False
    for s in range(size - 1, 0, -1):
        for x, y, base in stages.get(s, []):
            expanded: Dict[Exponents, QqScalar] = {}
            for exps, coeff in terms.items():
                limit = room[s].get(suffix_key(exps, s + 1))
                if limit is None:
                    continue
                sums = _suffix_sums(exps, order)
                steps = limit - exps[y]
                for t in range(position[x] + 1, s + 1):
                    steps = min(steps, suffix_max[t] - sums[t])
                if steps > cap:
                    truncated, steps = True, cap
                current, value = list(exps), coeff
                for _ in range(steps + 1):
                    key = tuple(current)
                    expanded[key] = expanded[key] + value if key in expanded else value
                    current[x] -= 1
                    current[y] += 1
                    value = value * base
            terms = {e: v for e, v in expanded.items() if v}
        terms = {e: v for e, v in terms.items() if suffix_key(e, s) in finished[s]}
    return {t: terms.get(t, qq(0)) for t in targets}, truncated


def expansion_cap(integrand: RegimeIntegrand, targets: Sequence[Exponents], slack: int) -> int:
    """Exponent spread of numerator and targets plus the number of denominators"""
    spread = max((sum(abs(e) for e in exps) for exps in integrand.numerator), default=0)
    spread += max((sum(abs(e) for e in t) for t in targets), default=0)
    return spread + len(integrand.denominators) + slack


def coefficients_at(
    integrand: RegimeIntegrand,
    targets: Sequence[Sequence[int]],
    slack: Optional[int] = None,
    certify: Optional[bool] = None,
) -> Dict[Exponents, QqScalar]:
    """Coefficients of several exponents of the regime expansion of one integrand.

    A single series step raises the exponent sum of a regime suffix by one, and that sum
    starts and ends within the exponent spread, so no series ever needs more steps than
    expansion_cap(slack=0). Any slack >= 0 is therefore exact; a negative slack can cut
    series short, and then the value is recomputed at cap + 1 and cap + 2.
    """
    targets = sorted({tuple(t) for t in targets})
    degrees = integrand.total_degrees()
    live = [t for t in targets if sum(t) in degrees]
    result = {t: qq(0) for t in targets}
    if not live:
        return result
    slack = settings.LOOPCHAR_CAP_SLACK if slack is None else slack
    certify = settings.LOOPCHAR_CERTIFY_CAPS if certify is None else certify
    cap = expansion_cap(integrand, live, slack)
    values, truncated = _expand_at(integrand, live, cap)
    if truncated and certify:
        for extra in (1, 2):
            check, _ = _expand_at(integrand, live, cap + extra)
            moved = [t for t in live if check[t] != values[t]]
            if moved:
                t = moved[0]
                logger.error(
                    f"[PAIRING] Coefficient at {list(t)} moved from {format_qq(values[t])} "
                    f"to {format_qq(check[t])} when the cap was raised to {cap + extra}"
                )
                raise CapInstability(f"expansion is not stable under cap {cap} -> {cap + extra}")
    result.update(values)
    return result


def constant_term(
    integrand: RegimeIntegrand, slack: Optional[int] = None, certify: Optional[bool] = None
) -> QqScalar:
    zero = (0,) * integrand.nvars
    return coefficients_at(integrand, [zero], slack, certify)[zero]


# Pairings


def _word_positions(colors: Sequence[int], hdeg: Sequence[int]) -> List[int]:
    """For each variable of F (color-major order), the word position it is matched with"""
    slots_seen = [0] * len(hdeg)
    offsets = color_offsets(hdeg)
    positions = [0] * sum(hdeg)
    for a, color in enumerate(colors):
        positions[offsets[color] + slots_seen[color]] = a
        slots_seen[color] += 1
    return positions


@lru_cache(maxsize=256)
def _zeta_part(c: CartanData, colors: Tuple[int, ...]) -> Tuple[LaurentPoly, Tuple[Binomial, ...]]:
    """Numerator and denominators of prod_{a<b} 1/zeta(z_b/z_a) against the standard
    denominator of F"""
    size = len(colors)
    numerator = LaurentPoly.constant((size,))
    sign = 1
    denominators = []
    for a in range(size):
        for b in range(a + 1, size):
            i, j = colors[a], colors[b]
            d_ba = c.d[j][i]
            if i == j:
                # 1/zeta numerator (z_b - z_a) has no standard-denominator partner
                exps_b, exps_a = [0] * size, [0] * size
                exps_b[b], exps_a[a] = 1, 1
                numerator = numerator * LaurentPoly((size,), {tuple(exps_b): 1, tuple(exps_a): -1})
                denominators.append(Binomial(b, a, q ** (-d_ba)))
            elif d_ba:
                # (z_b - z_a) cancels the standard-denominator factor of this pair up to sign
                if i < j:
                    sign = -sign
                denominators.append(Binomial(b, a, q ** (-d_ba)))
            else:
                denominators.append(Binomial(a, b, qq(1)) if i < j else Binomial(b, a, qq(1)))
    return (-numerator if sign < 0 else numerator), tuple(denominators)


@lru_cache(maxsize=512)
def _pairing_body(
    c: CartanData, colors: Tuple[int, ...], element: ShuffleElement
) -> Tuple[LaurentPoly, Tuple[Binomial, ...]]:
    zeta_numerator, denominators = _zeta_part(c, colors)
    embedded = element.numerator.embedded((len(colors),), _word_positions(colors, element.hdeg))
    return embedded * zeta_numerator, denominators


def pairing_integrand(
    c: CartanData, word: Word, element: ShuffleElement, ranks: Sequence[int]
) -> RegimeIntegrand:
    numerator, denominators = _pairing_body(c, word.colors, element)
    numerator = numerator.times_monomial([d for _, d in word.letters])
    return RegimeIntegrand(dict(numerator.terms), list(denominators), tuple(ranks))


def _matches(word: Word, element: ShuffleElement) -> bool:
    if word.hdeg(element.cartan.rank) != tuple(element.hdeg):
        return False
    if element.is_zero():
        return False
    return word.total_degree + element.vdeg == 0


def pair_words(
    words: Sequence[Word], element: ShuffleElement, antipode: bool = False
) -> List[QqScalar]:
    """Pairings of several words with one element; words sharing a color sequence share
    one expansion, read off at the exponents -d of each word"""
    values = [qq(0)] * len(words)
    groups: Dict[Tuple[int, ...], List[int]] = {}
    for index, word in enumerate(words):
        if _matches(word, element):
            groups.setdefault(word.colors, []).append(index)
    for colors, indices in groups.items():
        size = len(colors)
        ranks = tuple(size - 1 - a for a in range(size)) if antipode else tuple(range(size))
        numerator, denominators = _pairing_body(element.cartan, colors, element)
        integrand = RegimeIntegrand(dict(numerator.terms), list(denominators), ranks)
        targets = {index: tuple(-d for _, d in words[index].letters) for index in indices}
        found = coefficients_at(integrand, list(targets.values()))
        flip = antipode and size % 2
        for index, target in targets.items():
            values[index] = -found[target] if flip else found[target]
    return values


def pair_word(word: Word, element: ShuffleElement) -> QqScalar:
    """<e-word, F> with |z_1| >> ... >> |z_n|"""
    return pair_words([word], element)[0]


def pair_word_antipode(word: Word, element: ShuffleElement) -> QqScalar:
    """<e-word, S(F)> with |z_1| << ... << |z_n|"""
    return pair_words([word], element, antipode=True)[0]


# Gram matrices

ROW_CHUNK = 64


@dataclass
class GramMatrix:
    words: List[Word]
    columns: List[ShuffleElement]
    matrix: QqMatrix
    metadata: Dict[str, Any] = field(default_factory=dict)
    candidate_rows: int = 0
    early_stopped: bool = False

    def rank(self, mode: str = "exact", policy: Optional[ModularPolicy] = None) -> int:
        if not self.columns or not self.words:
            return 0
        count = sum(self.columns[0].hdeg)
        return matrix_rank(self.matrix, mode, policy_for(count, mode, policy))

    def as_json(self, point: Optional[ModEval] = None) -> Dict:
        if point is None:
            entries = self.matrix.as_strings()
        else:
            entries = [[specialize(v, point) for v in row] for row in self.matrix.rows]
        payload = {
            **self.metadata,
            "rows": self.matrix.row_labels,
            "cols": [str(element.numerator) for element in self.columns],
            "entries": entries,
            "candidate_rows": self.candidate_rows,
            "early_stopped": self.early_stopped,
        }
        if point is not None:
            payload["modular"] = {"prime": point.prime, "q_value": point.q_value}
        return payload


def _assemble(
    words: Sequence[Word],
    columns: Sequence[ShuffleElement],
    metadata: Dict[str, Any],
    early_stop: Optional[bool],
    seed: Optional[int],
) -> GramMatrix:
    early_stop = settings.LOOPCHAR_EARLY_STOP if early_stop is None else early_stop
    tracker = None
    if early_stop and columns:
        count = sum(columns[0].hdeg)
        try:
            policy = ModularPolicy.from_settings(seed=seed).for_variables(count)
        except AllSpecializationsBad:
            logger.warning(f"[PAIRING] No prime exceeds {count}!; early stop disabled")
        else:
            point = ModEval.draw(
                policy.primes[0],
                random.Random(f"{policy.seed}:gram"),
                order_guard=policy.order_guard,
                factorial_bound=policy.factorial_bound,
            )
            tracker = IncrementalModularRank(point)
    rows, kept = [], []
    stopped = False
    chunk = ROW_CHUNK if tracker is not None else max(len(words), 1)
    for start in range(0, len(words), chunk):
        if tracker is not None and tracker.usable and tracker.rank == len(columns):
            stopped = True
            break
        batch = list(words[start:start + chunk])
        values = [pair_words(batch, element, antipode=True) for element in columns]
        for k, word in enumerate(batch):
            if tracker is not None and tracker.usable and tracker.rank == len(columns):
                stopped = True
                break
            row = [column[k] for column in values]
            rows.append(row)
            kept.append(word)
            if tracker is not None:
                tracker.add(row)
        if stopped:
            break
    matrix = QqMatrix(
        rows,
        row_labels=[str(w) for w in kept],
        col_labels=[f"F{k}" for k in range(len(columns))],
        ncols=len(columns),
    )
    if stopped:
        logger.debug(
            f"[PAIRING] Early stop after {len(kept)} of {len(words)} rows: full column rank"
        )
    return GramMatrix(kept, list(columns), matrix, metadata, len(words), stopped)


def gram_for_Lr(
    c: CartanData,
    r: Sequence[int],
    n: Sequence[int],
    d: int,
    mode: str = "exact",
    policy: Optional[ModularPolicy] = None,
    early_stop: Optional[bool] = None,
    allow_empty: bool = True,
) -> GramMatrix:
    """Pairing of shifted nonnegative words against S^-_{<0} at (-n, d)"""
    n = tuple(n)
    metadata: Dict[str, Any] = {"r": list(r), "n": list(n), "d": d}
    words = span_words(c.rank, n, -d, [-k for k in r])
    if not words:
        if not allow_empty:
            raise EmptyTestFamily(f"no admissible words for r={list(r)} at n={list(n)}, d={d}")
        logger.debug(f"[PAIRING] Empty test family for r={list(r)} n={list(n)} d={d}")
        return GramMatrix([], [], QqMatrix([], ncols=0), {**metadata, "dim_columns": None})
    basis = basis_minus_strictneg(c, n, d, mode, policy)
    metadata["dim_columns"] = basis.dim
    seed = policy.seed if policy else None
    return _assemble(words, basis.elements() if basis.dim else [], metadata, early_stop, seed)


def gram_for_key(
    c: CartanData,
    p1: SlopeVector,
    p2: SlopeVector,
    n: Sequence[int],
    d: int,
    mode: str = "exact",
    policy: Optional[ModularPolicy] = None,
    early_stop: Optional[bool] = None,
) -> GramMatrix:
    """Pairing of nonnegative words of degree d against the band at (-n, -d)"""
    n = tuple(n)
    metadata: Dict[str, Any] = {"p1": str(p1), "p2": str(p2), "n": list(n), "d": d}
    words = span_words(c.rank, n, d, 0)
    if not words:
        return GramMatrix([], [], QqMatrix([], ncols=0), {**metadata, "dim_columns": None})
    basis = basis_minus_band(c, p1, p2, n, -d, mode, policy)
    metadata["dim_columns"] = basis.dim
    seed = policy.seed if policy else None
    return _assemble(words, basis.elements() if basis.dim else [], metadata, early_stop, seed)
