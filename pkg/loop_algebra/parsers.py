# parsers.py - Literal grammars for words, polynomials, vectors and slopes

import json
import re
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import sympy
from sympy.parsing.sympy_parser import (
    convert_xor,
    implicit_multiplication,
    parse_expr,
    standard_transformations,
)

from .cartan import CartanData, DegreeVector, SlopeVector, cartan_from_catalog, cartan_from_json
from .exceptions import LiteralParseError
from .laurent import LaurentPoly
from .scalars import Q_SYMBOL, QuadraticSurd, qq_from_expr
from .shuffle import MINUS, PLUS, Word

_LETTER = re.compile(r"^(?P<kind>[ef])\[\s*(?P<i>\d+)\s*,\s*(?P<d>[+-]?\d+)\s*\]$")
_VARIABLE = re.compile(r"z\[\s*(\d+)\s*,\s*(\d+)\s*\]")
_INFINITIES = {"inf": 1, "+inf": 1, "∞": 1, "+∞": 1, "-inf": -1, "-∞": -1}


def parse_word(text: str, rank: int) -> Word:
    """'e[1,0] e[2,-1]' or 'f[1,3]'; colors are 1-based in the literal"""
    tokens = re.findall(r"[ef]\[[^\]]*\]", text)
    if not tokens or re.sub(r"\s+", "", "".join(tokens)) != re.sub(r"[\s*]+", "", text):
        raise LiteralParseError(f"cannot parse word literal {text!r}")
    kinds, letters = set(), []
    for token in tokens:
        match = _LETTER.match(token.replace(" ", ""))
        if not match:
            raise LiteralParseError(f"bad letter {token!r} in {text!r}")
        color = int(match.group("i"))
        if not 1 <= color <= rank:
            raise LiteralParseError(f"color {color} is outside 1..{rank} in {text!r}")
        kinds.add(match.group("kind"))
        letters.append((color - 1, int(match.group("d"))))
    if len(kinds) > 1:
        raise LiteralParseError(f"word {text!r} mixes e and f letters")
    return Word(tuple(letters), PLUS if kinds == {"e"} else MINUS)


def parse_polynomial(
    text: str, hdeg: Optional[Sequence[int]] = None, rank: Optional[int] = None
) -> LaurentPoly:
    """'(1+q^-2) * z[1,1]^2 * z[2,1] - z[1,2]'; z[i,a] is slot a of color i"""
    symbols: Dict[Tuple[int, int], sympy.Symbol] = {}

    def substitute(match):
        key = (int(match.group(1)), int(match.group(2)))
        if key[0] < 1 or key[1] < 1:
            raise LiteralParseError(f"variable indices start at 1 in {text!r}")
        symbols.setdefault(key, sympy.Symbol(f"z_{key[0]}_{key[1]}"))
        return f"z_{key[0]}_{key[1]}"

    rewritten = _VARIABLE.sub(substitute, text)
    local = {"q": Q_SYMBOL, **{s.name: s for s in symbols.values()}}
    try:
        expr = parse_expr(
            rewritten,
            local_dict=local,
            transformations=standard_transformations + (convert_xor, implicit_multiplication),
        )
    except (SyntaxError, TypeError, sympy.SympifyError) as exc:
        raise LiteralParseError(f"cannot parse polynomial literal {text!r}") from exc

    if hdeg is None:
        rank = rank or max((i for i, _ in symbols), default=0)
        hdeg = [max((a for i, a in symbols if i == color), default=0) for color in range(1, rank + 1)]
    hdeg = tuple(hdeg)
    for color, slot in symbols:
        if color > len(hdeg) or slot > hdeg[color - 1]:
            raise LiteralParseError(f"z[{color},{slot}] does not fit hdeg {list(hdeg)}")
    ordered = [
        symbols.get((color + 1, slot + 1), sympy.Symbol(f"z_{color + 1}_{slot + 1}"))
        for color, count in enumerate(hdeg)
        for slot in range(count)
    ]

    terms = {}
    for term in sympy.Add.make_args(sympy.expand(expr)):
        coefficient, monomial = term.as_independent(*ordered, as_Add=False)
        powers = monomial.as_powers_dict()
        exps = []
        for symbol in ordered:
            power = powers.get(symbol, 0)
            if not sympy.sympify(power).is_integer:
                raise LiteralParseError(f"non-integer exponent on {symbol} in {text!r}")
            exps.append(int(power))
        leftover = monomial / sympy.Mul(*[s**e for s, e in zip(ordered, exps)])
        if leftover != 1:
            raise LiteralParseError(f"term {term} of {text!r} is not a Laurent monomial")
        key = tuple(exps)
        value = qq_from_expr(coefficient)
        terms[key] = terms[key] + value if key in terms else value
    return LaurentPoly(hdeg, terms)


def parse_vector(text: str, rank: Optional[int] = None) -> DegreeVector:
    """'1,2', '[1, 2]' or '(1 2)'"""
    cleaned = text.strip().strip("[]()")
    parts = [p for p in re.split(r"[,\s]+", cleaned) if p]
    try:
        vector = tuple(int(p) for p in parts)
    except ValueError as exc:
        raise LiteralParseError(f"cannot parse integer vector {text!r}") from exc
    if rank is not None and len(vector) != rank:
        raise LiteralParseError(f"vector {text!r} needs {rank} entries")
    return vector


def parse_slope(text: str, rank: Optional[int] = None) -> SlopeVector:
    """'1/2,1/2', '1+√2, 1-√2', '-inf' or 'inf'"""
    compact = text.strip().lower()
    if compact in _INFINITIES:
        return SlopeVector((), _INFINITIES[compact])
    parts = [p for p in compact.strip("[]()").split(",") if p.strip()]
    slope = SlopeVector(tuple(QuadraticSurd.parse(p) for p in parts))
    if rank is not None and len(slope.entries) != rank:
        raise LiteralParseError(f"slope {text!r} needs {rank} entries")
    return slope


def load_cartan(type_name: Optional[str] = None, cartan_file: Optional[str] = None) -> CartanData:
    if bool(type_name) == bool(cartan_file):
        raise LiteralParseError("give exactly one of a catalog type or a Cartan JSON file")
    if type_name:
        return cartan_from_catalog(type_name)
    try:
        payload = json.loads(Path(cartan_file).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise LiteralParseError(f"cannot read Cartan file {cartan_file}: {exc}") from exc
    return cartan_from_json(payload)


def parse_dimension_table(path: str, rank: int) -> Dict[DegreeVector, int]:
    """JSON list of {"n": [...], "dim": k} or mapping "1,0" -> k"""
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise LiteralParseError(f"cannot read dimension table {path}: {exc}") from exc
    rows: List[Tuple[DegreeVector, int]] = []
    if isinstance(payload, dict):
        rows = [(parse_vector(k, rank), v) for k, v in payload.items()]
    elif isinstance(payload, list):
        try:
            rows = [(tuple(row["n"]), row["dim"]) for row in payload]
        except (KeyError, TypeError) as exc:
            raise LiteralParseError("dimension table rows need 'n' and 'dim' keys") from exc
    else:
        raise LiteralParseError("dimension table must be a JSON list or object")
    return dict(rows)
