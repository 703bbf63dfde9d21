"""Serialization: JSON coefficient maps, exact decimal strings, lattice CSV tables."""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .errors import ConfigInvalid
from .intmat import IntMatrix
from .qfield import QuadElem
from .shift import CoeffVector, Kind
from .walsh import WalshIndexSet


def exact_str(v) -> str:
    """Exact decimal text: integers and ``p/q`` rationals; quadratic values as ``a+b*sqrt(D)``."""
    if isinstance(v, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(v, int):
        return str(v)
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, QuadElem):
        if v.is_rational():
            return exact_str(v.a)
        return f"{exact_str(v.a)}+{exact_str(v.b)}*sqrt({v.D})"
    raise TypeError(f"{type(v).__name__} has no exact text form")


def parse_scalar(v):
    """JSON scalar to int/Fraction where possible; floats stay floats."""
    if isinstance(v, bool):
        raise ConfigInvalid("boolean where a number was expected")
    if isinstance(v, int):
        return v
    if isinstance(v, str):
        try:
            f = Fraction(v)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigInvalid(f"bad rational {v!r}") from exc
        return f.numerator if f.denominator == 1 else f
    if isinstance(v, float):
        return v
    raise ConfigInvalid(f"not a number: {v!r}")


def _json_scalar(v):
    return v if isinstance(v, (int, float)) else exact_str(v)


def parse_matrix(obj) -> IntMatrix:
    """Integer matrix from nested lists or a JSON string such as ``"[[1,1],[1,0]]"``."""
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise ConfigInvalid(f"matrix is not valid JSON: {obj!r}") from exc
    if isinstance(obj, IntMatrix):
        return obj
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise ConfigInvalid("matrix must be a list of integer rows")
    return IntMatrix(obj)


# -- coefficient vectors --------------------------------------------------------------

def coeff_vector_to_json(v: CoeffVector) -> dict:
    amps = []
    for (j, k), a in sorted(v.amps.items()):
        re, im = (a.real, a.imag) if isinstance(a, complex) else (a, 0)
        amps.append([j, k, _json_scalar(re), _json_scalar(im)])
    return {"kind": v.kind.value, "amps": amps, "fixed_part": _json_scalar(v.fixed_part)}


def coeff_vector_from_json(obj: Mapping) -> CoeffVector:
    try:
        amps = {}
        for j, k, re, im in obj.get("amps", []):
            re, im = parse_scalar(re), parse_scalar(im)
            amps[(int(j), int(k))] = complex(re, im) if im else re
        return CoeffVector(Kind(obj.get("kind", "bilateral")), amps, parse_scalar(obj.get("fixed_part", 0)))
    except (TypeError, ValueError) as exc:
        raise ConfigInvalid(f"bad coefficient vector: {exc}") from exc


# -- Walsh and Laguerre maps -------------------------------------------------------------

def walsh_to_json(f: Mapping[WalshIndexSet, Fraction]) -> list[dict]:
    return [{"indices": list(idx.labels), "value": exact_str(Fraction(c))} for idx, c in f.items()]


def walsh_from_json(items: Iterable[Mapping]) -> dict[WalshIndexSet, Fraction]:
    out: dict[WalshIndexSet, Fraction] = {}
    try:
        for it in items:
            out[WalshIndexSet(tuple(it["indices"]))] = Fraction(parse_scalar(it["value"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigInvalid(f"bad Walsh coefficient map: {exc}") from exc
    return out


def laguerre_to_json(coeffs: Mapping[int, Fraction]) -> list[dict]:
    return [{"n": n, "numerator": Fraction(c).numerator, "denominator": Fraction(c).denominator}
            for n, c in sorted(coeffs.items())]


def laguerre_from_json(items: Iterable[Mapping]) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    try:
        for it in items:
            n = int(it["n"])
            if n < 0:
                raise ValueError("negative degree")
            out[n] = Fraction(int(it["numerator"]), int(it.get("denominator", 1)))
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigInvalid(f"bad Laguerre coefficient map: {exc}") from exc
    return out


# -- tables ------------------------------------------------------------------------------

LATTICE_HEADER = ("xi1", "xi2", "k", "value")


def lattice_csv(rows: Iterable[tuple[Sequence[int], int, Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(LATTICE_HEADER)
    for xi, k, value in rows:
        w.writerow([xi[0], xi[1], k, exact_str(value)])
    return buf.getvalue()


def read_lattice_csv(text: str) -> list[tuple[tuple[int, int], int, str]]:
    r = csv.reader(io.StringIO(text))
    header = next(r)
    if tuple(header) != LATTICE_HEADER:
        raise ConfigInvalid(f"unexpected header {header}")
    return [((int(a), int(b)), int(k), v) for a, b, k, v in r]


def write_text(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def write_json(path: Path, obj) -> Path:
    return write_text(path, json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n")


def _json_default(v):
    if isinstance(v, (Fraction, QuadElem)):
        return exact_str(v)
    if hasattr(v, "item"):
        return v.item()
    if isinstance(v, (set, tuple)):
        return list(v)
    raise TypeError(f"cannot serialize {type(v).__name__}")
