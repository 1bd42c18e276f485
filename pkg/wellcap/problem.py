from __future__ import annotations

import hashlib
import json
import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

from wellcap.complex_core import SimplicialComplex, Subcomplex, make_simplex, validate
from wellcap.errors import ProblemFormatError, WellcapError
from wellcap.filtration import PLMap, RadiiSchedule
from wellcap.geometry import NormKind, Vector

logger = logging.getLogger(__name__)

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*([+-]?\d+))?\s*$")


def parse_rational(value: Any) -> Fraction:
    if isinstance(value, bool):
        raise ProblemFormatError(f"expected a rational, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str):
        # Floats are refused: rationals travel as "p/q" strings.
        raise ProblemFormatError(f"expected a rational string like \"p/q\", got {value!r}")
    match = _RATIONAL_RE.match(value)
    if not match:
        raise ProblemFormatError(f"malformed rational {value!r}")
    numerator = int(match.group(1))
    denominator = int(match.group(2)) if match.group(2) is not None else 1
    if denominator == 0:
        raise ProblemFormatError(f"zero denominator in {value!r}")
    return Fraction(numerator, denominator)


def format_rational(value: Fraction | int) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_vertex_values(raw: Any, n: int | None = None) -> dict[int, Vector]:
    if not isinstance(raw, Mapping):
        raise ProblemFormatError("map values must be an object from vertex id to a list of rationals")
    out: dict[int, Vector] = {}
    for key, vector in raw.items():
        try:
            vertex = int(key)
        except (TypeError, ValueError) as exc:
            raise ProblemFormatError(f"vertex id {key!r} is not an integer") from exc
        if not isinstance(vector, list):
            raise ProblemFormatError(f"value of vertex {vertex} must be a list")
        parsed = tuple(parse_rational(x) for x in vector)
        if n is not None and len(parsed) != n:
            raise ProblemFormatError(f"vertex {vertex} has {len(parsed)} coordinates, expected {n}")
        out[vertex] = parsed
    return out


@dataclass
class ProblemFile:
    complex: SimplicialComplex = field(repr=False)
    B: Subcomplex = field(repr=False)
    f: PLMap = field(repr=False)
    norm: NormKind
    radii: RadiiSchedule
    digest: str = ""

    @property
    def n(self) -> int:
        return self.f.n


def _simplex_list(raw: Any, what: str) -> list[tuple[int, ...]]:
    if not isinstance(raw, list):
        raise ProblemFormatError(f"{what} must be a list of simplices")
    out = []
    for item in raw:
        if not isinstance(item, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in item):
            raise ProblemFormatError(f"{what} entries must be lists of integer vertex ids, got {item!r}")
        out.append(make_simplex(item))
    return out


def parse_problem(data: Any) -> ProblemFile:
    if not isinstance(data, Mapping):
        raise ProblemFormatError("problem file must be a JSON object")
    for key in ("complex", "map", "norm", "radii"):
        if key not in data:
            raise ProblemFormatError(f"problem file is missing {key!r}")

    complex_ = SimplicialComplex.from_maximal(_simplex_list(data["complex"], "complex"))
    report = validate(complex_)
    if not report.ok:
        raise ProblemFormatError(report.message)

    B_simplices = _simplex_list(data.get("B", []), "B")
    B = Subcomplex.closure_of(complex_, B_simplices)

    raw_map = data["map"]
    if not isinstance(raw_map, Mapping) or "n" not in raw_map or "values" not in raw_map:
        raise ProblemFormatError("map must be an object with 'n' and 'values'")
    n = raw_map["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ProblemFormatError(f"map.n must be a positive integer, got {n!r}")
    values = parse_vertex_values(raw_map["values"], n)
    f = PLMap(complex_, n, values)

    if not isinstance(data["norm"], str):
        raise ProblemFormatError("norm must be a string")
    norm = NormKind.parse(data["norm"])

    raw_radii = data["radii"]
    if not isinstance(raw_radii, list) or not raw_radii:
        raise ProblemFormatError("radii must be a nonempty list of rationals")
    radii_values = [parse_rational(r) for r in raw_radii]
    if len(set(radii_values)) != len(radii_values):
        raise ProblemFormatError("radii contain duplicates")
    try:
        radii = RadiiSchedule.from_values(radii_values)
    except WellcapError as exc:
        raise ProblemFormatError(str(exc)) from exc

    canonical = json.dumps(data, sort_keys=True, separators=(",", ":"))
    digest = hashlib.sha256(canonical.encode("utf-8")).hexdigest()
    return ProblemFile(complex_, B, f, norm, radii, digest)


def load_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ProblemFormatError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFormatError(f"{path} is not valid JSON: {exc}") from exc


def load_problem(path: str | Path) -> ProblemFile:
    problem = parse_problem(load_json(path))
    logger.info(
        "Loaded problem %s: %s simplices, dim %s, n=%s, norm=%s, radii=%s",
        path,
        len(problem.complex),
        problem.complex.dim,
        problem.n,
        problem.norm.value,
        [format_rational(r) for r in problem.radii],
    )
    return problem


def load_aux_values(path: str | Path, n: int) -> dict[int, Vector]:
    data = load_json(path)
    raw = data.get("values") if isinstance(data, Mapping) and "values" in data else data
    return parse_vertex_values(raw, n)


def map_document(
    complex_: SimplicialComplex,
    g: PLMap,
    norm: NormKind,
    radii: RadiiSchedule,
    B: Subcomplex | None = None,
) -> dict:
    return {
        "complex": [list(s) for s in complex_.maximal_simplices],
        "B": [list(s) for s in sorted(B.members)] if B is not None else [],
        "map": {
            "n": g.n,
            "values": {str(v): [format_rational(x) for x in g.values[v]] for v in complex_.vertices},
        },
        "norm": norm.value,
        "radii": [format_rational(r) for r in radii],
    }
