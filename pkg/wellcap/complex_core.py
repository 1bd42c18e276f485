from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence

from wellcap.errors import ProblemFormatError
from wellcap.geometry import Vector, det, dot, interpolate, sign
from wellcap.matrix import IntegerMatrix

logger = logging.getLogger(__name__)

# Strictly increasing vertex ids; subdivision vertices get fresh ids above every existing one.
Simplex = tuple[int, ...]


def make_simplex(vertices: Iterable[int]) -> Simplex:
    items = [int(v) for v in vertices]
    simplex = tuple(sorted(items))
    if not simplex:
        raise ProblemFormatError("simplices must be nonempty")
    if len(set(simplex)) != len(simplex):
        raise ProblemFormatError(f"repeated vertex in simplex {items}")
    if simplex[0] < 0:
        raise ProblemFormatError(f"negative vertex id in simplex {items}")
    return simplex


def facets_of(simplex: Simplex) -> list[Simplex]:
    if len(simplex) <= 1:
        return []
    return [simplex[:j] + simplex[j + 1:] for j in range(len(simplex))]


def all_faces(simplex: Simplex) -> Iterator[Simplex]:
    for size in range(1, len(simplex) + 1):
        yield from combinations(simplex, size)


@dataclass(frozen=True)
class SimplicialComplex:
    simplices: frozenset[Simplex] = frozenset()

    @classmethod
    def from_maximal(cls, maximal: Iterable[Iterable[int]]) -> "SimplicialComplex":
        closed: set[Simplex] = set()
        for raw in maximal:
            closed.update(all_faces(make_simplex(raw)))
        return cls(frozenset(closed))

    @classmethod
    def from_simplices(cls, simplices: Iterable[Iterable[int]]) -> "SimplicialComplex":
        # No face closure; run validate() on the result.
        return cls(frozenset(tuple(s) for s in simplices))

    @cached_property
    def by_dim(self) -> dict[int, tuple[Simplex, ...]]:
        grouped: dict[int, list[Simplex]] = {}
        for s in self.simplices:
            grouped.setdefault(len(s) - 1, []).append(s)
        return {k: tuple(sorted(v)) for k, v in sorted(grouped.items())}

    @cached_property
    def dim(self) -> int:
        return max(self.by_dim, default=-1)

    @cached_property
    def vertices(self) -> tuple[int, ...]:
        return tuple(s[0] for s in self.by_dim.get(0, ()))

    def simplices_of_dim(self, k: int) -> tuple[Simplex, ...]:
        return self.by_dim.get(k, ())

    def __contains__(self, simplex: object) -> bool:
        return simplex in self.simplices

    def __iter__(self) -> Iterator[Simplex]:
        for k in self.by_dim:
            yield from self.by_dim[k]

    def __len__(self) -> int:
        return len(self.simplices)

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * len(v) for k, v in self.by_dim.items())

    @cached_property
    def maximal_simplices(self) -> tuple[Simplex, ...]:
        covered: set[Simplex] = set()
        for s in self.simplices:
            covered.update(facets_of(s))
        return tuple(s for s in self if s not in covered)

    def star(self, vertex: int) -> tuple[Simplex, ...]:
        return tuple(s for s in self if vertex in s)

    def max_vertex(self) -> int:
        return self.vertices[-1] if self.vertices else -1


@dataclass(frozen=True)
class Subcomplex:
    parent: SimplicialComplex = field(compare=False, repr=False)
    members: frozenset[Simplex] = frozenset()

    @classmethod
    def empty(cls, parent: SimplicialComplex) -> "Subcomplex":
        return cls(parent, frozenset())

    @classmethod
    def full(cls, parent: SimplicialComplex) -> "Subcomplex":
        return cls(parent, parent.simplices)

    @classmethod
    def closure_of(cls, parent: SimplicialComplex, simplices: Iterable[Simplex]) -> "Subcomplex":
        closed: set[Simplex] = set()
        for s in simplices:
            if s not in parent:
                raise ProblemFormatError(f"simplex {list(s)} is not in the complex")
            closed.update(all_faces(s))
        return cls(parent, frozenset(closed))

    def __contains__(self, simplex: object) -> bool:
        return simplex in self.members

    def __iter__(self) -> Iterator[Simplex]:
        return iter(sorted(self.members, key=lambda s: (len(s), s)))

    def __len__(self) -> int:
        return len(self.members)

    @property
    def dim(self) -> int:
        return max((len(s) - 1 for s in self.members), default=-1)

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted(s[0] for s in self.members if len(s) == 1))

    def simplices_of_dim(self, k: int) -> tuple[Simplex, ...]:
        return tuple(sorted(s for s in self.members if len(s) == k + 1))

    def union(self, other: "Subcomplex") -> "Subcomplex":
        return Subcomplex(self.parent, self.members | other.members)

    def intersection(self, other: "Subcomplex") -> "Subcomplex":
        return Subcomplex(self.parent, self.members & other.members)

    def as_complex(self) -> SimplicialComplex:
        return SimplicialComplex(self.members)

    def is_closed(self) -> bool:
        return all(f in self.members for s in self.members for f in facets_of(s))

    def is_empty(self) -> bool:
        return not self.members


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violation: Simplex | None = None
    message: str = ""


def validate(complex_: SimplicialComplex) -> ValidationReport:
    for s in sorted(complex_.simplices, key=lambda s: (len(s), s)):
        if not s:
            return ValidationReport(False, s, "empty simplex")
        if any(not isinstance(v, int) or v < 0 for v in s):
            return ValidationReport(False, s, f"simplex {list(s)} has an invalid vertex id")
        if any(a >= b for a, b in zip(s, s[1:])):
            return ValidationReport(False, s, f"simplex {list(s)} is not strictly sorted")
        for face in facets_of(s):
            if face not in complex_.simplices:
                return ValidationReport(False, s, f"face {list(face)} of {list(s)} is missing")
    return ValidationReport(True)


def skeleton(complex_: SimplicialComplex, i: int) -> Subcomplex:
    if i < -1:
        raise ValueError(f"skeleton dimension must be >= -1, got {i}")
    return Subcomplex(complex_, frozenset(s for s in complex_.simplices if len(s) - 1 <= i))


def _rel_members(rel: Subcomplex | Iterable[Simplex] | None) -> frozenset[Simplex]:
    if rel is None:
        return frozenset()
    if isinstance(rel, Subcomplex):
        return rel.members
    return frozenset(rel)


def chain_basis(complex_: SimplicialComplex, k: int, rel: Subcomplex | Iterable[Simplex] | None = None) -> tuple[Simplex, ...]:
    excluded = _rel_members(rel)
    return tuple(s for s in complex_.simplices_of_dim(k) if s not in excluded)


def boundary_matrix(complex_: SimplicialComplex, k: int, rel: Subcomplex | Iterable[Simplex] | None = None) -> IntegerMatrix:
    columns = chain_basis(complex_, k, rel)
    rows = chain_basis(complex_, k - 1, rel) if k >= 1 else ()
    index = {s: i for i, s in enumerate(rows)}
    matrix = IntegerMatrix.zeros(len(rows), len(columns))
    for j, simplex in enumerate(columns):
        for pos, face in enumerate(facets_of(simplex)):
            i = index.get(face)
            if i is not None:
                matrix.entries[i][j] += -1 if pos % 2 else 1
    return matrix


def _clean(coefficients: Mapping[Simplex, int]) -> dict[Simplex, int]:
    return {s: int(c) for s, c in coefficients.items() if c}


@dataclass
class Chain:
    degree: int
    coefficients: dict[Simplex, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.coefficients = _clean(self.coefficients)
        for s in self.coefficients:
            if len(s) != self.degree + 1:
                raise ValueError(f"simplex {list(s)} does not have degree {self.degree}")

    @classmethod
    def zero(cls, degree: int) -> "Chain":
        return cls(degree, {})

    @classmethod
    def from_vector(cls, degree: int, basis: Sequence[Simplex], vector: Sequence[int]) -> "Chain":
        return cls(degree, {s: c for s, c in zip(basis, vector)})

    def to_vector(self, basis: Sequence[Simplex]) -> list[int]:
        return [self.coefficients.get(s, 0) for s in basis]

    def __add__(self, other: "Chain") -> "Chain":
        if other.degree != self.degree:
            raise ValueError("cannot add chains of different degrees")
        out = dict(self.coefficients)
        for s, c in other.coefficients.items():
            out[s] = out.get(s, 0) + c
        return Chain(self.degree, out)

    def __neg__(self) -> "Chain":
        return self.scale(-1)

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def scale(self, factor: int) -> "Chain":
        return Chain(self.degree, {s: factor * c for s, c in self.coefficients.items()})

    def boundary(self) -> "Chain":
        if self.degree == 0:
            return Chain.zero(-1)
        out: dict[Simplex, int] = {}
        for s, c in self.coefficients.items():
            for pos, face in enumerate(facets_of(s)):
                out[face] = out.get(face, 0) + (-c if pos % 2 else c)
        return Chain(self.degree - 1, out)

    def restrict(self, keep: Iterable[Simplex] | Subcomplex) -> "Chain":
        members = _rel_members(keep)
        return Chain(self.degree, {s: c for s, c in self.coefficients.items() if s in members})

    def drop(self, rel: Iterable[Simplex] | Subcomplex) -> "Chain":
        members = _rel_members(rel)
        return Chain(self.degree, {s: c for s, c in self.coefficients.items() if s not in members})

    @property
    def support(self) -> tuple[Simplex, ...]:
        return tuple(sorted(self.coefficients))

    def is_zero(self) -> bool:
        return not self.coefficients


@dataclass
class Cochain:
    degree: int
    values: dict[Simplex, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.values = _clean(self.values)
        for s in self.values:
            if len(s) != self.degree + 1:
                raise ValueError(f"simplex {list(s)} does not have degree {self.degree}")

    def __call__(self, simplex: Simplex) -> int:
        return self.values.get(simplex, 0)

    def __add__(self, other: "Cochain") -> "Cochain":
        if other.degree != self.degree:
            raise ValueError("cannot add cochains of different degrees")
        out = dict(self.values)
        for s, c in other.values.items():
            out[s] = out.get(s, 0) + c
        return Cochain(self.degree, out)

    def evaluate(self, chain: Chain) -> int:
        if chain.degree != self.degree:
            raise ValueError("degree mismatch between cochain and chain")
        return sum(c * self.values.get(s, 0) for s, c in chain.coefficients.items())

    def coboundary(self, complex_: SimplicialComplex) -> "Cochain":
        out: dict[Simplex, int] = {}
        for tau in complex_.simplices_of_dim(self.degree + 1):
            total = 0
            for pos, face in enumerate(facets_of(tau)):
                value = self.values.get(face, 0)
                total += -value if pos % 2 else value
            if total:
                out[tau] = total
        return Cochain(self.degree + 1, out)

    def to_vector(self, basis: Sequence[Simplex]) -> list[int]:
        return [self.values.get(s, 0) for s in basis]

    @classmethod
    def from_vector(cls, degree: int, basis: Sequence[Simplex], vector: Sequence[int]) -> "Cochain":
        return cls(degree, {s: c for s, c in zip(basis, vector)})

    def is_zero(self) -> bool:
        return not self.values


Weights = dict[int, Fraction]


def _carrier(simplex: Simplex, vertex_coords: Mapping[int, Weights]) -> Simplex:
    support: set[int] = set()
    for v in simplex:
        support.update(vertex_coords[v])
    return tuple(sorted(support))


@dataclass(frozen=True)
class SubdivisionRecord:
    # vertex_coords covers every target vertex.

    source: SimplicialComplex = field(repr=False)
    target: SimplicialComplex = field(repr=False)
    carrier: Mapping[Simplex, Simplex] = field(repr=False, compare=False)
    vertex_coords: Mapping[int, Weights] = field(repr=False, compare=False)

    @classmethod
    def build(cls, source: SimplicialComplex, target: SimplicialComplex, vertex_coords: Mapping[int, Weights]) -> "SubdivisionRecord":
        carrier = {s: _carrier(s, vertex_coords) for s in target.simplices}
        for s, c in carrier.items():
            if c not in source:
                raise ValueError(f"target simplex {list(s)} has no carrier in the source complex")
        return cls(source, target, carrier, dict(vertex_coords))

    @classmethod
    def identity(cls, complex_: SimplicialComplex) -> "SubdivisionRecord":
        coords = {v: {v: Fraction(1)} for v in complex_.vertices}
        return cls(complex_, complex_, {s: s for s in complex_.simplices}, coords)

    def compose(self, following: "SubdivisionRecord") -> "SubdivisionRecord":
        if following.source != self.target:
            raise ValueError("subdivision records do not chain")
        coords: dict[int, Weights] = {}
        for w, weights in following.vertex_coords.items():
            acc: Weights = {}
            for u, a in weights.items():
                for v, b in self.vertex_coords[u].items():
                    acc[v] = acc.get(v, Fraction(0)) + a * b
            coords[w] = {v: x for v, x in acc.items() if x}
        return SubdivisionRecord.build(self.source, following.target, coords)

    def push_forward(self, values: Mapping[int, Vector]) -> dict[int, Vector]:
        return {w: interpolate(weights, values) for w, weights in self.vertex_coords.items()}

    def push_scalar(self, values: Mapping[int, Fraction]) -> dict[int, Fraction]:
        return {
            w: sum((x * Fraction(values[v]) for v, x in weights.items()), Fraction(0))
            for w, weights in self.vertex_coords.items()
        }

    @cached_property
    def _same_dim_pieces(self) -> dict[Simplex, tuple[Simplex, ...]]:
        pieces: dict[Simplex, list[Simplex]] = {}
        for s, c in self.carrier.items():
            if len(s) == len(c):
                pieces.setdefault(c, []).append(s)
        return {c: tuple(sorted(v)) for c, v in pieces.items()}

    def pieces(self, simplex: Simplex) -> tuple[Simplex, ...]:
        return self._same_dim_pieces.get(simplex, ())

    def orientation(self, piece: Simplex) -> int:
        carrier = self.carrier[piece]
        rows = [[self.vertex_coords[v].get(u, Fraction(0)) for u in carrier] for v in piece]
        return sign(det(rows))

    def subdivide_chain(self, chain: Chain) -> Chain:
        out: dict[Simplex, int] = {}
        for s, c in chain.coefficients.items():
            for piece in self.pieces(s):
                out[piece] = out.get(piece, 0) + c * self.orientation(piece)
        return Chain(chain.degree, out)

    def carried(self, members: Subcomplex | Iterable[Simplex]) -> Subcomplex:
        source_members = _rel_members(members)
        return Subcomplex(
            self.target,
            frozenset(s for s, c in self.carrier.items() if c in source_members),
        )


_LOWER, _LEVEL, _UPPER = -1, 0, 1


class _Cutter:
    def __init__(self, signs: Mapping[int, int], cut_ids: Mapping[tuple[int, int], int]) -> None:
        self.signs = signs
        self.cut_ids = cut_ids
        self._memo: dict[tuple[Simplex, int], tuple[Simplex, ...]] = {}

    def points(self, tau: Simplex, side: int) -> tuple[int, ...]:
        if side == _LOWER:
            own = [v for v in tau if self.signs[v] <= 0]
        elif side == _UPPER:
            own = [v for v in tau if self.signs[v] >= 0]
        else:
            own = [v for v in tau if self.signs[v] == 0]
        cuts = [self.cut_ids[e] for e in combinations(tau, 2) if e in self.cut_ids]
        return tuple(sorted(own + cuts))

    def region_dim(self, tau: Simplex, side: int) -> int:
        has_neg = any(self.signs[v] < 0 for v in tau)
        has_pos = any(self.signs[v] > 0 for v in tau)
        zeros = sum(1 for v in tau if self.signs[v] == 0)
        if side == _LOWER:
            return len(tau) - 1 if has_neg else zeros - 1
        if side == _UPPER:
            return len(tau) - 1 if has_pos else zeros - 1
        return len(tau) - 2 if has_neg and has_pos else zeros - 1

    def facets(self, tau: Simplex, side: int) -> list[tuple[Simplex, int]]:
        target = self.region_dim(tau, side) - 1
        candidates = [(face, side) for face in facets_of(tau)]
        if side != _LEVEL:
            candidates.append((tau, _LEVEL))
        seen: set[tuple[int, ...]] = set()
        out = []
        for face, face_side in candidates:
            if self.region_dim(face, face_side) != target:
                continue
            pts = self.points(face, face_side)
            if pts in seen:
                continue
            seen.add(pts)
            out.append((face, face_side))
        return out

    def triangulate(self, tau: Simplex, side: int) -> tuple[Simplex, ...]:
        key = (tau, side)
        if key in self._memo:
            return self._memo[key]
        d = self.region_dim(tau, side)
        pts = self.points(tau, side)
        if d < 0:
            result: tuple[Simplex, ...] = ()
        elif len(pts) == d + 1:
            result = (pts,)
        else:
            apex = pts[0]
            cells: set[Simplex] = set()
            for face, face_side in self.facets(tau, side):
                if apex in self.points(face, face_side):
                    continue
                for piece in self.triangulate(face, face_side):
                    cells.add(tuple(sorted(piece + (apex,))))
            result = tuple(sorted(cells))
        self._memo[key] = result
        return result


def cut_by_levels(complex_: SimplicialComplex, heights: Mapping[int, Fraction], level: Fraction) -> SubdivisionRecord:
    level = Fraction(level)
    signs = {v: sign(Fraction(heights[v]) - level) for v in complex_.vertices}
    crossing = [e for e in complex_.simplices_of_dim(1) if signs[e[0]] * signs[e[1]] < 0]
    if not crossing:
        return SubdivisionRecord.identity(complex_)

    next_id = complex_.max_vertex() + 1
    cut_ids: dict[tuple[int, int], int] = {}
    coords: dict[int, Weights] = {v: {v: Fraction(1)} for v in complex_.vertices}
    for offset, (a, b) in enumerate(crossing):
        ha, hb = Fraction(heights[a]), Fraction(heights[b])
        t = (level - ha) / (hb - ha)
        cut_ids[(a, b)] = next_id + offset
        coords[next_id + offset] = {a: 1 - t, b: t}

    cutter = _Cutter(signs, cut_ids)
    cells: set[Simplex] = set()
    for sigma in complex_.maximal_simplices:
        for side in (_LOWER, _UPPER):
            cells.update(cutter.triangulate(sigma, side))
    target = SimplicialComplex.from_maximal(cells)
    logger.debug(
        "Cut at level %s: %s crossing edges, %s -> %s simplices",
        level,
        len(crossing),
        len(complex_),
        len(target),
    )
    return SubdivisionRecord.build(complex_, target, coords)


def cut_by_hyperplane(
    complex_: SimplicialComplex,
    coords: Mapping[int, Vector],
    functional: Sequence[Fraction],
    level: Fraction,
) -> SubdivisionRecord:
    heights = {v: dot(functional, coords[v]) for v in complex_.vertices}
    return cut_by_levels(complex_, heights, level)
