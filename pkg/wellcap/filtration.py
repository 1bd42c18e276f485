from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

from wellcap.complex_core import SimplicialComplex, Simplex, Subcomplex, SubdivisionRecord, cut_by_hyperplane
from wellcap.errors import ProblemFormatError, ScheduleError
from wellcap.geometry import NormKind, Vector, dot, facet_functionals, norm_value

logger = logging.getLogger(__name__)

__all__ = [
    "GlobalSubdivision",
    "NormKind",
    "PLMap",
    "RadiiSchedule",
    "SublevelPair",
    "build_global_subdivision",
    "refine_at_levels",
    "carried",
    "shell",
    "sublevel_pair",
]


@dataclass(frozen=True)
class PLMap:
    domain: SimplicialComplex = field(repr=False)
    n: int
    values: Mapping[int, Vector] = field(repr=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ProblemFormatError(f"target dimension must be positive, got {self.n}")
        for v in self.domain.vertices:
            value = self.values.get(v)
            if value is None:
                raise ProblemFormatError(f"vertex {v} has no map value")
            if len(value) != self.n:
                raise ProblemFormatError(f"vertex {v} has a value of length {len(value)}, expected {self.n}")

    def __call__(self, vertex: int) -> Vector:
        return self.values[vertex]

    def image(self, simplex: Simplex) -> list[Vector]:
        return [self.values[v] for v in simplex]

    def pushed(self, record: SubdivisionRecord) -> "PLMap":
        return PLMap(record.target, self.n, record.push_forward(self.values))

    def restricted(self, complex_: SimplicialComplex) -> "PLMap":
        return PLMap(complex_, self.n, {v: self.values[v] for v in complex_.vertices})

    def norm_at(self, vertex: int, norm: NormKind) -> Fraction:
        return norm_value(self.values[vertex], norm)

    def distance(self, other: "PLMap", norm: NormKind, vertices: Iterable[int] | None = None) -> Fraction:
        # Max over vertices bounds the max over every simplex by convexity of the norm.
        pool = self.domain.vertices if vertices is None else vertices
        return max(
            (norm_value(tuple(a - b for a, b in zip(self.values[v], other.values[v])), norm) for v in pool),
            default=Fraction(0),
        )


@dataclass(frozen=True)
class RadiiSchedule:
    radii: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not self.radii:
            raise ScheduleError("the radii schedule is empty")
        for r in self.radii:
            if r <= 0:
                raise ScheduleError(f"radius {r} is not positive")
        for a, b in zip(self.radii, self.radii[1:]):
            if not a > b:
                raise ScheduleError(f"radii must be strictly decreasing, got {a} before {b}")

    @classmethod
    def from_values(cls, values: Iterable[Fraction | int]) -> "RadiiSchedule":
        radii = sorted((Fraction(v) for v in values), reverse=True)
        return cls(tuple(radii))

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.radii)

    def __len__(self) -> int:
        return len(self.radii)

    def __getitem__(self, i: int) -> Fraction:
        return self.radii[i]

    def __contains__(self, r: object) -> bool:
        return r in self.radii

    @property
    def largest(self) -> Fraction:
        return self.radii[0]

    @property
    def smallest(self) -> Fraction:
        return self.radii[-1]

    def index(self, r: Fraction) -> int:
        try:
            return self.radii.index(Fraction(r))
        except ValueError as exc:
            raise ScheduleError(f"radius {r} is not in the schedule {[str(x) for x in self.radii]}") from exc

    def pairs(self) -> list[tuple[Fraction, Fraction]]:
        return list(zip(self.radii, self.radii[1:]))


@dataclass(frozen=True)
class GlobalSubdivision:
    record: SubdivisionRecord = field(repr=False)
    f: PLMap = field(repr=False)
    f_star: PLMap = field(repr=False)
    radii: RadiiSchedule
    norm: NormKind

    @property
    def complex(self) -> SimplicialComplex:
        return self.record.target

    @property
    def n(self) -> int:
        return self.f.n


def refine_at_levels(
    complex_: SimplicialComplex,
    values: Mapping[int, Vector],
    functionals: Sequence[Vector],
    levels: Sequence[Fraction],
) -> SubdivisionRecord:
    # Cut by every {l . values = level}; the record maps back to complex_.
    record = SubdivisionRecord.identity(complex_)
    current: dict[int, Vector] = {v: values[v] for v in complex_.vertices}
    for functional in functionals:
        for level in levels:
            step = cut_by_hyperplane(record.target, current, functional, level)
            if step.target is record.target:
                continue
            current = step.push_forward(current)
            record = record.compose(step)
    return record


def build_global_subdivision(
    K: SimplicialComplex,
    f: PLMap,
    radii: RadiiSchedule,
    norm: NormKind | str,
) -> GlobalSubdivision:
    norm = NormKind.parse(norm)
    functionals = list(dict.fromkeys(facet_functionals(norm, f.n)))
    record = refine_at_levels(K, f.values, functionals, list(radii))
    f_star = PLMap(record.target, f.n, record.push_forward(f.values))
    logger.info(
        "Global subdivision: %s -> %s simplices (%s functionals x %s radii, norm=%s)",
        len(K),
        len(record.target),
        len(functionals),
        len(radii),
        norm.value,
    )
    return GlobalSubdivision(record, f, f_star, radii, norm)


def carried(gs: GlobalSubdivision, B: Subcomplex | Iterable[Simplex]) -> Subcomplex:
    return gs.record.carried(B)


@dataclass(frozen=True)
class SublevelPair:
    radius: Fraction
    X: Subcomplex = field(repr=False)
    A: Subcomplex = field(repr=False)
    B_cap: Subcomplex = field(repr=False)
    K_star: SubdivisionRecord = field(repr=False)
    f_star: PLMap = field(repr=False)
    norm: NormKind = NormKind.LINF

    @cached_property
    def X_complex(self) -> SimplicialComplex:
        return self.X.as_complex()

    @property
    def A_union_B(self) -> Subcomplex:
        return self.A.union(self.B_cap)

    @property
    def n(self) -> int:
        return self.f_star.n

    def is_empty(self) -> bool:
        return self.X.is_empty()


def _on_level(values: Sequence[Vector], functionals: Sequence[Vector], r: Fraction, at_least: bool = False) -> bool:
    for ell in functionals:
        if at_least:
            if all(dot(ell, y) >= r for y in values):
                return True
        elif all(dot(ell, y) == r for y in values):
            return True
    return False


def sublevel_pair(gs: GlobalSubdivision, r: Fraction, B: Subcomplex | Iterable[Simplex] | None = None) -> SublevelPair:
    r = Fraction(r)
    gs.radii.index(r)
    target = gs.complex
    inside = {v for v in target.vertices if gs.f_star.norm_at(v, gs.norm) <= r}
    X = Subcomplex(target, frozenset(s for s in target.simplices if all(v in inside for v in s)))
    functionals = facet_functionals(gs.norm, gs.n)
    A = Subcomplex(
        target,
        frozenset(s for s in X.members if _on_level(gs.f_star.image(s), functionals, r)),
    )
    B_cap = carried(gs, B if B is not None else ()).intersection(X)
    logger.info(
        "Sublevel pair r=%s: |X|=%s |A|=%s |B cap X|=%s",
        r,
        len(X),
        len(A),
        len(B_cap),
    )
    return SublevelPair(r, X, A, B_cap, gs.record, gs.f_star, gs.norm)


def shell(gs: GlobalSubdivision, r_outer: Fraction, r_inner: Fraction) -> Subcomplex:
    r_outer, r_inner = Fraction(r_outer), Fraction(r_inner)
    if not r_outer > r_inner:
        raise ScheduleError(f"shell needs r_outer > r_inner, got {r_outer} and {r_inner}")
    target = gs.complex
    functionals = facet_functionals(gs.norm, gs.n)
    members = frozenset(
        s
        for s in target.simplices
        if all(gs.f_star.norm_at(v, gs.norm) <= r_outer for v in s)
        and _on_level(gs.f_star.image(s), functionals, r_inner, at_least=True)
    )
    return Subcomplex(target, members)
