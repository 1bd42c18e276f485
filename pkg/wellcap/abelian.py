from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

from wellcap.complex_core import Chain, Cochain, SimplicialComplex, Simplex, Subcomplex, boundary_matrix, chain_basis
from wellcap.matrix import IntegerMatrix, SmithDecomposition, smith_normal_form

logger = logging.getLogger(__name__)

__all__ = [
    "GroupPresentation",
    "GroupType",
    "IntegerMatrix",
    "LatticeQuotient",
    "SmithDecomposition",
    "SubgroupPresentation",
    "cokernel",
    "kernel_basis",
    "lattice_quotient",
    "relative_cohomology",
    "relative_homology",
    "smith_normal_form",
    "solve_integer",
    "subgroup_image",
]


@dataclass(frozen=True)
class GroupType:
    rank: int = 0
    torsion: tuple[int, ...] = ()

    @property
    def size(self) -> int:
        return self.rank + len(self.torsion)

    def is_trivial(self) -> bool:
        return self.size == 0

    def rank_mod_p(self, p: int) -> int:
        return self.rank + sum(1 for t in self.torsion if t % p == 0)

    def relations(self) -> list[list[int]]:
        out = []
        for i, t in enumerate(self.torsion):
            vector = [0] * self.size
            vector[self.rank + i] = t
            out.append(vector)
        return out

    def reduce(self, coords: Sequence[int]) -> list[int]:
        out = list(coords[: self.rank])
        out.extend(c % t for c, t in zip(coords[self.rank:], self.torsion))
        return out

    def describe(self) -> str:
        parts = []
        if self.rank:
            parts.append("Z" if self.rank == 1 else f"Z^{self.rank}")
        parts.extend(f"Z/{t}" for t in self.torsion)
        return " + ".join(parts) or "0"

    def to_json(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion), "type": self.describe()}


def kernel_basis(matrix: IntegerMatrix) -> list[list[int]]:
    snf = smith_normal_form(matrix)
    return [snf.V.column(j) for j in range(snf.rank, matrix.cols)]


def solve_integer(columns: Sequence[Sequence[int]], target: Sequence[int], dimension: int) -> list[int] | None:
    matrix = IntegerMatrix.from_columns(columns, dimension)
    snf = smith_normal_form(matrix)
    ux = snf.U.apply(list(target))
    diagonal = snf.diagonal
    w = []
    for i in range(matrix.cols):
        d = diagonal[i] if i < len(diagonal) else 0
        if d:
            if ux[i] % d:
                return None
            w.append(ux[i] // d)
        else:
            w.append(0)
    if any(ux[i] for i in range(snf.rank, matrix.rows)):
        return None
    return snf.V.apply(w) if matrix.cols else []


@dataclass
class LatticeQuotient:
    dimension: int
    group: GroupType
    generators: list[list[int]]
    _u: IntegerMatrix = field(repr=False)
    _diagonal: list[int] = field(repr=False)
    _u2: IntegerMatrix = field(repr=False)
    _free_slots: list[int] = field(repr=False)
    _torsion_slots: list[tuple[int, int]] = field(repr=False)

    def _lattice_coords(self, vector: Sequence[int]) -> list[int]:
        if len(vector) != self.dimension:
            raise ValueError(f"vector of length {len(vector)} in a lattice of Z^{self.dimension}")
        ux = self._u.apply(list(vector))
        s = len(self._diagonal)
        if any(ux[i] for i in range(s, self.dimension)):
            raise ValueError("vector is not in the lattice")
        coords = []
        for i, d in enumerate(self._diagonal):
            if ux[i] % d:
                raise ValueError("vector is not in the lattice")
            coords.append(ux[i] // d)
        return coords

    def contains(self, vector: Sequence[int]) -> bool:
        try:
            self._lattice_coords(vector)
        except ValueError:
            return False
        return True

    def coordinates(self, vector: Sequence[int]) -> list[int]:
        z = self._u2.apply(self._lattice_coords(vector))
        return [z[j] for j in self._free_slots] + [z[j] % t for j, t in self._torsion_slots]

    def element(self, coords: Sequence[int]) -> list[int]:
        out = [0] * self.dimension
        for c, g in zip(coords, self.generators):
            if c:
                for i, x in enumerate(g):
                    out[i] += c * x
        return out


def lattice_quotient(lattice: Sequence[Sequence[int]], relations: Sequence[Sequence[int]], dimension: int) -> LatticeQuotient:
    lattice_snf = smith_normal_form(IntegerMatrix.from_columns(lattice, dimension))
    diagonal = lattice_snf.diagonal[: lattice_snf.rank]
    s = len(diagonal)
    basis = [[d * x for x in lattice_snf.U_inv.column(i)] for i, d in enumerate(diagonal)]

    lattice_view = LatticeQuotient(
        dimension=dimension,
        group=GroupType(),
        generators=[],
        _u=lattice_snf.U,
        _diagonal=diagonal,
        _u2=IntegerMatrix.identity(s),
        _free_slots=[],
        _torsion_slots=[],
    )
    try:
        relation_coords = [lattice_view._lattice_coords(r) for r in relations]
    except ValueError as exc:
        raise ValueError("relations are not contained in the lattice") from exc

    relation_snf = smith_normal_form(IntegerMatrix.from_columns(relation_coords, s))
    factors = relation_snf.diagonal
    free_slots: list[int] = []
    torsion_slots: list[tuple[int, int]] = []
    for j in range(s):
        e = factors[j] if j < len(factors) else 0
        if e == 0:
            free_slots.append(j)
        elif e > 1:
            torsion_slots.append((j, e))

    generators = []
    for j in free_slots + [j for j, _ in torsion_slots]:
        c = relation_snf.U_inv.column(j)
        g = [0] * dimension
        for i, ci in enumerate(c):
            if ci:
                for row, x in enumerate(basis[i]):
                    g[row] += ci * x
        generators.append(g)

    return LatticeQuotient(
        dimension=dimension,
        group=GroupType(len(free_slots), tuple(t for _, t in torsion_slots)),
        generators=generators,
        _u=lattice_snf.U,
        _diagonal=diagonal,
        _u2=relation_snf.U,
        _free_slots=free_slots,
        _torsion_slots=torsion_slots,
    )


@dataclass
class GroupPresentation:
    kind: str
    degree: int
    cells: tuple[Simplex, ...]
    quotient: LatticeQuotient = field(repr=False)
    basis: list[Chain] | list[Cochain] = field(repr=False)

    @property
    def iso_type(self) -> GroupType:
        return self.quotient.group

    @property
    def rank(self) -> int:
        return self.quotient.group.rank

    @property
    def torsion(self) -> tuple[int, ...]:
        return self.quotient.group.torsion

    def is_trivial(self) -> bool:
        return self.iso_type.is_trivial()

    def rank_mod_p(self, p: int) -> int:
        return self.iso_type.rank_mod_p(p)

    def _vector(self, element: Chain | Cochain | Sequence[int]) -> list[int]:
        if isinstance(element, (Chain, Cochain)):
            if element.degree != self.degree:
                raise ValueError(f"degree {element.degree} element in a degree {self.degree} group")
            return element.to_vector(self.cells)
        return list(element)

    def is_cycle(self, element: Chain | Cochain | Sequence[int]) -> bool:
        return self.quotient.contains(self._vector(element))

    def coordinates(self, element: Chain | Cochain | Sequence[int]) -> list[int]:
        return self.quotient.coordinates(self._vector(element))

    def representative(self, coords: Sequence[int]) -> Chain | Cochain:
        vector = self.quotient.element(coords)
        if self.kind == "cohomology":
            return Cochain.from_vector(self.degree, self.cells, vector)
        return Chain.from_vector(self.degree, self.cells, vector)


def relative_homology(complex_: SimplicialComplex, k: int, rel: Subcomplex | None = None) -> GroupPresentation:
    cells = chain_basis(complex_, k, rel)
    cycles = kernel_basis(boundary_matrix(complex_, k, rel))
    boundaries = boundary_matrix(complex_, k + 1, rel).columns()
    quotient = lattice_quotient(cycles, boundaries, len(cells))
    basis = [Chain.from_vector(k, cells, g) for g in quotient.generators]
    logger.debug("H_%s over %s cells: %s", k, len(cells), quotient.group.describe())
    return GroupPresentation("homology", k, cells, quotient, basis)


def relative_cohomology(complex_: SimplicialComplex, n: int, rel: Subcomplex | None = None) -> GroupPresentation:
    cells = chain_basis(complex_, n, rel)
    cocycles = kernel_basis(boundary_matrix(complex_, n + 1, rel).transpose())
    coboundaries = boundary_matrix(complex_, n, rel).transpose().columns() if n >= 1 else []
    quotient = lattice_quotient(cocycles, coboundaries, len(cells))
    basis = [Cochain.from_vector(n, cells, g) for g in quotient.generators]
    logger.debug("H^%s over %s cells: %s", n, len(cells), quotient.group.describe())
    return GroupPresentation("cohomology", n, cells, quotient, basis)


@dataclass
class SubgroupPresentation:
    ambient: GroupPresentation = field(repr=False)
    generators: list[list[int]]
    quotient: LatticeQuotient = field(repr=False)

    @property
    def iso_type(self) -> GroupType:
        return self.quotient.group

    @property
    def rank(self) -> int:
        return self.quotient.group.rank

    @property
    def torsion(self) -> tuple[int, ...]:
        return self.quotient.group.torsion

    def is_trivial(self) -> bool:
        return self.iso_type.is_trivial()

    def contains(self, coords: Sequence[int]) -> bool:
        return self.quotient.contains(list(coords))

    def coordinates(self, coords: Sequence[int]) -> list[int]:
        return self.quotient.coordinates(list(coords))

    def canonical_generators(self) -> list[list[int]]:
        return [self.ambient.iso_type.reduce(g) for g in self.quotient.generators]

    def express(self, coords: Sequence[int]) -> list[int] | None:
        group = self.ambient.iso_type
        columns = list(self.generators) + group.relations()
        solution = solve_integer(columns, list(coords), group.size)
        if solution is None:
            return None
        return solution[: len(self.generators)]


def subgroup_image(ambient: GroupPresentation, gens: Sequence[Sequence[int]]) -> SubgroupPresentation:
    group = ambient.iso_type
    generators = [group.reduce(g) for g in gens]
    for g in generators:
        if len(g) != group.size:
            raise ValueError(f"generator {g} does not have {group.size} coordinates")
    relations = group.relations()
    quotient = lattice_quotient(generators + relations, relations, group.size)
    return SubgroupPresentation(ambient, generators, quotient)


def cokernel(target: GroupType, images: Sequence[Sequence[int]]) -> GroupType:
    unit = IntegerMatrix.identity(target.size).columns()
    quotient = lattice_quotient(unit, target.relations() + [list(v) for v in images], target.size)
    return quotient.group
