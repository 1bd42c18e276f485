from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from wellcap.abelian import GroupType, cokernel
from wellcap.complex_core import Chain, SimplicialComplex, Simplex, Subcomplex
from wellcap.errors import ConsistencyError
from wellcap.filtration import (
    GlobalSubdivision,
    NormKind,
    PLMap,
    RadiiSchedule,
    SublevelPair,
    build_global_subdivision,
    shell,
    sublevel_pair,
)
from wellcap.geometry import Vector
from wellcap.matrix import IntegerMatrix
from wellcap.obstruction_cap import CapImageReport, ObstructionCocycle, cap_chain, cap_image, find_test_point, obstruction_cocycle

logger = logging.getLogger(__name__)


@dataclass
class WellDiagramEvent:
    # multiplicity is the rank of coker iota; a torsion-only cokernel gives multiplicity 0 with torsion set.
    radius: Fraction
    degree: int
    multiplicity: int
    torsion: tuple[int, ...] = ()

    def to_json(self) -> dict:
        return {
            "radius": str(self.radius),
            "degree": self.degree,
            "multiplicity": self.multiplicity,
            "torsion": list(self.torsion),
        }


@dataclass
class CapModule:
    radii: RadiiSchedule
    n: int
    gs: GlobalSubdivision = field(repr=False)
    test_point: Vector
    pairs: list[SublevelPair] = field(default_factory=list, repr=False)
    cocycles: list[ObstructionCocycle] = field(default_factory=list, repr=False)
    reports: list[dict[int, CapImageReport]] = field(default_factory=list, repr=False)
    maps: dict[tuple[int, int], IntegerMatrix] = field(default_factory=dict, repr=False)
    composites: dict[tuple[int, int], IntegerMatrix] = field(default_factory=dict, repr=False)

    @property
    def degrees(self) -> list[int]:
        return sorted({j for per_radius in self.reports for j in per_radius})

    def report(self, i: int, degree: int) -> CapImageReport | None:
        return self.reports[i].get(degree)

    def group(self, i: int, degree: int) -> GroupType:
        report = self.report(i, degree)
        return report.subgroup.iso_type if report is not None else GroupType()

    def rank_profile(self, degree: int) -> list[int]:
        return [self.group(i, degree).rank for i in range(len(self.radii))]

    def iota(self, i: int, degree: int) -> IntegerMatrix:
        return self.maps[(i, degree)]

    def composite(self, i: int, degree: int) -> IntegerMatrix:
        return self.composites[(i, degree)]

    def to_json(self) -> dict:
        radii = []
        for i, r in enumerate(self.radii):
            radii.append(
                {
                    "radius": str(r),
                    "groups": {str(j): self.group(i, j).to_json() for j in self.degrees},
                }
            )
        maps = []
        for (i, j), matrix in sorted(self.maps.items()):
            maps.append(
                {
                    "from": str(self.radii[i]),
                    "to": str(self.radii[i + 1]),
                    "degree": j,
                    "matrix": matrix.entries,
                }
            )
        return {
            "n": self.n,
            "norm": self.gs.norm.value,
            "test_point": [str(x) for x in self.test_point],
            "radii": radii,
            "maps": maps,
            "events": [e.to_json() for e in extract_events(self)],
        }


def _subgroup_coords(report: CapImageReport, chain: Chain) -> list[int]:
    if not report.ambient.is_cycle(chain):
        raise ConsistencyError(f"transported chain is not a relative cycle in degree {report.degree}")
    coords = report.ambient.coordinates(chain)
    if not report.subgroup.contains(coords):
        raise ConsistencyError(f"transported class left the cap image in degree {report.degree}")
    return report.subgroup.coordinates(coords)


def _transport(
    module: CapModule,
    i: int,
    degree: int,
    outer_shell: Subcomplex,
) -> tuple[IntegerMatrix, IntegerMatrix]:
    outer, inner = module.pairs[i], module.pairs[i + 1]
    source_report = module.reports[i][degree]
    target_report = module.reports[i + 1][degree]
    z_inner = module.cocycles[i + 1]
    excised = outer_shell.union(outer.B_cap)
    inner_rel = inner.A_union_B

    iota_columns: list[list[int]] = []
    composite_columns: list[list[int]] = []
    for index, beta in enumerate(source_report.preimages):
        restricted = beta.restrict(inner.X).drop(inner_rel)
        if any(s not in excised for s in (beta - restricted).coefficients):
            raise ConsistencyError(
                f"excised part of generator {index} leaves the shell between r={outer.radius} and r={inner.radius}"
            )
        if not target_report.source.is_cycle(restricted):
            raise ConsistencyError(f"restricted generator {index} is not a relative cycle at r={inner.radius}")
        capped = cap_chain(z_inner.cochain, restricted)
        iota_columns.append(_subgroup_coords(target_report, capped))
        composite_columns.append(_subgroup_coords(source_report, capped))

    size_in = source_report.subgroup.iso_type.size
    size_out = target_report.subgroup.iso_type.size
    iota = IntegerMatrix.from_columns(iota_columns, size_out)
    composite = IntegerMatrix.from_columns(composite_columns, size_in)
    identity = IntegerMatrix.from_columns(
        [source_report.subgroup.iso_type.reduce(col) for col in IntegerMatrix.identity(size_in).columns()],
        size_in,
    )
    if composite.entries != identity.entries:
        raise ConsistencyError(
            f"restriction back through the shell is not the identity in degree {degree} "
            f"between r={outer.radius} and r={inner.radius}: {composite.entries}"
        )
    return iota, composite


def cap_module(
    K: SimplicialComplex,
    B: Subcomplex | Iterable[Simplex] | None,
    f: PLMap,
    radii: RadiiSchedule,
    norm: NormKind | str,
    budget: int = 4096,
) -> CapModule:
    gs = build_global_subdivision(K, f, radii, norm)
    pairs = [sublevel_pair(gs, r, B) for r in radii]
    n = f.n
    # One test point below the smallest radius serves every radius.
    widest = pairs[0].X_complex
    test_point = find_test_point(gs.f_star.values, widest.simplices_of_dim(n - 1), radii.smallest, n, budget)

    module = CapModule(radii=radii, n=n, gs=gs, test_point=test_point, pairs=pairs)
    top = gs.complex.dim
    for pair in pairs:
        z = obstruction_cocycle(pair, test_point=test_point)
        module.cocycles.append(z)
        # Every radius gets the same degrees; groups above dim X(r) come out trivial.
        module.reports.append({k - n: cap_image(pair, z, k) for k in range(n, top + 1)})

    for i in range(len(radii) - 1):
        outer_shell = shell(gs, radii[i], radii[i + 1])
        for degree in module.degrees:
            iota, composite = _transport(module, i, degree, outer_shell)
            module.maps[(i, degree)] = iota
            module.composites[(i, degree)] = composite

    logger.info(
        "Cap module over %s radii: %s",
        len(radii),
        {j: module.rank_profile(j) for j in module.degrees},
    )
    return module


def extract_events(module: CapModule) -> list[WellDiagramEvent]:
    events: list[WellDiagramEvent] = []
    for i in range(len(module.radii) - 1):
        for degree in module.degrees:
            target = module.group(i + 1, degree)
            if target.is_trivial():
                continue
            iota = module.maps.get((i, degree))
            columns = iota.columns() if iota is not None else []
            quotient = cokernel(target, columns)
            if quotient.rank or quotient.torsion:
                events.append(WellDiagramEvent(module.radii[i], degree, quotient.rank, quotient.torsion))
    return events
