from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from sympy import nextprime

from wellcap.abelian import GroupPresentation, SubgroupPresentation, relative_cohomology, relative_homology, subgroup_image
from wellcap.complex_core import Chain, Cochain, Simplex
from wellcap.errors import ConsistencyError, DegeneracyError
from wellcap.filtration import PLMap, SublevelPair
from wellcap.geometry import Vector, barycentric, det, in_affine_hull, sign

logger = logging.getLogger(__name__)


@dataclass
class ObstructionCocycle:
    cochain: Cochain
    pair: SublevelPair = field(repr=False)
    test_point: Vector = ()

    @property
    def n(self) -> int:
        return self.cochain.degree


@dataclass
class ObstructionClass:
    group: GroupPresentation = field(repr=False)
    coordinates: list[int] = field(default_factory=list)

    @property
    def is_trivial(self) -> bool:
        return not any(self.coordinates)


@dataclass
class CapImageReport:
    k: int
    n: int
    source: GroupPresentation = field(repr=False)
    ambient: GroupPresentation = field(repr=False)
    subgroup: SubgroupPresentation = field(repr=False)
    images: list[list[int]] = field(default_factory=list)
    witnesses: list[Chain] = field(default_factory=list, repr=False)
    preimages: list[Chain] = field(default_factory=list, repr=False)

    @property
    def degree(self) -> int:
        return self.k - self.n

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "degree": self.degree,
            "source": self.source.iso_type.to_json(),
            "ambient": self.ambient.iso_type.to_json(),
            "cap_image": self.subgroup.iso_type.to_json(),
            "generators": self.subgroup.canonical_generators(),
        }


def find_test_point(
    values: Mapping[int, Vector],
    simplices: Iterable[Simplex],
    radius: Fraction,
    n: int,
    budget: int = 4096,
) -> Vector:
    # (e, e^2, ..., e^n) * radius/2 for e = 1/prime, first one off every simplex image
    hulls = [[values[v] for v in s] for s in simplices]
    prime = 2
    for attempt in range(budget):
        eps = Fraction(1, prime)
        point = tuple(eps ** (i + 1) * Fraction(radius) / 2 for i in range(n))
        if not any(in_affine_hull(point, hull) for hull in hulls):
            logger.debug("Test point %s accepted after %s candidates", [str(x) for x in point], attempt + 1)
            return point
        prime = int(nextprime(prime))
    raise DegeneracyError(f"no admissible test point among {budget} candidates at radius {radius}")


def local_degree(images: list[Vector], point: Vector) -> int:
    base = images[0]
    orientation = sign(det([[a - b for a, b in zip(y, base)] for y in images[1:]]))
    if orientation == 0:
        return 0
    coords = barycentric(point, images)
    if coords is None or any(c < 0 for c in coords):
        return 0
    return orientation


def obstruction_cocycle(
    pair: SublevelPair,
    f: PLMap | None = None,
    test_point: Vector | None = None,
    budget: int = 4096,
) -> ObstructionCocycle:
    values = (f or pair.f_star).values
    n = pair.n
    X = pair.X_complex
    if test_point is None:
        test_point = find_test_point(values, X.simplices_of_dim(n - 1), pair.radius, n, budget)
    cochain: dict[Simplex, int] = {}
    for sigma in X.simplices_of_dim(n):
        if sigma in pair.A:
            continue
        z = local_degree([values[v] for v in sigma], test_point)
        if z:
            cochain[sigma] = z
    logger.info("Obstruction cocycle r=%s: support %s of %s n-simplices", pair.radius, len(cochain), len(X.simplices_of_dim(n)))
    return ObstructionCocycle(Cochain(n, cochain), pair, tuple(test_point))


def is_cocycle(z: ObstructionCocycle) -> bool:
    if any(s in z.pair.A for s in z.cochain.values):
        return False
    if any(s not in z.pair.X for s in z.cochain.values):
        return False
    return z.cochain.coboundary(z.pair.X_complex).is_zero()


def obstruction_class(z: ObstructionCocycle) -> ObstructionClass:
    if not is_cocycle(z):
        raise ConsistencyError("obstruction cochain is not a relative cocycle")
    group = relative_cohomology(z.pair.X_complex, z.n, z.pair.A)
    return ObstructionClass(group, group.coordinates(z.cochain))


def cap_chain(phi: Cochain, c: Chain) -> Chain:
    n = phi.degree
    if c.degree < n:
        raise ValueError(f"cannot cap a degree {n} cochain with a degree {c.degree} chain")
    out: dict[Simplex, int] = {}
    for simplex, coef in c.coefficients.items():
        value = phi(simplex[: n + 1])
        if value:
            back = simplex[n:]
            out[back] = out.get(back, 0) + coef * value
    return Chain(c.degree - n, out)


def cap_image(pair: SublevelPair, z: ObstructionCocycle, k: int) -> CapImageReport:
    n = z.n
    if k < n:
        raise ValueError(f"cap degree k={k} is below n={n}")
    X = pair.X_complex
    source = relative_homology(X, k, pair.A_union_B)
    ambient = relative_homology(X, k - n, pair.B_cap)

    capped = [cap_chain(z.cochain, beta) for beta in source.basis]
    images = []
    for beta, chain in zip(source.basis, capped):
        if not ambient.is_cycle(chain):
            raise ConsistencyError(f"cap of an H_{k} generator is not a relative cycle mod B at r={pair.radius}")
        images.append(ambient.coordinates(chain))
    subgroup = subgroup_image(ambient, images)

    witnesses: list[Chain] = []
    preimages: list[Chain] = []
    for g in subgroup.canonical_generators():
        combo = subgroup.express(g)
        if combo is None:
            raise ConsistencyError("cap-image generator is not a combination of capped classes")
        preimage = Chain.zero(k)
        for a, beta in zip(combo, source.basis):
            if a:
                preimage = preimage + beta.scale(a)
        preimages.append(preimage)
        witnesses.append(cap_chain(z.cochain, preimage))

    logger.info(
        "Cap image r=%s k=%s: %s inside %s",
        pair.radius,
        k,
        subgroup.iso_type.describe(),
        ambient.iso_type.describe(),
    )
    return CapImageReport(k, n, source, ambient, subgroup, images, witnesses, preimages)


def cap_images(pair: SublevelPair, z: ObstructionCocycle) -> dict[int, CapImageReport]:
    return {k: cap_image(pair, z, k) for k in range(z.n, pair.X_complex.dim + 1)}
