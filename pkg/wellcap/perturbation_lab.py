from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from wellcap.abelian import GroupType, relative_homology, subgroup_image
from wellcap.complex_core import (
    Chain,
    SimplicialComplex,
    Simplex,
    Subcomplex,
    SubdivisionRecord,
    all_faces,
    cut_by_levels,
    skeleton,
)
from wellcap.errors import NonGenericError, PerturbationError
from wellcap.filtration import PLMap, SublevelPair, refine_at_levels
from wellcap.geometry import NormKind, Vector, facet_functionals, in_convex_hull, norm_value
from wellcap.obstruction_cap import CapImageReport

logger = logging.getLogger(__name__)

STRATEGIES = ("uniform", "extremal", "shift", "mixed")


@dataclass
class DualComplexResult:
    subdivision: SubdivisionRecord = field(repr=False)
    Y: Subcomplex = field(repr=False)
    pairing: dict[Simplex, Simplex]
    barycenters: dict[Simplex, int]
    i: int

    @property
    def complex(self) -> SimplicialComplex:
        return self.subdivision.target

    @property
    def barycenter_ids(self) -> frozenset[int]:
        return frozenset(self.barycenters.values())

    def base_part(self, simplex: Simplex) -> Simplex:
        ids = self.barycenter_ids
        return tuple(v for v in simplex if v not in ids)

    def y_part(self, simplex: Simplex) -> Simplex:
        ids = self.barycenter_ids
        return tuple(v for v in simplex if v in ids)

    def check_join(self, A: Subcomplex | Iterable[Simplex]) -> bool:
        members = A.members if isinstance(A, Subcomplex) else frozenset(A)
        for simplex in self.complex:
            base, top = self.base_part(simplex), self.y_part(simplex)
            if base and base not in members:
                return False
            if top and top not in self.Y:
                return False
        return all(s not in members for s in self.Y.members)


def dual_complex(X: SimplicialComplex, A: Subcomplex | Iterable[Simplex], i: int) -> DualComplexResult:
    members = A.members if isinstance(A, Subcomplex) else frozenset(A)
    if i < 1:
        raise PerturbationError(f"the dual construction needs i >= 1, got {i}")
    for s in X:
        if len(s) - 1 <= i - 1 and s not in members:
            raise PerturbationError(f"A does not contain the {i - 1}-skeleton: {list(s)} is missing")

    outside = sorted((s for s in X if s not in members), key=lambda s: (len(s), s))
    next_id = X.max_vertex() + 1
    barycenters = {s: next_id + offset for offset, s in enumerate(outside)}
    coords: dict[int, dict[int, Fraction]] = {v: {v: Fraction(1)} for v in X.vertices}
    for s, b in barycenters.items():
        coords[b] = {v: Fraction(1, len(s)) for v in s}

    cofaces: dict[Simplex, list[Simplex]] = {s: [] for s in outside}
    for s in outside:
        for t in outside:
            if len(t) == len(s) + 1 and set(s) <= set(t):
                cofaces[s].append(t)

    memo: dict[Simplex, list[list[Simplex]]] = {}

    def chains_up(s: Simplex) -> list[list[Simplex]]:
        if s not in memo:
            if not cofaces[s]:
                memo[s] = [[s]]
            else:
                memo[s] = [[s] + rest for t in cofaces[s] for rest in chains_up(t)]
        return memo[s]

    cells: set[Simplex] = set(X.simplices & members)
    for s in outside:
        a_faces = [f for f in all_faces(s) if f in members]
        maximal_faces = [f for f in a_faces if not any(set(f) < set(g) for g in a_faces)] or [()]
        for chain in chains_up(s):
            bary = tuple(barycenters[c] for c in chain)
            for alpha in maximal_faces:
                cells.add(tuple(sorted(alpha + bary)))
    target = SimplicialComplex.from_maximal(cells)
    record = SubdivisionRecord.build(X, target, coords)

    bary_ids = frozenset(barycenters.values())
    Y = Subcomplex(target, frozenset(s for s in target.simplices if all(v in bary_ids for v in s)))
    top = X.dim - i
    by_id = {b: s for s, b in barycenters.items()}
    pairing = {}
    for tau in Y.members:
        if len(tau) - 1 == top:
            pairing[tau] = min((by_id[b] for b in tau), key=len)
    logger.info("Dual complex i=%s: %s simplices, Y has %s simplices of dim <= %s", i, len(target), len(Y), top)
    return DualComplexResult(record, Y, pairing, barycenters, i)


@dataclass
class ZeroSet:
    source: PLMap = field(repr=False)
    record: SubdivisionRecord = field(repr=False)
    Z: Subcomplex = field(repr=False)

    @property
    def complex(self) -> SimplicialComplex:
        return self.record.target

    @property
    def dim(self) -> int:
        return self.Z.dim

    def geometric_key(self, base: SubdivisionRecord | None = None) -> frozenset:
        record = base.compose(self.record) if base is not None else self.record
        points = {
            v: tuple(sorted(record.vertex_coords[v].items()))
            for s in self.Z.members
            for v in s
        }
        return frozenset(frozenset(points[v] for v in s) for s in self.Z.members)


def zero_set(g: PLMap, check_generic: bool = True) -> ZeroSet:
    record = SubdivisionRecord.identity(g.domain)
    values: dict[int, Vector] = dict(g.values)
    for i in range(g.n):
        step = cut_by_levels(record.target, {v: values[v][i] for v in record.target.vertices}, Fraction(0))
        if step.target is record.target:
            continue
        values = step.push_forward(values)
        record = record.compose(step)
    zero_vertices = {v for v in record.target.vertices if not any(values[v])}
    Z = Subcomplex(
        record.target,
        frozenset(s for s in record.target.simplices if all(v in zero_vertices for v in s)),
    )
    limit = g.domain.dim - g.n
    if check_generic and Z.dim > limit:
        worst = min(Z.members, key=lambda s: (-len(s), s))
        carrier = record.carrier[worst]
        raise NonGenericError(
            f"zero simplex of dimension {len(worst) - 1} exceeds {limit} (carrier {list(carrier)})",
            simplex=carrier,
        )
    return ZeroSet(g, record, Z)


@dataclass
class PerturbationSample:
    g: PLMap = field(repr=False)
    bound: Fraction
    provenance: str
    strategy: str = ""
    # Record from the sublevel complex X to g.domain; None means g lives on the global subdivision.
    record: SubdivisionRecord | None = field(default=None, repr=False)
    zeros: ZeroSet | None = field(default=None, repr=False)


def _check_extends(values: Mapping[int, Vector], f_values: Mapping[int, Vector], vertices: Iterable[int], what: str) -> None:
    for v in vertices:
        if tuple(values[v]) != tuple(f_values[v]):
            raise PerturbationError(f"{what} does not extend f on A: vertex {v} has {list(map(str, values[v]))}")


def extension_to_perturbation(
    pair: SublevelPair,
    e: PLMap,
    record: SubdivisionRecord | None = None,
    halvings: int = 48,
) -> PerturbationSample:
    # e scaled by delta away from A, unchanged within eps of the level r
    base = record or SubdivisionRecord.identity(pair.X_complex)
    if base.target.simplices != e.domain.simplices:
        raise PerturbationError("the extension is not defined on the given subdivision of X")
    r, norm, n = pair.radius, pair.norm, pair.n
    f_dom = base.push_forward(pair.f_star.values)
    A_dom = base.carried(pair.A)
    _check_extends(e.values, f_dom, A_dom.vertices, "the extension")

    functionals = facet_functionals(norm, n)
    eps = r / 4
    for _ in range(halvings):
        cut = refine_at_levels(e.domain, f_dom, functionals, [r - eps])
        W = cut.target
        f_w = cut.push_forward(f_dom)
        e_w = cut.push_forward(e.values)
        near = {v for v in W.vertices if norm_value(f_w[v], norm) > r - eps}
        touched = {v for s in W.simplices if any(u in near for u in s) for v in s}
        if all(norm_value(tuple(a - b for a, b in zip(e_w[v], f_w[v])), norm) < r / 2 for v in touched):
            break
        eps /= 2
    else:
        raise PerturbationError(f"no epsilon down to {eps} keeps |e - f| < r/2 near A")

    far = [v for v in W.vertices if v not in near]
    e_max = max((norm_value(e_w[v], norm) for v in far), default=Fraction(0))
    delta = min(Fraction(1), eps / (2 * e_max)) if e_max else Fraction(1)
    g_values = {v: tuple(x * (delta if v not in near else 1) for x in e_w[v]) for v in W.vertices}
    g = PLMap(W, n, g_values)
    bound = g.distance(PLMap(W, n, f_w), norm)
    if not bound < r:
        raise PerturbationError(f"constructed perturbation has distance {bound}, not below r={r}")
    logger.info("Extension to perturbation: eps=%s delta=%s bound=%s on %s simplices", eps, delta, bound, len(W))
    return PerturbationSample(g, bound, "user", "extension", base.compose(cut))


def skeletal_perturbation(
    pair: SublevelPair,
    h: Mapping[int, Vector],
    i: int,
    dual: DualComplexResult | None = None,
    halvings: int = 48,
) -> tuple[PerturbationSample, DualComplexResult]:
    X = pair.X_complex
    n = pair.n
    base_members = pair.A.members | skeleton(X, i - 1).members
    if dual is None:
        dual = dual_complex(X, base_members, i)
    base = Subcomplex(X, frozenset(base_members))

    for v in base.vertices:
        if v not in h:
            raise PerturbationError(f"h has no value at vertex {v}")
        if len(h[v]) != n:
            raise PerturbationError(f"h has a value of length {len(h[v])} at vertex {v}, expected {n}")
    _check_extends(h, pair.f_star.values, pair.A.vertices, "h")
    origin = tuple(Fraction(0) for _ in range(n))
    for s in base.as_complex().maximal_simplices:
        if in_convex_hull(origin, [h[v] for v in s]):
            raise PerturbationError(f"h vanishes on simplex {list(s)}")
    if not dual.check_join(base):
        raise PerturbationError("the dual subdivision violates the join structure")

    bary = set(dual.barycenters.values())
    values = {v: (origin if v in bary else tuple(h[v])) for v in dual.complex.vertices}
    e = PLMap(dual.complex, n, values)
    sample = extension_to_perturbation(pair, e, dual.subdivision, halvings)
    sample.strategy = "dual"
    return sample, dual


@dataclass
class ContainmentVerdict:
    contained: bool
    violations: list[int]
    cap_image: GroupType
    zero_image: GroupType
    zero_simplices: int
    bound: Fraction
    provenance: str
    strategy: str

    def to_json(self) -> dict:
        return {
            "contained": self.contained,
            "violations": self.violations,
            "cap_image": self.cap_image.to_json(),
            "zero_image": self.zero_image.to_json(),
            "zero_simplices": self.zero_simplices,
            "bound": str(self.bound),
            "provenance": self.provenance,
            "strategy": self.strategy,
        }


def _carrier_vertex_map(record: SubdivisionRecord) -> dict[int, int]:
    # Any carrier vertex gives a simplicial approximation of the identity.
    return {w: min(weights) for w, weights in record.vertex_coords.items()}


def project_chain(record: SubdivisionRecord, chain: Chain) -> Chain:
    vertex_map = _carrier_vertex_map(record)
    out: dict[Simplex, int] = {}
    for simplex, c in chain.coefficients.items():
        image = [vertex_map[v] for v in simplex]
        if len(set(image)) < len(image):
            continue
        order = sorted(range(len(image)), key=lambda j: image[j])
        inversions = sum(1 for a in range(len(order)) for b in range(a + 1, len(order)) if order[a] > order[b])
        key = tuple(sorted(image))
        out[key] = out.get(key, 0) + (-c if inversions % 2 else c)
    return Chain(chain.degree, out)


def _zeros_on_x(pair: SublevelPair, sample: PerturbationSample) -> tuple[ZeroSet, SubdivisionRecord]:
    if sample.record is None:
        g = sample.g.restricted(pair.X_complex)
        base = SubdivisionRecord.identity(pair.X_complex)
    else:
        g = sample.g
        base = sample.record
    zeros = sample.zeros if sample.zeros is not None and sample.zeros.source.domain == g.domain else zero_set(g)
    return zeros, base.compose(zeros.record)


def containment_check(
    pair: SublevelPair,
    report: CapImageReport,
    sample: PerturbationSample,
) -> ContainmentVerdict:
    if sample.bound > pair.radius:
        raise PerturbationError(f"sample bound {sample.bound} exceeds r={pair.radius}")
    zeros, to_refined = _zeros_on_x(pair, sample)
    j = report.degree
    B_z = to_refined.carried(pair.B_cap)
    Z = zeros.Z
    zero_homology = relative_homology(Z.as_complex(), j, Z.intersection(B_z))

    ambient = report.ambient
    image_coords = []
    for chain in zero_homology.basis:
        projected = project_chain(to_refined, chain)
        if not ambient.is_cycle(projected):
            raise PerturbationError("a zero-set class does not project to a relative cycle of X")
        image_coords.append(ambient.coordinates(projected))
    image = subgroup_image(ambient, image_coords)
    violations = [idx for idx, gen in enumerate(report.subgroup.canonical_generators()) if not image.contains(gen)]
    verdict = ContainmentVerdict(
        contained=not violations,
        violations=violations,
        cap_image=report.subgroup.iso_type,
        zero_image=image.iso_type,
        zero_simplices=len(Z),
        bound=sample.bound,
        provenance=sample.provenance,
        strategy=sample.strategy,
    )
    level = logging.INFO if verdict.contained else logging.ERROR
    logger.log(
        level,
        "Containment %s: strategy=%s bound=%s zero image %s, cap image %s",
        "ok" if verdict.contained else "VIOLATED",
        sample.strategy,
        sample.bound,
        image.iso_type.describe(),
        report.subgroup.iso_type.describe(),
    )
    return verdict


def _uniform_offset(rng: random.Random, n: int, norm: NormKind, denominator: int) -> list[int]:
    if norm is NormKind.LINF:
        return [rng.randint(-denominator, denominator) for _ in range(n)]
    budget = denominator
    out = [0] * n
    for i in rng.sample(range(n), n):
        out[i] = rng.randint(-budget, budget)
        budget -= abs(out[i])
    return out


def _extremal_offset(rng: random.Random, n: int, norm: NormKind, denominator: int) -> list[int]:
    if norm is NormKind.LINF:
        out = [rng.randint(-denominator, denominator) for _ in range(n)]
        out[rng.randrange(n)] = rng.choice((-denominator, denominator))
        return out
    order = rng.sample(range(n), n)
    budget = denominator
    out = [0] * n
    for i in order[:-1]:
        out[i] = rng.randint(-budget, budget)
        budget -= abs(out[i])
    out[order[-1]] = rng.choice((-budget, budget))
    return out


def _shift_offset(index: int, n: int, denominator: int) -> list[int]:
    axis, sign = divmod(index % (2 * n), 2)
    out = [0] * n
    out[axis] = -denominator if sign == 0 else denominator
    return out


def sample_perturbations(
    pair: SublevelPair,
    count: int,
    strategy: str = "mixed",
    seed: int = 0,
    denominator: int = 64,
    retry_limit: int = 25,
) -> list[PerturbationSample]:
    if strategy not in STRATEGIES:
        raise PerturbationError(f"unknown sampling strategy {strategy!r}; expected one of {', '.join(STRATEGIES)}")
    r, norm, n = pair.radius, pair.norm, pair.n
    f = pair.f_star
    rng = random.Random(seed)
    unit = r / denominator
    samples: list[PerturbationSample] = []
    for index in range(count):
        kind = ("uniform", "extremal", "shift")[index % 3] if strategy == "mixed" else strategy
        for attempt in range(retry_limit + 1):
            if kind == "shift":
                constant = _shift_offset(index + attempt, n, denominator)
                offsets = {v: constant for v in f.domain.vertices}
            elif kind == "uniform":
                offsets = {v: _uniform_offset(rng, n, norm, denominator) for v in f.domain.vertices}
            else:
                offsets = {v: _extremal_offset(rng, n, norm, denominator) for v in f.domain.vertices}
            values = {v: tuple(y + unit * o for y, o in zip(f.values[v], offsets[v])) for v in f.domain.vertices}
            g = PLMap(f.domain, n, values)
            try:
                zeros = zero_set(g.restricted(pair.X_complex))
            except NonGenericError as exc:
                logger.debug("Sample %s attempt %s is not generic: %s", index, attempt, exc)
                continue
            bound = g.distance(f, norm)
            provenance = "adversarial" if kind == "shift" else "random"
            samples.append(PerturbationSample(g, bound, provenance, kind, None, zeros))
            break
        else:
            raise PerturbationError(f"sample {index} stayed non-generic after {retry_limit} redraws")
    return samples
