from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from wellcap.archive import ArchivedSample
from wellcap.config import Settings
from wellcap.errors import PerturbationError, ProblemFormatError
from wellcap.filtration import PLMap, RadiiSchedule, build_global_subdivision, sublevel_pair
from wellcap.geometry import Vector
from wellcap.obstruction_cap import CapImageReport, cap_image, obstruction_class, obstruction_cocycle
from wellcap.perturbation_lab import (
    containment_check,
    extension_to_perturbation,
    sample_perturbations,
    skeletal_perturbation,
    zero_set,
)
from wellcap.problem import ProblemFile, format_rational, map_document
from wellcap.welldiagram import cap_module

logger = logging.getLogger(__name__)

EXIT_VIOLATION = 5


@dataclass
class CommandResult:
    report: dict
    summary: str
    exit_code: int = 0
    radius: str = ""
    seed: int | None = None
    samples: list[ArchivedSample] = field(default_factory=list)


def dump_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _default_radius(problem: ProblemFile, radius: Fraction | None) -> Fraction:
    return problem.radii.smallest if radius is None else Fraction(radius)


def _pair_for(problem: ProblemFile, r: Fraction):
    gs = build_global_subdivision(problem.complex, problem.f, RadiiSchedule((r,)), problem.norm)
    return gs, sublevel_pair(gs, r, problem.B)


def _degrees(pair, n: int, degree: int | None) -> list[int]:
    if degree is not None:
        if degree < n:
            raise ProblemFormatError(f"--degree must be at least n={n}, got {degree}")
        return [degree]
    return list(range(n, pair.X_complex.dim + 1))


def _cap_reports(pair, z, n: int, degree: int | None) -> dict[int, CapImageReport]:
    return {k: cap_image(pair, z, k) for k in _degrees(pair, n, degree)}


def run_compute(problem: ProblemFile, settings: Settings, radius: Fraction | None = None, degree: int | None = None) -> CommandResult:
    r = _default_radius(problem, radius)
    gs, pair = _pair_for(problem, r)
    z = obstruction_cocycle(pair, budget=settings.test_point_budget)
    obstruction = obstruction_class(z)
    reports = _cap_reports(pair, z, problem.n, degree)

    report = {
        "command": "compute",
        "radius": format_rational(r),
        "norm": problem.norm.value,
        "n": problem.n,
        "subdivision": {"vertices": len(gs.complex.vertices), "simplices": len(gs.complex)},
        "pair": {"X": len(pair.X), "A": len(pair.A), "B": len(pair.B_cap), "dim_X": pair.X_complex.dim},
        "test_point": [format_rational(x) for x in z.test_point],
        "obstruction": {
            "group": obstruction.group.iso_type.to_json(),
            "coordinates": obstruction.coordinates,
            "trivial": obstruction.is_trivial,
        },
        "cap_images": [reports[k].to_json() for k in sorted(reports)],
    }
    lines = [
        f"r={format_rational(r)}: H^{problem.n}(X,A) = {obstruction.group.iso_type.describe()}, "
        f"obstruction {'trivial' if obstruction.is_trivial else 'nontrivial'}"
    ]
    for k in sorted(reports):
        rep = reports[k]
        lines.append(
            f"  k={k}: cap image {rep.subgroup.iso_type.describe()} inside "
            f"H_{rep.degree}(X,B) = {rep.ambient.iso_type.describe()}"
        )
    return CommandResult(report, "\n".join(lines), radius=format_rational(r))


def run_diagram(problem: ProblemFile, settings: Settings) -> CommandResult:
    module = cap_module(problem.complex, problem.B, problem.f, problem.radii, problem.norm, settings.test_point_budget)
    report = {"command": "diagram", **module.to_json()}
    lines = []
    for j in module.degrees:
        profile = [module.group(i, j).describe() for i in range(len(module.radii))]
        lines.append(f"degree {j}: " + ", ".join(f"r={format_rational(r)}: {p}" for r, p in zip(module.radii, profile)))
    events = report["events"]
    lines.append(f"events: {len(events)}")
    for event in events:
        lines.append(f"  r={event['radius']} degree {event['degree']} multiplicity {event['multiplicity']}")
    return CommandResult(report, "\n".join(lines))


def run_verify(
    problem: ProblemFile,
    settings: Settings,
    radius: Fraction | None = None,
    count: int | None = None,
    seed: int | None = None,
    strategy: str = "mixed",
    degree: int | None = None,
) -> CommandResult:
    r = _default_radius(problem, radius)
    count = settings.default_samples if count is None else count
    seed = settings.default_seed if seed is None else seed
    _, pair = _pair_for(problem, r)
    z = obstruction_cocycle(pair, budget=settings.test_point_budget)
    reports = _cap_reports(pair, z, problem.n, degree)
    samples = sample_perturbations(
        pair,
        count,
        strategy=strategy,
        seed=seed,
        denominator=settings.sample_denominator,
        retry_limit=settings.sample_retry_limit,
    )

    verdicts = []
    archived: list[ArchivedSample] = []
    violated = 0
    for index, sample in enumerate(samples):
        for k in sorted(reports):
            verdict = containment_check(pair, reports[k], sample)
            violated += 0 if verdict.contained else 1
            verdicts.append({"index": index, "k": k, **verdict.to_json()})
            archived.append(
                ArchivedSample(
                    sample_index=index,
                    degree=reports[k].degree,
                    provenance=sample.provenance,
                    strategy=sample.strategy,
                    bound=format_rational(sample.bound),
                    verdict="contained" if verdict.contained else "violated",
                )
            )

    report = {
        "command": "verify",
        "radius": format_rational(r),
        "norm": problem.norm.value,
        "seed": seed,
        "strategy": strategy,
        "samples": len(samples),
        "cap_images": [reports[k].to_json() for k in sorted(reports)],
        "verdicts": verdicts,
        "violations": violated,
    }
    summary = (
        f"r={format_rational(r)}: {len(samples)} samples x {len(reports)} degrees, "
        f"{len(verdicts) - violated} contained, {violated} violated"
    )
    exit_code = EXIT_VIOLATION if violated else 0
    return CommandResult(report, summary, exit_code, format_rational(r), seed, archived)


def run_perturb(
    problem: ProblemFile,
    settings: Settings,
    radius: Fraction | None = None,
    mode: str = "extension",
    aux: Mapping[int, Vector] | None = None,
    skeleton_dim: int | None = None,
) -> CommandResult:
    r = _default_radius(problem, radius)
    gs, pair = _pair_for(problem, r)
    if aux is not None:
        missing = [v for v in problem.complex.vertices if v not in aux]
        if missing:
            raise PerturbationError(f"auxiliary values are missing for vertices {missing[:10]}")
        pushed = gs.record.push_forward(aux)
    else:
        pushed = None

    if mode == "dual":
        if pushed is None:
            raise PerturbationError("dual mode needs the values of h (--aux)")
        i = problem.n if skeleton_dim is None else skeleton_dim
        sample, dual = skeletal_perturbation(pair, pushed, i, halvings=settings.epsilon_halvings)
        extra = {"skeleton": i, "dual_simplices": len(dual.Y)}
    elif mode == "extension":
        values = pushed if pushed is not None else pair.f_star.values
        e = PLMap(pair.X_complex, problem.n, {v: tuple(values[v]) for v in pair.X_complex.vertices})
        sample = extension_to_perturbation(pair, e, halvings=settings.epsilon_halvings)
        extra = {"identity_extension": pushed is None}
    else:
        raise PerturbationError(f"unknown perturbation mode {mode!r}")

    zeros = zero_set(sample.g, check_generic=False)
    W = sample.g.domain
    B_w = sample.record.carried(pair.B_cap) if sample.record is not None else None
    report = map_document(W, sample.g, problem.norm, RadiiSchedule((r,)), B_w)
    report["perturbation"] = {
        "command": "perturb",
        "mode": mode,
        "radius": format_rational(r),
        "bound": format_rational(sample.bound),
        "zero_set": {"simplices": len(zeros.Z), "dim": zeros.dim},
        **extra,
    }
    summary = (
        f"r={format_rational(r)} mode={mode}: bound {format_rational(sample.bound)} < r, "
        f"zero set of dim {zeros.dim} with {len(zeros.Z)} simplices on {len(W)} simplices"
    )
    return CommandResult(report, summary, radius=format_rational(r))
