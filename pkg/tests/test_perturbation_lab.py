from __future__ import annotations

from fractions import Fraction

import pytest

from wellcap.complex_core import SimplicialComplex, skeleton
from wellcap.errors import NonGenericError, PerturbationError
from wellcap.filtration import PLMap
from wellcap.obstruction_cap import cap_image, obstruction_cocycle
from wellcap.perturbation_lab import (
    STRATEGIES,
    PerturbationSample,
    containment_check,
    dual_complex,
    extension_to_perturbation,
    sample_perturbations,
    skeletal_perturbation,
    zero_set,
)
from wellcap.problem import parse_problem

from tests.builders import pair_for, simplex_document, simplex_h

F = Fraction

ROW_ZERO = (6, 7, 8)


def _band_report(pair, k=2):
    return cap_image(pair, obstruction_cocycle(pair), k)


def test_zero_set_of_a_linear_map():
    edge = SimplicialComplex.from_maximal([[0, 1]])
    zeros = zero_set(PLMap(edge, 1, {0: (F(-1),), 1: (F(3),)}))
    assert zeros.dim == 0
    (point,) = zeros.Z.members
    assert zeros.record.vertex_coords[point[0]] == {0: F(3, 4), 1: F(1, 4)}


def test_zero_set_without_zeros_is_empty():
    edge = SimplicialComplex.from_maximal([[0, 1]])
    zeros = zero_set(PLMap(edge, 1, {0: (F(1),), 1: (F(3),)}))
    assert zeros.Z.is_empty()
    assert zeros.dim == -1


def test_non_generic_zero_set_names_a_simplex():
    triangle = SimplicialComplex.from_maximal([[0, 1, 2]])
    flat = PLMap(triangle, 1, {v: (F(0),) for v in range(3)})
    with pytest.raises(NonGenericError) as info:
        zero_set(flat)
    assert info.value.simplex == (0, 1, 2)
    assert zero_set(flat, check_generic=False).dim == 2


@pytest.mark.parametrize("m", [1, 2, 3])
def test_dual_complex_of_top_simplex_is_its_barycenter(m):
    X = SimplicialComplex.from_maximal([list(range(m + 1))])
    dual = dual_complex(X, skeleton(X, m - 1), m)
    top = tuple(range(m + 1))
    assert dual.barycenters == {top: m + 1}
    assert dual.Y.members == {(m + 1,)}
    assert dual.pairing == {(m + 1,): top}
    assert dual.check_join(skeleton(X, m - 1))
    assert len(dual.complex.simplices_of_dim(m)) == m + 1


def test_dual_graph_of_a_triangle():
    X = SimplicialComplex.from_maximal([[0, 1, 2]])
    dual = dual_complex(X, skeleton(X, 0), 1)
    assert dual.barycenters == {(0, 1): 3, (0, 2): 4, (1, 2): 5, (0, 1, 2): 6}
    assert dual.Y.dim == 1
    assert dual.pairing == {(3, 6): (0, 1), (4, 6): (0, 2), (5, 6): (1, 2)}
    assert dual.base_part((0, 3, 6)) == (0,)
    assert dual.y_part((0, 3, 6)) == (3, 6)


def test_dual_complex_rejects_missing_skeleton():
    X = SimplicialComplex.from_maximal([[0, 1, 2]])
    with pytest.raises(PerturbationError):
        dual_complex(X, skeleton(X, 0), 0)
    with pytest.raises(PerturbationError):
        dual_complex(X, skeleton(X, 0), 2)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_skeletal_perturbation_on_a_simplex_vanishes_at_the_barycenter(m):
    pair = pair_for(parse_problem(simplex_document(m)))
    assert pair.A.is_empty()
    sample, dual = skeletal_perturbation(pair, simplex_h(m), m)
    assert sample.strategy == "dual"
    assert sample.bound < pair.radius
    zeros = zero_set(sample.g)
    assert zeros.Z.members == {(m + 1,)}
    assert zeros.dim == 0
    assert sample.g(m + 1) == tuple(F(0) for _ in range(m))
    assert dual.Y.members == {(m + 1,)}


def test_extension_by_f_keeps_its_zeros(band_pair):
    e = band_pair.f_star.restricted(band_pair.X_complex)
    sample = extension_to_perturbation(band_pair, e)
    assert sample.bound == F(5, 16)
    assert sample.provenance == "user"
    assert sample.strategy == "extension"
    for v in band_pair.A.vertices:
        assert sample.g(v) == band_pair.f_star(v)
    assert zero_set(sample.g).geometric_key(base=sample.record) == zero_set(e).geometric_key()


def test_extension_zeros_are_zeros_of_the_extension(band_pair):
    X = band_pair.X_complex
    values = {v: (band_pair.f_star(v)[0] + (F(1, 16) if v in ROW_ZERO else 0),) for v in X.vertices}
    e = PLMap(X, 1, values)
    sample = extension_to_perturbation(band_pair, e)
    assert sample.bound < band_pair.radius
    zeros = zero_set(sample.g)
    assert not zeros.Z.is_empty()
    to_x = sample.record.compose(zeros.record)
    for simplex in zeros.Z.members:
        for w in simplex:
            point = sum((weight * e(v)[0] for v, weight in to_x.vertex_coords[w].items()), F(0))
            assert point == 0


def test_extension_must_match_f_on_A(band_pair):
    X = band_pair.X_complex
    values = {v: (band_pair.f_star(v)[0] / 2,) for v in X.vertices}
    with pytest.raises(PerturbationError):
        extension_to_perturbation(band_pair, PLMap(X, 1, values))


def _band_h(pair, override=None):
    h = {v: (F(1, 4),) if v in ROW_ZERO else pair.f_star(v) for v in pair.X_complex.vertices}
    h.update(override or {})
    return h


def test_skeletal_perturbation_on_the_band(band_pair):
    sample, dual = skeletal_perturbation(band_pair, _band_h(band_pair), 1)
    assert dual.Y.dim == 1
    zeros = zero_set(sample.g)
    assert zeros.Z.members == dual.Y.members
    verdict = containment_check(band_pair, _band_report(band_pair), sample)
    assert verdict.contained
    assert verdict.violations == []
    assert verdict.to_json()["strategy"] == "dual"


def test_skeletal_perturbation_checks_h(band_pair):
    a_vertex = band_pair.A.vertices[0]
    with pytest.raises(PerturbationError):
        skeletal_perturbation(band_pair, _band_h(band_pair, {a_vertex: (F(3),)}), 1)
    with pytest.raises(PerturbationError):
        skeletal_perturbation(band_pair, _band_h(band_pair, {7: (F(0),)}), 1)
    missing = _band_h(band_pair)
    del missing[7]
    with pytest.raises(PerturbationError):
        skeletal_perturbation(band_pair, missing, 1)


def test_zero_perturbation_is_contained(band_pair):
    report = _band_report(band_pair)
    sample = PerturbationSample(band_pair.f_star, F(0), "user", "identity")
    verdict = containment_check(band_pair, report, sample)
    assert verdict.contained
    assert verdict.zero_image.rank == 1
    assert verdict.bound == 0


def test_sample_bound_above_radius_is_refused(band_pair):
    sample = PerturbationSample(band_pair.f_star, F(1), "user", "identity")
    with pytest.raises(PerturbationError):
        containment_check(band_pair, _band_report(band_pair), sample)


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_sampled_perturbations_stay_within_radius(band_pair, strategy):
    samples = sample_perturbations(band_pair, 6, strategy, seed=5, denominator=16)
    assert len(samples) == 6
    report = _band_report(band_pair)
    for sample in samples:
        assert sample.bound <= band_pair.radius
        assert (sample.bound / band_pair.radius * 16).denominator == 1
        assert containment_check(band_pair, report, sample).contained


def test_sampling_is_reproducible(band_pair):
    first = sample_perturbations(band_pair, 4, "uniform", seed=9)
    second = sample_perturbations(band_pair, 4, "uniform", seed=9)
    assert [s.g.values for s in first] == [s.g.values for s in second]
    assert [s.provenance for s in sample_perturbations(band_pair, 3, "mixed")] == ["random", "random", "adversarial"]


def test_unknown_strategy(band_pair):
    with pytest.raises(PerturbationError):
        sample_perturbations(band_pair, 1, "gaussian")
