from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import pytest

from wellcap.abelian import GroupType, relative_homology
from wellcap.complex_core import SimplicialComplex, Subcomplex
from wellcap.errors import ProblemFormatError, ScheduleError, UnsupportedNormError
from wellcap.filtration import (
    PLMap,
    RadiiSchedule,
    build_global_subdivision,
    carried,
    shell,
    sublevel_pair,
)
from wellcap.geometry import NormKind, facet_functionals, norm_value

from tests.builders import grid

F = Fraction


def test_schedule_orders_and_validates():
    schedule = RadiiSchedule.from_values([F(1, 2), F(3, 2), 1])
    assert list(schedule) == [F(3, 2), F(1), F(1, 2)]
    assert schedule.largest == F(3, 2)
    assert schedule.smallest == F(1, 2)
    assert schedule.index(F(1)) == 1
    assert schedule.pairs() == [(F(3, 2), F(1)), (F(1), F(1, 2))]
    assert F(1) in schedule
    with pytest.raises(ScheduleError):
        schedule.index(F(2))
    with pytest.raises(ScheduleError):
        RadiiSchedule((F(1), F(2)))
    with pytest.raises(ScheduleError):
        RadiiSchedule((F(1), F(0)))
    with pytest.raises(ScheduleError):
        RadiiSchedule(())


def test_pl_map_requires_every_vertex():
    edge = SimplicialComplex.from_maximal([[0, 1]])
    with pytest.raises(ProblemFormatError):
        PLMap(edge, 1, {0: (F(0),)})
    with pytest.raises(ProblemFormatError):
        PLMap(edge, 1, {0: (F(0),), 1: (F(0), F(1))})
    f = PLMap(edge, 1, {0: (F(0),), 1: (F(1),)})
    g = PLMap(edge, 1, {0: (F(1, 4),), 1: (F(1, 2),)})
    assert f.distance(g, NormKind.LINF) == F(1, 2)
    assert f.norm_at(1, NormKind.L1) == F(1)


def test_norms():
    assert norm_value((F(1), F(-2)), NormKind.LINF) == F(2)
    assert norm_value((F(1), F(-2)), NormKind.L1) == F(3)
    assert NormKind.parse("Linf") is NormKind.LINF
    assert NormKind.parse("l1") is NormKind.L1
    with pytest.raises(UnsupportedNormError):
        NormKind.parse("l2")
    with pytest.raises(UnsupportedNormError):
        NormKind.parse("hamming")
    assert len(facet_functionals(NormKind.LINF, 3)) == 6
    assert len(facet_functionals(NormKind.L1, 3)) == 8


def test_band_sublevel_pair(band_pair):
    pair = band_pair
    X = pair.X_complex
    assert pair.radius == F(1, 2)
    assert len(X.vertices) == 9
    assert len(X.simplices_of_dim(2)) == 8
    assert all(pair.f_star.norm_at(v, NormKind.LINF) <= F(1, 2) for v in X.vertices)
    assert len(pair.A.simplices_of_dim(1)) == 4
    assert all(abs(pair.f_star(v)[0]) == F(1, 2) for v in pair.A.vertices)
    assert len(pair.B_cap.simplices_of_dim(1)) == 4
    assert pair.B_cap.members <= pair.X.members
    assert pair.A_union_B.is_closed()


def test_radius_must_be_scheduled(band):
    gs = build_global_subdivision(band.complex, band.f, band.radii, band.norm)
    with pytest.raises(ScheduleError):
        sublevel_pair(gs, F(1, 3), band.B)


def test_level_edge_across_two_facets_is_not_in_A():
    triangle = SimplicialComplex.from_maximal([[0, 1, 2]])
    f = PLMap(triangle, 2, {0: (F(1), F(0)), 1: (F(0), F(1)), 2: (F(0), F(0))})
    gs = build_global_subdivision(triangle, f, RadiiSchedule((F(1),)), "linf")
    pair = sublevel_pair(gs, F(1))
    assert gs.complex.simplices == triangle.simplices
    assert (0,) in pair.A and (1,) in pair.A
    assert (0, 1) not in pair.A
    assert pair.X.members == triangle.simplices


def test_global_subdivision_cuts_at_every_radius(double_well):
    gs = build_global_subdivision(double_well.complex, double_well.f, double_well.radii, double_well.norm)
    levels = {abs(gs.f_star(v)[0]) for v in gs.complex.vertices}
    assert {F(1, 2), F(3, 2)} <= levels
    assert len(gs.complex.vertices) == 5 + 7
    for v in gs.complex.vertices:
        weights = gs.record.vertex_coords[v]
        assert len(weights) in (1, 2)
    assert carried(gs, Subcomplex.closure_of(double_well.complex, [(0, 1)])).dim == 1


def test_nested_sublevel_sets_and_shell(double_well):
    gs = build_global_subdivision(double_well.complex, double_well.f, double_well.radii, double_well.norm)
    outer = sublevel_pair(gs, F(3, 2))
    inner = sublevel_pair(gs, F(1, 2))
    assert inner.X.members < outer.X.members
    between = shell(gs, F(3, 2), F(1, 2))
    assert between.members <= outer.X.members
    for s in between.members:
        assert all(F(1, 2) <= gs.f_star.norm_at(v, NormKind.LINF) <= F(3, 2) for v in s)
    assert outer.X.members <= (inner.X.members | between.members)
    with pytest.raises(ScheduleError):
        shell(gs, F(1, 2), F(3, 2))


def test_empty_sublevel_set():
    edge = SimplicialComplex.from_maximal([[0, 1]])
    f = PLMap(edge, 1, {0: (F(5),), 1: (F(6),)})
    gs = build_global_subdivision(edge, f, RadiiSchedule((F(1),)), NormKind.LINF)
    pair = sublevel_pair(gs, F(1))
    assert pair.is_empty()
    assert pair.X_complex.dim == -1


def test_l1_sublevel_set_is_a_diamond():
    _, triangles, points = grid([-1, 0, 1], [-1, 0, 1])
    K = SimplicialComplex.from_maximal(triangles)
    f = PLMap(K, 2, points)
    gs = build_global_subdivision(K, f, RadiiSchedule((F(1, 2),)), NormKind.L1)
    pair = sublevel_pair(gs, F(1, 2))
    assert all(norm_value(gs.f_star(v), NormKind.L1) <= F(1, 2) for v in pair.X.vertices)
    on_level = [v for v in pair.X.vertices if norm_value(gs.f_star(v), NormKind.L1) == F(1, 2)]
    assert set(on_level) == set(pair.A.vertices)


def _frontier(gs, pair) -> set:
    faces = set()
    for tau in gs.complex:
        if tau in pair.X:
            continue
        for size in range(1, len(tau) + 1):
            faces.update(combinations(tau, size))
    return faces


def _homology_types(pair) -> list:
    X = pair.X_complex
    types = []
    for k in range(X.dim + 1):
        types.append(relative_homology(X, k).iso_type)
        types.append(relative_homology(X, k, pair.A).iso_type)
        types.append(relative_homology(X, k, pair.A_union_B).iso_type)
    return types


@pytest.mark.parametrize(
    "fixture, extra",
    [
        ("band", [F(1), F(3, 4)]),
        ("double_well", [F(3, 2), F(1)]),
        ("annulus", [F(3, 2), F(1, 2)]),
    ],
)
def test_extra_radii_leave_homology_unchanged(request, fixture, extra):
    problem = request.getfixturevalue(fixture)
    r = problem.radii.smallest
    alone = build_global_subdivision(problem.complex, problem.f, RadiiSchedule((r,)), problem.norm)
    crowded = build_global_subdivision(
        problem.complex, problem.f, RadiiSchedule.from_values(extra + [r]), problem.norm
    )
    assert len(crowded.complex) > len(alone.complex)
    assert _homology_types(sublevel_pair(crowded, r, problem.B)) == _homology_types(
        sublevel_pair(alone, r, problem.B)
    )


def test_level_set_lies_on_the_frontier_where_the_norm_crosses_r(band, double_well):
    for problem in (band, double_well):
        gs = build_global_subdivision(problem.complex, problem.f, problem.radii, problem.norm)
        for r in problem.radii:
            pair = sublevel_pair(gs, r, problem.B)
            assert set(pair.A.members) <= _frontier(gs, pair)


def test_level_set_on_the_boundary_of_K_is_not_frontier(annulus):
    gs = build_global_subdivision(annulus.complex, annulus.f, annulus.radii, annulus.norm)
    pair = sublevel_pair(gs, F(1))
    frontier = _frontier(gs, pair)
    inner = [s for s in pair.A.members if all(gs.f_star(v) == (F(-1),) for v in s)]
    outer = [s for s in pair.A.members if all(gs.f_star(v) == (F(1),) for v in s)]
    assert inner and outer
    assert set(inner) <= frontier
    assert not set(outer) & frontier


def test_tent_map_on_an_interval():
    # K = [-2, 2] with vertices at -2, 0, 2 and f(x) = 1 - |x|.
    K = SimplicialComplex.from_maximal([[0, 1], [1, 2]])
    f = PLMap(K, 1, {0: (F(-1),), 1: (F(1),), 2: (F(-1),)})
    gs = build_global_subdivision(K, f, RadiiSchedule.from_values([F(1, 2), F(1)]), NormKind.LINF)
    # r = 1 only meets existing vertices; r = 1/2 cuts each edge twice.
    assert len(gs.complex.vertices) == 7
    cut_values = sorted(gs.f_star(v)[0] for v in gs.complex.vertices if v not in K.vertices)
    assert cut_values == [F(-1, 2), F(-1, 2), F(1, 2), F(1, 2)]

    small = sublevel_pair(gs, F(1, 2))
    assert len(small.A.vertices) == 4
    assert relative_homology(small.X_complex, 0).iso_type == GroupType(2)
    assert relative_homology(small.X_complex, 1, small.A).iso_type == GroupType(2)
    assert set(small.A.members) <= _frontier(gs, small)

    whole = sublevel_pair(gs, F(1))
    assert whole.X.members == set(gs.complex.simplices)
    assert set(whole.A.vertices) == set(K.vertices)
    assert relative_homology(whole.X_complex, 1, whole.A).iso_type == GroupType(2)
