from __future__ import annotations

from wellcap.abelian import (
    GroupType,
    cokernel,
    kernel_basis,
    relative_cohomology,
    relative_homology,
    solve_integer,
    subgroup_image,
)
from wellcap.complex_core import Subcomplex, SimplicialComplex, skeleton
from wellcap.matrix import IntegerMatrix

from tests.builders import RP2_FACETS

CIRCLE = SimplicialComplex.from_maximal([[0, 1], [1, 2], [0, 2]])
SPHERE = skeleton(SimplicialComplex.from_maximal([[0, 1, 2, 3]]), 2).as_complex()
RP2 = SimplicialComplex.from_maximal(RP2_FACETS)
TWO_CIRCLES = SimplicialComplex.from_maximal([[0, 1], [1, 2], [0, 2], [3, 4], [4, 5], [3, 5]])


def test_group_type_describe():
    assert GroupType().describe() == "0"
    assert GroupType(1).describe() == "Z"
    assert GroupType(2, (2,)).describe() == "Z^2 + Z/2"
    assert GroupType(0, (2, 4)).to_json() == {"rank": 0, "torsion": [2, 4], "type": "Z/2 + Z/4"}
    assert GroupType(1, (2, 6)).rank_mod_p(2) == 3
    assert GroupType(1, (2, 6)).rank_mod_p(3) == 2


def test_circle_homology():
    h0 = relative_homology(CIRCLE, 0)
    h1 = relative_homology(CIRCLE, 1)
    assert h0.iso_type == GroupType(1)
    assert h1.iso_type == GroupType(1)
    generator = h1.basis[0]
    assert generator.boundary().is_zero()
    assert h1.coordinates(generator) == [1]
    assert h1.coordinates(generator.scale(3)) == [3]


def test_sphere_homology():
    assert relative_homology(SPHERE, 0).iso_type == GroupType(1)
    assert relative_homology(SPHERE, 1).is_trivial()
    assert relative_homology(SPHERE, 2).iso_type == GroupType(1)
    assert SPHERE.euler_characteristic() == 2


def test_projective_plane_torsion():
    assert RP2.euler_characteristic() == 1
    h1 = relative_homology(RP2, 1)
    assert h1.iso_type == GroupType(0, (2,))
    assert h1.rank_mod_p(2) == 1
    assert h1.rank_mod_p(3) == 0
    assert relative_homology(RP2, 2).is_trivial()
    assert relative_cohomology(RP2, 1).is_trivial()
    assert relative_cohomology(RP2, 2).iso_type == GroupType(0, (2,))
    twice = h1.basis[0].scale(2)
    assert h1.is_cycle(twice)
    assert h1.coordinates(twice) == [0]


def test_relative_homology_of_disk_rel_boundary():
    disk = SimplicialComplex.from_maximal([[0, 1, 2]])
    boundary = skeleton(disk, 1)
    assert relative_homology(disk, 2, boundary).iso_type == GroupType(1)
    assert relative_homology(disk, 1, boundary).is_trivial()
    assert relative_cohomology(disk, 2, boundary).iso_type == GroupType(1)


def test_relative_homology_of_path_rel_ends():
    path = SimplicialComplex.from_maximal([[0, 1], [1, 2]])
    ends = Subcomplex.closure_of(path, [(0,), (2,)])
    h1 = relative_homology(path, 1, ends)
    assert h1.iso_type == GroupType(1)
    assert not h1.is_cycle([1, 0])
    assert h1.is_cycle([1, 1])


def test_kernel_and_integer_solve():
    kernel = kernel_basis(IntegerMatrix.from_rows([[1, 1]]))
    assert len(kernel) == 1
    assert kernel[0][0] == -kernel[0][1] != 0
    solution = solve_integer([[2], [3]], [1], 1)
    assert solution is not None
    assert 2 * solution[0] + 3 * solution[1] == 1
    assert solve_integer([[2]], [1], 1) is None
    assert solve_integer([], [0, 0], 2) == []


def test_subgroup_of_free_group():
    h1 = relative_homology(CIRCLE, 1)
    subgroup = subgroup_image(h1, [[2]])
    assert subgroup.ambient is h1
    assert subgroup.iso_type == GroupType(1)
    assert subgroup.contains([2])
    assert subgroup.contains([-6])
    assert not subgroup.contains([1])
    assert subgroup.express([4]) == [2]
    assert subgroup.express([3]) is None


def test_subgroup_of_torsion_group():
    h1 = relative_homology(RP2, 1)
    subgroup = subgroup_image(h1, [[1]])
    assert subgroup.iso_type == GroupType(0, (2,))
    assert subgroup.canonical_generators() == [[1]]
    assert subgroup.contains([3])
    doubled = subgroup_image(h1, [[2]])
    assert doubled.is_trivial()
    assert not doubled.contains([1])
    assert doubled.express([1]) is None


def test_subgroup_generated_by_redundant_elements():
    h1 = relative_homology(TWO_CIRCLES, 1)
    assert h1.iso_type == GroupType(2)
    subgroup = subgroup_image(h1, [[1, 0], [0, 1], [1, 1]])
    assert subgroup.iso_type == GroupType(2)
    assert subgroup.contains([5, -3])
    assert subgroup_image(h1, []).is_trivial()


def test_cokernel():
    assert cokernel(GroupType(2), [[1, 0]]) == GroupType(1)
    assert cokernel(GroupType(1), [[2]]) == GroupType(0, (2,))
    assert cokernel(GroupType(1), [[1]]).is_trivial()
    assert cokernel(GroupType(0, (6,)), [[2]]) == GroupType(0, (2,))
