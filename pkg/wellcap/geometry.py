from __future__ import annotations

from enum import Enum
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from typing import Sequence

from sympy import Matrix, Rational

from wellcap.errors import UnsupportedNormError

Vector = tuple[Fraction, ...]


class NormKind(str, Enum):
    LINF = "linf"
    L1 = "l1"

    @classmethod
    def parse(cls, value: str | "NormKind") -> "NormKind":
        if isinstance(value, NormKind):
            return value
        text = str(value).strip().lower().replace("_", "").replace("-", "")
        if text in {"linf", "linfty", "inf", "max"}:
            return cls.LINF
        if text in {"l1", "taxicab"}:
            return cls.L1
        if text in {"l2", "euclidean"}:
            raise UnsupportedNormError("l2 level sets are not polyhedral; use linf or l1")
        raise UnsupportedNormError(f"unknown norm {value!r}")


def to_sympy(value: Fraction | int) -> Rational:
    value = Fraction(value)
    return Rational(value.numerator, value.denominator)


def from_sympy(value) -> Fraction:
    value = Rational(value)
    return Fraction(int(value.p), int(value.q))


def _matrix(rows: Sequence[Sequence[Fraction]]) -> Matrix:
    return Matrix([[to_sympy(x) for x in row] for row in rows])


def det(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    if not rows:
        return Fraction(1)
    return from_sympy(_matrix(rows).det())


def sign(value: Fraction | int) -> int:
    return (value > 0) - (value < 0)


def affine_rank(points: Sequence[Sequence[Fraction]]) -> int:
    if len(points) <= 1:
        return 0 if points else -1
    base = points[0]
    diffs = [[a - b for a, b in zip(p, base)] for p in points[1:]]
    return _matrix(diffs).rank()


def in_affine_hull(point: Sequence[Fraction], points: Sequence[Sequence[Fraction]]) -> bool:
    if not points:
        return False
    return affine_rank(list(points) + [point]) == affine_rank(points)


def barycentric(point: Sequence[Fraction], vertices: Sequence[Sequence[Fraction]]) -> tuple[Fraction, ...] | None:
    # None when point is off the affine hull of vertices
    dim = len(point)
    columns = [list(v) + [Fraction(1)] for v in vertices]
    system = Matrix([[to_sympy(columns[j][i]) for j in range(len(columns))] for i in range(dim + 1)])
    rhs = Matrix([to_sympy(x) for x in point] + [Rational(1)])
    try:
        solution, params = system.gauss_jordan_solve(rhs)
    except ValueError:
        return None
    if params.shape[0]:
        raise ValueError("barycentric coordinates need affinely independent vertices")
    return tuple(from_sympy(x) for x in solution)


def in_convex_hull(point: Sequence[Fraction], points: Sequence[Sequence[Fraction]]) -> bool:
    # Caratheodory: a hull point lies in the hull of some affinely independent subset.
    if not points:
        return False
    dim = len(point)
    unique = list(dict.fromkeys(tuple(p) for p in points))
    for size in range(1, min(len(unique), dim + 1) + 1):
        for subset in combinations(unique, size):
            if affine_rank(subset) != size - 1:
                continue
            coords = barycentric(point, subset)
            if coords is not None and all(c >= 0 for c in coords):
                return True
    return False


def norm_value(vector: Sequence[Fraction], norm: NormKind) -> Fraction:
    if not vector:
        return Fraction(0)
    if norm is NormKind.LINF:
        return max(abs(x) for x in vector)
    return sum((abs(x) for x in vector), Fraction(0))


@lru_cache(maxsize=None)
def facet_functionals(norm: NormKind, n: int) -> tuple[Vector, ...]:
    # |y| = max over these of l . y
    one, zero = Fraction(1), Fraction(0)
    if norm is NormKind.LINF:
        out: list[Vector] = []
        for i in range(n):
            for s in (one, -one):
                out.append(tuple(s if j == i else zero for j in range(n)))
        return tuple(out)
    return tuple(tuple(Fraction(s) for s in signs) for signs in product((1, -1), repeat=n))


def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def interpolate(weights: dict[int, Fraction], values: dict[int, Vector]) -> Vector:
    dim = len(next(iter(values.values()))) if values else 0
    acc = [Fraction(0)] * dim
    for vertex, w in weights.items():
        for i, x in enumerate(values[vertex]):
            acc[i] += w * x
    return tuple(acc)
