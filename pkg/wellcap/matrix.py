from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence


@dataclass
class IntegerMatrix:
    rows: int
    cols: int
    entries: list[list[int]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.entries:
            self.entries = [[0] * self.cols for _ in range(self.rows)]
        if len(self.entries) != self.rows or any(len(row) != self.cols for row in self.entries):
            raise ValueError(f"entries do not match shape {self.rows}x{self.cols}")

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntegerMatrix":
        return cls(rows, cols, [[0] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, size: int) -> "IntegerMatrix":
        return cls(size, size, [[int(i == j) for j in range(size)] for i in range(size)])

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntegerMatrix":
        entries = [[int(x) for x in row] for row in rows]
        width = cols if cols is not None else (len(entries[0]) if entries else 0)
        return cls(len(entries), width, entries)

    @classmethod
    def from_columns(cls, columns: Iterable[Sequence[int]], rows: int) -> "IntegerMatrix":
        columns = [list(c) for c in columns]
        entries = [[int(columns[j][i]) for j in range(len(columns))] for i in range(rows)]
        return cls(rows, len(columns), entries)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def copy(self) -> "IntegerMatrix":
        return IntegerMatrix(self.rows, self.cols, [row[:] for row in self.entries])

    def transpose(self) -> "IntegerMatrix":
        return IntegerMatrix(self.cols, self.rows, [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)])

    def row(self, i: int) -> list[int]:
        return self.entries[i][:]

    def column(self, j: int) -> list[int]:
        return [self.entries[i][j] for i in range(self.rows)]

    def columns(self) -> list[list[int]]:
        return [self.column(j) for j in range(self.cols)]

    def apply(self, vector: Sequence[int]) -> list[int]:
        if len(vector) != self.cols:
            raise ValueError(f"vector of length {len(vector)} for {self.rows}x{self.cols} matrix")
        return [sum(a * b for a, b in zip(row, vector)) for row in self.entries]

    def matmul(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        other_cols = other.columns()
        return IntegerMatrix(
            self.rows,
            other.cols,
            [[sum(a * b for a, b in zip(row, col)) for col in other_cols] for row in self.entries],
        )

    __matmul__ = matmul

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.entries for x in row)


@dataclass
class SmithDecomposition:
    # U A V = D with U, V unimodular

    U: IntegerMatrix
    D: IntegerMatrix
    V: IntegerMatrix
    U_inv: IntegerMatrix
    V_inv: IntegerMatrix

    @property
    def diagonal(self) -> list[int]:
        return [self.D.entries[i][i] for i in range(min(self.D.rows, self.D.cols))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)

    def invariant_factors(self) -> list[int]:
        return [d for d in self.diagonal if d not in (0, 1)]


def smith_normal_form(matrix: IntegerMatrix) -> SmithDecomposition:
    m, n = matrix.rows, matrix.cols
    D = [row[:] for row in matrix.entries]
    U = IntegerMatrix.identity(m).entries
    U_inv = IntegerMatrix.identity(m).entries
    V = IntegerMatrix.identity(n).entries
    V_inv = IntegerMatrix.identity(n).entries

    def row_add(target: int, source: int, q: int) -> None:
        D[target] = [a + q * b for a, b in zip(D[target], D[source])]
        U[target] = [a + q * b for a, b in zip(U[target], U[source])]
        for r in range(m):
            U_inv[r][source] -= q * U_inv[r][target]

    def row_swap(a: int, b: int) -> None:
        D[a], D[b] = D[b], D[a]
        U[a], U[b] = U[b], U[a]
        for r in range(m):
            U_inv[r][a], U_inv[r][b] = U_inv[r][b], U_inv[r][a]

    def row_negate(a: int) -> None:
        D[a] = [-x for x in D[a]]
        U[a] = [-x for x in U[a]]
        for r in range(m):
            U_inv[r][a] = -U_inv[r][a]

    def col_add(target: int, source: int, q: int) -> None:
        for r in range(m):
            D[r][target] += q * D[r][source]
        for r in range(n):
            V[r][target] += q * V[r][source]
        V_inv[source] = [a - q * b for a, b in zip(V_inv[source], V_inv[target])]

    def col_swap(a: int, b: int) -> None:
        for r in range(m):
            D[r][a], D[r][b] = D[r][b], D[r][a]
        for r in range(n):
            V[r][a], V[r][b] = V[r][b], V[r][a]
        V_inv[a], V_inv[b] = V_inv[b], V_inv[a]

    for t in range(min(m, n)):
        # Smallest nonzero absolute value in the remaining block.
        pivot: tuple[int, int] | None = None
        for i in range(t, m):
            for j in range(t, n):
                if D[i][j] and (pivot is None or abs(D[i][j]) < abs(D[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        if pivot[0] != t:
            row_swap(t, pivot[0])
        if pivot[1] != t:
            col_swap(t, pivot[1])

        while True:
            clean = True
            for i in range(t + 1, m):
                if D[i][t]:
                    row_add(i, t, -(D[i][t] // D[t][t]))
                    clean = clean and D[i][t] == 0
            for j in range(t + 1, n):
                if D[t][j]:
                    col_add(j, t, -(D[t][j] // D[t][t]))
                    clean = clean and D[t][j] == 0
            if not clean:
                best: tuple[int, int] | None = None
                for i in range(t + 1, m):
                    if D[i][t] and (best is None or abs(D[i][t]) < abs(D[best[0]][best[1]])):
                        best = (i, t)
                for j in range(t + 1, n):
                    if D[t][j] and (best is None or abs(D[t][j]) < abs(D[best[0]][best[1]])):
                        best = (t, j)
                if best is not None:
                    if best[1] == t:
                        row_swap(t, best[0])
                    else:
                        col_swap(t, best[1])
                continue

            offender = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % D[t][t]),
                None,
            )
            if offender is None:
                break
            row_add(t, offender, 1)

        if D[t][t] < 0:
            row_negate(t)

    return SmithDecomposition(
        U=IntegerMatrix(m, m, U),
        D=IntegerMatrix(m, n, D),
        V=IntegerMatrix(n, n, V),
        U_inv=IntegerMatrix(m, m, U_inv),
        V_inv=IntegerMatrix(n, n, V_inv),
    )
