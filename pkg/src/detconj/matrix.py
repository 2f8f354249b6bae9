"""Sparse and dense exact integer matrices, and the M(d) family."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

Column = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class EntryAddress:
    """Position (a, c) in M(d), 1-based."""

    d: int
    a: int
    c: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"d must be >= 1, got {self.d}")
        n = 2 * self.d
        if not 1 <= self.a <= n:
            raise ValueError(f"row {self.a} outside [1, {n}]")
        if not 1 <= self.c <= n:
            raise ValueError(f"column {self.c} outside [1, {n}]")

    @property
    def b(self) -> int:
        return (self.c + 1) // 2

    @property
    def odd_column(self) -> bool:
        return self.c % 2 == 1


@dataclass(frozen=True)
class SparseColMatrix:
    """Column-major square matrix with entries in {-1, 0, +1}.

    ``columns[c - 1]`` lists the nonzeros of column ``c`` as ``(row, value)``
    pairs sorted by row. Indices are 1-based.
    """

    n: int
    columns: tuple[Column, ...]

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("dimension must be nonnegative")
        if len(self.columns) != self.n:
            raise ValueError(f"expected {self.n} columns, got {len(self.columns)}")
        for c, col in enumerate(self.columns, start=1):
            prev = 0
            for row, val in col:
                if val not in (-1, 1):
                    raise ValueError(f"value {val} at ({row}, {c}) not in {{-1, +1}}")
                if not 1 <= row <= self.n:
                    raise ValueError(f"row {row} in column {c} outside [1, {self.n}]")
                if row <= prev:
                    raise ValueError(f"column {c} rows not strictly increasing")
                prev = row

    @classmethod
    def from_columns(cls, n: int, columns: Iterable[Iterable[tuple[int, int]]]) -> "SparseColMatrix":
        return cls(n, tuple(tuple(sorted((int(r), int(v)) for r, v in col)) for col in columns))

    @classmethod
    def from_dense(cls, dense: "DenseMatrix | Sequence[Sequence[int]]") -> "SparseColMatrix":
        rows = dense.entries if isinstance(dense, DenseMatrix) else dense
        n = len(rows)
        cols = [[] for _ in range(n)]
        for i, row in enumerate(rows, start=1):
            for j, val in enumerate(row, start=1):
                if val:
                    cols[j - 1].append((i, val))
        return cls.from_columns(n, cols)

    def __getitem__(self, idx: tuple[int, int]) -> int:
        a, c = idx
        for row, val in self.columns[c - 1]:
            if row == a:
                return val
        return 0

    @property
    def nnz(self) -> int:
        return sum(len(col) for col in self.columns)

    def transpose(self) -> "SparseColMatrix":
        cols = [[] for _ in range(self.n)]
        for c, col in enumerate(self.columns, start=1):
            for row, val in col:
                cols[row - 1].append((c, val))
        return SparseColMatrix.from_columns(self.n, cols)

    def to_rows(self) -> list[dict[int, int]]:
        """Row-wise dict form ``{col: value}``, 0-based indices, for elimination."""
        rows: list[dict[int, int]] = [{} for _ in range(self.n)]
        for c, col in enumerate(self.columns):
            for row, val in col:
                rows[row - 1][c] = val
        return rows


@dataclass(frozen=True)
class DenseMatrix:
    """Square matrix of Python ints, row-major. ``m[a, c]`` is 1-based."""

    n: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.n or any(len(r) != self.n for r in self.entries):
            raise ValueError("matrix is not square")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "DenseMatrix":
        return cls(len(rows), tuple(tuple(int(x) for x in r) for r in rows))

    @classmethod
    def identity(cls, n: int) -> "DenseMatrix":
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)])

    def __getitem__(self, idx: tuple[int, int]) -> int:
        a, c = idx
        if not (1 <= a <= self.n and 1 <= c <= self.n):
            raise IndexError(f"({a}, {c}) outside [1, {self.n}]")
        return self.entries[a - 1][c - 1]

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def transpose(self) -> "DenseMatrix":
        return DenseMatrix.from_rows(list(zip(*self.entries)))


def entry(addr: EntryAddress) -> int:
    """Value of M(d) at ``addr``."""
    a, b = addr.a, addr.b
    if addr.odd_column:
        if a == 2 * b:
            return 1
        if a == 3 * b + 1:
            return -1
    else:
        if a == 2 * b - 1:
            return 1
        if a == b - 1:
            return -1
    return 0


def column_targets(c: int) -> tuple[int, int]:
    """Rows of the +1 and the -1 in column ``c`` of M(d), before range clipping.

    The -1 row may be 0 (no entry) or exceed 2d (clipped away).
    """
    b = (c + 1) // 2
    if c % 2 == 1:
        return 2 * b, 3 * b + 1
    return 2 * b - 1, b - 1


def build_m(d: int) -> SparseColMatrix:
    """Materialize the 2d x 2d matrix M(d)."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    n = 2 * d
    cols = []
    for c in range(1, n + 1):
        plus, minus = column_targets(c)
        col = [(plus, 1)]
        if 1 <= minus <= n:
            col.append((minus, -1))
        col.sort()
        cols.append(tuple(col))
    return SparseColMatrix(n, tuple(cols))


def to_dense(m: SparseColMatrix) -> DenseMatrix:
    rows = [[0] * m.n for _ in range(m.n)]
    for c, col in enumerate(m.columns):
        for row, val in col:
            rows[row - 1][c] = val
    return DenseMatrix.from_rows(rows)


def expected_nnz(d: int) -> int:
    return 2 * d + (d - 1) + sum(1 for b in range(1, d + 1) if 3 * b + 1 <= 2 * d)


def dumps(m: SparseColMatrix) -> str:
    """Text serialization: ``n <dim>`` then ``row col value`` sorted by (col, row)."""
    lines = [f"n {m.n}"]
    for c, col in enumerate(m.columns, start=1):
        lines.extend(f"{row} {c} {val}" for row, val in col)
    return "\n".join(lines) + "\n"


def loads(text: str) -> SparseColMatrix:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ValueError("empty matrix file")
    head = lines[0].split(" ")
    if len(head) != 2 or head[0] != "n":
        raise ValueError(f"bad header line: {lines[0]!r}")
    n = int(head[1])
    cols: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    last = (0, 0)
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(" ")
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 'row col value', got {line!r}")
        row, col, val = (int(p) for p in parts)
        if not 1 <= col <= n:
            raise ValueError(f"line {lineno}: column {col} outside [1, {n}]")
        if (col, row) <= last:
            raise ValueError(f"line {lineno}: entries not sorted by (col, row)")
        last = (col, row)
        cols[col - 1].append((row, val))
    return SparseColMatrix(n, tuple(tuple(c) for c in cols))


def write_matrix(m: SparseColMatrix, path) -> None:
    Path(path).write_bytes(dumps(m).encode("ascii"))


def read_matrix(path) -> SparseColMatrix:
    return loads(Path(path).read_bytes().decode("ascii"))
