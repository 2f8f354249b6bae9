"""Cofactor and principal-minor data for M(d), for recurrence guessing."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .engines import bareiss
from .matrix import SparseColMatrix, build_m


@dataclass(frozen=True)
class CofactorProfile:
    d: int
    row: int
    cofactors: tuple[int, ...]

    def expand(self, m: SparseColMatrix, row: int | None = None) -> int:
        """sum_j m[row, j] * C_j. Equals det m for the profile's own row and
        0 for any other row."""
        row = self.row if row is None else row
        return sum(m[row, j] * c for j, c in enumerate(self.cofactors, start=1))

    def dumps(self) -> str:
        lines = [f"# d={self.d} row={self.row}"]
        lines.extend(f"{j} {c}" for j, c in enumerate(self.cofactors, start=1))
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        Path(path).write_bytes(self.dumps().encode("ascii"))

    @classmethod
    def loads(cls, text: str) -> "CofactorProfile":
        lines = [ln for ln in text.split("\n") if ln]
        head = lines[0]
        if not head.startswith("# "):
            raise ValueError(f"bad profile header: {head!r}")
        fields = dict(kv.split("=") for kv in head[2:].split(" "))
        cof = []
        for j, line in enumerate(lines[1:], start=1):
            idx, val = line.split(" ")
            if int(idx) != j:
                raise ValueError(f"expected index {j}, got {idx}")
            cof.append(int(val))
        return cls(int(fields["d"]), int(fields["row"]), tuple(cof))


def minor_rows(m: SparseColMatrix, skip_row: int, skip_col: int) -> list[dict[int, int]]:
    """0-based row dicts of ``m`` with one row and column (1-based) removed."""
    rows: list[dict[int, int]] = [{} for _ in range(m.n - 1)]
    for c, col in enumerate(m.columns, start=1):
        if c == skip_col:
            continue
        cc = c - 1 if c < skip_col else c - 2
        for r, v in col:
            if r == skip_row:
                continue
            rows[r - 1 if r < skip_row else r - 2][cc] = v
    return rows


def cofactor_profile(d: int, row: int | None = None) -> CofactorProfile:
    """All 2d cofactors of M(d) along ``row`` (default 2d), via Bareiss."""
    m = build_m(d)
    row = m.n if row is None else row
    if not 1 <= row <= m.n:
        raise ValueError(f"row {row} outside [1, {m.n}]")
    cof = []
    for j in range(1, m.n + 1):
        minor = bareiss(m.n - 1, minor_rows(m, row, j))
        cof.append(-minor if (row + j) % 2 else minor)
    return CofactorProfile(d, row, tuple(cof))


def principal_minors(d: int) -> list[int]:
    """det of the leading k x k block of M(d) for k = 1..2d."""
    m = build_m(d)
    full = m.to_rows()
    out = []
    for k in range(1, m.n + 1):
        rows = [{j: v for j, v in r.items() if j < k} for r in full[:k]]
        out.append(bareiss(k, rows))
    return out
