"""Exact determinant engines.

Four independent routes to det(M):

* ``det_laplace``    cofactor expansion, the brute-force oracle (n <= 12)
* ``det_bareiss``    fraction-free elimination over Python ints
* ``det_crt``        residues mod word-size primes, lifted by CRT
* ``det_structural`` O(n) evaluation for (permutation) - (one entry per column)
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import DimensionTooLarge, StructuralMismatch
from .matrix import DenseMatrix, SparseColMatrix, column_targets
from .primes import descending_primes, sample_primes

LAPLACE_MAX_N = 12
DEFAULT_K = 5


class Engine(str, enum.Enum):
    LAPLACE = "laplace"
    BAREISS = "bareiss"
    MODULAR_CRT = "modular_crt"
    STRUCTURAL = "structural"


class Certification(str, enum.Enum):
    CERTIFIED = "certified"
    PROBABILISTIC = "probabilistic"


@dataclass(frozen=True)
class DetResult:
    value: int
    engine: Engine
    certification: Certification = Certification.CERTIFIED
    prime_trace: tuple[tuple[int, int], ...] | None = None

    def __post_init__(self):
        if self.prime_trace is not None:
            primes = [p for p, _ in self.prime_trace]
            if len(set(primes)) != len(primes):
                raise ValueError("prime_trace primes must be distinct")


@dataclass(frozen=True)
class CrtMode:
    """``certified`` (k is None) or ``probabilistic`` with k primes."""

    k: int | None = None
    seed: int = 0

    @classmethod
    def certified(cls) -> "CrtMode":
        return cls()

    @classmethod
    def probabilistic(cls, k: int = DEFAULT_K, seed: int = 0) -> "CrtMode":
        if k < 1:
            raise ValueError("probabilistic mode needs k >= 1")
        return cls(k, seed)

    @property
    def is_certified(self) -> bool:
        return self.k is None


def _as_dense(m) -> DenseMatrix:
    if isinstance(m, DenseMatrix):
        return m
    if isinstance(m, SparseColMatrix):
        from .matrix import to_dense

        return to_dense(m)
    return DenseMatrix.from_rows(m)


def _as_sparse_rows(m) -> tuple[int, list[dict[int, int]]]:
    """0-based row dicts of nonzeros, for either matrix type."""
    if isinstance(m, SparseColMatrix):
        return m.n, m.to_rows()
    dense = _as_dense(m)
    return dense.n, [{j: v for j, v in enumerate(row) if v} for row in dense.entries]


# -- Laplace -----------------------------------------------------------------


def _laplace(rows: list[list[int]], cols: list[int]) -> int:
    if not rows:
        return 1
    if len(rows) == 1:
        return rows[0][cols[0]]
    # expand along the sparsest remaining row
    best = min(range(len(rows)), key=lambda i: sum(1 for c in cols if rows[i][c]))
    pivot_row = rows[best]
    rest = rows[:best] + rows[best + 1 :]
    total = 0
    for pos, c in enumerate(cols):
        v = pivot_row[c]
        if v == 0:
            continue
        minor = _laplace(rest, cols[:pos] + cols[pos + 1 :])
        if minor:
            total += (-1) ** (best + pos) * v * minor
    return total


def det_laplace(m) -> DetResult:
    dense = _as_dense(m)
    if dense.n > LAPLACE_MAX_N:
        raise DimensionTooLarge(
            f"Laplace expansion is limited to n <= {LAPLACE_MAX_N}, got n = {dense.n}"
        )
    value = _laplace([list(r) for r in dense.entries], list(range(dense.n)))
    return DetResult(value, Engine.LAPLACE)


# -- Bareiss -----------------------------------------------------------------


def bareiss(n: int, rows: list[dict[int, int]]) -> int:
    """Fraction-free elimination on sparse rows (mutated in place).

    Pivot is the first nonzero at or below the diagonal. Zero entries are
    never stored, so rows untouched by a step cost nothing when the pivot
    equals the previous pivot.
    """
    sign = 1
    prev = 1
    for k in range(n):
        piv = k
        while piv < n and not rows[piv].get(k):
            piv += 1
        if piv == n:
            return 0
        if piv != k:
            rows[k], rows[piv] = rows[piv], rows[k]
            sign = -sign
        pk = rows[k]
        akk = pk[k]
        tail = [(j, v) for j, v in pk.items() if j > k]
        for i in range(k + 1, n):
            ri = rows[i]
            aik = ri.pop(k, 0)
            if aik == 0:
                if akk == prev:
                    continue
                if akk == -prev:
                    for j in ri:
                        ri[j] = -ri[j]
                else:
                    for j in ri:
                        ri[j] = ri[j] * akk // prev
                continue
            new = {}
            if akk == prev:
                for j, v in ri.items():
                    new[j] = v
                for j, v in tail:
                    new[j] = new.get(j, 0) - aik * v // prev
            else:
                for j, v in ri.items():
                    new[j] = v * akk
                for j, v in tail:
                    new[j] = new.get(j, 0) - aik * v
                if prev != 1:
                    for j in new:
                        q, r = divmod(new[j], prev)
                        assert r == 0, "non-exact Bareiss division"
                        new[j] = q
            rows[i] = {j: v for j, v in new.items() if v}
        prev = akk
    return sign * prev if n else 1


def det_bareiss(m) -> DetResult:
    n, rows = _as_sparse_rows(m)
    return DetResult(bareiss(n, rows), Engine.BAREISS)


# -- modular / CRT -----------------------------------------------------------


def det_mod_p(m, p: int) -> int:
    """det(m) mod p via Gaussian elimination over GF(p); ``p`` must be prime."""
    if p < 2:
        raise ValueError(f"modulus must be >= 2, got {p}")
    n, rows = _as_sparse_rows(m)
    rows = [{j: v % p for j, v in r.items() if v % p} for r in rows]
    det = 1
    for k in range(n):
        piv = k
        while piv < n and k not in rows[piv]:
            piv += 1
        if piv == n:
            return 0
        if piv != k:
            rows[k], rows[piv] = rows[piv], rows[k]
            det = p - det
        pk = rows[k]
        akk = pk[k]
        det = det * akk % p
        inv = pow(akk, -1, p)
        tail = [(j, v) for j, v in pk.items() if j > k]
        for i in range(k + 1, n):
            ri = rows[i]
            aik = ri.pop(k, 0)
            if not aik:
                continue
            f = aik * inv % p
            for j, v in tail:
                x = (ri.get(j, 0) - f * v) % p
                if x:
                    ri[j] = x
                else:
                    ri.pop(j, None)
    return det % p


def hadamard_bound(m) -> int:
    """floor(prod of Euclidean column norms), an upper bound on |det|."""
    if isinstance(m, SparseColMatrix):
        sq = [sum(v * v for _, v in col) for col in m.columns]
    else:
        dense = _as_dense(m)
        sq = [sum(dense.entries[i][j] ** 2 for i in range(dense.n)) for j in range(dense.n)]
    return math.isqrt(math.prod(sq))


def crt_lift(residues: Sequence[tuple[int, int]]) -> tuple[int, int]:
    """Combine ``(prime, residue)`` pairs; returns (value in [0, P), P)."""
    x, modulus = 0, 1
    for p, r in residues:
        # x + modulus * t == r (mod p)
        t = (r - x) * pow(modulus, -1, p) % p
        x += modulus * t
        modulus *= p
    return x, modulus


def symmetric(x: int, modulus: int) -> int:
    """Representative of x mod ``modulus`` in [-(P-1)/2, (P-1)/2]."""
    x %= modulus
    return x - modulus if x > modulus // 2 else x


def det_crt(m, mode: CrtMode | None = None) -> DetResult:
    mode = mode or CrtMode.certified()
    sparse = m if isinstance(m, SparseColMatrix) else _as_dense(m)
    if sparse.n == 0:
        return DetResult(1, Engine.MODULAR_CRT, Certification.CERTIFIED, ())
    trace = []
    if mode.is_certified:
        target = 2 * hadamard_bound(sparse) + 1
        modulus = 1
        for p in descending_primes():
            trace.append((p, det_mod_p(sparse, p)))
            modulus *= p
            if modulus > target:
                break
        cert = Certification.CERTIFIED
    else:
        for p in sample_primes(mode.k, mode.seed):
            trace.append((p, det_mod_p(sparse, p)))
        cert = Certification.PROBABILISTIC
    x, modulus = crt_lift(trace)
    return DetResult(symmetric(x, modulus), Engine.MODULAR_CRT, cert, tuple(trace))


# -- structural --------------------------------------------------------------


@dataclass(frozen=True)
class SplitForm:
    """M = P - Q: ``perm[c]`` is the row of the +1 in column c, ``partial[c]``
    the row of the -1 where present. 1-based."""

    n: int
    perm: dict[int, int]
    partial: dict[int, int] = field(default_factory=dict)

    def reconstruct(self) -> SparseColMatrix:
        cols = []
        for c in range(1, self.n + 1):
            col = [(self.perm[c], 1)]
            if c in self.partial:
                col.append((self.partial[c], -1))
            cols.append(col)
        return SparseColMatrix.from_columns(self.n, cols)


def split_pq(m: SparseColMatrix) -> SplitForm:
    perm: dict[int, int] = {}
    partial: dict[int, int] = {}
    for c, col in enumerate(m.columns, start=1):
        plus = [r for r, v in col if v == 1]
        minus = [r for r, v in col if v == -1]
        if len(plus) != 1:
            raise StructuralMismatch(f"column {c} has {len(plus)} +1 entries, need exactly 1")
        if len(minus) > 1:
            raise StructuralMismatch(f"column {c} has {len(minus)} -1 entries, need at most 1")
        perm[c] = plus[0]
        if minus:
            partial[c] = minus[0]
    if len(set(perm.values())) != m.n:
        raise StructuralMismatch("+1 entries do not form a permutation")
    return SplitForm(m.n, perm, partial)


def permutation_sign(perm: dict[int, int]) -> int:
    seen = set()
    sign = 1
    for start in perm:
        if start in seen:
            continue
        length = 0
        x = start
        while x not in seen:
            seen.add(x)
            x = perm[x]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def has_cycle(succ: dict[int, int]) -> bool:
    """True iff the functional graph ``x -> succ[x]`` contains a cycle."""
    state: dict[int, int] = {}  # 1 = on current path, 2 = finished
    for start in succ:
        if start in state:
            continue
        path = []
        x = start
        while x in succ and x not in state:
            state[x] = 1
            path.append(x)
            x = succ[x]
        if state.get(x) == 1:
            return True
        for y in path:
            state[y] = 2
    return False


def det_structural(m: SparseColMatrix) -> DetResult:
    """det(P - Q) = sign(P) * det(I - A), A = P^-1 Q.

    A has at most one unit entry per column, so det(I - A) is 0 if the
    functional graph c -> perm^-1(partial(c)) has a cycle and 1 otherwise.
    """
    form = split_pq(m)
    inv = {r: c for c, r in form.perm.items()}
    succ = {c: inv[r] for c, r in form.partial.items()}
    value = 0 if has_cycle(succ) else permutation_sign(form.perm)
    return DetResult(value, Engine.STRUCTURAL)


def structural_sweep(d_max: int) -> list[int]:
    """det M(d) for d = 1..d_max in O(d_max) total.

    M(d-1) is the leading block of M(d), and each new d adds the row/column
    pair {2d-1, 2d}. The +1 entries of the new columns must land in the new
    rows (checked), so sign(P) updates by one block factor and the edges of
    the functional graph only accumulate; a union-find detects the first
    cycle, after which every determinant is 0.
    """
    if d_max < 1:
        raise ValueError(f"d_max must be >= 1, got {d_max}")
    n_max = 2 * d_max
    parent = list(range(n_max + 1))

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    # -1 entries keyed by the d at which both endpoints are in range
    pending: dict[int, list[tuple[int, int]]] = {}
    perm_inv: dict[int, int] = {}
    sign = 1
    cyclic = False
    out = []
    for d in range(1, d_max + 1):
        new = (2 * d - 1, 2 * d)
        block = {}
        for c in new:
            plus, minus = column_targets(c)
            if plus not in new:
                raise StructuralMismatch(f"column {c}: +1 row {plus} outside the new block")
            block[c] = plus
            if minus >= 1:
                pending.setdefault(max((minus + 1) // 2, d), []).append((c, minus))
        if sorted(block.values()) != list(new):
            raise StructuralMismatch(f"columns {new}: +1 rows do not form a permutation")
        for c, r in block.items():
            perm_inv[r] = c
        if block[new[0]] != new[0]:
            sign = -sign
        for c, r in pending.pop(d, ()):
            if cyclic:
                continue
            # edge c -> perm^-1(r); c has no other out-edge, so a cycle closes
            # exactly when the target already reaches c
            u, v = find(c), find(perm_inv[r])
            if u == v:
                cyclic = True
            else:
                parent[u] = v
        out.append(0 if cyclic else sign)
    return out
