"""Exact integer linear algebra: Smith normal form, kernels and cokernels.

Everything here works with Python ints; no floating point is involved.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "FGAbelianGroup",
    "IntMatrix",
    "SNFDecomposition",
    "cokernel_group",
    "kernel_group",
    "matrix_power",
    "read_matrix",
    "snf",
    "transpose",
    "write_matrix",
]


class IntMatrix:
    """Immutable integer matrix stored row-major."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Iterable[int]):
        entries = tuple(entries)
        if rows < 0 or cols < 0:
            raise ValueError("negative dimension")
        if len(entries) != rows * cols:
            raise ValueError(f"expected {rows * cols} entries, got {len(entries)}")
        for e in entries:
            if not isinstance(e, int) or isinstance(e, bool):
                raise TypeError(f"matrix entries must be ints, got {e!r}")
        self.rows, self.cols, self.entries = rows, cols, entries

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), cols, (int(x) for r in rows for x in r))

    @classmethod
    def identity(cls, k: int) -> "IntMatrix":
        return cls(k, k, (int(i == j) for i in range(k) for j in range(k)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, [0] * (rows * cols))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def to_rows(self) -> list[list[int]]:
        c = self.cols
        return [list(self.entries[i * c : (i + 1) * c]) for i in range(self.rows)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, (self[i, j] for j in range(self.cols) for i in range(self.rows)))

    @property
    def T(self) -> "IntMatrix":
        return self.transpose()

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        a, b = self.to_rows(), other.to_rows()
        bt = list(zip(*b)) if b else [()] * other.cols
        out = []
        for row in a:
            for col in bt:
                out.append(sum(x * y for x, y in zip(row, col)))
        if not b:
            out = [0] * (self.rows * other.cols)
        return IntMatrix(self.rows, other.cols, out)

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return IntMatrix(self.rows, self.cols, (x + y for x, y in zip(self.entries, other.entries)))

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return IntMatrix(self.rows, self.cols, (x - y for x, y in zip(self.entries, other.entries)))

    def __neg__(self):
        return IntMatrix(self.rows, self.cols, (-x for x in self.entries))

    def __eq__(self, other):
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def det(self) -> int:
        """Determinant by fraction-free (Bareiss) elimination."""
        if not self.is_square():
            raise ValueError("determinant of a non-square matrix")
        k = self.rows
        if k == 0:
            return 1
        m = self.to_rows()
        sign, prev = 1, 1
        for p in range(k - 1):
            if m[p][p] == 0:
                swap = next((r for r in range(p + 1, k) if m[r][p] != 0), None)
                if swap is None:
                    return 0
                m[p], m[swap] = m[swap], m[p]
                sign = -sign
            for i in range(p + 1, k):
                for j in range(p + 1, k):
                    m[i][j] = (m[i][j] * m[p][p] - m[i][p] * m[p][j]) // prev
            prev = m[p][p]
        return sign * m[k - 1][k - 1]

    def rank(self) -> int:
        return len(snf(self).invariant_factors)

    def __repr__(self):
        return f"IntMatrix({self.to_rows()!r})"


def transpose(A: IntMatrix) -> IntMatrix:
    return A.transpose()


def matrix_power(A: IntMatrix, d: int) -> IntMatrix:
    """Exact ``A**d`` for ``d >= 1`` by repeated squaring."""
    if not A.is_square():
        raise ValueError(f"matrix power of a non-square {A.rows}x{A.cols} matrix")
    if d < 1:
        raise ValueError("exponent must be a positive integer")
    result = None
    base = A
    while d:
        if d & 1:
            result = base if result is None else result @ base
        d >>= 1
        if d:
            base = base @ base
    return result


@dataclass(frozen=True)
class SNFDecomposition:
    """``D == U @ A @ V`` with ``U``, ``V`` unimodular and ``D`` in Smith form."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        """Nonzero diagonal entries of ``D``."""
        k = min(self.D.rows, self.D.cols)
        return tuple(self.D[i, i] for i in range(k) if self.D[i, i] != 0)


def snf(A: IntMatrix) -> SNFDecomposition:
    """Smith normal form with transforms.

    Pivots on the nonzero entry of least absolute value in the active block
    (ties broken row-major), so the output is deterministic.  The diagonal
    comes out nonnegative, divisibility-ordered, zeros last.
    """
    r, c = A.rows, A.cols
    D = A.to_rows()
    U = IntMatrix.identity(r).to_rows()
    V = IntMatrix.identity(c).to_rows()

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, f):  # row dst += f * row src
        D[dst] = [x + f * y for x, y in zip(D[dst], D[src])]
        U[dst] = [x + f * y for x, y in zip(U[dst], U[src])]

    def add_col(src, dst, f):  # col dst += f * col src
        for row in D:
            row[dst] += f * row[src]
        for row in V:
            row[dst] += f * row[src]

    t = 0
    while t < min(r, c):
        best = None
        for i in range(t, r):
            for j in range(t, c):
                v = D[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            p = D[t][t]
            dirty = False
            for i in range(t + 1, r):
                if D[i][t]:
                    add_row(t, i, -(D[i][t] // p))
                    dirty = dirty or D[i][t] != 0
            for j in range(t + 1, c):
                if D[t][j]:
                    add_col(t, j, -(D[t][j] // p))
                    dirty = dirty or D[t][j] != 0
            if dirty:
                # a remainder smaller than the pivot survived; re-pivot on it
                best = None
                for i in range(t, r):
                    if D[i][t] and (best is None or abs(D[i][t]) < best[0]):
                        best = (abs(D[i][t]), i, t)
                for j in range(t, c):
                    if D[t][j] and (best is None or abs(D[t][j]) < best[0]):
                        best = (abs(D[t][j]), t, j)
                _, i, j = best
                swap_rows(t, i)
                swap_cols(t, j)
                continue
            bad = next(
                ((i, j) for i in range(t + 1, r) for j in range(t + 1, c) if D[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(bad[0], t, 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        t += 1

    return SNFDecomposition(
        IntMatrix.from_rows(U, r),
        IntMatrix.from_rows(D, c),
        IntMatrix.from_rows(V, c),
    )


@dataclass(frozen=True)
class FGAbelianGroup:
    """``Z^free_rank (+) Z/t_1 (+) ... (+) Z/t_k`` with ``t_1 | t_2 | ... | t_k``."""

    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(t) for t in self.torsion))
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        for t in self.torsion:
            if t < 2:
                raise ValueError(f"invariant factor {t} < 2")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"invariant factors {a}, {b} violate divisibility")

    @classmethod
    def from_diagonal(cls, free_rank: int, diagonal: Iterable[int]) -> "FGAbelianGroup":
        return cls(free_rank, tuple(abs(d) for d in diagonal if abs(d) >= 2))

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def torsion_order(self) -> int:
        out = 1
        for t in self.torsion:
            out *= t
        return out

    def __str__(self):
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{t}" for t in self.torsion)
        return " (+) ".join(parts) if parts else "0"

    @classmethod
    def parse(cls, text: str) -> "FGAbelianGroup":
        text = text.strip()
        if text == "0":
            return cls()
        free, tors = 0, []
        for part in text.split("(+)"):
            part = part.strip()
            if part == "Z":
                free += 1
            elif m := re.fullmatch(r"Z\^(\d+)", part):
                free += int(m.group(1))
            elif m := re.fullmatch(r"Z/(\d+)", part):
                tors.append(int(m.group(1)))
            else:
                raise ValueError(f"cannot parse group summand {part!r}")
        return cls(free, tuple(tors))


def cokernel_group(A: IntMatrix) -> FGAbelianGroup:
    """``Z^rows / A Z^cols``."""
    inv = snf(A).invariant_factors
    return FGAbelianGroup.from_diagonal(A.rows - len(inv), inv)


def kernel_group(A: IntMatrix) -> FGAbelianGroup:
    """Kernel of ``A: Z^cols -> Z^rows``; always free."""
    return FGAbelianGroup(A.cols - len(snf(A).invariant_factors))


# matrix text format: "rows cols" header, then one line per row (none when cols == 0);
# '#' lines are comments


def write_matrix(A: IntMatrix) -> str:
    lines = [f"{A.rows} {A.cols}"]
    if A.cols:
        lines += [" ".join(str(x) for x in row) for row in A.to_rows()]
    return "\n".join(lines) + "\n"


def read_matrix(text: str) -> IntMatrix:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValueError("empty matrix file")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError(f"header must be 'rows cols', got {lines[0]!r}")
    rows, cols = int(head[0]), int(head[1])
    body = lines[1:]
    if cols == 0 and not body:
        return IntMatrix.zeros(rows, 0)
    if len(body) != rows:
        raise ValueError(f"expected {rows} rows, found {len(body)}")
    data = []
    for k, ln in enumerate(body, 1):
        vals = [int(x) for x in ln.split()]
        if len(vals) != cols:
            raise ValueError(f"row {k}: expected {cols} entries, found {len(vals)}")
        data.append(vals)
    return IntMatrix.from_rows(data, cols)
