"""Dense matrices of arbitrary-precision integers with exact rank and determinant.

All entries are Python ints, which are arbitrary precision natively, so
addition, subtraction and multiplication are closed and equality is exact.
Rank and determinant use fraction-free (Bareiss) elimination: every
intermediate value is an integer equal to a minor of the input, which keeps
entry growth polynomial in the input size instead of exponential.

Rationals appear in exactly one place in the package (the unit-distance
embedding) and are carried by ``fractions.Fraction``, which maintains the
canonical reduced form ``den > 0, gcd(num, den) = 1`` by itself.

Matrices are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import BudgetExceededError, NonSquareError, SizeMismatchError


@dataclass(frozen=True)
class Mat:
    """An immutable rows x cols integer matrix in row-major order."""

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"entry count {len(self.entries)} does not match shape "
                f"{self.rows}x{self.cols}"
            )
        for e in self.entries:
            if not isinstance(e, int):
                raise TypeError(f"matrix entries must be ints, got {type(e).__name__}")

    # ---------------------------------------------------------------
    # constructors
    # ---------------------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]]) -> "Mat":
        rows = [list(r) for r in rows]
        if not rows:
            return cls(0, 0, ())
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), ncols, tuple(e for r in rows for e in r))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Mat":
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "Mat":
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def diag(cls, values: Sequence[int]) -> "Mat":
        n = len(values)
        return cls(
            n, n, tuple(values[i] if i == j else 0 for i in range(n) for j in range(n))
        )

    # ---------------------------------------------------------------
    # element and shape access
    # ---------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def at(self, i: int, j: int) -> int:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def to_lists(self) -> list[list[int]]:
        c = self.cols
        return [list(self.entries[i * c : (i + 1) * c]) for i in range(self.rows)]

    def is_square(self) -> bool:
        return self.rows == self.cols

    # ---------------------------------------------------------------
    # arithmetic
    # ---------------------------------------------------------------

    def __add__(self, other: "Mat") -> "Mat":
        if self.shape != other.shape:
            raise SizeMismatchError(f"cannot add {self.shape} and {other.shape}")
        return Mat(
            self.rows,
            self.cols,
            tuple(a + b for a, b in zip(self.entries, other.entries)),
        )

    def __sub__(self, other: "Mat") -> "Mat":
        if self.shape != other.shape:
            raise SizeMismatchError(f"cannot subtract {self.shape} and {other.shape}")
        return Mat(
            self.rows,
            self.cols,
            tuple(a - b for a, b in zip(self.entries, other.entries)),
        )

    def __neg__(self) -> "Mat":
        return Mat(self.rows, self.cols, tuple(-a for a in self.entries))

    def scale(self, c: int) -> "Mat":
        return Mat(self.rows, self.cols, tuple(c * a for a in self.entries))

    def transpose(self) -> "Mat":
        return Mat(
            self.cols,
            self.rows,
            tuple(self.at(i, j) for j in range(self.cols) for i in range(self.rows)),
        )

    def mul(self, other: "Mat") -> "Mat":
        """Exact matrix product."""
        if self.cols != other.rows:
            raise SizeMismatchError(
                f"cannot multiply {self.shape} by {other.shape}"
            )
        n, m, p = self.rows, self.cols, other.cols
        a, b = self.entries, other.entries
        out = [0] * (n * p)
        for i in range(n):
            arow = a[i * m : (i + 1) * m]
            base = i * p
            for k, aik in enumerate(arow):
                if aik == 0:
                    continue
                brow = b[k * p : (k + 1) * p]
                for j in range(p):
                    out[base + j] += aik * brow[j]
        return Mat(n, p, tuple(out))

    def __matmul__(self, other: "Mat") -> "Mat":
        return self.mul(other)

    def hadamard(self, other: "Mat") -> "Mat":
        """Entry-wise product."""
        if self.shape != other.shape:
            raise SizeMismatchError(f"shape mismatch {self.shape} vs {other.shape}")
        return Mat(
            self.rows,
            self.cols,
            tuple(a * b for a, b in zip(self.entries, other.entries)),
        )

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "Mat":
        return Mat(
            len(row_idx),
            len(col_idx),
            tuple(self.at(i, j) for i in row_idx for j in col_idx),
        )

    # ---------------------------------------------------------------
    # serialization: entries as decimal strings to survive any precision
    # ---------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [str(e) for e in self.entries],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Mat":
        return cls(obj["rows"], obj["cols"], tuple(int(e) for e in obj["entries"]))


def _check_bits(value: int, max_bits: int | None):
    if max_bits is not None and value.bit_length() > max_bits:
        raise BudgetExceededError(
            f"intermediate entry of {value.bit_length()} bits exceeds the "
            f"{max_bits}-bit budget"
        )


def det_exact(m: Mat, max_bits: int | None = None) -> int:
    """Exact determinant over the integers by fraction-free elimination.

    The empty 0x0 matrix has determinant 1 (the empty-product convention;
    the minor-expansion identity needs it for its empty term).

    ``max_bits`` is an optional entry-growth budget: the computation raises
    ``BudgetExceededError`` instead of silently grinding on huge integers.
    """
    if not m.is_square():
        raise NonSquareError(f"determinant requires a square matrix, got {m.shape}")
    n = m.rows
    if n == 0:
        return 1
    a = m.to_lists()
    sign = 1
    prev = 1
    for step in range(n - 1):
        pivot_row = next((i for i in range(step, n) if a[i][step] != 0), None)
        if pivot_row is None:
            return 0
        if pivot_row != step:
            a[step], a[pivot_row] = a[pivot_row], a[step]
            sign = -sign
        pivot = a[step][step]
        top = a[step]
        for i in range(step + 1, n):
            cur = a[i]
            factor = cur[step]
            for j in range(step + 1, n):
                # Bareiss update: division by the previous pivot is exact.
                val = (pivot * cur[j] - factor * top[j]) // prev
                _check_bits(val, max_bits)
                cur[j] = val
            cur[step] = 0
        prev = pivot
    return sign * a[n - 1][n - 1]


def rank_exact(m: Mat, max_bits: int | None = None) -> int:
    """Exact rank over the rationals by fraction-free elimination.

    Uses full pivoting (row and column search) so that any nonzero entry of
    the remaining block can serve as a pivot; all intermediate values stay
    integral.
    """
    nrows, ncols = m.rows, m.cols
    if nrows == 0 or ncols == 0:
        return 0
    a = m.to_lists()
    prev = 1
    r = 0
    limit = min(nrows, ncols)
    while r < limit:
        pi = pj = -1
        for i in range(r, nrows):
            row = a[i]
            for j in range(r, ncols):
                if row[j] != 0:
                    pi, pj = i, j
                    break
            if pi >= 0:
                break
        if pi < 0:
            break
        if pi != r:
            a[r], a[pi] = a[pi], a[r]
        if pj != r:
            for row in a:
                row[r], row[pj] = row[pj], row[r]
        pivot = a[r][r]
        top = a[r]
        for i in range(r + 1, nrows):
            cur = a[i]
            factor = cur[r]
            for j in range(r + 1, ncols):
                val = (pivot * cur[j] - factor * top[j]) // prev
                _check_bits(val, max_bits)
                cur[j] = val
            cur[r] = 0
        prev = pivot
        r += 1
    return r


def minor(m: Mat, alpha: Iterable[int], beta: Iterable[int]) -> int:
    """Determinant of the submatrix of ``m`` on rows alpha and columns beta.

    ``minor(m, (), ()) == 1`` by the empty-minor convention, which the
    determinant-of-sum expansion relies on globally.
    """
    alpha = tuple(alpha)
    beta = tuple(beta)
    if len(alpha) != len(beta):
        raise SizeMismatchError(
            f"minor needs |alpha| == |beta|, got {len(alpha)} and {len(beta)}"
        )
    if any(i < 0 or i >= m.rows for i in alpha):
        raise SizeMismatchError(f"row set {alpha} out of range for {m.shape}")
    if any(j < 0 or j >= m.cols for j in beta):
        raise SizeMismatchError(f"column set {beta} out of range for {m.shape}")
    return det_exact(m.submatrix(alpha, beta))


def block_diag(blocks: Sequence[Mat]) -> Mat:
    """Block-diagonal assembly; rank is additive over the blocks."""
    total_r = sum(b.rows for b in blocks)
    total_c = sum(b.cols for b in blocks)
    out = [0] * (total_r * total_c)
    ro = co = 0
    for b in blocks:
        for i in range(b.rows):
            base = (ro + i) * total_c + co
            row = b.row(i)
            for j in range(b.cols):
                out[base + j] = row[j]
        ro += b.rows
        co += b.cols
    return Mat(total_r, total_c, tuple(out))


def repeat_diag(m: Mat, copies: int) -> Mat:
    """Block-diagonal matrix with ``copies`` copies of ``m``."""
    if copies < 0:
        raise ValueError("copies must be nonnegative")
    return block_diag([m] * copies)
