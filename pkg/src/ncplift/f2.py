"""Dense linear algebra over GF(2) on bit-packed integers.

Vectors and matrix rows are stored as Python ints, one bit per
coordinate, so a row operation is a single XOR and an inner product is
an AND followed by a popcount.  Coordinates are 1-indexed in every
public API (supports, index sets, retained-row lists); the bit layout
inside the packed ints is a private detail.

The text format shared by the CLI and the test fixtures is: a first
line ``rows cols`` (decimal, one space), then ``rows`` lines each a
string of exactly ``cols`` characters from {0,1}.  Vectors are written
as matrices with a single row.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

__all__ = [
    "FormatError",
    "BitVector",
    "BitMatrix",
    "bit_column",
    "mat_vec",
    "rank",
    "row_reduce",
    "independent_row_basis",
    "dual_basis",
    "format_matrix",
    "parse_matrix",
    "format_vector",
    "parse_vector",
]


class FormatError(ValueError):
    """Raised when a text payload does not match the expected format."""


def bit_column(i: int, log_size: int) -> int:
    """Packed column of index bits: bit e of the result is bit i of e.

    Over all e in range(2**log_size) this is the truth table of the
    i-th index bit, built by doubling instead of a 2**log_size loop.
    """
    if not 0 <= i < log_size:
        raise ValueError(f"bit index {i} out of range for log size {log_size}")
    half = 1 << i
    block = ((1 << half) - 1) << half
    span = half << 1
    total = 1 << log_size
    while span < total:
        block |= block << span
        span <<= 1
    return block


@dataclass(frozen=True)
class BitVector:
    """Immutable GF(2) vector; coordinate i is bit i-1 of ``mask``."""

    length: int
    mask: int

    def __post_init__(self) -> None:
        if self.length < 0:
            raise ValueError("negative length")
        if not 0 <= self.mask < (1 << self.length):
            raise ValueError("mask does not fit the stated length")

    @classmethod
    def zeros(cls, length: int) -> BitVector:
        return cls(length, 0)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> BitVector:
        mask = 0
        n = 0
        for b in bits:
            if b not in (0, 1):
                raise ValueError("entries must be 0 or 1")
            mask |= b << n
            n += 1
        return cls(n, mask)

    @classmethod
    def from01(cls, text: str) -> BitVector:
        if not set(text) <= {"0", "1"}:
            raise FormatError(f"invalid characters in bit string {text!r}")
        return cls(len(text), int(text[::-1], 2) if text else 0)

    @classmethod
    def from_support(cls, indices: Iterable[int], length: int) -> BitVector:
        mask = 0
        for i in indices:
            if not 1 <= i <= length:
                raise ValueError(f"coordinate {i} out of range 1..{length}")
            mask |= 1 << (i - 1)
        return cls(length, mask)

    def bit(self, i: int) -> int:
        """Coordinate i (1-indexed)."""
        if not 1 <= i <= self.length:
            raise ValueError(f"coordinate {i} out of range 1..{self.length}")
        return (self.mask >> (i - 1)) & 1

    def support(self) -> tuple[int, ...]:
        """Indices of nonzero coordinates, ascending, 1-indexed."""
        m = self.mask
        out = []
        while m:
            low = m & -m
            out.append(low.bit_length())
            m ^= low
        return tuple(out)

    @property
    def sparsity(self) -> int:
        return self.mask.bit_count()

    def dot(self, other: BitVector) -> int:
        if self.length != other.length:
            raise ValueError("dimension mismatch in inner product")
        return (self.mask & other.mask).bit_count() & 1

    def __xor__(self, other: BitVector) -> BitVector:
        if self.length != other.length:
            raise ValueError("dimension mismatch in xor")
        return BitVector(self.length, self.mask ^ other.mask)

    def to01(self) -> str:
        return "".join("1" if (self.mask >> i) & 1 else "0" for i in range(self.length))

    def __len__(self) -> int:
        return self.length

    def __iter__(self) -> Iterator[int]:
        for i in range(self.length):
            yield (self.mask >> i) & 1

    def __str__(self) -> str:
        return self.to01()


@dataclass(frozen=True)
class BitMatrix:
    """Immutable GF(2) matrix stored as one packed int per row."""

    rows: int
    cols: int
    row_masks: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative shape")
        if len(self.row_masks) != self.rows:
            raise ValueError("row count does not match row data")
        limit = 1 << self.cols
        for r in self.row_masks:
            if not 0 <= r < limit:
                raise ValueError("row mask does not fit the stated width")

    @classmethod
    def from_rows(cls, rows: Iterable[BitVector | str], cols: int | None = None) -> BitMatrix:
        vecs = [r if isinstance(r, BitVector) else BitVector.from01(r) for r in rows]
        if cols is None:
            if not vecs:
                raise ValueError("column count required for an empty matrix")
            cols = vecs[0].length
        for v in vecs:
            if v.length != cols:
                raise ValueError("ragged rows")
        return cls(len(vecs), cols, tuple(v.mask for v in vecs))

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> BitMatrix:
        return cls(rows, cols, (0,) * rows)

    def row(self, i: int) -> BitVector:
        """Row i (1-indexed)."""
        if not 1 <= i <= self.rows:
            raise ValueError(f"row {i} out of range 1..{self.rows}")
        return BitVector(self.cols, self.row_masks[i - 1])

    def row_vectors(self) -> Iterator[BitVector]:
        for m in self.row_masks:
            yield BitVector(self.cols, m)

    def entry(self, i: int, j: int) -> int:
        """Entry at row i, column j (both 1-indexed)."""
        if not 1 <= i <= self.rows:
            raise ValueError(f"row {i} out of range 1..{self.rows}")
        if not 1 <= j <= self.cols:
            raise ValueError(f"column {j} out of range 1..{self.cols}")
        return (self.row_masks[i - 1] >> (j - 1)) & 1

    def column_masks(self) -> list[int]:
        """Columns packed as ints: bit i-1 of entry j-1 is the (i, j) entry."""
        cols = [0] * self.cols
        for i, rm in enumerate(self.row_masks):
            while rm:
                low = rm & -rm
                cols[low.bit_length() - 1] |= 1 << i
                rm ^= low
        return cols

    def transpose(self) -> BitMatrix:
        return BitMatrix(self.cols, self.rows, tuple(self.column_masks()))


def mat_vec(m: BitMatrix, v: BitVector) -> BitVector:
    """Matrix-vector product over GF(2).

    Args:
        m: matrix with ``cols`` matching ``v.length``.
        v: vector of length ``m.cols``.

    Returns:
        The product as a vector of length ``m.rows``.

    Raises:
        ValueError: on a dimension mismatch.
    """
    if m.cols != v.length:
        raise ValueError(f"dimension mismatch: {m.rows}x{m.cols} times length {v.length}")
    out = 0
    vm = v.mask
    for i, rm in enumerate(m.row_masks):
        if (rm & vm).bit_count() & 1:
            out |= 1 << i
    return BitVector(m.rows, out)


def _rref(masks: list[int], cols: int) -> tuple[list[int], list[int]]:
    """Reduced row echelon form in place semantics.

    Pivots on the lowest-index nonzero column at each step, eliminates
    above and below, and moves zero rows to the bottom.  Returns the
    reduced row masks and the pivot column indices (0-based, ascending).
    """
    work = list(masks)
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        bit = 1 << c
        sel = None
        for i in range(r, len(work)):
            if work[i] & bit:
                sel = i
                break
        if sel is None:
            continue
        work[r], work[sel] = work[sel], work[r]
        for i in range(len(work)):
            if i != r and work[i] & bit:
                work[i] ^= work[r]
        pivots.append(c)
        r += 1
        if r == len(work):
            break
    return work, pivots


def row_reduce(m: BitMatrix) -> BitMatrix:
    """Reduced row echelon form of ``m`` (same shape, zero rows last)."""
    work, _ = _rref(list(m.row_masks), m.cols)
    return BitMatrix(m.rows, m.cols, tuple(work))


def rank(m: BitMatrix) -> int:
    _, pivots = _rref(list(m.row_masks), m.cols)
    return len(pivots)


def independent_row_basis(m: BitMatrix) -> tuple[BitMatrix, tuple[int, ...]]:
    """Maximal independent subset of the rows, kept in original order.

    Returns:
        A matrix made of the retained original rows and the 1-indexed
        list of retained row positions.
    """
    basis: list[tuple[int, int]] = []  # (reduced mask, pivot bit)
    kept: list[int] = []
    kept_masks: list[int] = []
    for idx, rm in enumerate(m.row_masks):
        red = rm
        for bm, piv in basis:
            if red & piv:
                red ^= bm
        if red:
            basis.append((red, red & -red))
            kept.append(idx + 1)
            kept_masks.append(rm)
    return BitMatrix(len(kept_masks), m.cols, tuple(kept_masks)), tuple(kept)


def dual_basis(g: BitMatrix) -> BitMatrix:
    """Parity-check matrix for the column span of ``g``.

    The rows of the result form a basis of the space of vectors
    orthogonal to every column of ``g``, so ``H x = 0`` exactly when
    ``x`` lies in the column span.  The result has ``g.rows - rank(g)``
    rows and is deterministic: elimination pivots on the lowest-index
    column and free columns are visited in ascending order.
    """
    n = g.rows
    gt = g.transpose()
    work, pivots = _rref(list(gt.row_masks), n)
    pivot_set = set(pivots)
    out_rows = []
    for f in range(n):
        if f in pivot_set:
            continue
        v = 1 << f
        fbit = 1 << f
        for j, p in enumerate(pivots):
            if work[j] & fbit:
                v |= 1 << p
        out_rows.append(v)
    return BitMatrix(len(out_rows), n, tuple(out_rows))


# ---------- text format ----------


def format_matrix(m: BitMatrix) -> str:
    lines = [f"{m.rows} {m.cols}"]
    lines.extend(v.to01() for v in m.row_vectors())
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> BitMatrix:
    if not text.endswith("\n"):
        raise FormatError("matrix text must end with a newline")
    lines = text.split("\n")[:-1]
    if not lines:
        raise FormatError("empty matrix text")
    head = lines[0].split(" ")
    if len(head) != 2:
        raise FormatError(f"malformed header line {lines[0]!r}")
    try:
        rows, cols = int(head[0]), int(head[1])
    except ValueError as e:
        raise FormatError(f"malformed header line {lines[0]!r}") from e
    if rows < 0 or cols < 0:
        raise FormatError("negative dimensions")
    if len(lines) != rows + 1:
        raise FormatError(f"expected {rows} row lines, found {len(lines) - 1}")
    masks = []
    for ln in lines[1:]:
        if len(ln) != cols or not set(ln) <= {"0", "1"}:
            raise FormatError(f"malformed row line {ln!r}")
        masks.append(BitVector.from01(ln).mask)
    return BitMatrix(rows, cols, tuple(masks))


def format_vector(v: BitVector) -> str:
    return f"1 {v.length}\n{v.to01()}\n"


def parse_vector(text: str) -> BitVector:
    m = parse_matrix(text)
    if m.rows != 1:
        raise FormatError(f"expected a single-row vector, found {m.rows} rows")
    return BitVector(m.cols, m.row_masks[0])
