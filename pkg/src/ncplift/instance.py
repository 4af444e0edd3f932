"""Sparse nearest-codeword instances in three equivalent views.

A generator-view instance asks for a sparse offset: given G, z and k,
find x with sparsity at most alpha*k such that z xor x lies in the
column span of G.  The syndrome view carries a parity-check matrix H
and target t and asks for sparse x with H x = t.  The labeled-set view
reads the rows of H as sample points labeled by the entries of t, so
that a parity chi_S is consistent with the labels exactly when the
indicator vector of S solves the syndrome system.

Seeded generation draws all randomness from Python's random.Random
(MT19937) through getrandbits only, plus Floyd's subset sampling for
the planted support, so equal seeds give byte-identical instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from random import Random
from itertools import combinations

from .f2 import (
    BitMatrix,
    BitVector,
    FormatError,
    dual_basis,
    independent_row_basis,
    mat_vec,
    rank,
)

__all__ = [
    "UnsatisfiableInstanceError",
    "NcpInstance",
    "SyndromeInstance",
    "LabeledSet",
    "generator_to_syndrome",
    "syndrome_to_labeled_set",
    "normalize_syndrome",
    "brute_force_nearest",
    "random_planted",
    "write_syndrome_instance",
    "read_syndrome_instance",
    "write_generator_instance",
    "read_generator_instance",
    "load_instance",
]


class UnsatisfiableInstanceError(ValueError):
    """The linear system H x = t has no solution at all: a dependent row
    carries a label inconsistent with the combination producing it."""


@dataclass(frozen=True)
class NcpInstance:
    """Generator view: code is the column span of g, target point is z."""

    g: BitMatrix
    z: BitVector
    k: int
    alpha: Fraction

    def __post_init__(self) -> None:
        if self.z.length != self.g.rows:
            raise ValueError("target length must equal the code length")
        if self.k < 0:
            raise ValueError("k must be >= 0")
        if self.alpha < 1:
            raise ValueError("approximation factor must be >= 1")


@dataclass(frozen=True)
class SyndromeInstance:
    """Syndrome view: seek sparse x with h x = t."""

    h: BitMatrix
    t: BitVector
    k: int
    alpha: Fraction

    def __post_init__(self) -> None:
        if self.t.length != self.h.rows:
            raise ValueError("syndrome length must equal the row count")
        if self.k < 0:
            raise ValueError("k must be >= 0")
        if self.alpha < 1:
            raise ValueError("approximation factor must be >= 1")

    @property
    def n(self) -> int:
        return self.h.cols

    @property
    def m(self) -> int:
        return self.h.rows


@dataclass(frozen=True)
class LabeledSet:
    """Finite list of labeled points; the consistency view of a system.

    Points coming out of ``syndrome_to_labeled_set`` are pairwise
    distinct and linearly independent; arbitrary hand-built sets are
    only checked structurally here, and span construction re-checks
    independence.
    """

    points: tuple[BitVector, ...]
    labels: tuple[int, ...]
    length: int

    def __post_init__(self) -> None:
        if len(self.points) != len(self.labels):
            raise ValueError("points and labels must align")
        for p in self.points:
            if p.length != self.length:
                raise ValueError("all points must share the stated length")
        for b in self.labels:
            if b not in (0, 1):
                raise ValueError("labels must be 0 or 1")

    @classmethod
    def of(cls, pairs, length: int) -> LabeledSet:
        pts, labs = [], []
        for p, b in pairs:
            pts.append(p)
            labs.append(b)
        return cls(tuple(pts), tuple(labs), length)

    @property
    def m(self) -> int:
        return len(self.points)


def generator_to_syndrome(inst: NcpInstance) -> SyndromeInstance:
    """Equivalent syndrome view of a generator-view instance.

    H is the dual basis of the code, t = H z, so z xor x is a codeword
    exactly when H x = t.
    """
    h = dual_basis(inst.g)
    t = mat_vec(h, inst.z)
    return SyndromeInstance(h, t, inst.k, inst.alpha)


def syndrome_to_labeled_set(inst: SyndromeInstance) -> LabeledSet:
    """Rows of H as points labeled by the entries of t.

    Requires independent rows; run ``normalize_syndrome`` first when in
    doubt.
    """
    if rank(inst.h) != inst.h.rows:
        raise ValueError("dependent rows; normalize the instance first")
    return LabeledSet(
        tuple(inst.h.row_vectors()),
        tuple(inst.t),
        inst.h.cols,
    )


def normalize_syndrome(inst: SyndromeInstance) -> SyndromeInstance:
    """Drop dependent rows, checking their labels stay consistent.

    A dependent row equals a combination of retained rows; its label
    must equal the same combination of retained labels, otherwise no
    assignment satisfies the system at all.

    Raises:
        UnsatisfiableInstanceError: if a dropped label is inconsistent.
    """
    if rank(inst.h) == inst.h.rows:
        return inst
    # Re-run the greedy elimination, tracking for every reduced row the
    # combination of retained original rows that produced it.
    basis: list[tuple[int, int, int]] = []  # (reduced mask, pivot bit, combo mask)
    kept_rows: list[int] = []
    kept_labels: list[int] = []
    t_bits = list(inst.t)
    for idx, rm in enumerate(inst.h.row_masks):
        red = rm
        combo = 0
        for bm, piv, cm in basis:
            if red & piv:
                red ^= bm
                combo ^= cm
        if red:
            pos = len(kept_rows)
            kept_rows.append(rm)
            kept_labels.append(t_bits[idx])
            basis.append((red, red & -red, combo | (1 << pos)))
        else:
            expect = 0
            c = combo
            while c:
                low = c & -c
                expect ^= kept_labels[low.bit_length() - 1]
                c ^= low
            if expect != t_bits[idx]:
                raise UnsatisfiableInstanceError(
                    f"row {idx + 1} is a combination of earlier rows but its "
                    "label disagrees; the system has no solution"
                )
    h = BitMatrix(len(kept_rows), inst.h.cols, tuple(kept_rows))
    t = BitVector.from_bits(kept_labels)
    return SyndromeInstance(h, t, inst.k, inst.alpha)


def brute_force_nearest(inst: SyndromeInstance, k_max: int) -> BitVector | None:
    """Sparsest solution of H x = t within the sparsity cap, or None.

    Enumerates supports by ascending size, each size in lexicographic
    order, and returns the first hit, so ties break toward the
    lexicographically smallest support.
    """
    n = inst.h.cols
    if k_max > n:
        raise ValueError("sparsity cap exceeds the number of coordinates")
    cols = inst.h.column_masks()
    target = inst.t.mask
    if target == 0:
        return BitVector.zeros(n)
    for size in range(1, k_max + 1):
        for supp in combinations(range(n), size):
            acc = 0
            for j in supp:
                acc ^= cols[j]
            if acc == target:
                mask = 0
                for j in supp:
                    mask |= 1 << j
                return BitVector(n, mask)
    return None


def _randbelow(rng: Random, n: int) -> int:
    """Uniform integer in range(n) from getrandbits via rejection."""
    bits = n.bit_length()
    r = rng.getrandbits(bits)
    while r >= n:
        r = rng.getrandbits(bits)
    return r


def _sample_support(rng: Random, n: int, k: int) -> list[int]:
    """Floyd's algorithm: uniform k-subset of range(n), 0-based."""
    chosen: set[int] = set()
    for j in range(n - k, n):
        t = _randbelow(rng, j + 1)
        chosen.add(t if t not in chosen else j)
    return sorted(chosen)


def random_planted(n: int, m: int, k: int, seed: int) -> tuple[SyndromeInstance, BitVector]:
    """Planted syndrome instance: uniform independent-row H and a hidden
    uniform weight-k vector x with t = H x.

    The whole H is redrawn until its rows are independent, keeping the
    matrix uniform over full-rank choices.  Determinism: a fixed seed
    yields a bit-identical instance (MT19937 through getrandbits).
    """
    if not 0 <= m <= n:
        raise ValueError("need 0 <= m <= n for independent rows")
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    if n == 0:
        raise ValueError("n must be >= 1")
    rng = Random(seed)
    while True:
        masks = tuple(rng.getrandbits(n) for _ in range(m))
        h = BitMatrix(m, n, masks)
        if rank(h) == m:
            break
    support = _sample_support(rng, n, k)
    x = BitVector.from_support((j + 1 for j in support), n)
    t = mat_vec(h, x)
    return SyndromeInstance(h, t, k, Fraction(1)), x


# ---------- instance files ----------

_SD_HEADER = "ncpsd v1"
_GEN_HEADER = "ncpgen v1"


def write_syndrome_instance(inst: SyndromeInstance) -> str:
    lines = [
        _SD_HEADER,
        f"{inst.m} {inst.n} {inst.k} {inst.alpha.numerator} {inst.alpha.denominator}",
    ]
    lines.extend(v.to01() for v in inst.h.row_vectors())
    lines.append(inst.t.to01())
    return "\n".join(lines) + "\n"


def _parse_params(line: str, what: str) -> tuple[int, int, int, Fraction]:
    parts = line.split(" ")
    if len(parts) != 5:
        raise FormatError(f"malformed {what} parameter line {line!r}")
    try:
        a, b, k, num, den = (int(p) for p in parts)
    except ValueError as e:
        raise FormatError(f"malformed {what} parameter line {line!r}") from e
    if den <= 0:
        raise FormatError("alpha denominator must be positive")
    return a, b, k, Fraction(num, den)


def _split_payload(text: str, header: str) -> list[str]:
    if not text.endswith("\n"):
        raise FormatError("instance text must end with a newline")
    lines = text.split("\n")[:-1]
    if not lines or lines[0] != header:
        raise FormatError(f"expected header {header!r}")
    if len(lines) < 2:
        raise FormatError("missing parameter line")
    return lines


def read_syndrome_instance(text: str) -> SyndromeInstance:
    lines = _split_payload(text, _SD_HEADER)
    m, n, k, alpha = _parse_params(lines[1], "syndrome")
    if len(lines) != 2 + m + 1:
        raise FormatError(f"expected {m} matrix rows plus a target line")
    rows = []
    for ln in lines[2 : 2 + m]:
        if len(ln) != n or not set(ln) <= {"0", "1"}:
            raise FormatError(f"malformed matrix row {ln!r}")
        rows.append(ln)
    tline = lines[2 + m]
    if len(tline) != m or not set(tline) <= {"0", "1"}:
        raise FormatError(f"malformed target line {tline!r}")
    h = BitMatrix.from_rows(rows, n) if rows else BitMatrix.zeros(0, n)
    try:
        return SyndromeInstance(h, BitVector.from01(tline), k, alpha)
    except ValueError as e:
        raise FormatError(str(e)) from e


def write_generator_instance(inst: NcpInstance) -> str:
    lines = [
        _GEN_HEADER,
        f"{inst.g.rows} {inst.g.cols} {inst.k} {inst.alpha.numerator} {inst.alpha.denominator}",
    ]
    lines.extend(v.to01() for v in inst.g.row_vectors())
    lines.append(inst.z.to01())
    return "\n".join(lines) + "\n"


def read_generator_instance(text: str) -> NcpInstance:
    lines = _split_payload(text, _GEN_HEADER)
    n, d, k, alpha = _parse_params(lines[1], "generator")
    if len(lines) != 2 + n + 1:
        raise FormatError(f"expected {n} matrix rows plus a point line")
    rows = []
    for ln in lines[2 : 2 + n]:
        if len(ln) != d or not set(ln) <= {"0", "1"}:
            raise FormatError(f"malformed matrix row {ln!r}")
        rows.append(ln)
    zline = lines[2 + n]
    if len(zline) != n or not set(zline) <= {"0", "1"}:
        raise FormatError(f"malformed point line {zline!r}")
    g = BitMatrix.from_rows(rows, d) if rows else BitMatrix.zeros(0, d)
    try:
        return NcpInstance(g, BitVector.from01(zline), k, alpha)
    except ValueError as e:
        raise FormatError(str(e)) from e


def load_instance(text: str) -> SyndromeInstance:
    """Read either on-disk view and return the syndrome view."""
    first = text.split("\n", 1)[0]
    if first == _SD_HEADER:
        return read_syndrome_instance(text)
    if first == _GEN_HEADER:
        return generator_to_syndrome(read_generator_instance(text))
    raise FormatError(f"unknown instance header {first!r}")
