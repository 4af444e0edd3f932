"""Binary decision trees over GF(2) inputs, with exact Fourier tools.

Trees are immutable recursive structures: a ``Leaf`` holds a 0/1 label,
a ``Node`` queries one coordinate (1-indexed) and branches on its value.
All trees produced by this package are reduced: no coordinate repeats
on a root-to-leaf path.  ``reduce_tree`` collapses repeated queries and
is applied when parsing untrusted input.

Size is the number of leaves, depth the number of edges on the longest
path.  Fourier coefficients use the +/-1 convention (bit b maps to
(-1)**b) over the uniform distribution on the full cube.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

from .f2 import BitVector, FormatError, bit_column

__all__ = [
    "ParityIndexSet",
    "Leaf",
    "Node",
    "DecisionTree",
    "eval_tree",
    "truth_table",
    "reduce_tree",
    "complement_tree",
    "prune",
    "path_support_sets",
    "exact_uniform_fourier",
    "exact_distance",
    "sample_size",
    "estimate_distance",
    "format_tree",
    "parse_tree",
]


@dataclass(frozen=True)
class ParityIndexSet:
    """Sorted distinct 1-indexed coordinates defining a parity function."""

    indices: tuple[int, ...]
    mask: int = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        m = 0
        prev = 0
        for i in self.indices:
            if i <= prev:
                raise ValueError("indices must be distinct, ascending and >= 1")
            prev = i
            m |= 1 << (i - 1)
        object.__setattr__(self, "mask", m)

    @classmethod
    def from_iterable(cls, indices: Iterable[int]) -> ParityIndexSet:
        return cls(tuple(sorted(set(indices))))

    @classmethod
    def from_mask(cls, mask: int) -> ParityIndexSet:
        out = []
        while mask:
            low = mask & -mask
            out.append(low.bit_length())
            mask ^= low
        return cls(tuple(out))

    def chi_mask(self, point_mask: int) -> int:
        """Parity of the selected coordinates of a packed point."""
        return (self.mask & point_mask).bit_count() & 1

    def chi(self, v: BitVector) -> int:
        if self.indices and self.indices[-1] > v.length:
            raise ValueError("parity index exceeds the vector length")
        return self.chi_mask(v.mask)

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __contains__(self, i: int) -> bool:
        return 1 <= i and (self.mask >> (i - 1)) & 1 == 1


@dataclass(frozen=True)
class Leaf:
    label: int

    def __post_init__(self) -> None:
        if self.label not in (0, 1):
            raise ValueError("leaf label must be 0 or 1")

    @property
    def size(self) -> int:
        return 1

    @property
    def depth(self) -> int:
        return 0


@dataclass(frozen=True)
class Node:
    coord: int
    low: "DecisionTree"
    high: "DecisionTree"
    size: int = field(init=False, compare=False, repr=False)
    depth: int = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.coord < 1:
            raise ValueError("queried coordinate must be >= 1")
        object.__setattr__(self, "size", self.low.size + self.high.size)
        object.__setattr__(self, "depth", 1 + max(self.low.depth, self.high.depth))


DecisionTree = Leaf | Node


def eval_tree(t: DecisionTree, y: BitVector) -> int:
    """Evaluate the tree on a point; queried coordinates must fit y."""
    while isinstance(t, Node):
        if t.coord > y.length:
            raise ValueError(f"tree queries coordinate {t.coord} beyond length {y.length}")
        t = t.high if (y.mask >> (t.coord - 1)) & 1 else t.low
    return t.label


def _eval_mask(t: DecisionTree, mask: int) -> int:
    while isinstance(t, Node):
        t = t.high if (mask >> (t.coord - 1)) & 1 else t.low
    return t.label


def truth_table(t: DecisionTree, n: int) -> int:
    """Packed outputs over all 2**n inputs; bit x is the label at point x."""
    full = (1 << (1 << n)) - 1
    def build(node: DecisionTree) -> int:
        if isinstance(node, Leaf):
            return full if node.label else 0
        if node.coord > n:
            raise ValueError(f"tree queries coordinate {node.coord} beyond arity {n}")
        wave = bit_column(node.coord - 1, n)
        return (build(node.low) & ~wave) | (build(node.high) & wave)
    return build(t) & full


def reduce_tree(t: DecisionTree) -> DecisionTree:
    """Collapse queries that repeat an ancestor's coordinate."""
    def walk(node: DecisionTree, fixed: dict[int, int]) -> DecisionTree:
        if isinstance(node, Leaf):
            return node
        if node.coord in fixed:
            return walk(node.high if fixed[node.coord] else node.low, fixed)
        low = walk(node.low, {**fixed, node.coord: 0})
        high = walk(node.high, {**fixed, node.coord: 1})
        return Node(node.coord, low, high)
    return walk(t, {})


def complement_tree(t: DecisionTree) -> DecisionTree:
    """Same queries, every leaf label flipped."""
    if isinstance(t, Leaf):
        return Leaf(1 - t.label)
    return Node(t.coord, complement_tree(t.low), complement_tree(t.high))


def prune(t: DecisionTree, d: int, fill: int = 0) -> DecisionTree:
    """Cut the tree at depth d, replacing removed subtrees by Leaf(fill).

    Returns the tree itself, node for node, when its depth is already
    within d.  ``fill`` defaults to 0; callers wanting a majority label
    compute it from samples and pass it in.
    """
    if d < 0:
        raise ValueError("prune depth must be >= 0")
    if t.depth <= d:
        return t
    if d == 0:
        return Leaf(fill)
    assert isinstance(t, Node)
    return Node(t.coord, prune(t.low, d - 1, fill), prune(t.high, d - 1, fill))


def path_support_sets(t: DecisionTree) -> set[ParityIndexSet]:
    """Every subset of the variable set of every root-to-leaf path.

    The empty set is always present.  For a reduced tree of depth d the
    result has at most 4**d elements.
    """
    found: set[int] = set()
    def walk(node: DecisionTree, pathmask: int) -> None:
        if isinstance(node, Node):
            bit = 1 << (node.coord - 1)
            walk(node.low, pathmask | bit)
            walk(node.high, pathmask | bit)
            return
        sub = pathmask
        while True:
            found.add(sub)
            if sub == 0:
                break
            sub = (sub - 1) & pathmask
    walk(t, 0)
    return {ParityIndexSet.from_mask(m) for m in found}


def exact_uniform_fourier(t: DecisionTree, n: int) -> dict[ParityIndexSet, Fraction]:
    """All nonzero Fourier coefficients of the tree over the uniform cube.

    Brute force: the full transform of the +/-1 truth table on 2**n
    points, exact in rationals.  Intended as an oracle at small arity.

    Args:
        t: decision tree querying coordinates within 1..n.
        n: ambient arity, at most 16.

    Returns:
        Mapping from index set S to the coefficient, omitting zeros.
    """
    if n > 16:
        raise ValueError("fourier brute force is limited to arity 16")
    tt = truth_table(t, n)
    total = 1 << n
    vec = [1 - 2 * ((tt >> x) & 1) for x in range(total)]
    h = 1
    while h < total:
        for base in range(0, total, h << 1):
            for j in range(base, base + h):
                a, b = vec[j], vec[j + h]
                vec[j], vec[j + h] = a + b, a - b
        h <<= 1
    return {
        ParityIndexSet.from_mask(s): Fraction(vec[s], total)
        for s in range(total)
        if vec[s]
    }


def exact_distance(
    t: DecisionTree, weighted: Iterable[tuple[BitVector, Fraction, int]]
) -> Fraction:
    """Exact weighted disagreement with a labeled enumeration."""
    total = Fraction(0)
    for point, weight, label in weighted:
        if eval_tree(t, point) != label:
            total += weight
    return total


def sample_size(tol: float, confidence: float) -> int:
    """Draws needed so the empirical mean lands within tol of the truth
    with the stated confidence (two-sided Hoeffding)."""
    if not 0 < confidence < 1:
        raise ValueError("confidence must lie strictly between 0 and 1")
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    return math.ceil(math.log(2.0 / (1.0 - confidence)) / (2.0 * tol * tol))


def estimate_distance(t: DecisionTree, oracle, tol: float, confidence: float, rng) -> Fraction:
    """Empirical disagreement with a sampling oracle.

    Draws ``sample_size(tol, confidence)`` labeled examples from
    ``oracle.sample(rng)`` and returns the mismatch fraction.
    """
    n = sample_size(tol, confidence)
    bad = 0
    for _ in range(n):
        point, label = oracle.sample(rng)
        if _eval_mask(t, point.mask) != label:
            bad += 1
    return Fraction(bad, n)


# ---------- serialization ----------


def format_tree(t: DecisionTree) -> str:
    """Prefix token stream: ``q<i>`` then both children, or ``l0``/``l1``."""
    out: list[str] = []
    def walk(node: DecisionTree) -> None:
        if isinstance(node, Leaf):
            out.append(f"l{node.label}")
        else:
            out.append(f"q{node.coord}")
            walk(node.low)
            walk(node.high)
    walk(t)
    return " ".join(out)


def parse_tree(text: str) -> DecisionTree:
    """Parse the prefix format; repeated queries on a path are collapsed."""
    tokens = text.split()
    pos = 0
    def take() -> DecisionTree:
        nonlocal pos
        if pos >= len(tokens):
            raise FormatError("unexpected end of tree text")
        tok = tokens[pos]
        pos += 1
        if tok == "l0":
            return Leaf(0)
        if tok == "l1":
            return Leaf(1)
        if tok.startswith("q"):
            try:
                coord = int(tok[1:])
            except ValueError as e:
                raise FormatError(f"malformed token {tok!r}") from e
            if coord < 1:
                raise FormatError(f"coordinate must be >= 1 in token {tok!r}")
            low = take()
            high = take()
            return Node(coord, low, high)
        raise FormatError(f"malformed token {tok!r}")
    tree = take()
    if pos != len(tokens):
        raise FormatError(f"trailing tokens after tree: {tokens[pos:]!r}")
    return reduce_tree(tree)
