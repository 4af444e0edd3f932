"""Blockwise-parity lifting of labeled example sources.

Each base coordinate i of an n-bit point is replaced by a block of ell
lifted coordinates, block i covering positions (i-1)*ell+1 .. i*ell.
The fold map sends a lifted string to the per-block parities; lifting a
base example draws the block contents uniformly among strings with the
required parity (ell-1 free bits per block, the last bit fixing the
parity), keeping the label.

Exact quantities below are computed in closed form per base point from
two elementary facts about a uniform parity-constrained block: any
proper subset of its coordinates is jointly uniform, and the signed
expectation of a full-block parity character is +1 or -1 according to
the required parity.  A brute-force fiber enumerator is kept alongside
as an independent cross-check at tiny sizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from random import Random
from typing import Iterator

from .dtree import DecisionTree, Leaf, Node, ParityIndexSet
from .f2 import BitVector

__all__ = [
    "GadgetParams",
    "FinitePmf",
    "GadgetOracle",
    "Restriction",
    "blockwise_parity",
    "lift_sample",
    "lift_parity",
    "unlift_parity",
    "is_block_complete",
    "exact_lifted_agreement",
    "exact_restriction_probability",
    "exact_lifted_tree_error",
    "enumerate_lifted",
]


@dataclass(frozen=True)
class GadgetParams:
    """Block width and base arity; lifted arity is their product.

    ell >= 2 is the regime the amplification machinery needs; ell = 1
    (identity gadget) is allowed for plumbing tests.
    """

    ell: int
    base_n: int

    def __post_init__(self) -> None:
        if self.ell < 1:
            raise ValueError("block width must be >= 1")
        if self.base_n < 0:
            raise ValueError("base arity must be >= 0")

    @property
    def lifted_n(self) -> int:
        return self.ell * self.base_n

    def block_of(self, coord: int) -> int:
        """Block index (1-based) owning a lifted coordinate."""
        if not 1 <= coord <= self.lifted_n:
            raise ValueError(f"lifted coordinate {coord} out of range")
        return (coord - 1) // self.ell + 1


@dataclass(frozen=True)
class FinitePmf:
    """Explicit labeled distribution on distinct points.

    Probabilities are exact rationals summing to one.  Sampling inverts
    the cumulative distribution with a uniform draw over the common
    denominator, so it is exact and fully determined by the seed.
    """

    points: tuple[BitVector, ...]
    probs: tuple[Fraction, ...]
    labels: tuple[int, ...]
    length: int
    _denom: int = field(init=False, compare=False, repr=False)
    _cum: tuple[int, ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        if not (len(self.points) == len(self.probs) == len(self.labels)):
            raise ValueError("points, probs and labels must align")
        seen = set()
        for p in self.points:
            if p.length != self.length:
                raise ValueError("all points must share the stated length")
            if p.mask in seen:
                raise ValueError("duplicate support point")
            seen.add(p.mask)
        for pr in self.probs:
            if pr <= 0:
                raise ValueError("probabilities must be positive")
        if sum(self.probs, Fraction(0)) != 1:
            raise ValueError("probabilities must sum to 1")
        for b in self.labels:
            if b not in (0, 1):
                raise ValueError("labels must be 0 or 1")
        denom = math.lcm(*(pr.denominator for pr in self.probs)) if self.probs else 1
        cum = []
        acc = 0
        for pr in self.probs:
            acc += pr.numerator * (denom // pr.denominator)
            cum.append(acc)
        object.__setattr__(self, "_denom", denom)
        object.__setattr__(self, "_cum", tuple(cum))

    def sample(self, rng: Random) -> tuple[BitVector, int]:
        u = _randbelow(rng, self._denom)
        for i, edge in enumerate(self._cum):
            if u < edge:
                return self.points[i], self.labels[i]
        raise AssertionError("cumulative walk fell off the end")

    def enumerate_weighted(self) -> Iterator[tuple[BitVector, Fraction, int]]:
        yield from zip(self.points, self.probs, self.labels)


def _randbelow(rng: Random, n: int) -> int:
    bits = n.bit_length()
    r = rng.getrandbits(bits)
    while r >= n:
        r = rng.getrandbits(bits)
    return r


class GadgetOracle:
    """Lifted example source over a base source (span oracle or pmf).

    Every emitted pair (y, b) satisfies: b is the base label of the
    per-block parity fold of y.
    """

    __slots__ = ("base", "params")

    def __init__(self, base, params: GadgetParams) -> None:
        if base.length != params.base_n:
            raise ValueError("base arity does not match the gadget parameters")
        self.base = base
        self.params = params

    @property
    def length(self) -> int:
        return self.params.lifted_n

    def sample(self, rng: Random) -> tuple[BitVector, int]:
        pair = self.base.sample(rng)
        return lift_sample(pair, self.params, rng)

    def enumerate_weighted(
        self, max_lifted_arity: int = 16
    ) -> Iterator[tuple[BitVector, Fraction, int]]:
        return enumerate_lifted(self.base, self.params, max_lifted_arity)


@dataclass(frozen=True)
class Restriction:
    """Fixed values on a subset of lifted coordinates.

    ``coords`` is ascending and 1-indexed; ``values`` aligns with it,
    coordinate ``coords[j]`` being pinned to bit j of ``values``.
    """

    coords: tuple[int, ...]
    values: BitVector

    def __post_init__(self) -> None:
        prev = 0
        for c in self.coords:
            if c <= prev:
                raise ValueError("coordinates must be distinct, ascending and >= 1")
            prev = c
        if self.values.length != len(self.coords):
            raise ValueError("one pinned value per coordinate")

    @classmethod
    def of(cls, assignment: dict[int, int]) -> Restriction:
        coords = tuple(sorted(assignment))
        return cls(coords, BitVector.from_bits(assignment[c] for c in coords))


def blockwise_parity(y: BitVector, params: GadgetParams) -> BitVector:
    """Fold a lifted string to its per-block parities."""
    if y.length != params.lifted_n:
        raise ValueError(f"expected length {params.lifted_n}, got {y.length}")
    ell = params.ell
    ones = (1 << ell) - 1
    out = 0
    ym = y.mask
    for i in range(params.base_n):
        if ((ym >> (i * ell)) & ones).bit_count() & 1:
            out |= 1 << i
    return BitVector(params.base_n, out)


def lift_sample(
    pair: tuple[BitVector, int], params: GadgetParams, rng: Random
) -> tuple[BitVector, int]:
    """Uniform preimage of a base point under the fold, same label.

    Per block, the first ell-1 coordinates are uniform and the last one
    fixes the block parity.  All free bits come from one getrandbits
    draw.
    """
    x, label = pair
    if x.length != params.base_n:
        raise ValueError(f"expected base length {params.base_n}, got {x.length}")
    ell = params.ell
    n = params.base_n
    free_all = rng.getrandbits(n * (ell - 1)) if ell > 1 and n else 0
    free_ones = (1 << (ell - 1)) - 1
    ym = 0
    xm = x.mask
    for i in range(n):
        free = (free_all >> (i * (ell - 1))) & free_ones
        last = (free.bit_count() & 1) ^ ((xm >> i) & 1)
        ym |= (free | (last << (ell - 1))) << (i * ell)
    return BitVector(params.lifted_n, ym), label


def lift_parity(s_star: ParityIndexSet, params: GadgetParams) -> ParityIndexSet:
    """Base index set to the union of its full blocks."""
    out = []
    for i in s_star:
        if i > params.base_n:
            raise ValueError(f"base index {i} out of range 1..{params.base_n}")
        start = (i - 1) * params.ell + 1
        out.extend(range(start, start + params.ell))
    return ParityIndexSet(tuple(out))


def unlift_parity(s: ParityIndexSet, params: GadgetParams) -> ParityIndexSet:
    """Blocks that a lifted index set touches."""
    return ParityIndexSet.from_iterable(params.block_of(c) for c in s)


def is_block_complete(s: ParityIndexSet, params: GadgetParams) -> bool:
    """True when every touched block is fully contained in s."""
    counts: dict[int, int] = {}
    for c in s:
        b = params.block_of(c)
        counts[b] = counts.get(b, 0) + 1
    return all(v == params.ell for v in counts.values())


def _block_split(s: ParityIndexSet, params: GadgetParams) -> tuple[list[int], bool]:
    """Full blocks of s (0-based), and whether any partial block exists."""
    counts: dict[int, int] = {}
    for c in s:
        b = (c - 1) // params.ell
        counts[b] = counts.get(b, 0) + 1
    full = [b for b, v in counts.items() if v == params.ell]
    partial = len(full) != len(counts)
    return full, partial


def exact_lifted_agreement(base, s: ParityIndexSet, params: GadgetParams) -> Fraction:
    """Exact probability that the parity matches the lifted label.

    Closed form per base point: the signed agreement is the base
    expectation of (-1)**label times the product of per-block character
    expectations, which is 0 for a partially covered block and
    (-1)**x_i for a fully covered block i.  No fibers are enumerated.
    """
    if s.indices and s.indices[-1] > params.lifted_n:
        raise ValueError("parity index exceeds the lifted arity")
    full, partial = _block_split(s, params)
    if partial:
        # Every term carries a zero factor from the partial block.
        return Fraction(1, 2)
    fmask = 0
    for b in full:
        fmask |= 1 << b
    corr = Fraction(0)
    for point, prob, label in base.enumerate_weighted():
        sign = (label ^ ((point.mask & fmask).bit_count() & 1)) & 1
        corr += -prob if sign else prob
    return (1 + corr) / 2


def _restriction_blocks(
    rho: Restriction, params: GadgetParams
) -> tuple[int, int, int, int]:
    """Decompose a restriction into (partial bit count, full block mask,
    required base bits on full blocks, restricted coordinate count)."""
    ell = params.ell
    counts: dict[int, int] = {}
    parities: dict[int, int] = {}
    for c, v in zip(rho.coords, rho.values):
        if c > params.lifted_n:
            raise ValueError(f"lifted coordinate {c} out of range")
        b = (c - 1) // ell
        counts[b] = counts.get(b, 0) + 1
        parities[b] = parities.get(b, 0) ^ v
    partial_bits = 0
    fmask = 0
    req = 0
    for b, cnt in counts.items():
        if cnt == ell:
            fmask |= 1 << b
            if parities[b]:
                req |= 1 << b
        else:
            partial_bits += cnt
    return partial_bits, fmask, req, len(rho.coords)


def exact_restriction_probability(
    base, rho: Restriction, params: GadgetParams
) -> Fraction:
    """Exact probability that a lifted draw matches the restriction.

    Per base point the blocks are independent: a partially restricted
    block matches with probability 2**-(restricted bits); a fully
    restricted block matches with probability 2**-(ell-1) when its
    required parity equals the base bit, otherwise never.
    """
    partial_bits, fmask, req, _ = _restriction_blocks(rho, params)
    full_count = fmask.bit_count()
    scale = Fraction(1, 1 << (partial_bits + (params.ell - 1) * full_count))
    hit = Fraction(0)
    for point, prob, _label in base.enumerate_weighted():
        if (point.mask & fmask) == req:
            hit += prob
    return scale * hit


def _paths(t: DecisionTree) -> Iterator[tuple[dict[int, int], int]]:
    """(assignment along the path, leaf label) for every leaf."""
    def walk(node: DecisionTree, fixed: dict[int, int]):
        if isinstance(node, Leaf):
            yield dict(fixed), node.label
            return
        assert isinstance(node, Node)
        fixed[node.coord] = 0
        yield from walk(node.low, fixed)
        fixed[node.coord] = 1
        yield from walk(node.high, fixed)
        del fixed[node.coord]
    yield from walk(t, {})


def exact_lifted_tree_error(tree: DecisionTree, base, params: GadgetParams) -> Fraction:
    """Exact disagreement of a tree with the lifted source.

    Sums over root-to-leaf paths: each path is a restriction, and
    conditioned on the base point the label of any consistent lifted
    string is the base label, so the path contributes its restriction
    probability over the base points whose label differs from the leaf.
    """
    support = list(base.enumerate_weighted())
    err = Fraction(0)
    for fixed, leaf_label in _paths(tree):
        rho = Restriction.of(fixed)
        partial_bits, fmask, req, _ = _restriction_blocks(rho, params)
        full_count = fmask.bit_count()
        scale = Fraction(1, 1 << (partial_bits + (params.ell - 1) * full_count))
        hit = Fraction(0)
        for point, prob, label in support:
            if label != leaf_label and (point.mask & fmask) == req:
                hit += prob
        err += scale * hit
    return err


def enumerate_lifted(
    base, params: GadgetParams, max_lifted_arity: int = 16
) -> Iterator[tuple[BitVector, Fraction, int]]:
    """Brute-force fiber enumeration of the lifted distribution.

    Every lifted string appears with its exact probability: the base
    point probability split uniformly over its 2**(n*(ell-1)) preimages.
    Cross-check oracle; exponential, capped by ``max_lifted_arity``.
    """
    if params.lifted_n > max_lifted_arity:
        raise ValueError(f"fiber enumeration capped at lifted arity {max_lifted_arity}")
    ell = params.ell
    n = params.base_n
    freebits = n * (ell - 1)
    free_ones = (1 << (ell - 1)) - 1
    for point, prob, label in base.enumerate_weighted():
        w = prob / (1 << freebits)
        xm = point.mask
        for free_all in range(1 << freebits):
            ym = 0
            for i in range(n):
                free = (free_all >> (i * (ell - 1))) & free_ones
                last = (free.bit_count() & 1) ^ ((xm >> i) & 1)
                ym |= (free | (last << (ell - 1))) << (i * ell)
            yield BitVector(params.lifted_n, ym), w, label
