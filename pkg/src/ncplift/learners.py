"""Proper decision-tree learners over labeled-example oracles.

A learner is any callable ``learner(oracle, arity, budget, rng)``
returning a decision tree whose size and depth respect the budget (a
hard contract).  ``oracle.sample(rng)`` must yield (point, label)
pairs.  On an expired time budget a learner raises
``BudgetExhaustedError`` carrying the best tree found so far.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from random import Random

from .dtree import DecisionTree, Leaf, Node, ParityIndexSet, complement_tree

__all__ = [
    "LearnerBudget",
    "BudgetExhaustedError",
    "parity_to_tree",
    "exhaustive_parity_learner",
    "greedy_learner",
    "planted_learner",
]


@dataclass(frozen=True)
class LearnerBudget:
    """Resource limits a learner must respect.

    ``error_target`` is advisory for learners that can stop early; the
    size and depth limits are binding on the returned tree.
    """

    size_budget: int
    depth_budget: int
    sample_budget: int
    error_target: Fraction = Fraction(1, 4)
    time_budget: float = 60.0

    def __post_init__(self) -> None:
        if self.size_budget < 1 or self.depth_budget < 0 or self.sample_budget < 1:
            raise ValueError("budgets must be positive")
        if not 0 < self.error_target < Fraction(1, 2):
            raise ValueError("error target must lie in (0, 1/2)")
        if self.time_budget <= 0:
            raise ValueError("time budget must be positive")


class BudgetExhaustedError(RuntimeError):
    """Time budget ran out; ``best_tree`` holds the best tree so far."""

    def __init__(self, message: str, best_tree: DecisionTree | None) -> None:
        super().__init__(message)
        self.best_tree = best_tree


def parity_to_tree(s: ParityIndexSet) -> DecisionTree:
    """Complete tree computing the parity over s.

    Queries the indices in ascending order on every path; each leaf is
    the parity of the branch decisions, so the tree has depth len(s)
    and size 2**len(s).  The empty set gives Leaf(0).
    """
    def build(pos: int, acc: int) -> DecisionTree:
        if pos == len(s.indices):
            return Leaf(acc)
        return Node(s.indices[pos], build(pos + 1, acc), build(pos + 1, acc ^ 1))
    return build(0, 0)


def _draw_samples(oracle, budget: LearnerBudget, rng: Random) -> list[tuple[int, int]]:
    out = []
    for _ in range(budget.sample_budget):
        point, label = oracle.sample(rng)
        out.append((point.mask, label))
    return out


def exhaustive_parity_learner(
    oracle, arity: int, budget: LearnerBudget, rng: Random
) -> DecisionTree:
    """Best parity (or complemented parity) on a fresh sample.

    Scans every index set S with ``|S| <= depth_budget`` (also capped so
    the output tree fits the size budget), in ascending size and then
    lexicographic order, considering the plain parity before the
    complemented one; the first candidate achieving the minimum
    empirical error wins, so ties break toward smaller, earlier, plain
    candidates.  With depth budget 0 this returns the better constant.

    The scan packs the sample into per-coordinate bit columns, so a
    candidate costs a few word XORs and one popcount.
    """
    if budget.depth_budget > arity:
        raise ValueError("depth budget exceeds the arity")
    samples = _draw_samples(oracle, budget, rng)
    nsamp = len(samples)
    cols = [0] * arity
    label_col = 0
    for row, (mask, label) in enumerate(samples):
        bit = 1 << row
        if label:
            label_col |= bit
        while mask:
            low = mask & -mask
            cols[low.bit_length() - 1] |= bit
            mask ^= low
    max_size = min(budget.depth_budget, budget.size_budget.bit_length() - 1)
    deadline = time.monotonic() + budget.time_budget
    best_err = nsamp + 1
    best: tuple[tuple[int, ...], bool] | None = None
    done = False
    for size in range(max_size + 1):
        if done:
            break
        checked = 0
        for combo in combinations(range(arity), size):
            acc = 0
            for j in combo:
                acc ^= cols[j]
            err = (acc ^ label_col).bit_count()
            if err < best_err:
                best_err, best = err, (combo, False)
            if nsamp - err < best_err:
                best_err, best = nsamp - err, (combo, True)
            if best_err == 0:
                done = True
                break
            checked += 1
            if checked & 1023 == 0 and time.monotonic() > deadline:
                raise BudgetExhaustedError(
                    "time budget exhausted during the parity scan",
                    _build_parity(best),
                )
        if time.monotonic() > deadline and not done:
            raise BudgetExhaustedError(
                "time budget exhausted during the parity scan",
                _build_parity(best),
            )
    return _build_parity(best)


def _build_parity(best: tuple[tuple[int, ...], bool] | None) -> DecisionTree:
    if best is None:
        return Leaf(0)
    combo, flipped = best
    tree = parity_to_tree(ParityIndexSet(tuple(j + 1 for j in combo)))
    return complement_tree(tree) if flipped else tree


def greedy_learner(oracle, arity: int, budget: LearnerBudget, rng: Random) -> DecisionTree:
    """Top-down splits by empirical error reduction.

    At each node the split coordinate is the unused one whose majority
    labels on both sides remove the most empirical errors; ties go to
    the lowest index, and a node becomes a leaf when no split strictly
    helps, the sample is pure, or a budget limit is reached.  Majority
    ties label 0.
    """
    samples = _draw_samples(oracle, budget, rng)
    splits_left = [budget.size_budget - 1]
    deadline = time.monotonic() + budget.time_budget

    def majority(subset: list[tuple[int, int]]) -> tuple[int, int]:
        ones = sum(label for _, label in subset)
        zeros = len(subset) - ones
        if ones > zeros:
            return 1, zeros
        return 0, ones

    def build(subset: list[tuple[int, int]], used: int, depth: int) -> DecisionTree:
        maj, err = majority(subset)
        if err == 0 or depth == budget.depth_budget or splits_left[0] == 0:
            return Leaf(maj)
        if time.monotonic() > deadline:
            raise BudgetExhaustedError("time budget exhausted during splitting", Leaf(maj))
        best_gain = 0
        best_coord = None
        for j in range(arity):
            bit = 1 << j
            if used & bit:
                continue
            lo_ones = lo_n = hi_ones = hi_n = 0
            for mask, label in subset:
                if mask & bit:
                    hi_n += 1
                    hi_ones += label
                else:
                    lo_n += 1
                    lo_ones += label
            split_err = min(lo_ones, lo_n - lo_ones) + min(hi_ones, hi_n - hi_ones)
            gain = err - split_err
            if gain > best_gain:
                best_gain, best_coord = gain, j
        if best_coord is None:
            return Leaf(maj)
        splits_left[0] -= 1
        bit = 1 << best_coord
        lo = [sv for sv in subset if not sv[0] & bit]
        hi = [sv for sv in subset if sv[0] & bit]
        low = build(lo, used | bit, depth + 1)
        high = build(hi, used | bit, depth + 1)
        return Node(best_coord + 1, low, high)

    return build(samples, 0, 0)


def planted_learner(s: ParityIndexSet):
    """Learner that ignores its examples and returns the given parity.

    Test double for exercising the downstream pipeline with a known
    hypothesis.
    """
    def learner(oracle, arity: int, budget: LearnerBudget, rng: Random) -> DecisionTree:
        return parity_to_tree(s)
    return learner
