"""Learners over example oracles: exhaustive parity scan and greedy splits."""

import itertools
import random
from fractions import Fraction

import pytest

from ncplift.dtree import Leaf, Node, ParityIndexSet, eval_tree, parse_tree, truth_table
from ncplift.f2 import BitMatrix, BitVector, rank
from ncplift.gadget import FinitePmf
from ncplift.instance import LabeledSet
from ncplift.learners import (
    BudgetExhaustedError,
    LearnerBudget,
    exhaustive_parity_learner,
    greedy_learner,
    parity_to_tree,
    planted_learner,
)
from ncplift.span import make_span_oracle


def index_set(*indices):
    return ParityIndexSet.from_iterable(indices)


class CycleOracle:
    """Deterministic oracle cycling through a fixed sample list."""

    def __init__(self, pairs, length):
        self.pairs = [(BitVector.from01(b), lab) for b, lab in pairs]
        self.length = length
        self.pos = 0

    def sample(self, rng):
        pair = self.pairs[self.pos % len(self.pairs)]
        self.pos += 1
        return pair


def pmf_oracle(bits_labels_weights, length):
    total = sum(w for _, _, w in bits_labels_weights)
    pts = tuple(BitVector.from01(b) for b, _, _ in bits_labels_weights)
    labs = tuple(lab for _, lab, _ in bits_labels_weights)
    probs = tuple(Fraction(w, total) for _, _, w in bits_labels_weights)
    return FinitePmf(pts, probs, labs, length)


def parity_span_oracle(rng, n, s):
    """Full-cube span with labels given by the parity over s."""
    points = tuple(BitVector(n, 1 << i) for i in range(n))
    labels = tuple(1 if (i + 1) in s else 0 for i in range(n))
    return make_span_oracle(LabeledSet(points, labels, n))


def budget(size=16, depth=4, samples=200, time_budget=60.0):
    return LearnerBudget(size, depth, samples, time_budget=time_budget)


# ---------------------------------------------------------------- plumbing


def test_budget_validation():
    budget()
    with pytest.raises(ValueError):
        LearnerBudget(0, 1, 10)
    with pytest.raises(ValueError):
        LearnerBudget(1, -1, 10)
    with pytest.raises(ValueError):
        LearnerBudget(1, 1, 10, error_target=Fraction(1, 2))
    with pytest.raises(ValueError):
        LearnerBudget(1, 1, 10, time_budget=0.0)


def test_parity_to_tree_shapes():
    assert parity_to_tree(index_set()) == Leaf(0)
    assert parity_to_tree(index_set(3)) == Node(3, Leaf(0), Leaf(1))
    t = parity_to_tree(index_set(1, 2))
    assert t.size == 4 and t.depth == 2
    for ym in range(4):
        y = BitVector(2, ym)
        assert eval_tree(t, y) == index_set(1, 2).chi(y)


def test_parity_tree_queries_ascending():
    t = parity_to_tree(index_set(2, 5))
    assert t == Node(
        2,
        Node(5, Leaf(0), Leaf(1)),
        Node(5, Leaf(1), Leaf(0)),
    )


def test_planted_learner_ignores_oracle():
    learner = planted_learner(index_set(1, 3))
    tree = learner(object(), 4, budget(), random.Random(0))
    assert tree == parity_to_tree(index_set(1, 3))


# ---------------------------------------------------------------- exhaustive


def test_exhaustive_recovers_planted_parity():
    # 100 seeded runs; the sample is large enough that every other
    # candidate parity misclassifies some drawn point.
    hits = 0
    for seed in range(100):
        rng = random.Random(seed)
        n = rng.randint(3, 8)
        size = rng.randint(0, 3)
        s = ParityIndexSet.from_iterable(rng.sample(range(1, n + 1), size))
        oracle = parity_span_oracle(rng, n, s)
        tree = exhaustive_parity_learner(
            oracle, n, budget(size=8, depth=3, samples=200), random.Random(seed)
        )
        if tree == parity_to_tree(s):
            hits += 1
    assert hits == 100


def test_exhaustive_depth_zero_returns_better_constant():
    oracle = pmf_oracle([("0", 1, 3), ("1", 0, 1)], 1)
    tree = exhaustive_parity_learner(
        oracle, 1, budget(size=16, depth=0, samples=400), random.Random(5)
    )
    assert tree == Leaf(1)


def test_exhaustive_is_deterministic_given_seed():
    rng_oracle = random.Random(7)
    oracle = parity_span_oracle(rng_oracle, 6, index_set(2, 4))
    a = exhaustive_parity_learner(oracle, 6, budget(), random.Random(11))
    b = exhaustive_parity_learner(oracle, 6, budget(), random.Random(11))
    assert a == b


def test_exhaustive_matches_independent_enumeration():
    # Replay the same sample and grade every candidate by hand; the
    # returned tree must reach the minimum error.
    for seed in range(20):
        rng = random.Random(200 + seed)
        n = rng.randint(2, 6)
        masks = []
        while True:
            masks = [rng.getrandbits(n) for _ in range(n)]
            if rank(BitMatrix(n, n, tuple(masks))) == n:
                break
        labels = tuple(rng.getrandbits(1) for _ in range(n))
        oracle = make_span_oracle(
            LabeledSet(tuple(BitVector(n, mk) for mk in masks), labels, n)
        )
        bud = budget(size=16, depth=min(n, 3), samples=64)
        tree = exhaustive_parity_learner(oracle, n, bud, random.Random(seed))

        rng_replay = random.Random(seed)
        sample = [oracle.sample(rng_replay) for _ in range(bud.sample_budget)]
        best = min(
            sum(1 if s.chi(p) != lab else 0 for p, lab in sample) if not flip
            else sum(1 if s.chi(p) == lab else 0 for p, lab in sample)
            for size in range(0, min(n, 3) + 1)
            for picks in itertools.combinations(range(1, n + 1), size)
            for s in [ParityIndexSet.from_iterable(picks)]
            for flip in (False, True)
        )
        got = sum(1 for p, lab in sample if eval_tree(tree, p) != lab)
        assert got == best


def test_exhaustive_prefers_smaller_support_on_ties():
    # Coordinate 2 is identically zero on the span, so the singleton
    # equals the pair on every sample; the smaller support wins.
    oracle = make_span_oracle(
        LabeledSet((BitVector.from01("10"),), (1,), 2)
    )
    tree = exhaustive_parity_learner(
        oracle, 2, budget(size=4, depth=2, samples=50), random.Random(3)
    )
    assert tree == parity_to_tree(index_set(1))


def test_exhaustive_respects_size_budget_over_depth():
    # A size budget of 1 restricts the scan to constants even when the
    # depth budget allows more.
    oracle = pmf_oracle([("00", 0, 1), ("11", 1, 1)], 2)
    tree = exhaustive_parity_learner(
        oracle, 2, LearnerBudget(1, 2, 100), random.Random(1)
    )
    assert isinstance(tree, Leaf)


def test_exhaustive_hard_contract_on_random_oracles():
    rng = random.Random(31)
    for _ in range(20):
        n = rng.randint(2, 7)
        m = rng.randint(1, n)
        while True:
            masks = tuple(rng.getrandbits(n) for _ in range(m))
            if rank(BitMatrix(m, n, masks)) == m:
                break
        oracle = make_span_oracle(
            LabeledSet(
                tuple(BitVector(n, mk) for mk in masks),
                tuple(rng.getrandbits(1) for _ in range(m)),
                n,
            )
        )
        size_b = rng.choice([1, 2, 4, 8])
        depth_b = rng.randint(0, n)
        tree = exhaustive_parity_learner(
            oracle, n, LearnerBudget(size_b, depth_b, 64), random.Random(rng.random())
        )
        assert tree.size <= size_b
        assert tree.depth <= depth_b


def test_exhaustive_rejects_depth_beyond_arity():
    oracle = pmf_oracle([("0", 0, 1)], 1)
    with pytest.raises(ValueError):
        exhaustive_parity_learner(oracle, 1, budget(depth=2), random.Random(0))


def test_exhaustive_time_budget_carries_best_tree():
    # Conjunction labels admit no zero-error parity, so the scan cannot
    # finish early, and a vanishing time budget must surface the best
    # constant found in the first tier.
    oracle = pmf_oracle(
        [("00", 0, 1), ("01", 0, 1), ("10", 0, 1), ("11", 1, 1)], 2
    )
    with pytest.raises(BudgetExhaustedError) as exc:
        exhaustive_parity_learner(
            oracle,
            2,
            LearnerBudget(8, 2, 64, time_budget=1e-9),
            random.Random(2),
        )
    assert exc.value.best_tree == Leaf(0)


# ---------------------------------------------------------------- greedy


def test_greedy_splits_on_dictator_first():
    # Labels equal coordinate 1; with 10**3 samples the first split must
    # pick it, across 100 seeded runs.
    for seed in range(100):
        oracle = parity_span_oracle(random.Random(seed), 4, index_set(1))
        tree = greedy_learner(
            oracle, 4, budget(size=16, depth=4, samples=1000), random.Random(seed)
        )
        assert isinstance(tree, Node)
        assert tree.coord == 1
        tt = truth_table(tree, 4)
        for ym in range(16):
            assert (tt >> ym) & 1 == ym & 1


def test_greedy_pure_sample_is_single_leaf():
    oracle = CycleOracle([("0110", 1)], 4)
    tree = greedy_learner(oracle, 4, budget(), random.Random(0))
    assert tree == Leaf(1)


def test_greedy_majority_tie_breaks_to_zero():
    # Two equally frequent labels on one point: no split helps, and the
    # tied majority resolves to 0.
    oracle = CycleOracle([("00", 1), ("00", 0)], 2)
    tree = greedy_learner(oracle, 2, budget(samples=10), random.Random(0))
    assert tree == Leaf(0)


def test_greedy_respects_budgets():
    rng = random.Random(41)
    for _ in range(20):
        n = rng.randint(2, 6)
        pairs = [
            (format(rng.getrandbits(n), f"0{n}b"), rng.getrandbits(1))
            for _ in range(8)
        ]
        oracle = CycleOracle(pairs, n)
        size_b = rng.choice([1, 2, 3, 5])
        depth_b = rng.randint(0, 3)
        tree = greedy_learner(
            oracle, n, LearnerBudget(size_b, depth_b, 64), random.Random(1)
        )
        assert tree.size <= size_b
        assert tree.depth <= depth_b


def test_greedy_time_budget_carries_majority_leaf():
    oracle = CycleOracle([("01", 1), ("10", 0), ("11", 1)], 2)
    with pytest.raises(BudgetExhaustedError) as exc:
        greedy_learner(
            oracle, 2, LearnerBudget(8, 2, 30, time_budget=1e-9), random.Random(0)
        )
    assert exc.value.best_tree == Leaf(1)
