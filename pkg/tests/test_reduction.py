"""End-to-end pipelines: learn on lifted examples, decide or extract."""

import random
from fractions import Fraction

import pytest

from ncplift.dtree import Leaf, Node, ParityIndexSet
from ncplift.learners import parity_to_tree
from ncplift.f2 import BitMatrix, BitVector, mat_vec
from ncplift.gadget import GadgetOracle, GadgetParams, lift_parity
from ncplift.instance import (
    LabeledSet,
    SyndromeInstance,
    brute_force_nearest,
    random_planted,
)
from ncplift.learners import (
    BudgetExhaustedError,
    exhaustive_parity_learner,
    planted_learner,
)
from ncplift.reduction import (
    ReductionConfig,
    build_learning_instance,
    decide,
    extract_parity,
    search,
    verify_certificate,
)
from ncplift.span import SpanOracle, make_span_oracle

CFG = ReductionConfig()


def index_set(*indices):
    return ParityIndexSet.from_iterable(indices)


def failing_learner(oracle, arity, budget, rng):
    raise BudgetExhaustedError("deliberately out of time", Leaf(0))


def parity_lifted_oracle(n, s_star, ell=2):
    """Lifted oracle over the full cube labeled by the base parity."""
    points = tuple(BitVector(n, 1 << i) for i in range(n))
    labels = tuple(1 if (i + 1) in s_star else 0 for i in range(n))
    span = make_span_oracle(LabeledSet(points, labels, n))
    return GadgetOracle(span, GadgetParams(ell, n))


def far_instance():
    # Identity system with an all-ones target: the unique solution has
    # weight 6, so nothing of sparsity <= 3 * 1 exists.
    inst = SyndromeInstance(
        BitMatrix.identity(6), BitVector.from01("111111"), 1, Fraction(3)
    )
    assert brute_force_nearest(inst, 3) is None
    return inst


# ---------------------------------------------------------------- config


def test_config_validation():
    ReductionConfig()
    with pytest.raises(ValueError):
        ReductionConfig(ell=1)
    with pytest.raises(ValueError):
        ReductionConfig(prune_constant=1)
    with pytest.raises(ValueError):
        ReductionConfig(gamma_floor=Fraction(1, 2))
    with pytest.raises(ValueError):
        ReductionConfig(confidence=Fraction(1))
    with pytest.raises(ValueError):
        ReductionConfig(learner_samples=0)


# ---------------------------------------------------------------- instances


def test_build_learning_instance_shape():
    inst, _x = random_planted(8, 5, 2, 17)
    oracle, meta = build_learning_instance(inst, CFG)
    assert meta.n == 8 and meta.m == 5 and meta.k == 2
    assert meta.ell == 2
    assert meta.arity == 16
    assert oracle.length == 16


def test_lifted_labels_follow_planted_parity():
    # With labels planted on support x, every enumerated lifted example
    # is labeled by the lifted parity of that support.
    inst, x = random_planted(5, 4, 2, 23)
    oracle, _ = build_learning_instance(inst, CFG)
    lifted = lift_parity(index_set(*x.support()), oracle.params)
    count = 0
    for point, w, label in oracle.enumerate_weighted():
        assert w > 0
        assert label == lifted.chi(point)
        count += 1
    # One entry per span element and free fiber bit pattern.
    assert count == 1 << (4 + 5)


def test_build_learning_instance_rejects_contradiction():
    from ncplift.instance import UnsatisfiableInstanceError

    inst = SyndromeInstance(
        BitMatrix.from_rows(["11", "11"]), BitVector.from01("10"), 1, Fraction(1)
    )
    with pytest.raises(UnsatisfiableInstanceError):
        build_learning_instance(inst, CFG)


# ---------------------------------------------------------------- decide


def test_decide_thresholds_at_twelve():
    # ell * alpha * k = 12: size cap 2**4, gate exactly 0, tolerance
    # 2**-2 / 3.
    inst, _ = random_planted(14, 10, 2, 1)
    inst = SyndromeInstance(inst.h, inst.t, inst.k, Fraction(3))
    report = decide(inst, CFG, planted_learner(index_set()), random.Random(0))
    assert report.size_cap == 16
    assert report.error_gate == 0.0
    assert report.tolerance == 0.25 / 3.0


def test_decide_accepts_planted():
    for seed in (2, 5, 11):
        raw, _ = random_planted(14, 12, 2, seed)
        inst = SyndromeInstance(raw.h, raw.t, raw.k, Fraction(3))
        report = decide(
            inst, CFG, exhaustive_parity_learner, random.Random(100 + seed)
        )
        assert report.accepted
        assert report.reason == "ok-yes"
        assert report.hypothesis is not None
        assert report.hypothesis_size == report.hypothesis.size <= report.size_cap
        assert float(report.estimate) <= report.error_gate + report.tolerance


def test_decide_rejects_far_instance():
    report = decide(
        far_instance(), CFG, planted_learner(index_set()), random.Random(3)
    )
    assert not report.accepted
    assert report.reason == "distance-gate"
    # Leaf(0) misses about half the lifted labels, far above the gate.
    assert float(report.estimate) > report.error_gate + report.tolerance


def test_decide_size_gate():
    # A planted hypothesis of depth 5 has size 32 over cap 16.
    raw, _ = random_planted(14, 10, 2, 7)
    inst = SyndromeInstance(raw.h, raw.t, raw.k, Fraction(3))
    big = index_set(1, 3, 5, 7, 9)
    report = decide(inst, CFG, planted_learner(big), random.Random(0))
    assert not report.accepted
    assert report.reason == "size-gate"
    assert report.hypothesis_size == 32
    assert report.estimate is None


def test_decide_learner_failure():
    raw, _ = random_planted(10, 6, 2, 9)
    inst = SyndromeInstance(raw.h, raw.t, raw.k, Fraction(3))
    report = decide(inst, CFG, failing_learner, random.Random(0))
    assert not report.accepted
    assert report.reason == "learner-failed"


def test_decide_unsatisfiable():
    inst = SyndromeInstance(
        BitMatrix.from_rows(["11", "11"]), BitVector.from01("10"), 2, Fraction(3)
    )
    report = decide(inst, CFG, exhaustive_parity_learner, random.Random(0))
    assert not report.accepted
    assert report.reason == "unsatisfiable"


# ---------------------------------------------------------------- extraction


def test_extract_parity_from_its_own_tree():
    s_star = index_set(2, 4)
    oracle = parity_lifted_oracle(5, s_star)
    lifted = lift_parity(s_star, oracle.params)
    tree = parity_to_tree(lifted)
    ranked = extract_parity(tree, oracle, CFG, random.Random(0))
    assert ranked[0] == (lifted, Fraction(1))
    # Every other candidate sits strictly below.
    for s, agr in ranked[1:]:
        assert agr < 1


def test_extract_constant_tree_is_balanced():
    oracle = parity_lifted_oracle(4, index_set(1, 3))
    ranked = extract_parity(Leaf(0), oracle, CFG, random.Random(0))
    assert ranked == [(index_set(), Fraction(1, 2))]


def test_extract_ranking_is_total_and_exact():
    # Exact backend: scores equal the closed-form agreement and the
    # order follows (agreement desc, size asc, lexicographic).
    from ncplift.gadget import exact_lifted_agreement

    oracle = parity_lifted_oracle(4, index_set(2))
    tree = Node(1, Node(2, Leaf(0), Leaf(1)), Node(3, Leaf(1), Leaf(0)))
    ranked = extract_parity(tree, oracle, CFG, random.Random(0))
    assert len(ranked) == len({s for s, _ in ranked})
    for s, agr in ranked:
        assert agr == exact_lifted_agreement(oracle.base, s, oracle.params)
    keys = [(-agr, len(s), s.indices) for s, agr in ranked]
    assert keys == sorted(keys)


def test_extract_sampling_backend_on_wide_span():
    # Base dimension 21 exceeds the exact backend cap, so agreement is
    # estimated; for the empty parity it must land near one half.
    n = 21
    points = tuple(BitVector(n, 1 << i) for i in range(n))
    labels = tuple([1] + [0] * (n - 1))
    span = make_span_oracle(LabeledSet(points, labels, n))
    assert isinstance(span, SpanOracle) and span.dimension == 21
    oracle = GadgetOracle(span, GadgetParams(2, n))
    ranked = extract_parity(Leaf(0), oracle, CFG, random.Random(4))
    assert len(ranked) == 1
    s, agr = ranked[0]
    assert s == index_set()
    assert abs(agr - Fraction(1, 2)) <= Fraction(1, 32)


def test_extract_depth_cap():
    deep = Leaf(0)
    for c in range(31, 0, -1):
        deep = Node(c, deep, Leaf(1))
    oracle = parity_lifted_oracle(16, index_set(1))
    with pytest.raises(ValueError):
        extract_parity(deep, oracle, CFG, random.Random(0))


# ---------------------------------------------------------------- search


def test_search_recovers_planted_solution():
    inst, x = random_planted(14, 10, 2, 1)
    report = search(inst, CFG, exhaustive_parity_learner, random.Random(7000001))
    assert report.ok
    assert report.solution == x
    assert report.reason == "ok"
    assert verify_certificate(inst, report.solution, CFG.prune_constant * inst.k)
    assert report.hypothesis is not None
    assert report.hypothesis.depth <= report.pruned_depth


def test_search_with_planted_hint_returns_exact_vector():
    inst, x = random_planted(12, 8, 3, 77)
    params = GadgetParams(CFG.ell, 12)
    hint = planted_learner(lift_parity(index_set(*x.support()), params))
    report = search(inst, CFG, hint, random.Random(0))
    assert report.ok
    assert report.solution == x


def test_search_zero_target_returns_zero_vector():
    h = BitMatrix.from_rows(["1010", "0110"])
    inst = SyndromeInstance(h, BitVector.zeros(2), 1, Fraction(1))
    report = search(inst, CFG, exhaustive_parity_learner, random.Random(5))
    assert report.ok
    assert report.solution == BitVector.zeros(4)


def test_search_unsatisfiable():
    inst = SyndromeInstance(
        BitMatrix.from_rows(["11", "11"]), BitVector.from01("10"), 1, Fraction(1)
    )
    report = search(inst, CFG, exhaustive_parity_learner, random.Random(0))
    assert not report.ok
    assert report.reason == "unsatisfiable"


def test_search_learner_budget_failure():
    inst, _ = random_planted(10, 6, 2, 13)
    report = search(inst, CFG, failing_learner, random.Random(0))
    assert not report.ok
    assert report.reason == "learner-budget"


def test_search_reports_unverified_candidates():
    # A constant hypothesis only offers the empty parity, which cannot
    # match a nonzero target.
    inst, _ = random_planted(10, 6, 2, 19)
    assert inst.t.mask != 0
    report = search(inst, CFG, planted_learner(index_set()), random.Random(0))
    assert not report.ok
    assert report.reason == "no-candidate-verified"
    assert report.candidates == 1


def test_search_many_planted_seeds():
    hits = 0
    for seed in range(1, 26):
        inst, _x = random_planted(14, 10, 2, seed)
        report = search(
            inst, CFG, exhaustive_parity_learner, random.Random(7_000_000 + seed)
        )
        if report.ok:
            assert verify_certificate(
                inst, report.solution, CFG.prune_constant * inst.k
            )
            assert mat_vec(inst.h, report.solution) == inst.t
            hits += 1
    assert hits >= 24


# ---------------------------------------------------------------- certificates


def test_verify_certificate():
    h = BitMatrix.from_rows(["110", "011"])
    inst = SyndromeInstance(h, BitVector.from01("10"), 1, Fraction(1))
    good = BitVector.from01("100")
    assert mat_vec(h, good) == inst.t
    assert verify_certificate(inst, good, 1)
    assert not verify_certificate(inst, BitVector.from01("010"), 1)  # wrong image
    assert not verify_certificate(inst, BitVector.from01("111"), 2)  # too heavy
    with pytest.raises(ValueError):
        verify_certificate(inst, BitVector.from01("10"), 1)
