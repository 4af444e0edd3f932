"""End-to-end pipelines: instances to lifted learning and back.

``build_learning_instance`` turns a syndrome instance into a lifted
example oracle: the rows of H labeled by t, extended to their span, and
pushed through the blockwise-parity gadget.  ``search`` runs a learner
on that oracle, prunes the hypothesis, reads candidate parities off its
path supports, folds each back to base coordinates, and keeps the first
candidate whose base parity reproduces every original label, which
makes any returned vector an exact solution of H x = t.  ``decide``
wraps the same learning step with explicit size and error thresholds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from random import Random

from .dtree import (
    DecisionTree,
    ParityIndexSet,
    estimate_distance,
    path_support_sets,
    prune,
    sample_size,
)
from .f2 import BitVector, mat_vec
from .gadget import (
    GadgetOracle,
    GadgetParams,
    exact_lifted_agreement,
    unlift_parity,
)
from .instance import (
    LabeledSet,
    SyndromeInstance,
    UnsatisfiableInstanceError,
    normalize_syndrome,
    syndrome_to_labeled_set,
)
from .learners import BudgetExhaustedError, LearnerBudget
from .span import SpanOracle, make_span_oracle

__all__ = [
    "ReductionConfig",
    "ReductionMeta",
    "DecideReport",
    "SearchReport",
    "build_learning_instance",
    "decide",
    "extract_parity",
    "search",
    "verify_certificate",
]

EXACT_BACKEND_MAX_DIMENSION = 20
EXTRACT_MAX_DEPTH = 30


@dataclass(frozen=True)
class ReductionConfig:
    """Knobs shared by the pipelines.

    ``gamma_floor`` is the smallest correlation advantage the sampling
    backend of the extractor must still resolve; ``learner_samples``
    and ``learner_time_budget`` fill the learner budget, the size and
    depth limits being derived from the instance.
    """

    ell: int = 2
    prune_constant: int = 3
    gamma_floor: Fraction = Fraction(1, 16)
    confidence: Fraction = Fraction(999, 1000)
    learner_samples: int = 2000
    learner_time_budget: float = 60.0

    def __post_init__(self) -> None:
        if self.ell < 2:
            raise ValueError("block width must be >= 2")
        if self.prune_constant < 2:
            raise ValueError("prune constant must be >= 2")
        if not 0 < self.gamma_floor < Fraction(1, 2):
            raise ValueError("gamma floor must lie in (0, 1/2)")
        if not 0 < self.confidence < 1:
            raise ValueError("confidence must lie strictly between 0 and 1")
        if self.learner_samples < 1:
            raise ValueError("learner sample budget must be positive")
        if self.learner_time_budget <= 0:
            raise ValueError("learner time budget must be positive")


@dataclass(frozen=True)
class ReductionMeta:
    """Shape of a built learning instance."""

    n: int
    m: int
    k: int
    alpha: Fraction
    ell: int
    arity: int


def build_learning_instance(
    inst: SyndromeInstance, cfg: ReductionConfig
) -> tuple[GadgetOracle, ReductionMeta]:
    """Lifted example oracle for an instance, plus its shape record.

    Normalizes first; an instance whose system is inconsistent raises
    ``UnsatisfiableInstanceError``.  Emitted examples have arity
    ell * n.  An instance with no rows yields the oracle over the
    all-even-blocks strings labeled 0.
    """
    norm = normalize_syndrome(inst)
    labeled = syndrome_to_labeled_set(norm)
    span = make_span_oracle(labeled)
    params = GadgetParams(cfg.ell, norm.n)
    meta = ReductionMeta(norm.n, norm.m, norm.k, norm.alpha, cfg.ell, params.lifted_n)
    return GadgetOracle(span, params), meta


@dataclass(frozen=True)
class DecideReport:
    """Outcome of the threshold decision procedure."""

    accepted: bool
    reason: str  # ok-yes | distance-gate | size-gate | learner-failed | unsatisfiable
    hypothesis_size: int | None
    estimate: Fraction | None
    size_cap: int
    error_gate: float
    tolerance: float
    meta: ReductionMeta | None
    hypothesis: DecisionTree | None = None


def _thresholds(inst: SyndromeInstance, cfg: ReductionConfig) -> tuple[int, float, float]:
    """Size cap, error gate and estimation tolerance for decide.

    With r = ell * alpha * k: trees of size up to 2**(r/3) on a far
    instance stay at distance at least 1/2 - 2**(-r/6), while a planted
    parity reaches distance 0, so the gate sits at
    1/2 - 2*2**(-r/6) plus a third of the gap.  Meaningful once r is
    large enough that the gate is positive (alpha >= 3 at ell*k >= 4).
    """
    r = cfg.ell * inst.alpha * inst.k
    size_cap = 1 << max(0, math.floor(r / 3))
    margin = 2.0 ** (-float(r) / 6.0)
    error_gate = 0.5 - 2.0 * margin
    tolerance = margin / 3.0
    return size_cap, error_gate, tolerance


def _learner_budget(size_cap: int, depth_cap: int, cfg: ReductionConfig) -> LearnerBudget:
    return LearnerBudget(
        size_budget=size_cap,
        depth_budget=depth_cap,
        sample_budget=cfg.learner_samples,
        time_budget=cfg.learner_time_budget,
    )


def decide(
    inst: SyndromeInstance, cfg: ReductionConfig, learner, rng: Random
) -> DecideReport:
    """Accept when a small learned tree tracks the lifted labels.

    Runs the learner with depth budget ell*k and size budget
    2**floor(ell*alpha*k/3), then estimates its distance to the lifted
    source within the derived tolerance at the configured confidence.
    Accepts exactly when the hypothesis fits the size cap and the
    estimate stays under the gate plus tolerance.  A learner that
    exhausts its budget, or an inconsistent system, is a rejection with
    the reason recorded.
    """
    size_cap, error_gate, tolerance = _thresholds(inst, cfg)
    try:
        oracle, meta = build_learning_instance(inst, cfg)
    except UnsatisfiableInstanceError:
        return DecideReport(False, "unsatisfiable", None, None, size_cap, error_gate, tolerance, None)
    budget = _learner_budget(size_cap, cfg.ell * inst.k, cfg)
    try:
        tree = learner(oracle, meta.arity, budget, rng)
    except BudgetExhaustedError:
        return DecideReport(False, "learner-failed", None, None, size_cap, error_gate, tolerance, meta)
    if tree.size > size_cap:
        return DecideReport(False, "size-gate", tree.size, None, size_cap, error_gate, tolerance, meta, tree)
    est = estimate_distance(tree, oracle, tolerance, float(cfg.confidence), rng)
    if float(est) <= error_gate + tolerance:
        return DecideReport(True, "ok-yes", tree.size, est, size_cap, error_gate, tolerance, meta, tree)
    return DecideReport(False, "distance-gate", tree.size, est, size_cap, error_gate, tolerance, meta, tree)


def extract_parity(
    tree: DecisionTree, oracle: GadgetOracle, cfg: ReductionConfig, rng: Random
) -> list[tuple[ParityIndexSet, Fraction]]:
    """Candidate parities from the tree's path supports, best first.

    Agreement with the lifted source is exact whenever the base span
    dimension allows enumeration; otherwise it is estimated from one
    shared sample sized so every candidate lands within
    gamma_floor / (4 * 4**depth) at the configured confidence (union
    bound over the candidates).  Sorting is by agreement descending,
    then smaller sets, then lexicographic order, so the ranking is
    total.

    If the tree sits at distance 1/2 - gamma from the source, the top
    candidate has agreement at least 1/2 + gamma / 4**depth under the
    exact backend.
    """
    d = tree.depth
    if d > EXTRACT_MAX_DEPTH:
        raise ValueError(f"extraction capped at tree depth {EXTRACT_MAX_DEPTH}")
    candidates = sorted(path_support_sets(tree), key=lambda s: (len(s), s.indices))
    base = oracle.base
    exact = isinstance(base, SpanOracle) and base.dimension <= EXACT_BACKEND_MAX_DIMENSION
    scored: list[tuple[ParityIndexSet, Fraction]] = []
    if exact:
        for s in candidates:
            scored.append((s, exact_lifted_agreement(base, s, oracle.params)))
    else:
        tol = float(cfg.gamma_floor) / (4.0 * 4.0**d)
        per_candidate = (1.0 - float(cfg.confidence)) / max(1, len(candidates))
        nsamp = sample_size(tol, 1.0 - per_candidate)
        drawn = [oracle.sample(rng) for _ in range(nsamp)]
        for s in candidates:
            hits = sum(1 for point, label in drawn if s.chi_mask(point.mask) == label)
            scored.append((s, Fraction(hits, nsamp)))
    scored.sort(key=lambda item: (-item[1], len(item[0]), item[0].indices))
    return scored


@dataclass(frozen=True)
class SearchReport:
    """Outcome of the certificate search pipeline."""

    solution: BitVector | None
    reason: str  # ok | unsatisfiable | learner-budget | no-candidate-verified
    hypothesis_size: int | None
    pruned_depth: int | None
    candidates: int
    meta: ReductionMeta | None
    hypothesis: DecisionTree | None = None

    @property
    def ok(self) -> bool:
        return self.solution is not None


def _consistent_on_all(s_star: ParityIndexSet, labeled: LabeledSet) -> bool:
    m = s_star.mask
    for point, label in zip(labeled.points, labeled.labels):
        if (m & point.mask).bit_count() & 1 != label:
            return False
    return True


def search(
    inst: SyndromeInstance, cfg: ReductionConfig, learner, rng: Random
) -> SearchReport:
    """Learn, prune, extract, fold back, and verify exactly.

    The learner gets depth budget ell*k and size budget 2**(ell*k); the
    hypothesis is pruned at prune_constant * ceil(log2(size)); every
    candidate parity is folded to base blocks and checked against every
    labeled row.  Only candidates whose folded support stays within
    prune_constant * ceil(log2(size)) / ell coordinates are kept, so a
    returned vector always satisfies H x = t with sparsity within that
    bound; failures report which stage gave out.
    """
    try:
        norm = normalize_syndrome(inst)
        oracle, meta = build_learning_instance(norm, cfg)
    except UnsatisfiableInstanceError:
        return SearchReport(None, "unsatisfiable", None, None, 0, None)
    labeled = syndrome_to_labeled_set(norm)
    depth_cap = cfg.ell * norm.k
    budget = _learner_budget(1 << depth_cap, depth_cap, cfg)
    try:
        tree = learner(oracle, meta.arity, budget, rng)
    except BudgetExhaustedError:
        return SearchReport(None, "learner-budget", None, None, 0, meta)
    log_size = max(1, tree.size).bit_length() - 1
    if 1 << log_size != tree.size:
        log_size += 1  # ceil(log2(size))
    prune_depth = cfg.prune_constant * log_size
    pruned = prune(tree, prune_depth)
    ranked = extract_parity(pruned, oracle, cfg, rng)
    sparsity_cap = Fraction(cfg.prune_constant * log_size, cfg.ell)
    for s, _agreement in ranked:
        s_star = unlift_parity(s, oracle.params)
        if len(s_star) > sparsity_cap:
            continue
        if not _consistent_on_all(s_star, labeled):
            continue
        x = BitVector.from_support(s_star.indices, norm.n)
        if mat_vec(inst.h, x).mask != inst.t.mask:
            # Unreachable when normalization succeeded; never return an
            # unverified vector regardless.
            continue
        return SearchReport(x, "ok", tree.size, prune_depth, len(ranked), meta, pruned)
    return SearchReport(None, "no-candidate-verified", tree.size, prune_depth, len(ranked), meta, pruned)


def verify_certificate(inst: SyndromeInstance, x: BitVector, k_max: int) -> bool:
    """Exact check: H x = t and sparsity within the cap."""
    if x.length != inst.n:
        raise ValueError(f"certificate length {x.length} does not match n={inst.n}")
    return mat_vec(inst.h, x).mask == inst.t.mask and x.sparsity <= k_max
