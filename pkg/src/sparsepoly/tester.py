"""Test-Sparse-Poly and its two subroutines.

The tester partitions the coordinates at random, estimates the variation
of every subset, zeroes the low-variation subsets, checks that this barely
changes f, and then learns the remaining function over one implicit
variable per high-variation subset.  Membership queries of the learner are
answered by SimMQ, which uses SHIV to set the single high-variation
variable of each subset without ever learning which variable it is.

A failed SHIV call aborts the learning run and the tester rejects with
reason shiv-failed.  A learner that cannot enumerate its n' variables under
the enumeration cap rejects with reason learner-too-large.
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional, Sequence, Tuple

import numpy as np

from sparsepoly import config
from sparsepoly.blackbox import BlackBox, Phase, QueryLedger, zero_restricted_oracle
from sparsepoly.errors import CapExceeded, DimensionError, ParameterError
from sparsepoly.formats import format_poly
from sparsepoly.gf2poly import SparsePoly, random_assignments
from sparsepoly.learner import LearnerCore, LearnerOutcome, LearnerStatus, learn_poly_prime, learner_budget
from sparsepoly.partition import Classification, Partition, TesterParams, classify, random_partition
from sparsepoly.variation import (
    VariationEstimate,
    exact_table,
    independence_tests,
    variation_estimate,
    variation_exact,
)

__all__ = [
    "Outcome",
    "Reason",
    "Verdict",
    "shiv",
    "shiv_iterations",
    "simmq",
    "test_sparse_poly",
]

logger = logging.getLogger(__name__)


class Outcome(str, Enum):
    """Tester decision."""

    ACCEPT = "accept"
    REJECT = "reject"


class Reason(str, Enum):
    """Why the tester rejected."""

    CLOSENESS = "closeness-check-failed"
    NOT_SPARSE = "learner-not-sparse"
    SHIV_FAILED = "shiv-failed"
    TOO_MANY_HIGH = "too-many-high-subsets"
    EMPTY_GRID = "empty-grid"
    LEARNER_TOO_LARGE = "learner-too-large"


@dataclass
class Verdict:
    """Decision of one tester run with everything needed to audit it."""

    outcome: Outcome
    reason: Optional[Reason]
    ledger: QueryLedger
    params: TesterParams
    n: int
    alpha: Optional[float] = None
    partition: Optional[Partition] = None
    subset_sizes: Tuple[int, ...] = ()
    estimates: Tuple[VariationEstimate, ...] = ()
    classification: Optional[Classification] = None
    hypothesis: Optional[SparsePoly] = None
    learner: Optional[LearnerOutcome] = None
    seed: Optional[int] = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.outcome is Outcome.ACCEPT:
            if self.hypothesis is None or self.hypothesis.sparsity > self.params.s:
                raise ValueError("an accepting verdict carries an s-sparse hypothesis")
            if self.reason is not None:
                raise ValueError("an accepting verdict has no reject reason")

    @property
    def accepted(self) -> bool:
        """Whether f was accepted."""
        return self.outcome is Outcome.ACCEPT

    @property
    def queries(self) -> int:
        """Total queries charged to the ledger."""
        return self.ledger.total

    def to_dict(self) -> dict:
        """Plain values for the JSON verdict."""
        out = {
            "outcome": self.outcome.value,
            "reason": self.reason.value if self.reason else None,
            "n": self.n,
            "seed": self.seed,
            "params": self.params.as_dict(),
            "alpha": self.alpha,
            "subset_sizes": list(self.subset_sizes),
            "estimates": [e.value for e in self.estimates],
            "high_count": len(self.classification.high) if self.classification else None,
            "classification": self.classification.as_dict() if self.classification else None,
            "queries": self.ledger.as_dict(),
            "hypothesis": format_poly(self.hypothesis) if self.hypothesis is not None else None,
        }
        if self.learner is not None:
            out["learner"] = {
                "status": self.learner.status.value,
                "rounds": self.learner.rounds,
                "queries": self.learner.queries,
                "budget": self.learner.budget.as_dict() if self.learner.budget else None,
            }
        out.update(self.extra)
        return out


def shiv_iterations(alpha: float, fail_prob: float) -> int:
    """Independence tests per side: ceil((2/alpha) ln(2/fail_prob)).

    >>> shiv_iterations(0.5, 0.1)
    12
    """
    return math.ceil(2 / alpha * math.log(2 / fail_prob))


def shiv(
    f: BlackBox,
    I: Sequence[int],
    alpha: float,
    delta: float,
    b: int,
    fail_prob: float,
    rng: np.random.Generator,
) -> Optional[np.ndarray]:
    """Set the high-variation variable of a well-structured subset I to b.

    Draws x over I, runs the independence test on both halves I0 = {x = 0}
    and I1 = {x = 1}, and returns x when the marked half is I^b, the
    complement of x otherwise.  None means fail: both or neither half was
    marked.  The returned bits follow the increasing order of I.  Delta
    bounds the variation outside the high variable; the procedure itself
    only needs alpha.
    """
    subset = np.array(sorted(set(I)), dtype=np.intp)
    if subset.size == 0:
        raise ValueError("SHIV needs a nonempty subset")
    if alpha <= 0 or not 0 < fail_prob < 1:
        raise ParameterError(f"need alpha > 0 and 0 < fail_prob < 1, got {alpha}, {fail_prob}")
    c = shiv_iterations(alpha, fail_prob)
    x = random_assignments(rng, 1, subset.size)[0]
    marked0 = bool(independence_tests(f, subset[~x], c, rng).any())
    marked1 = bool(independence_tests(f, subset[x], c, rng).any())
    if marked0 == marked1:
        logger.debug("SHIV fail on %d variables: marked0=%s marked1=%s", subset.size, marked0, marked1)
        return None
    return x if (marked1 if b else marked0) else ~x


def simmq(
    f: BlackBox,
    high: Sequence[int],
    subsets: Mapping[int, Sequence[int]],
    alpha: float,
    delta: float,
    z: Sequence[int],
    fail_prob: float,
    rng: np.random.Generator,
) -> Optional[int]:
    """Answer a membership query to the implicit junta at z.

    SHIV sets the high variable of each subset I_j, j in high, to z_j with
    failure parameter fail_prob / |high|; every other coordinate is 0.
    Returns f there (a sign), or None if any SHIV call failed, in which
    case f itself is not queried.
    """
    if len(z) != len(high):
        raise DimensionError(f"z has {len(z)} bits for {len(high)} subsets")
    x = np.zeros(f.n, dtype=bool)
    share = fail_prob / len(high) if len(high) else fail_prob
    for j, bit in zip(high, z):
        w = shiv(f, subsets[j], alpha, delta, int(bit), share, rng)
        if w is None:
            return None
        x[np.array(sorted(set(subsets[j])), dtype=np.intp) - 1] = w
    return f.query(x)


def test_sparse_poly(
    f: BlackBox,
    s: int,
    eps: float,
    params: TesterParams,
    rng: np.random.Generator,
    exact_backend: bool = False,
    core: Optional[LearnerCore] = None,
    cap: Optional[int] = None,
) -> Verdict:
    """Decide whether f looks s-sparse or eps-far from every s-sparse polynomial.

    With exact_backend the subset variations are computed exactly from the
    truth table of f (enumerated at a cost of 2**n queries) instead of being
    estimated; the decision logic is unchanged.
    """
    if params.s != s or params.eps != eps:
        raise ParameterError(f"params were derived for s={params.s}, eps={params.eps}")
    ledger = f.ledger

    def verdict(outcome: Outcome, reason: Optional[Reason] = None, **kwargs) -> Verdict:
        v = Verdict(outcome, reason, ledger, params, f.n, **kwargs)
        logger.info("%s%s after %d queries", outcome.value, f" ({reason.value})" if reason else "", ledger.total)
        return v

    if not params.alpha_grid:
        return verdict(Outcome.REJECT, Reason.EMPTY_GRID)
    # exact variations cost one table pass per subset
    planned = params.r << f.n if exact_backend else 2 * params.M * params.r
    work_cap = config.get_work_cap()
    if planned > work_cap:
        raise CapExceeded(
            f"classifying {params.r:.3g} subsets needs {planned:.3g} steps, over the work cap of {work_cap:.3g}"
        )

    partition = random_partition(f.n, params.r, rng)
    alpha = float(rng.choice(params.alpha_grid))
    subsets = partition.subsets
    sizes = tuple(len(I) for I in subsets)

    with ledger.phase(Phase.VARIATION):
        if exact_backend:
            table = exact_table(f, cap)
            estimates = []
            for I in subsets:
                v = variation_exact(table, I)
                estimates.append(VariationEstimate(float(v), 0, I, exact=v))
        else:
            streams = rng.spawn(params.r)
            estimates = [variation_estimate(f, I, params.M, g) for I, g in zip(subsets, streams)]
    estimates = tuple(estimates)
    cls = classify(estimates, alpha, params.delta)
    seen = dict(alpha=alpha, partition=partition, subset_sizes=sizes, estimates=estimates, classification=cls)

    restricted = zero_restricted_oracle(f, partition.union(cls.low))
    with ledger.phase(Phase.CLOSENESS):
        sample = random_assignments(rng, params.m, f.n)
        if np.any(f.query_many(sample) != restricted.query_many(sample)):
            return verdict(Outcome.REJECT, Reason.CLOSENESS, **seen)

    if len(cls.high) > params.high_bound:
        return verdict(Outcome.REJECT, Reason.TOO_MANY_HIGH, **seen)

    n_vars = len(cls.high)
    budget = learner_budget(n_vars, s, params.learner_eps, params.learner_delta, core)
    per_call = params.learner_delta / budget.q_total
    high_subsets = {j: subsets[j - 1] for j in cls.high}

    def membership(z: np.ndarray) -> Optional[int]:
        sign = simmq(f, cls.high, high_subsets, alpha, params.delta, z, per_call, rng)
        return None if sign is None else int(sign < 0)

    try:
        outcome = learn_poly_prime(
            membership, s, n_vars, params.learner_eps, params.learner_delta, rng, core, ledger
        )
    except CapExceeded as e:
        logger.debug("learner over %d variables: %s", n_vars, e)
        return verdict(Outcome.REJECT, Reason.LEARNER_TOO_LARGE, **seen)
    if outcome.status is LearnerStatus.HYPOTHESIS:
        return verdict(Outcome.ACCEPT, None, hypothesis=outcome.hypothesis, learner=outcome, **seen)
    reason = Reason.SHIV_FAILED if outcome.status is LearnerStatus.ABORTED else Reason.NOT_SPARSE
    return verdict(Outcome.REJECT, reason, learner=outcome, **seen)


test_sparse_poly.__test__ = False
