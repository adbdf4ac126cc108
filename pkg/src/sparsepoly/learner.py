"""A proper membership-query learner for s-sparse polynomials.

Equivalence queries are simulated with uniform random examples: a
hypothesis survives a round when it agrees with the membership oracle on
every example drawn.  The core that proposes hypotheses is pluggable; the
default core interpolates the full truth table over the n' learned
variables, which is exact but needs 2**n' membership queries.

Membership oracles take an assignment over n' variables and return the bit
there, or None when the simulated query failed.

    >>> from sparsepoly.gf2poly import canonicalize, evaluate
    >>> target = canonicalize([(1,), (2,)], 2)
    >>> out = learn_poly_prime(lambda z: evaluate(target, z), 2, 2, 0.1, 0.01, np.random.default_rng(1))
    >>> out.status.value, str(out.hypothesis)
    ('hypothesis', 'x1 + x2')
"""
import logging
import math
from abc import ABC, abstractmethod
from contextlib import nullcontext
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np

from sparsepoly.blackbox import Phase, QueryLedger
from sparsepoly.errors import MembershipQueryFailed, ParameterError
from sparsepoly.gf2poly import (
    SparsePoly,
    TruthTable,
    all_assignments,
    evaluate,
    evaluate_many,
    mobius_interpolate,
    random_assignments,
)

__all__ = [
    "InterpolationCore",
    "LearnerBudget",
    "LearnerCore",
    "LearnerOutcome",
    "LearnerStatus",
    "MembershipOracle",
    "equivalence_round_cap",
    "equivalence_sample_size",
    "interpolation_core",
    "learn_poly_prime",
    "learner_budget",
    "simulate_equivalence_query",
]

logger = logging.getLogger(__name__)

MembershipOracle = Callable[[np.ndarray], Optional[int]]


class LearnerStatus(str, Enum):
    """How a learning run ended."""

    HYPOTHESIS = "hypothesis"
    NOT_SPARSE = "not-s-sparse"
    ABORTED = "aborted"


@dataclass(frozen=True)
class LearnerBudget:
    """Queries a learning run may issue, declared before the first one."""

    n_vars: int
    mq_budget: int
    eq_rounds: int
    eq_sample_size: int

    @property
    def q_total(self) -> int:
        """Membership queries of the core plus every simulated equivalence query."""
        return self.mq_budget + self.eq_rounds * self.eq_sample_size

    def as_dict(self) -> dict:
        """Plain values for reports."""
        return {
            "n_vars": self.n_vars,
            "mq_budget": self.mq_budget,
            "eq_rounds": self.eq_rounds,
            "eq_sample_size": self.eq_sample_size,
            "q_total": self.q_total,
        }


@dataclass(frozen=True)
class LearnerOutcome:
    """Result of a learning run."""

    status: LearnerStatus
    hypothesis: Optional[SparsePoly] = None
    rounds: int = 0
    queries: int = 0
    budget: Optional[LearnerBudget] = None

    def __post_init__(self):
        if (self.status is LearnerStatus.HYPOTHESIS) != (self.hypothesis is not None):
            raise ValueError("exactly the hypothesis outcome carries a hypothesis")


def equivalence_round_cap(n_vars: int, s: int) -> int:
    """At most n's + 2 equivalence queries."""
    return n_vars * s + 2


def equivalence_sample_size(eps: float, n_vars: int, s: int, delta: float = 0.01) -> int:
    """Examples per simulated equivalence query.

    ceil((1/eps) ln(3 R / delta)) with R the round cap; at delta = 1/100 and
    eps a quarter of the tester's accuracy this is (4/eps') ln(300 R).

    >>> equivalence_sample_size(0.1, 3, 2)
    78
    """
    if not 0 < eps < 1 or not 0 < delta < 1:
        raise ParameterError("need 0 < eps < 1 and 0 < delta < 1")
    rounds = equivalence_round_cap(n_vars, s)
    return math.ceil(math.log(3 * rounds / delta) / eps)


class LearnerCore(ABC):
    """Proposes hypotheses from membership queries and counterexamples."""

    @abstractmethod
    def mq_budget(self, n_vars: int, s: int) -> int:
        """Membership queries the core issues over a whole run."""

    @abstractmethod
    def propose(self, mq: MembershipOracle, n_vars: int, s: int) -> Optional[SparsePoly]:
        """Emit the next hypothesis, or None when the target is not s-sparse.

        Raises MembershipQueryFailed when a membership query fails.
        """

    def counterexample(self, z: np.ndarray, label: int) -> bool:
        """Receive a point where the last hypothesis was wrong.

        Returns whether the core can continue.
        """
        return False


def _ask(mq: MembershipOracle, z: np.ndarray) -> int:
    bit = mq(z)
    if bit is None:
        raise MembershipQueryFailed("membership query failed")
    return int(bit)


def interpolation_core(mq: MembershipOracle, n_vars: int, s: int, cap: Optional[int] = None) -> LearnerOutcome:
    """Query every point of {0,1}^n' and interpolate.

    The hypothesis reproduces the answers received exactly, so it is
    rejected as not s-sparse when it has more than s monomials.

    Examples:
        >>> out = interpolation_core(lambda z: int(z[0] and z[1]), 2, 1)
        >>> out.hypothesis.terms, out.queries
        ([(1, 2)], 4)
        >>> majority = lambda z: int(sum(z) >= 2)
        >>> interpolation_core(majority, 3, 2).status.value
        'not-s-sparse'
    """
    queries = 0
    bits = []
    try:
        for z in all_assignments(n_vars, cap):
            queries += 1
            bits.append(_ask(mq, z))
    except MembershipQueryFailed:
        return LearnerOutcome(LearnerStatus.ABORTED, queries=queries)
    h = mobius_interpolate(TruthTable(n_vars, bits))
    if h.sparsity > s:
        return LearnerOutcome(LearnerStatus.NOT_SPARSE, queries=queries)
    return LearnerOutcome(LearnerStatus.HYPOTHESIS, h, queries=queries)


class InterpolationCore(LearnerCore):
    """Exact truth-table interpolation over the n' learned variables."""

    def __init__(self, cap: Optional[int] = None):
        self.cap = cap

    def mq_budget(self, n_vars: int, s: int) -> int:
        return 1 << n_vars

    def propose(self, mq: MembershipOracle, n_vars: int, s: int) -> Optional[SparsePoly]:
        outcome = interpolation_core(mq, n_vars, s, self.cap)
        if outcome.status is LearnerStatus.ABORTED:
            raise MembershipQueryFailed("membership query failed during interpolation")
        return outcome.hypothesis


def learner_budget(
    n_vars: int, s: int, eps: float, delta: float, core: Optional[LearnerCore] = None
) -> LearnerBudget:
    """Declare the queries of a run before it starts.

    >>> learner_budget(3, 2, 0.1, 0.01).q_total
    632
    """
    core = core or InterpolationCore()
    return LearnerBudget(
        n_vars,
        core.mq_budget(n_vars, s),
        equivalence_round_cap(n_vars, s),
        equivalence_sample_size(eps, n_vars, s, delta),
    )


def simulate_equivalence_query(
    mq: MembershipOracle, h: SparsePoly, sample_size: int, rng: np.random.Generator
) -> Optional[np.ndarray]:
    """Compare h with the oracle on uniform examples.

    Returns the first counterexample, or None when h agrees on the whole
    sample.  Examples after a counterexample are not queried.
    """
    sample = random_assignments(rng, sample_size, h.n)
    for z, predicted in zip(sample, evaluate_many(h, sample)):
        if _ask(mq, z) != predicted:
            return z
    return None


def learn_poly_prime(
    mq: MembershipOracle,
    s: int,
    n_vars: int,
    eps: float,
    delta: float,
    rng: np.random.Generator,
    core: Optional[LearnerCore] = None,
    ledger: Optional[QueryLedger] = None,
) -> LearnerOutcome:
    """Learn an s-sparse hypothesis over n' variables to accuracy eps.

    Returns a hypothesis with at most s monomials, not-s-sparse when the
    core gives up or the round cap runs out, or aborted when a membership
    query fails.  With a ledger, core queries are charged to the SHIV phase
    and equivalence sampling to the equivalence phase.
    """
    core = core or InterpolationCore()
    budget = learner_budget(n_vars, s, eps, delta, core)
    issued = 0

    def counted(z: np.ndarray) -> Optional[int]:
        nonlocal issued
        issued += 1
        return mq(z)

    def phase(name: Phase):
        return ledger.phase(name) if ledger is not None else nullcontext()

    def finish(status: LearnerStatus, h: Optional[SparsePoly] = None) -> LearnerOutcome:
        if issued > budget.q_total:
            logger.warning("learner issued %d queries over its budget of %d", issued, budget.q_total)
        return LearnerOutcome(status, h, rounds, issued, budget)

    rounds = 0
    try:
        with phase(Phase.SHIV):
            h = core.propose(counted, n_vars, s)
        while True:
            if h is None or h.sparsity > s:
                return finish(LearnerStatus.NOT_SPARSE)
            if rounds == budget.eq_rounds:
                logger.debug("no hypothesis survived %d equivalence rounds", rounds)
                return finish(LearnerStatus.NOT_SPARSE)
            rounds += 1
            with phase(Phase.EQUIVALENCE):
                z = simulate_equivalence_query(counted, h, budget.eq_sample_size, rng)
            if z is None:
                return finish(LearnerStatus.HYPOTHESIS, h)
            label = evaluate(h, z) ^ 1
            with phase(Phase.SHIV):
                if not core.counterexample(z, label):
                    return finish(LearnerStatus.NOT_SPARSE)
                h = core.propose(counted, n_vars, s)
    except MembershipQueryFailed:
        logger.debug("learning aborted after %d queries", issued)
        return finish(LearnerStatus.ABORTED)

