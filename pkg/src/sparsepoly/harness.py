"""Seeded experiment batches over function families.

Every trial owns a private oracle and the stream derive_rng(seed, trial),
which both generates the function and drives the tester, so a batch gives
the same report whatever the worker count.  Reports list trials in index
order.

    >>> params = derive_params(1, 0.5, "desk", {"bigM": 50, "r": 4})
    >>> report = run_completeness_experiment(ZeroFamily(n=6), params, 3, seed=1)
    >>> report.trials, report.accepted, report.queries()["min"] == report.queries()["max"]
    (3, 3, True)
"""
import logging
import statistics
from abc import ABC, abstractmethod
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from fractions import Fraction
from typing import Callable, ClassVar, Dict, List, Optional, Sequence, Type

import numpy as np

from sparsepoly import config
from sparsepoly.blackbox import BlackBox, flip_noise_oracle, make_poly_oracle, make_table_oracle
from sparsepoly.dyadic import Dyadic
from sparsepoly.errors import CapExceeded, ParameterError
from sparsepoly.gf2poly import (
    SparsePoly,
    TruthTable,
    all_assignments,
    canonicalize,
    distance_to_sparse_class,
    random_sparse,
    random_truth_table,
    truth_table,
)
from sparsepoly.partition import TesterParams, classify, derive_params, random_partition, theorem3_audit
from sparsepoly.tester import Verdict, test_sparse_poly
from sparsepoly.variation import junta_variations_exact

__all__ = [
    "AuditReport",
    "CanonicalFamily",
    "ExperimentReport",
    "FAMILIES",
    "Family",
    "FarTableFamily",
    "FlipNoiseFamily",
    "RandomFamily",
    "ScalingReport",
    "ZeroFamily",
    "classification_matches",
    "make_family",
    "run_audit",
    "run_completeness_experiment",
    "run_query_scaling_experiment",
    "run_soundness_experiment",
]

logger = logging.getLogger(__name__)

THEORY_AUDIT_BOUND = 0.9


@dataclass(frozen=True)
class Instance:
    """A generated function and, for far families, its far-ness certificate.

    Sparse families also hand over the polynomial itself as `reference`, so
    the tester's classification can be compared with the exact one.
    """

    oracle: BlackBox
    certificate: Optional[dict] = None
    excluded: Optional[str] = None
    reference: Optional[SparsePoly] = None


@dataclass(frozen=True)
class Family(ABC):
    """Generator of one function per trial."""

    name: ClassVar[str] = ""
    far: ClassVar[bool] = False
    n: int = 64

    @abstractmethod
    def instance(self, rng: np.random.Generator) -> Instance:
        """Build the trial's function."""

    def as_dict(self) -> dict:
        """Name and fields for reports."""
        return {"name": self.name, **asdict(self)}


@dataclass(frozen=True)
class CanonicalFamily(Family):
    """x1x2 + x3x4x5 embedded among n variables."""

    name: ClassVar[str] = "canonical"

    def poly(self) -> SparsePoly:
        """The fixed polynomial."""
        if self.n < 5:
            raise ParameterError(f"the canonical polynomial needs n >= 5, got {self.n}")
        return canonicalize([(1, 2), (3, 4, 5)], self.n)

    def instance(self, rng):
        p = self.poly()
        return Instance(make_poly_oracle(p), reference=p)


@dataclass(frozen=True)
class RandomFamily(Family):
    """A fresh random s-sparse polynomial per trial."""

    name: ClassVar[str] = "random"
    s: int = 3
    max_degree: int = 3

    def instance(self, rng):
        p = random_sparse(self.n, self.s, min(self.max_degree, self.n), rng)
        return Instance(make_poly_oracle(p), reference=p)


@dataclass(frozen=True)
class ZeroFamily(Family):
    """The zero polynomial."""

    name: ClassVar[str] = "zero"

    def instance(self, rng):
        return Instance(make_poly_oracle(SparsePoly.zero(self.n)))


@dataclass(frozen=True)
class FarTableFamily(Family):
    """Random truth tables kept only when certified eps-far from the s-sparse class."""

    name: ClassVar[str] = "far-table"
    far: ClassVar[bool] = True
    n: int = 8
    s: int = 1
    eps: float = 0.25

    def instance(self, rng):
        table = random_truth_table(self.n, rng)
        d, witness = distance_to_sparse_class(table, self.n, self.s)
        certificate = {"distance_to_class": str(d), "witness": str(witness)}
        if d < self.eps:
            return Instance(make_table_oracle(table), certificate, f"distance {d} below eps={self.eps}")
        return Instance(make_table_oracle(table), certificate)


@dataclass(frozen=True)
class FlipNoiseFamily(Family):
    """A random s-sparse base with its sign flipped on a hashed fraction of inputs.

    The flip set is enumerated to measure the distance to the base, and the
    distance to the whole class is certified when n and s fit the class
    search caps.
    """

    name: ClassVar[str] = "flip-noise"
    far: ClassVar[bool] = True
    n: int = 10
    s: int = 2
    eps: float = 0.2
    fraction: float = 0.3
    max_degree: int = 3

    def instance(self, rng):
        base = random_sparse(self.n, self.s, min(self.max_degree, self.n), rng)
        oracle = flip_noise_oracle(make_poly_oracle(base), Fraction(self.fraction), int(rng.integers(2**63)))
        try:
            points = all_assignments(self.n)
        except CapExceeded as err:
            raise CapExceeded(f"cannot certify flip noise: {err}") from err
        flips = oracle.flipped(points)
        measured = Dyadic(int(np.count_nonzero(flips)), self.n)
        certificate = {"base": str(base), "distance_to_base": str(measured)}
        n_cap, s_cap = config.get_class_caps()
        if self.n <= n_cap and self.s <= s_cap:
            noisy = TruthTable(self.n, truth_table(base).bits ^ flips)
            d, _ = distance_to_sparse_class(noisy, self.n, self.s)
            certificate["distance_to_class"] = str(d)
            if d < self.eps:
                return Instance(oracle, certificate, f"distance to class {d} below eps={self.eps}")
        if measured < self.eps:
            return Instance(oracle, certificate, f"measured distance {measured} below eps={self.eps}")
        return Instance(oracle, certificate)


FAMILIES: Dict[str, Type[Family]] = {
    f.name: f for f in (CanonicalFamily, RandomFamily, ZeroFamily, FarTableFamily, FlipNoiseFamily)
}


def make_family(name: str, **options) -> Family:
    """Build a family by name, ignoring options it has no field for.

    >>> make_family("far-table", n=6, s=1, fraction=0.1)
    FarTableFamily(n=6, s=1, eps=0.25)
    """
    if name not in FAMILIES:
        raise ParameterError(f"unknown family {name!r}; expected one of {', '.join(FAMILIES)}")
    cls = FAMILIES[name]
    known = {f.name for f in fields(cls)}
    return cls(**{k: v for k, v in options.items() if k in known and v is not None})


@dataclass(frozen=True)
class TrialTask:
    """Everything a worker needs to run one trial."""

    family: Family
    params: TesterParams
    seed: int
    trial: int
    exact_backend: bool = False


def run_trial(task: TrialTask) -> dict:
    """Generate the trial's function and run the tester on it; returns a digest."""
    rng = config.derive_rng(task.seed, task.trial)
    instance = task.family.instance(rng)
    digest = {"trial": task.trial, "excluded": instance.excluded is not None}
    if instance.certificate is not None:
        digest["certificate"] = instance.certificate
    if instance.excluded is not None:
        digest["exclusion"] = instance.excluded
        return digest
    p = task.params
    verdict = test_sparse_poly(instance.oracle, p.s, p.eps, p, rng, exact_backend=task.exact_backend)
    digest.update(
        outcome=verdict.outcome.value,
        reason=verdict.reason.value if verdict.reason else None,
        alpha=verdict.alpha,
        high_count=len(verdict.classification.high) if verdict.classification else None,
        queries=verdict.ledger.as_dict(),
    )
    if instance.reference is not None:
        match = classification_matches(instance.reference, verdict)
        if match is not None:
            digest["classification_match"] = match
    return digest


def classification_matches(p: SparsePoly, verdict: Verdict) -> Optional[bool]:
    """Whether the verdict's high subsets are the ones exact variations give.

    None when the run never classified or p has too many relevant
    variables to enumerate.
    """
    if verdict.classification is None or verdict.partition is None:
        return None
    try:
        exact = junta_variations_exact(p, verdict.partition.subsets)
    except CapExceeded:
        return None
    reference = classify([float(v) for v in exact], verdict.alpha, verdict.params.delta)
    return reference.high == verdict.classification.high


def _map(fn: Callable, tasks: Sequence, workers: Optional[int] = None) -> List:
    """Apply fn to tasks in order, in a process pool when workers > 1."""
    workers = config.get_default_workers() if workers is None else workers
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


@dataclass
class ExperimentReport:
    """Aggregated verdicts of one batch."""

    experiment: str
    family: dict
    params: dict
    seed: int
    requested: int
    digests: List[dict] = field(default_factory=list)
    exact_backend: bool = False

    @property
    def included(self) -> List[dict]:
        """Digests of trials that ran the tester."""
        return [d for d in self.digests if not d["excluded"]]

    @property
    def trials(self) -> int:
        """Trials that ran the tester."""
        return len(self.included)

    @property
    def excluded(self) -> int:
        """Trials whose function failed certification."""
        return len(self.digests) - self.trials

    @property
    def accepted(self) -> int:
        """Accepting trials."""
        return sum(1 for d in self.included if d["outcome"] == "accept")

    @property
    def reasons(self) -> Dict[str, int]:
        """Reject reasons and their counts."""
        counts = Counter(d["reason"] for d in self.included if d["outcome"] == "reject")
        return dict(sorted(counts.items()))

    @property
    def accept_rate(self) -> Optional[float]:
        """Accepted over trials, None without trials."""
        return self.accepted / self.trials if self.trials else None

    @property
    def reject_rate(self) -> Optional[float]:
        """Rejected over trials, None without trials."""
        return 1 - self.accepted / self.trials if self.trials else None

    @property
    def classification_match_rate(self) -> Optional[float]:
        """Share of compared trials whose high subsets match the exact ones."""
        compared = [d["classification_match"] for d in self.included if "classification_match" in d]
        return sum(compared) / len(compared) if compared else None

    def queries(self) -> Dict[str, Optional[float]]:
        """Min, mean and max of the total query count per trial."""
        totals = [d["queries"]["total"] for d in self.included]
        if not totals:
            return {"min": None, "mean": None, "max": None}
        return {"min": min(totals), "mean": statistics.fmean(totals), "max": max(totals)}

    def as_dict(self) -> dict:
        """Plain values for the JSON report."""
        return {
            "experiment": self.experiment,
            "family": self.family,
            "params": self.params,
            "seed": self.seed,
            "exact_backend": self.exact_backend,
            "requested": self.requested,
            "trials": self.trials,
            "excluded": self.excluded,
            "accepted": self.accepted,
            "accept_rate": self.accept_rate,
            "reject_rate": self.reject_rate,
            "reasons": self.reasons,
            "classification_match_rate": self.classification_match_rate,
            "queries": self.queries(),
            "digests": self.digests,
        }


def run_experiment(
    experiment: str,
    family: Family,
    params: TesterParams,
    trials: int,
    seed: int,
    workers: Optional[int] = None,
    exact_backend: bool = False,
) -> ExperimentReport:
    """Run `trials` seeded trials of the tester on `family`."""
    if trials < 0:
        raise ParameterError("trials must be non-negative")
    tasks = [TrialTask(family, params, seed, t, exact_backend) for t in range(trials)]
    logger.info("%s: %d trials of %s", experiment, trials, family)
    digests = _map(run_trial, tasks, workers)
    for d in digests:
        if d["excluded"]:
            logger.info("trial %d excluded: %s", d["trial"], d["exclusion"])
    return ExperimentReport(experiment, family.as_dict(), params.as_dict(), seed, trials, digests, exact_backend)


def run_completeness_experiment(
    family: Family,
    params: TesterParams,
    trials: int,
    seed: int,
    workers: Optional[int] = None,
    exact_backend: bool = False,
) -> ExperimentReport:
    """Acceptance rate on s-sparse inputs."""
    return run_experiment("completeness", family, params, trials, seed, workers, exact_backend)


def run_soundness_experiment(
    family: Family,
    params: TesterParams,
    trials: int,
    seed: int,
    workers: Optional[int] = None,
    exact_backend: bool = False,
) -> ExperimentReport:
    """Rejection rate on certified far inputs; uncertified functions are excluded."""
    if not family.far:
        raise ParameterError(f"family {family.name!r} does not certify far-ness")
    return run_experiment("soundness", family, params, trials, seed, workers, exact_backend)


@dataclass
class ScalingReport:
    """Completeness batches of one family at several n."""

    reports: Dict[int, ExperimentReport]

    @property
    def means(self) -> Dict[int, Optional[float]]:
        """Mean total queries per n."""
        return {n: r.queries()["mean"] for n, r in self.reports.items()}

    @property
    def spread(self) -> Optional[float]:
        """Largest mean over smallest, minus one."""
        means = [m for m in self.means.values() if m]
        return max(means) / min(means) - 1 if means else None

    def as_dict(self) -> dict:
        """Plain values for the JSON report."""
        return {
            "experiment": "query-scaling",
            "means": {str(n): m for n, m in self.means.items()},
            "spread": self.spread,
            "reports": {str(n): r.as_dict() for n, r in self.reports.items()},
        }


def run_query_scaling_experiment(
    ns: Sequence[int],
    family: Family,
    params: TesterParams,
    trials: int,
    seed: int,
    workers: Optional[int] = None,
) -> ScalingReport:
    """Mean query counts of the same family and parameters as n grows."""
    reports = {}
    for n in ns:
        reports[n] = run_experiment("query-scaling", replace(family, n=n), params, trials, seed, workers)
        logger.info("n=%d: mean queries %s", n, reports[n].queries()["mean"])
    return ScalingReport(reports)


@dataclass(frozen=True)
class AuditTask:
    """One random partition of the structure audit."""

    poly: SparsePoly
    params: TesterParams
    alpha: float
    seed: int
    trial: int


def _audit_trial(task: AuditTask) -> dict:
    rng = config.derive_rng(task.seed, task.trial)
    partition = random_partition(task.poly.n, task.params.r, rng)
    return theorem3_audit(task.poly, task.params, task.alpha, partition).as_dict()


@dataclass
class AuditReport:
    """How often each structure statement held over random partitions."""

    poly: str
    params: dict
    alpha: float
    seed: int
    audits: List[dict] = field(default_factory=list)

    @property
    def trials(self) -> int:
        """Partitions audited."""
        return len(self.audits)

    def holds(self) -> Dict[str, int]:
        """Trials in which each check held."""
        counts = Counter()
        for a in self.audits:
            for k, ok in a["statements"].items():
                counts[k] += ok
            counts["grid_safe"] += a["grid_safe"]
            counts["killed"] += a["killed"]
            for k, ok in a["split"].items():
                counts[f"split.{k}"] += ok
            counts["all"] += all(a["statements"].values())
        return dict(sorted(counts.items()))

    def as_dict(self) -> dict:
        """Plain values for the JSON report."""
        holds = self.holds()
        return {
            "experiment": "audit",
            "poly": self.poly,
            "params": self.params,
            "alpha": self.alpha,
            "seed": self.seed,
            "trials": self.trials,
            "holds": holds,
            "rates": {k: v / self.trials for k, v in holds.items()} if self.trials else {},
            "theory_bound": THEORY_AUDIT_BOUND,
            "audits": self.audits,
        }


def run_audit(
    p: SparsePoly,
    params: TesterParams,
    alpha: float,
    trials: int,
    seed: int,
    workers: Optional[int] = None,
) -> AuditReport:
    """Audit the structure statements for p over `trials` random partitions."""
    planned = params.r << p.n
    if planned > config.get_work_cap():
        raise CapExceeded(f"auditing {params.r:.3g} subsets of a {p.n}-variable table exceeds the work cap")
    tasks =[AuditTask(p, params, alpha, seed, t) for t in range(trials)]
    return AuditReport(str(p), params.as_dict(), alpha, seed, _map(_audit_trial, tasks, workers))
