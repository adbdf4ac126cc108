"""Random partitions, tester parameters, classification and the structure audit.

Two parameter profiles exist.  `theory` evaluates the constants the
correctness proof needs; they are astronomically large and only meant to
be printed.  `desk` keeps the same pipeline at executable scale:
tau=0.05, delta=0.03, r=64, alpha grid {0.125}.

    >>> p = derive_params(3, 0.1, "desk")
    >>> p.r, p.alpha_grid, p.m
    (64, (0.125,), 50)
"""
import logging
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from sparsepoly import config
from sparsepoly.dyadic import Dyadic
from sparsepoly.errors import EmptyGrid, ParameterError
from sparsepoly.gf2poly import SparsePoly, distance, relevant_variables, restrict, truth_table
from sparsepoly.variation import VariationEstimate, all_variations_exact, variation_exact

__all__ = [
    "Classification",
    "Partition",
    "StructureAudit",
    "TesterParams",
    "alpha_grid",
    "classify",
    "delta_zero",
    "derive_params",
    "high_subset_bound",
    "random_partition",
    "theorem3_audit",
]

logger = logging.getLogger(__name__)

PROFILES = ("desk", "theory")
DESK_DEFAULTS = {"tau": 0.05, "delta": 0.03, "r": 64, "alpha": (0.125,)}
THEORY_C = 2000.0
THEORY_C_PRIME = 100.0
LEARNER_DELTA = 0.01


@dataclass(frozen=True)
class Partition:
    """Variables 1..n assigned to subsets 1..r; assignment[i - 1] holds i's subset."""

    n: int
    r: int
    assignment: Tuple[int, ...]

    def __post_init__(self):
        if self.r < 1 or len(self.assignment) != self.n:
            raise ParameterError(f"a partition of {self.n} variables into {self.r} subsets")
        if any(not 1 <= j <= self.r for j in self.assignment):
            raise ParameterError(f"subset ids must lie in [1, {self.r}]")

    @property
    def subsets(self) -> Tuple[Tuple[int, ...], ...]:
        """Subset j - 1 lists the variables of I_j in increasing order."""
        groups = [[] for _ in range(self.r)]
        for i, j in enumerate(self.assignment, 1):
            groups[j - 1].append(i)
        return tuple(tuple(g) for g in groups)

    def subset(self, j: int) -> Tuple[int, ...]:
        """Variables of I_j."""
        return self.subsets[j - 1]

    def union(self, ids: Sequence[int]) -> Tuple[int, ...]:
        """Variables of all the subsets named in ids."""
        wanted = set(ids)
        return tuple(i for i, j in enumerate(self.assignment, 1) if j in wanted)


def random_partition(n: int, r: int, rng: np.random.Generator) -> Partition:
    """Place each variable independently and uniformly into one of r subsets.

    >>> random_partition(3, 1, np.random.default_rng(0)).subsets
    ((1, 2, 3),)
    """
    if n < 0 or r < 1:
        raise ParameterError(f"cannot partition {n} variables into {r} subsets")
    return Partition(n, r, tuple(int(j) for j in rng.integers(1, r + 1, size=n)))


def delta_zero(s: int, tau: float) -> float:
    """Largest delta the structure theorem allows: tau / (1600 s^3 log2(8 s^3 / tau))."""
    return tau / (1600 * s**3 * math.log2(8 * s**3 / tau))


def high_subset_bound(s: int, tau: float) -> float:
    """Most high-variation subsets an s-sparse polynomial yields: s log2(8 s^3 / tau)."""
    return s * math.log2(8 * s**3 / tau)


def alpha_grid(s: int, tau: float, delta: float) -> Tuple[float, ...]:
    """Thresholds tau/(4s^2) + (8l - 4) delta for l = 1..K, K largest with 8 K delta <= tau/(4s^2).

    Examples:
        >>> grid = alpha_grid(2, 0.5, 0.0005)
        >>> len(grid), round(grid[0], 6)
        (7, 0.03325)
        >>> alpha_grid(2, 0.5, 0.01)
        Traceback (most recent call last):
        sparsepoly.errors.EmptyGrid: 8*delta=0.08 exceeds tau/(4s^2)=0.03125
    """
    if s < 1 or tau <= 0 or delta <= 0:
        raise ParameterError("alpha grid needs s >= 1 and positive tau, delta")
    base = Fraction(tau) / (4 * s * s)
    step = Fraction(delta)
    count = math.floor(base / (8 * step))
    if count < 1:
        raise EmptyGrid(f"8*delta={8 * delta:g} exceeds tau/(4s^2)={float(base):g}")
    return tuple(float(base + (8 * k - 4) * step) for k in range(1, count + 1))


@dataclass(frozen=True)
class TesterParams:
    """Every constant the tester uses, as derived or overridden."""

    s: int
    eps: float
    tau: float
    delta: float
    r: int
    M: int
    m: int
    alpha_grid: Tuple[float, ...]
    profile: str
    C: float = THEORY_C
    C_prime: float = THEORY_C_PRIME
    learner_delta: float = LEARNER_DELTA

    @property
    def learner_eps(self) -> float:
        """Accuracy asked of the learner."""
        return self.eps / 4

    @property
    def high_bound(self) -> float:
        """Early-rejection bound on the number of high subsets."""
        return high_subset_bound(self.s, self.tau)

    @property
    def split_threshold(self) -> float:
        """The influence threshold t = delta tau / (4 C' s) of the partition analysis."""
        return self.delta * self.tau / (4 * self.C_prime * self.s)

    def as_dict(self) -> dict:
        """Plain values for reports."""
        out = asdict(self)
        out["alpha_grid"] = list(self.alpha_grid)
        if len(self.alpha_grid) > 16:
            out["alpha_grid"] = {"size": len(self.alpha_grid), "first": self.alpha_grid[0], "last": self.alpha_grid[-1]}
        out["learner_eps"] = self.learner_eps
        out["high_bound"] = self.high_bound
        return out


def derive_params(
    s: int,
    eps: float,
    profile: Optional[str] = None,
    overrides: Optional[Mapping[str, Union[int, float, Sequence[float]]]] = None,
) -> TesterParams:
    """Derive tester parameters for a profile, then apply overrides.

    Overrides use the profile file keys: tau, delta, r, alpha, bigM, m, C,
    C_prime.  In the theory profile, delta, r and the grid follow any
    overridden tau unless given themselves.

    Examples:
        >>> t = derive_params(2, 0.6, "theory")
        >>> "%.3g" % t.tau, "%.3g" % t.delta, t.m
        ('0.001', '4.89e-09', 9)
        >>> derive_params(3, 0.1, "desk", {"alpha": 0.1})
        Traceback (most recent call last):
        sparsepoly.errors.ParameterError: alpha=0.1 must exceed 4*delta=0.12
    """
    profile = profile or config.get_default_profile()
    values = {k: v for k, v in (overrides or {}).items() if v is not None}
    unknown = set(values) - set(config.OVERRIDE_KEYS)
    if unknown:
        raise ParameterError(f"unknown parameter(s): {', '.join(sorted(unknown))}")
    if s < 1 or not 0 < eps < 1:
        raise ParameterError(f"need s >= 1 and 0 < eps < 1, got s={s}, eps={eps}")

    C = float(values.get("C", THEORY_C))
    C_prime = float(values.get("C_prime", THEORY_C_PRIME))
    if profile == "theory":
        tau = float(values.get("tau", eps / 600))
        if tau <= 0:
            raise ParameterError("tau must be positive")
        delta = float(values.get("delta", delta_zero(s, tau)))
        if delta <= 0:
            raise ParameterError("delta must be positive")
        r = int(values.get("r", math.ceil(4 * C * s / delta)))
        grid = values.get("alpha") or alpha_grid(s, tau, delta)
    elif profile == "desk":
        tau = float(values.get("tau", DESK_DEFAULTS["tau"]))
        delta = float(values.get("delta", DESK_DEFAULTS["delta"]))
        r = int(values.get("r", DESK_DEFAULTS["r"]))
        grid = values.get("alpha", DESK_DEFAULTS["alpha"])
    else:
        raise ParameterError(f"unknown profile {profile!r}; expected one of {PROFILES}")

    if tau <= 0 or delta <= 0 or r < 1:
        raise ParameterError(f"need positive tau, delta and r >= 1, got {tau}, {delta}, {r}")
    if isinstance(grid, (int, float)):
        grid = (grid,)
    grid = tuple(float(a) for a in grid)
    if not grid:
        raise EmptyGrid("the alpha grid is empty")
    for a in grid:
        if a <= 4 * delta:
            raise ParameterError(f"alpha={a:g} must exceed 4*delta={4 * delta:g}")

    M = int(values.get("bigM", math.ceil(2 / delta**2 * math.log(200 * r))))
    m = int(values.get("m", math.ceil(2 / eps * math.log(12))))
    if M < 1 or m < 1:
        raise ParameterError("M and m must be at least 1")

    params = TesterParams(s, eps, tau, delta, r, M, m, grid, profile, C, C_prime)
    logger.debug("derived %s", params)
    return params


@dataclass(frozen=True)
class Classification:
    """Subsets split by their estimated variation at threshold alpha + 2 delta."""

    low: Tuple[int, ...]
    high: Tuple[int, ...]
    estimates: Tuple[float, ...] = field(default=())
    threshold: float = 0.0

    def as_dict(self) -> dict:
        """Plain values for reports."""
        return {"low": list(self.low), "high": list(self.high), "threshold": self.threshold}


def classify(
    estimates: Sequence[Union[VariationEstimate, float]], alpha: float, delta: float
) -> Classification:
    """High subsets have estimate > alpha + 2 delta; ids are 1-based.

    >>> c = classify([0.30, 0.01], 0.125, 0.03)
    >>> c.high, c.low
    ((1,), (2,))
    """
    values = tuple(float(e.value if isinstance(e, VariationEstimate) else e) for e in estimates)
    threshold = alpha + 2 * delta
    high = tuple(j for j, v in enumerate(values, 1) if v > threshold)
    low = tuple(j for j, v in enumerate(values, 1) if not v > threshold)
    logger.debug("threshold %.6g: %d high, %d low", threshold, len(high), len(low))
    return Classification(low, high, values, threshold)


@dataclass
class StructureAudit:
    """Exact check of the six structure statements for one (p, alpha, partition)."""

    statements: Dict[int, bool]
    high: Tuple[int, ...]
    bound: float
    distance: Dyadic
    grid_safe: bool
    split: Dict[str, bool]
    killed: bool
    threshold_t: float

    @property
    def all_hold(self) -> bool:
        """Whether statements 1-6 all hold."""
        return all(self.statements.values())

    def as_dict(self) -> dict:
        """Plain values for reports."""
        return {
            "statements": {str(k): v for k, v in self.statements.items()},
            "high": list(self.high),
            "bound": self.bound,
            "distance": str(self.distance),
            "grid_safe": self.grid_safe,
            "split": dict(self.split),
            "killed": self.killed,
            "threshold_t": self.threshold_t,
        }


def theorem3_audit(
    p: SparsePoly,
    params: TesterParams,
    alpha: float,
    partition: Partition,
    cap: Optional[int] = None,
) -> StructureAudit:
    """Check the structure statements for p exactly.

    1. no Vr(i) in [alpha - 4 delta, alpha + 4 delta]
    2. no Vr(I_j) in [alpha - 3 delta, alpha + 4 delta]
    3. every high subset is (alpha, delta)-well structured
    4. at most s log2(8 s^3 / tau) high subsets
    5. p' (low subsets zeroed) keeps at most one relevant variable per high subset
    6. p' is tau-close to p

    High means Vr(I_j) >= alpha.  The partition lemmas at t = delta tau/(4 C' s)
    and the monomial-killing property are reported alongside.
    """
    if partition.n != p.n:
        raise ParameterError(f"partition covers {partition.n} variables, polynomial has {p.n}")
    table = truth_table(p, cap)
    delta = params.delta
    var = all_variations_exact(table)
    subsets = partition.subsets
    subset_var = [variation_exact(table, I) for I in subsets]

    one = not any(alpha - 4 * delta <= v <= alpha + 4 * delta for v in var)
    two = not any(alpha - 3 * delta <= v <= alpha + 4 * delta for v in subset_var)
    high = tuple(j for j, v in enumerate(subset_var, 1) if v >= alpha)

    def well_structured(I: Tuple[int, ...]) -> bool:
        for i in I:
            if var[i - 1] >= alpha:
                rest = tuple(k for k in I if k != i)
                if variation_exact(table, rest) <= delta:
                    return True
        return False

    three = all(well_structured(subsets[j - 1]) for j in high)
    bound = high_subset_bound(params.s, params.tau)
    four = len(high) <= bound

    low_vars = partition.union([j for j in range(1, partition.r + 1) if j not in high])
    reduced = restrict(p, {i: 0 for i in low_vars})
    relevant = relevant_variables(reduced)
    five = all(len(relevant.intersection(subsets[j - 1])) <= 1 for j in high)
    dist = distance(p, reduced, cap=cap)
    six = dist <= params.tau

    t = params.split_threshold
    one_above_t = all(sum(1 for i in I if var[i - 1] > t) <= 1 for I in subsets)
    rest_small = all(variation_exact(table, tuple(i for i in I if var[i - 1] <= t)) <= delta for I in subsets)
    zeroed = set(low_vars)
    killed = all(
        any(i in zeroed for i in m) for m in p.monomials if any(var[i - 1] <= alpha for i in m)
    )

    return StructureAudit(
        statements={1: one, 2: two, 3: three, 4: four, 5: five, 6: six},
        high=high,
        bound=bound,
        distance=dist,
        grid_safe=one,
        split={"one_above_t": one_above_t, "rest_within_delta": rest_small},
        killed=killed,
        threshold_t=t,
    )
