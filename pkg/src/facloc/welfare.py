"""Welfare evaluation, exact small-instance optima, and ratio reports.

The optimum oracle enumerates set partitions of the agents into at most m
groups and places each group's facility at that group's exact 1-facility
optimum.  Under nearest-facility assignment some optimal solution always
splits the agents this way, so the minimum over partitions is the true
optimum.  The enumeration is exponential and refuses instances with more
than PARTITION_ORACLE_MAX_AGENTS agents rather than silently crawling.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

from .geometry import (
    Metric,
    Point,
    as_point,
    coordinate_median,
    distance,
    geometric_median,
    manhattan_one_center,
    smallest_enclosing_circle,
)
from .mechanisms import (
    AgentProfile,
    FacilitySpec,
    MechanismDescriptor,
    Solution,
    run_mechanism,
)

PARTITION_ORACLE_MAX_AGENTS = 10


class OracleCapError(RuntimeError):
    """Raised when an exact oracle or exhaustive search is asked for an
    instance above its enumeration cap."""


class WelfareObjective(enum.Enum):
    TOTAL = "total"
    MAX = "max"


def evaluate(
    profile: AgentProfile, solution: Solution, objective: WelfareObjective
) -> float:
    """Welfare of a solution: agent i's cost is the distance to the facility
    assignment[i] points at (the assigned one, not necessarily the nearest),
    measured in the profile metric."""
    objective = WelfareObjective(objective)
    if len(solution.assignment) != profile.n:
        raise ValueError(
            f"assignment covers {len(solution.assignment)} agents, profile has {profile.n}"
        )
    costs = [
        distance(agent, solution.locations[j - 1], profile.metric)
        for agent, j in zip(profile.agents, solution.assignment)
    ]
    return sum(costs) if objective is WelfareObjective.TOTAL else max(costs)


def max_distance_lower_bound(total: float, n: int) -> float:
    """Identity bound: a solution with total distance T over n agents has
    maximum distance at least T/n."""
    if n < 1:
        raise ValueError("need at least one agent")
    if total < 0.0:
        raise ValueError("total distance cannot be negative")
    return total / n


@dataclass(frozen=True)
class RatioReport:
    """Mechanism welfare against the exact optimum for one instance."""

    mechanism_welfare: float
    optimal_welfare: float
    ratio: float

    @classmethod
    def from_welfares(cls, mechanism: float, optimal: float) -> "RatioReport":
        if mechanism < 0.0 or optimal < 0.0:
            raise ValueError("welfare values are distances and cannot be negative")
        if optimal > 0.0:
            ratio = mechanism / optimal
        elif mechanism > 0.0:
            # positive cost against a zero-cost optimum: no finite ratio
            ratio = math.inf
        else:
            ratio = 1.0
        return cls(mechanism, optimal, ratio)

    @property
    def unbounded(self) -> bool:
        return math.isinf(self.ratio)


def _single_facility_optimum(
    points: Sequence[Point], metric: Metric, objective: WelfareObjective
) -> tuple[float, Point]:
    """Exact one-facility optimum (cost, location) for a group of agents."""
    pts = sorted(points)
    dim = len(pts[0])
    if objective is WelfareObjective.TOTAL:
        if metric is Metric.MANHATTAN:
            center = coordinate_median(pts)
        else:
            center = geometric_median(pts, tolerance=1e-9)
    else:
        if dim == 1:
            lo, hi = pts[0][0], pts[-1][0]
            center = ((lo + hi) / 2.0,)
        elif metric is Metric.MANHATTAN:
            center = manhattan_one_center(pts)
        elif dim == 2:
            center = smallest_enclosing_circle(pts).center
        else:
            raise ValueError("max-distance optimum supports 1-d and 2-d points only")
    costs = [distance(p, center, metric) for p in pts]
    value = sum(costs) if objective is WelfareObjective.TOTAL else max(costs)
    return value, center


def _partitions(n: int, max_blocks: int) -> Iterator[list[int]]:
    """Set partitions of range(n) into at most max_blocks groups, encoded as
    restricted-growth label strings (labels[i] is agent i's block)."""
    labels = [0] * n

    def extend(i: int, used: int) -> Iterator[list[int]]:
        if i == n:
            yield list(labels)
            return
        for b in range(min(used + 1, max_blocks)):
            labels[i] = b
            yield from extend(i + 1, max(used, b + 1))

    if n < 1:
        raise ValueError("need at least one agent")
    yield from extend(1, 1)


def optimal_welfare(
    profile: AgentProfile,
    spec: FacilitySpec,
    objective: WelfareObjective,
    max_agents: int = PARTITION_ORACLE_MAX_AGENTS,
) -> tuple[float, Solution]:
    """Exact optimal welfare and a solution achieving it.

    Uncapacitated only.  One facility needs no enumeration and has no agent
    cap.  For m >= 2 the search is exhaustive over agent partitions; ties
    between partitions break toward the lexicographically smallest facility
    tuple.  Unused facilities duplicate the last used location.
    """
    objective = WelfareObjective(objective)
    if spec.capacitated:
        raise ValueError("optimal_welfare handles uncapacitated specs only")
    n = profile.n
    if spec.m == 1:
        _, center = _single_facility_optimum(profile.agents, profile.metric, objective)
        solution = Solution((center,), (1,) * n)
        return evaluate(profile, solution, objective), solution
    if n > max_agents:
        raise OracleCapError(
            f"exact oracle capped at {max_agents} agents, got {n}"
        )
    best: tuple[float, tuple[Point, ...], tuple[int, ...]] | None = None
    group_cache: dict[tuple[Point, ...], tuple[float, Point]] = {}
    for labels in _partitions(n, min(spec.m, n)):
        block_count = max(labels) + 1
        centers: list[Point] = []
        block_costs: list[float] = []
        for b in range(block_count):
            key = tuple(sorted(profile.agents[i] for i in range(n) if labels[i] == b))
            if key not in group_cache:
                group_cache[key] = _single_facility_optimum(
                    key, profile.metric, objective
                )
            cost, center = group_cache[key]
            centers.append(center)
            block_costs.append(cost)
        value = (
            sum(block_costs)
            if objective is WelfareObjective.TOTAL
            else max(block_costs)
        )
        padded = tuple(centers) + (centers[-1],) * (spec.m - block_count)
        assignment = tuple(labels[i] + 1 for i in range(n))
        if best is None or (value, padded) < (best[0], best[1]):
            best = (value, padded, assignment)
    assert best is not None
    value, locations, assignment = best
    solution = Solution(locations, assignment)
    return evaluate(profile, solution, objective), solution


def optimal_capacitated_assignment(
    profile: AgentProfile,
    locations: Sequence[Point],
    capacities: Sequence[int],
    objective: WelfareObjective = WelfareObjective.TOTAL,
) -> tuple[tuple[int, ...], float]:
    """Best assignment of agents to fixed facilities under capacities.

    Depth-first over agents in index order with cost pruning; first
    lexicographic optimum wins ties.  Same agent cap as the welfare oracle.
    """
    objective = WelfareObjective(objective)
    locations = tuple(as_point(p) for p in locations)
    caps = tuple(int(c) for c in capacities)
    if not caps or len(locations) != len(caps):
        raise ValueError("need one capacity per facility location")
    if any(c < 1 for c in caps):
        raise ValueError("capacities must be positive")
    n = profile.n
    if sum(caps) < n:
        raise ValueError(f"total capacity {sum(caps)} cannot serve {n} agents")
    if n > PARTITION_ORACLE_MAX_AGENTS:
        raise OracleCapError(
            f"exact assignment capped at {PARTITION_ORACLE_MAX_AGENTS} agents, got {n}"
        )
    m = len(locations)
    dists = [
        [distance(agent, loc, profile.metric) for loc in locations]
        for agent in profile.agents
    ]
    remaining = list(caps)
    chosen = [0] * n
    best_value = math.inf
    best_assignment: tuple[int, ...] | None = None

    def walk(i: int, acc: float) -> None:
        nonlocal best_value, best_assignment
        if acc >= best_value:
            return
        if i == n:
            best_value = acc
            best_assignment = tuple(chosen)
            return
        for j in range(m):
            if remaining[j] == 0:
                continue
            d = dists[i][j]
            nxt = acc + d if objective is WelfareObjective.TOTAL else max(acc, d)
            remaining[j] -= 1
            chosen[i] = j + 1
            walk(i + 1, nxt)
            remaining[j] += 1

    walk(0, 0.0)
    assert best_assignment is not None
    welfare = evaluate(profile, Solution(locations, best_assignment), objective)
    return best_assignment, welfare


def approximation_ratio(
    descriptor: MechanismDescriptor,
    profile: AgentProfile,
    spec: FacilitySpec,
    objective: WelfareObjective,
) -> RatioReport:
    """Ratio of a mechanism's welfare to the exact optimum on one instance."""
    mech = evaluate(profile, run_mechanism(descriptor, profile, spec), objective)
    opt, _ = optimal_welfare(profile, spec, objective)
    return RatioReport.from_welfares(mech, opt)
