"""Stakeholder utility over root goals: evaluation, aggregation, disagreement."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

from .model import (
    AGGREGATE_STAKEHOLDER_ID,
    DomainError,
    GoalGraph,
    Metric,
    ScenarioError,
    UtilityFunction,
)
from .propagation import Scenario, piecewise_linear, propagate

DEFAULT_CONFLICT_THRESHOLD = 0.2


def eval_utility(fn: UtilityFunction, level: float, metric: Metric | None = None) -> float:
    """Piecewise-linear utility at a goal level, clamped outside the samples.

    With a metric supplied, levels outside its domain are rejected. Utilities
    stay in [0, 1] because the samples do and interpolation is between them.
    """
    if metric is not None and not metric.contains(level):
        raise DomainError(
            f"level {level} outside metric '{metric.id}' domain "
            f"[{metric.domain_min}, {metric.domain_max}]"
        )
    value, _ = piecewise_linear(fn.samples, level)
    return min(max(value, 0.0), 1.0)


def aggregate_utilities(fns: Sequence[UtilityFunction]) -> UtilityFunction:
    """Pointwise mean of several stakeholders' utility functions for one goal.

    Evaluated on the union of the sample levels, so the mean of
    piecewise-linear functions stays exact at every original knot.
    """
    if not fns:
        raise ScenarioError("cannot aggregate an empty utility list")
    goals = {fn.goal for fn in fns}
    if len(goals) > 1:
        raise ScenarioError(f"utility functions target different goals: {sorted(goals)}")
    levels = sorted({level for fn in fns for level, _ in fn.samples})
    samples = tuple(
        (level, math.fsum(eval_utility(fn, level) for fn in fns) / len(fns)) for level in levels
    )
    return UtilityFunction(stakeholder=AGGREGATE_STAKEHOLDER_ID, goal=fns[0].goal, samples=samples)


@dataclass(frozen=True)
class DisagreementReport:
    goal: str
    threshold: float
    profile: tuple[tuple[float, float], ...]  # (level, population stddev)
    max_stddev: float
    conflicts: tuple[float, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "goal": self.goal,
            "threshold": self.threshold,
            "profile": [[level, dev] for level, dev in self.profile],
            "max_stddev": self.max_stddev,
            "conflicts": list(self.conflicts),
        }


def disagreement(
    fns: Sequence[UtilityFunction], threshold: float = DEFAULT_CONFLICT_THRESHOLD
) -> DisagreementReport:
    """Where stakeholders' utility assignments diverge, and by how much.

    Population standard deviation at each union sample level; levels above
    the threshold are conflicts worth resolving before implementation.
    """
    if len(fns) < 2:
        raise ScenarioError("disagreement needs at least 2 stakeholders")
    goals = {fn.goal for fn in fns}
    if len(goals) > 1:
        raise ScenarioError(f"utility functions target different goals: {sorted(goals)}")
    levels = sorted({level for fn in fns for level, _ in fn.samples})
    profile: list[tuple[float, float]] = []
    conflicts: list[float] = []
    for level in levels:
        values = [eval_utility(fn, level) for fn in fns]
        mean = math.fsum(values) / len(values)
        stddev = math.sqrt(math.fsum((v - mean) ** 2 for v in values) / len(values))
        profile.append((level, stddev))
        if stddev > threshold:
            conflicts.append(level)
    return DisagreementReport(
        goal=fns[0].goal,
        threshold=threshold,
        profile=tuple(profile),
        max_stddev=max(dev for _, dev in profile),
        conflicts=tuple(conflicts),
    )


@dataclass(frozen=True)
class GoalUtility:
    level: float
    aggregate: float
    stakeholders: Mapping[str, float]

    def to_dict(self) -> dict[str, Any]:
        return {
            "level": self.level,
            "aggregate": self.aggregate,
            "stakeholders": dict(self.stakeholders),
        }


@dataclass(frozen=True)
class ScenarioUtility:
    profile: str
    weights: Mapping[str, float]
    root_goals: Mapping[str, GoalUtility]
    stakeholders: Mapping[str, float]
    aggregate: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "profile": self.profile,
            "weights": dict(self.weights),
            "root_goals": {k: v.to_dict() for k, v in self.root_goals.items()},
            "stakeholders": dict(self.stakeholders),
            "aggregate": self.aggregate,
        }


def scenario_utility(
    graph: GoalGraph,
    scenario: Scenario,
    weights: Mapping[str, float] | None = None,
) -> ScenarioUtility:
    """Stakeholder and crowd utility of a scenario's propagated root-goal levels.

    Per stakeholder: weighted sum over root goals of their utility at the
    attained level (weights default to equal and are normalized to sum 1).
    The aggregate total uses the pointwise-mean functions. Stakeholders who
    rated only some root goals contribute on those goals alone.
    """
    roots = graph.root_goals()
    if not roots:
        raise ScenarioError("graph has no root goals to value")
    root_ids = [g.id for g in roots]
    raw = {goal_id: 1.0 for goal_id in root_ids} if weights is None else dict(weights)
    unknown = sorted(set(raw) - set(root_ids))
    if unknown:
        raise ScenarioError(f"weights name non-root goals: {unknown}")
    if any(w < 0 for w in raw.values()):
        raise DomainError("weights must be non-negative")
    total_weight = math.fsum(raw.get(goal_id, 0.0) for goal_id in root_ids)
    if total_weight <= 0:
        raise DomainError("weights must normalize: at least one root goal needs weight > 0")
    normalized = {goal_id: raw.get(goal_id, 0.0) / total_weight for goal_id in root_ids}

    result = propagate(graph, scenario)
    goal_utilities: dict[str, GoalUtility] = {}
    stakeholder_totals: dict[str, float] = {}
    aggregate_total = 0.0
    for goal in sorted(roots, key=lambda g: g.id):
        fns = graph.utilities_for(goal.id)
        if not fns:
            raise ScenarioError(f"root goal '{goal.id}' has no utility functions")
        level = result.outcome(goal.id).attained_level
        if level is None:
            raise ScenarioError(f"root goal '{goal.id}' has no attained level")
        per_stakeholder = {fn.stakeholder: eval_utility(fn, level) for fn in fns}
        aggregate_value = eval_utility(aggregate_utilities(fns), level)
        goal_utilities[goal.id] = GoalUtility(
            level=level, aggregate=aggregate_value, stakeholders=per_stakeholder
        )
        weight = normalized[goal.id]
        aggregate_total += weight * aggregate_value
        for stakeholder_id, value in per_stakeholder.items():
            stakeholder_totals[stakeholder_id] = (
                stakeholder_totals.get(stakeholder_id, 0.0) + weight * value
            )
    return ScenarioUtility(
        profile=scenario.profile,
        weights=normalized,
        root_goals=goal_utilities,
        stakeholders=dict(sorted(stakeholder_totals.items())),
        aggregate=aggregate_total,
    )
