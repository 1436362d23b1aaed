"""Interpolation of contribution links and bottom-up scenario propagation.

Deltas are additive against per-profile baselines, so the all-As-Is scenario
recovers every baseline exactly. Confidence composes conservatively: a node is
only as trustworthy as its weakest inbound estimate chain.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

from .model import (
    AS_IS,
    TO_BE,
    TASK_STATES,
    AggregationPolicy,
    ContributionLink,
    DomainError,
    EvaluationError,
    GoalGraph,
    ModelError,
    Node,
    NodeKind,
    ScenarioError,
)

GRID_POINTS = 1000
BISECT_RELATIVE_TOL = 1e-6

# Internal: maps (link id, sample index) to a replacement delta for the active
# profile. Monte-Carlo runs rebuild the piecewise functions this way without
# copying the graph.
DeltaOverrides = Mapping[tuple[str, int], float]


def piecewise_linear(points: Sequence[tuple[float, float]], x: float) -> tuple[float, bool]:
    """Clamped piecewise-linear lookup over sorted (x, y) points.

    Returns (value, extrapolated). Hits sample points exactly; outside the
    sampled range the nearest sample's value is returned and the flag set.
    """
    if not points:
        raise EvaluationError("piecewise lookup over an empty sample list")
    xs = [p[0] for p in points]
    if x <= xs[0]:
        return points[0][1], x < xs[0]
    if x >= xs[-1]:
        return points[-1][1], x > xs[-1]
    hi = bisect_left(xs, x)
    if xs[hi] == x:
        return points[hi][1], False
    x0, y0 = points[hi - 1]
    x1, y1 = points[hi]
    t = (x - x0) / (x1 - x0)
    return y0 + t * (y1 - y0), False


@dataclass(frozen=True)
class LinkEval:
    target_delta: float
    confidence: float
    extrapolated: bool


def _profile_samples(link: ContributionLink, profile: str):
    try:
        return link.samples[profile]
    except KeyError:
        raise EvaluationError(
            f"link '{link.id}' has no samples for profile '{profile}'"
        ) from None


def eval_link(
    link: ContributionLink,
    profile: str,
    source: str | float,
    overrides: DeltaOverrides | None = None,
) -> LinkEval:
    """Evaluate one contribution link at a source state or level.

    Discrete links are exact lookups by state; continuous links interpolate
    both delta and confidence between the bracketing samples, clamping (and
    flagging) outside the elicited range.
    """
    entries = _profile_samples(link, profile)
    if not entries:
        raise EvaluationError(f"link '{link.id}' has an empty sample list for '{profile}'")

    def delta_of(index: int) -> float:
        if overrides is not None:
            replaced = overrides.get((link.id, index))
            if replaced is not None:
                return replaced
        return entries[index].target_delta

    discrete = entries[0].is_discrete
    if isinstance(source, str):
        if not discrete:
            raise EvaluationError(
                f"state {source!r} queried on continuous link '{link.id}'"
            )
        if source not in TASK_STATES:
            raise EvaluationError(f"unknown state {source!r} on link '{link.id}'")
        for i, sample in enumerate(entries):
            if sample.state == source:
                return LinkEval(delta_of(i), sample.confidence, False)
        raise EvaluationError(f"link '{link.id}' has no sample for state {source!r}")

    if discrete:
        raise EvaluationError(f"level {source} queried on discrete link '{link.id}'")
    level = float(source)
    deltas = [(s.source_level, delta_of(i)) for i, s in enumerate(entries)]  # type: ignore[misc]
    confidences = [(s.source_level, s.confidence) for s in entries]  # type: ignore[misc]
    delta, extrapolated = piecewise_linear(deltas, level)
    confidence, _ = piecewise_linear(confidences, level)
    return LinkEval(delta, confidence, extrapolated)


@dataclass(frozen=True)
class InboundContribution:
    target_delta: float
    confidence: float


@dataclass(frozen=True)
class AggregateOutcome:
    attained_level: float
    confidence: float


def aggregate_parent(
    graph: GoalGraph,
    target: Node,
    profile: str,
    inbound: Sequence[InboundContribution],
) -> AggregateOutcome:
    """Combine inbound contributions into the target's attained level.

    Policies: sum adds independent deltas, min/max keep the limiting one.
    Confidence is the minimum over inbound combined confidences; leaves get
    the baseline at confidence 1.
    """
    metric = graph.node_metric(target)
    if metric is None:
        raise ModelError(f"node '{target.id}' has no metric to aggregate on")
    baseline = graph.baseline_level(target, profile)
    if not inbound:
        return AggregateOutcome(metric.clamp(baseline), 1.0)
    deltas = [c.target_delta for c in inbound]
    policy = graph.aggregation_for(target.id)
    if policy == AggregationPolicy.MIN:
        combined = min(deltas)
    elif policy == AggregationPolicy.MAX:
        combined = max(deltas)
    else:
        combined = sum(deltas)
    confidence = min(c.confidence for c in inbound)
    confidence = min(max(confidence, 0.0), 1.0)
    return AggregateOutcome(metric.clamp(baseline + combined), confidence)


# -- scenarios ------------------------------------------------------------------


@dataclass(frozen=True)
class Scenario:
    """A complete assignment of task states/levels under one usage profile."""

    profile: str
    task_states: Mapping[str, str] = field(default_factory=dict)
    task_levels: Mapping[str, float] = field(default_factory=dict)

    def assignment_of(self, task_id: str) -> str | float:
        if task_id in self.task_states:
            return self.task_states[task_id]
        return self.task_levels[task_id]

    def with_assignment(self, task_id: str, value: str | float) -> "Scenario":
        states = dict(self.task_states)
        levels = dict(self.task_levels)
        if isinstance(value, str):
            levels.pop(task_id, None)
            states[task_id] = value
        else:
            states.pop(task_id, None)
            levels[task_id] = float(value)
        return Scenario(profile=self.profile, task_states=states, task_levels=levels)

    def to_dict(self) -> dict[str, Any]:
        assignments: dict[str, Any] = dict(self.task_states)
        assignments.update(self.task_levels)
        return {"profile": self.profile, "assignments": assignments}


def build_scenario(
    graph: GoalGraph,
    profile: str,
    assignments: Mapping[str, str | float] | None = None,
    fill_defaults: bool = True,
) -> Scenario:
    """Validate and complete a scenario.

    Unassigned tasks default to As-Is (functional) or their baseline level
    when ``fill_defaults`` is set; otherwise incompleteness is an error.
    """
    if profile not in graph.profile_ids():
        raise ScenarioError(f"unknown profile '{profile}'")
    assignments = dict(assignments or {})
    states: dict[str, str] = {}
    levels: dict[str, float] = {}
    for task_id, value in assignments.items():
        node = graph.find_node(task_id)
        if node is None:
            raise ScenarioError(f"unknown task '{task_id}'")
        if node.kind is not NodeKind.TASK:
            raise ScenarioError(f"'{task_id}' is a {node.kind.value}; scenarios assign tasks")
        if node.is_functional_task:
            if not isinstance(value, str):
                raise ScenarioError(
                    f"functional task '{task_id}' takes a state ({AS_IS}/{TO_BE}), got {value!r}"
                )
            if value not in TASK_STATES:
                raise ScenarioError(
                    f"functional task '{task_id}' takes {AS_IS} or {TO_BE}, got {value!r}"
                )
            states[task_id] = value
        else:
            if isinstance(value, str):
                raise ScenarioError(f"task '{task_id}' takes a numeric level, got {value!r}")
            level = float(value)
            metric = graph.node_metric(node)
            if metric is not None and not metric.contains(level):
                raise DomainError(
                    f"level {level} for '{task_id}' outside metric '{metric.id}' domain "
                    f"[{metric.domain_min}, {metric.domain_max}]"
                )
            levels[task_id] = level
    for task in graph.tasks():
        if task.id in states or task.id in levels:
            continue
        if not fill_defaults:
            raise ScenarioError(f"task '{task.id}' is unassigned")
        if task.is_functional_task:
            states[task.id] = AS_IS
        else:
            levels[task.id] = graph.baseline_level(task, profile)
    return Scenario(profile=profile, task_states=states, task_levels=levels)


# -- propagation ----------------------------------------------------------------


@dataclass(frozen=True)
class NodeOutcome:
    attained_level: float | None
    confidence: float
    extrapolated: bool
    state: str | None = None
    satisfaction_degree: float | None = None
    satisfied: bool | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "attained_level": self.attained_level,
            "confidence": self.confidence,
            "extrapolated": self.extrapolated,
            "state": self.state,
            "satisfaction_degree": self.satisfaction_degree,
            "satisfied": self.satisfied,
        }


@dataclass(frozen=True)
class PropagationResult:
    profile: str
    nodes: Mapping[str, NodeOutcome]

    def outcome(self, node_id: str) -> NodeOutcome:
        return self.nodes[node_id]

    def to_dict(self) -> dict[str, Any]:
        return {
            "profile": self.profile,
            "nodes": {node_id: outcome.to_dict() for node_id, outcome in self.nodes.items()},
        }


def topological_order(graph: GoalGraph) -> tuple[str, ...]:
    """Kahn's algorithm with id-sorted tie-breaking; rejects cycles."""
    indegree = {n.id: 0 for n in graph.nodes}
    for link in graph.links:
        if link.target in indegree and link.source in indegree:
            indegree[link.target] += 1
    ready = sorted(node_id for node_id, degree in indegree.items() if degree == 0)
    order: list[str] = []
    while ready:
        current = ready.pop(0)
        order.append(current)
        changed = False
        for link in graph.outbound(current):
            if link.target not in indegree:
                continue
            indegree[link.target] -= 1
            if indegree[link.target] == 0:
                ready.append(link.target)
                changed = True
        if changed:
            ready.sort()
    if len(order) != len(indegree):
        raise EvaluationError("graph has a contribution cycle; run validation")
    return tuple(order)


def _satisfaction(
    graph: GoalGraph, node: Node, profile: str, attained: float
) -> tuple[float, bool]:
    objective = node.objective
    assert objective is not None
    metric = graph.metric_for_id(objective.focus)
    magnitude = float(objective.magnitude)
    baseline = graph.baseline_level(node, profile)
    satisfied = metric.improves(attained, magnitude)
    if magnitude != baseline:
        degree = (attained - baseline) / (magnitude - baseline)
        degree = min(max(degree, 0.0), 1.0)
    else:
        degree = 1.0 if satisfied else 0.0
    return degree, satisfied


def propagate(
    graph: GoalGraph,
    scenario: Scenario,
    overrides: DeltaOverrides | None = None,
) -> PropagationResult:
    """Evaluate the whole graph bottom-up under a scenario.

    Task outcomes come straight from the scenario; each goal combines its
    inbound link evaluations via the target's aggregation policy. Objective
    goals additionally get a satisfaction degree and verdict.
    """
    profile = scenario.profile
    if profile not in graph.profile_ids():
        raise ScenarioError(f"unknown profile '{profile}'")
    outcomes: dict[str, NodeOutcome] = {}
    for node_id in topological_order(graph):
        node = graph.node_for_id(node_id)
        if node.kind is NodeKind.TASK:
            outcomes[node_id] = _task_outcome(graph, node, scenario)
            continue
        inbound: list[InboundContribution] = []
        extrapolated = False
        for link in sorted(graph.inbound(node_id), key=lambda l: l.id):
            source_outcome = outcomes[link.source]
            source_node = graph.node_for_id(link.source)
            source_value: str | float
            if source_node.is_functional_task:
                source_value = source_outcome.state or AS_IS
            else:
                if source_outcome.attained_level is None:
                    raise EvaluationError(f"source '{link.source}' has no level to sample")
                source_value = source_outcome.attained_level
            link_eval = eval_link(link, profile, source_value, overrides)
            inbound.append(
                InboundContribution(
                    target_delta=link_eval.target_delta,
                    confidence=link_eval.confidence * source_outcome.confidence,
                )
            )
            extrapolated = extrapolated or link_eval.extrapolated or source_outcome.extrapolated
        aggregate = aggregate_parent(graph, node, profile, inbound)
        degree = satisfied = None
        if node.objective is not None:
            degree, satisfied = _satisfaction(graph, node, profile, aggregate.attained_level)
        outcomes[node_id] = NodeOutcome(
            attained_level=aggregate.attained_level,
            confidence=aggregate.confidence,
            extrapolated=extrapolated,
            satisfaction_degree=degree,
            satisfied=satisfied,
        )
    return PropagationResult(profile=profile, nodes=outcomes)


def _task_outcome(graph: GoalGraph, node: Node, scenario: Scenario) -> NodeOutcome:
    if node.is_functional_task:
        try:
            state = scenario.task_states[node.id]
        except KeyError:
            raise ScenarioError(f"task '{node.id}' is unassigned") from None
        return NodeOutcome(attained_level=None, confidence=1.0, extrapolated=False, state=state)
    try:
        level = scenario.task_levels[node.id]
    except KeyError:
        raise ScenarioError(f"task '{node.id}' is unassigned") from None
    metric = graph.node_metric(node)
    if metric is not None:
        level = metric.clamp(level)
    return NodeOutcome(attained_level=level, confidence=1.0, extrapolated=False)


# -- comparison queries -----------------------------------------------------------


@dataclass(frozen=True)
class AncestorDelta:
    as_is_level: float
    to_be_level: float
    delta: float

    def to_dict(self) -> dict[str, float]:
        return {
            "as_is_level": self.as_is_level,
            "to_be_level": self.to_be_level,
            "delta": self.delta,
        }


@dataclass(frozen=True)
class BenefitDelta:
    task: str
    profile: str
    ancestors: Mapping[str, AncestorDelta]

    def to_dict(self) -> dict[str, Any]:
        return {
            "task": self.task,
            "profile": self.profile,
            "ancestors": {k: v.to_dict() for k, v in self.ancestors.items()},
        }


def benefit_delta(graph: GoalGraph, task_id: str, profile: str) -> BenefitDelta:
    """Compare As-Is against To-Be for one functional task across its ancestors.

    All other tasks are held at As-Is (or baseline), isolating the benefit the
    requirement's implementation is assumed to contribute.
    """
    node = graph.find_node(task_id)
    if node is None:
        raise ScenarioError(f"unknown task '{task_id}'")
    if not node.is_functional_task:
        raise ScenarioError(f"benefit comparison needs a functional task; '{task_id}' is not")
    base = build_scenario(graph, profile, {task_id: AS_IS})
    changed = base.with_assignment(task_id, TO_BE)
    before = propagate(graph, base)
    after = propagate(graph, changed)
    ancestors: dict[str, AncestorDelta] = {}
    for ancestor_id in sorted(graph.descendants(task_id)):
        b = before.outcome(ancestor_id).attained_level
        a = after.outcome(ancestor_id).attained_level
        if b is None or a is None:
            continue
        ancestors[ancestor_id] = AncestorDelta(as_is_level=b, to_be_level=a, delta=a - b)
    return BenefitDelta(task=task_id, profile=profile, ancestors=ancestors)


@dataclass(frozen=True)
class NodeDiff:
    before: float | None
    after: float | None
    delta: float
    confidence_after: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "before": self.before,
            "after": self.after,
            "delta": self.delta,
            "confidence_after": self.confidence_after,
        }


@dataclass(frozen=True)
class WhatifDiff:
    base_profile: str
    changed_profile: str
    cross_profile: bool
    nodes: Mapping[str, NodeDiff]

    def to_dict(self) -> dict[str, Any]:
        return {
            "base_profile": self.base_profile,
            "changed_profile": self.changed_profile,
            "cross_profile": self.cross_profile,
            "nodes": {k: v.to_dict() for k, v in self.nodes.items()},
        }


def whatif_diff(graph: GoalGraph, base: Scenario, changed: Scenario) -> WhatifDiff:
    """Element-wise diff of two propagations; cross-profile diffs are flagged."""
    before = propagate(graph, base)
    after = propagate(graph, changed)
    nodes: dict[str, NodeDiff] = {}
    for node_id in sorted(n.id for n in graph.nodes):
        b = before.outcome(node_id)
        a = after.outcome(node_id)
        if b.attained_level is None or a.attained_level is None:
            delta = 0.0
        else:
            delta = a.attained_level - b.attained_level
        nodes[node_id] = NodeDiff(
            before=b.attained_level,
            after=a.attained_level,
            delta=delta,
            confidence_after=a.confidence,
        )
    return WhatifDiff(
        base_profile=base.profile,
        changed_profile=changed.profile,
        cross_profile=base.profile != changed.profile,
        nodes=nodes,
    )


# -- tolerance ------------------------------------------------------------------


@dataclass(frozen=True)
class ToleranceSlack:
    variable: str
    goal: str
    kind: str  # "interval" or "states"
    satisfiable: bool
    lower: float | None = None
    upper: float | None = None
    states: tuple[str, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "variable": self.variable,
            "goal": self.goal,
            "kind": self.kind,
            "satisfiable": self.satisfiable,
        }
        if self.kind == "interval":
            out["lower"] = self.lower
            out["upper"] = self.upper
        else:
            out["states"] = list(self.states)
        return out


def tolerance_slack(
    graph: GoalGraph, scenario: Scenario, variable: str, objective_goal: str
) -> ToleranceSlack:
    """How far a task can vary before a downstream objective fails.

    For level-valued tasks: the maximal interval (grid scan plus bisection at
    the satisfied/unsatisfied boundaries to 1e-6 of domain width) keeping the
    named goal and every objective-bearing goal downstream of the variable
    satisfied. Functional tasks get the satisfying state subset instead.
    """
    task = graph.find_node(variable)
    if task is None or task.kind is not NodeKind.TASK:
        raise ScenarioError(f"'{variable}' is not a task")
    goal = graph.find_node(objective_goal)
    if goal is None or goal.objective is None:
        raise ScenarioError(f"'{objective_goal}' does not carry an objective")
    downstream = graph.descendants(variable)
    if objective_goal not in downstream:
        raise ScenarioError(f"'{objective_goal}' is not downstream of '{variable}'")
    watched = sorted(
        {objective_goal}
        | {n for n in downstream if (g := graph.find_node(n)) and g.objective is not None}
    )

    def satisfied_at(value: str | float) -> bool:
        result = propagate(graph, scenario.with_assignment(variable, value))
        return all(result.outcome(goal_id).satisfied for goal_id in watched)

    if task.is_functional_task:
        states = tuple(state for state in TASK_STATES if satisfied_at(state))
        return ToleranceSlack(
            variable=variable,
            goal=objective_goal,
            kind="states",
            satisfiable=bool(states),
            states=states,
        )

    metric = graph.node_metric(task)
    if metric is None:
        raise ModelError(f"task '{variable}' has no metric")
    lo, hi = metric.domain_min, metric.domain_max
    width = hi - lo
    step = width / (GRID_POINTS - 1)
    grid = [lo + i * step for i in range(GRID_POINTS - 1)] + [hi]
    flags = [satisfied_at(x) for x in grid]
    runs: list[tuple[int, int]] = []
    start: int | None = None
    for i, flag in enumerate(flags):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(grid) - 1))
    if not runs:
        return ToleranceSlack(
            variable=variable, goal=objective_goal, kind="interval", satisfiable=False
        )

    current = scenario.task_levels.get(variable)
    chosen = max(runs, key=lambda r: (r[1] - r[0], -r[0]))
    if current is not None and satisfied_at(current):
        for run in runs:
            if grid[run[0]] - step <= current <= grid[run[1]] + step:
                chosen = run
                break

    tol = BISECT_RELATIVE_TOL * width

    def refine(sat_x: float, unsat_x: float) -> float:
        # Shrink the bracket until it is narrower than the tolerance; the
        # satisfied endpoint is the reported boundary.
        while abs(unsat_x - sat_x) > tol:
            mid = (sat_x + unsat_x) / 2.0
            if satisfied_at(mid):
                sat_x = mid
            else:
                unsat_x = mid
        return sat_x

    first, last = chosen
    lower = lo if first == 0 else refine(grid[first], grid[first - 1])
    upper = hi if last == len(grid) - 1 else refine(grid[last], grid[last + 1])
    return ToleranceSlack(
        variable=variable,
        goal=objective_goal,
        kind="interval",
        satisfiable=True,
        lower=lower,
        upper=upper,
    )
