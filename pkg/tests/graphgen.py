"""Seeded random goal-graph builders shared by the property tests."""

from __future__ import annotations

import random

from goalbench.model import (
    AS_IS,
    TO_BE,
    AggregationPolicy,
    ContributionLink,
    ContributionSample,
    GoalGraph,
    Metric,
    MetricDirection,
    Node,
    NodeKind,
    Objective,
    Scale,
    Stakeholder,
    UsageProfile,
    UtilityFunction,
)
from goalbench.propagation import Scenario, build_scenario


def _metric(rng: random.Random, metric_id: str) -> Metric:
    lo = rng.uniform(-50.0, 50.0)
    hi = lo + rng.uniform(5.0, 100.0)
    return Metric(
        id=metric_id,
        name=metric_id,
        unit="units",
        scale=Scale.RATIO,
        domain_min=lo,
        domain_max=hi,
        direction=rng.choice((MetricDirection.MAXIMIZE, MetricDirection.MINIMIZE)),
    )


def _continuous_samples(
    rng: random.Random,
    source_metric: Metric,
    source_baseline: float,
    target_metric: Metric,
) -> tuple[ContributionSample, ...]:
    # Always sample the source baseline with delta 0: the additive model's
    # As-Is identity depends on it.
    levels = sorted({source_metric.domain_min, source_baseline, source_metric.domain_max})
    spread = target_metric.width / 3.0
    samples = []
    for level in levels:
        delta = 0.0 if level == source_baseline else rng.uniform(-spread, spread)
        samples.append(
            ContributionSample(
                target_delta=delta,
                confidence=rng.uniform(0.1, 1.0),
                source_level=level,
            )
        )
    return tuple(samples)


def _discrete_samples(rng: random.Random, target_metric: Metric) -> tuple[ContributionSample, ...]:
    spread = target_metric.width / 3.0
    return (
        ContributionSample(target_delta=0.0, confidence=rng.uniform(0.1, 1.0), state=AS_IS),
        ContributionSample(
            target_delta=rng.uniform(-spread, spread),
            confidence=rng.uniform(0.1, 1.0),
            state=TO_BE,
        ),
    )


def random_graph(rng: random.Random, max_nodes: int = 50) -> GoalGraph:
    """A valid random graph: tasks wired into ranked goals, objectives and
    utilities on every root goal, zero deltas at every As-Is point."""
    profile_ids = ["P1"] if rng.random() < 0.5 else ["P1", "P2"]
    profiles = tuple(UsageProfile(id=p, name=p) for p in profile_ids)
    stakeholders = (Stakeholder(id="SH1", name="one"), Stakeholder(id="SH2", name="two"))

    n_tasks = rng.randint(1, 4)
    n_goals = rng.randint(1, max(1, max_nodes - n_tasks))

    metrics: dict[str, Metric] = {}
    nodes: dict[str, Node] = {}
    links: list[ContributionLink] = []
    aggregation: dict[str, AggregationPolicy] = {}

    task_ids = []
    for i in range(n_tasks):
        task_id = f"T{i}"
        task_ids.append(task_id)
        if rng.random() < 0.5:
            nodes[task_id] = Node(id=task_id, kind=NodeKind.TASK, name=f"task {i}")
        else:
            metric = _metric(rng, f"MT{i}")
            metrics[metric.id] = metric
            baseline = {
                p: rng.uniform(metric.domain_min, metric.domain_max) for p in profile_ids
            }
            nodes[task_id] = Node(
                id=task_id,
                kind=NodeKind.TASK,
                name=f"task {i}",
                metric=metric.id,
                baseline=baseline,
            )

    goal_rank: dict[str, int] = {}
    for i in range(n_goals):
        goal_id = f"G{i}"
        metric = _metric(rng, f"MG{i}")
        metrics[metric.id] = metric
        baseline = {p: rng.uniform(metric.domain_min, metric.domain_max) for p in profile_ids}
        nodes[goal_id] = Node(
            id=goal_id, kind=NodeKind.GOAL, name=f"goal {i}", metric=metric.id, baseline=baseline
        )
        goal_rank[goal_id] = rng.randint(1, 4)
        if rng.random() < 0.25:
            aggregation[goal_id] = rng.choice(
                (AggregationPolicy.MIN, AggregationPolicy.MAX)
            )

    def make_link(source_id: str, target_id: str) -> None:
        source = nodes[source_id]
        target = nodes[target_id]
        target_metric = metrics[target.metric]  # type: ignore[index]
        samples: dict[str, tuple[ContributionSample, ...]] = {}
        for profile_id in profile_ids:
            if source.is_functional_task:
                samples[profile_id] = _discrete_samples(rng, target_metric)
            else:
                source_metric = metrics[source.metric]  # type: ignore[index]
                samples[profile_id] = _continuous_samples(
                    rng, source_metric, source.baseline[profile_id], target_metric
                )
        links.append(
            ContributionLink(
                id=f"L{len(links)}",
                source=source_id,
                target=target_id,
                samples=samples,
                provenance="generated",
            )
        )

    goal_ids_by_rank = sorted(goal_rank, key=lambda g: (goal_rank[g], g))
    for goal_id in goal_ids_by_rank:
        eligible = list(task_ids) + [g for g in goal_ids_by_rank if goal_rank[g] < goal_rank[goal_id]]
        for source_id in rng.sample(eligible, k=min(len(eligible), rng.randint(1, 2))):
            make_link(source_id, goal_id)

    linked_sources = {link.source for link in links}
    for task_id in task_ids:
        if task_id not in linked_sources:
            make_link(task_id, rng.choice(goal_ids_by_rank))

    outgoing = {link.source for link in links}
    utilities: list[UtilityFunction] = []
    final_nodes: dict[str, Node] = dict(nodes)
    for goal_id in goal_ids_by_rank:
        if goal_id in outgoing:
            continue
        node = nodes[goal_id]
        metric = metrics[node.metric]  # type: ignore[index]
        # Root goals carry an objective with the magnitude on the improving
        # side of every baseline, plus utilities for 1-2 stakeholders.
        baselines = list(node.baseline.values())
        if metric.direction is MetricDirection.MINIMIZE:
            magnitude = rng.uniform(metric.domain_min, min(baselines))
        else:
            magnitude = rng.uniform(max(baselines), metric.domain_max)
        final_nodes[goal_id] = Node(
            id=node.id,
            kind=node.kind,
            name=node.name,
            metric=node.metric,
            baseline=node.baseline,
            objective=Objective(
                activity="improve",
                focus=metric.id,
                magnitude=magnitude,
                timeframe="12 months",
                scope="team",
            ),
        )
        for stakeholder in stakeholders[: rng.randint(1, 2)]:
            utilities.append(
                UtilityFunction(
                    stakeholder=stakeholder.id,
                    goal=goal_id,
                    samples=(
                        (metric.domain_min, rng.random()),
                        (metric.domain_max, rng.random()),
                    ),
                )
            )

    return GoalGraph(
        metrics=tuple(sorted(metrics.values(), key=lambda m: m.id)),
        profiles=profiles,
        stakeholders=stakeholders,
        nodes=tuple(sorted(final_nodes.values(), key=lambda n: n.id)),
        links=tuple(sorted(links, key=lambda l: l.id)),
        utilities=tuple(sorted(utilities, key=lambda u: (u.goal, u.stakeholder))),
        aggregation=aggregation,
    )


def as_is_scenario(graph: GoalGraph, profile: str) -> Scenario:
    return build_scenario(graph, profile, {})


def random_scenario(graph: GoalGraph, rng: random.Random) -> Scenario:
    profile = rng.choice(graph.profile_ids())
    assignments: dict[str, str | float] = {}
    for task in graph.tasks():
        if task.is_functional_task:
            assignments[task.id] = rng.choice((AS_IS, TO_BE))
        else:
            metric = graph.node_metric(task)
            assert metric is not None
            assignments[task.id] = rng.uniform(metric.domain_min, metric.domain_max)
    return build_scenario(graph, profile, assignments)


def random_dag(rng: random.Random, max_nodes: int = 40) -> GoalGraph:
    """Topology-only DAG of goal nodes for layout tests (samples unused)."""
    count = rng.randint(2, max_nodes)
    node_ids = [f"N{i:02d}" for i in range(count)]
    nodes = tuple(
        Node(id=node_id, kind=NodeKind.GOAL, name=f"node {node_id}") for node_id in node_ids
    )
    links = []
    probability = rng.uniform(0.05, 0.3)
    for i in range(count):
        for j in range(i + 1, count):
            if rng.random() < probability:
                links.append(
                    ContributionLink(
                        id=f"E{len(links):03d}",
                        source=node_ids[i],
                        target=node_ids[j],
                        samples={},
                    )
                )
    return GoalGraph(
        profiles=(UsageProfile(id="P1", name="P1"),), nodes=nodes, links=tuple(links)
    )


def tiny_valid_graph() -> GoalGraph:
    """Smallest lint-clean graph: one functional task feeding one objective-
    bearing root goal with a utility function."""
    metric = Metric(
        id="M",
        name="effort",
        unit="hours/month",
        scale=Scale.RATIO,
        domain_min=0.0,
        domain_max=100.0,
        direction=MetricDirection.MINIMIZE,
    )
    task = Node(
        id="T",
        kind=NodeKind.TASK,
        name="automate the chore",
        description="replace the manual step",
        rationale="manual effort is recurring",
    )
    goal = Node(
        id="G",
        kind=NodeKind.GOAL,
        name="minimise chore effort",
        description="monthly hours on the chore",
        metric="M",
        baseline={"P1": 50.0},
        objective=Objective(
            activity="reduce",
            focus="M",
            magnitude=30.0,
            timeframe="12 months",
            scope="ops team",
        ),
        rationale="effort is pure overhead",
    )
    link = ContributionLink(
        id="L",
        source="T",
        target="G",
        samples={
            "P1": (
                ContributionSample(target_delta=0.0, confidence=1.0, state=AS_IS),
                ContributionSample(target_delta=-25.0, confidence=0.9, state=TO_BE),
            )
        },
        provenance="estimated by ops lead",
        absolute_figures=True,
    )
    return GoalGraph(
        metrics=(metric,),
        profiles=(UsageProfile(id="P1", name="P1"),),
        stakeholders=(Stakeholder(id="SH1", name="ops"),),
        nodes=(goal, task),
        links=(link,),
        utilities=(
            UtilityFunction(stakeholder="SH1", goal="G", samples=((0.0, 1.0), (100.0, 0.0))),
        ),
    )


def seeded_defect_graphs() -> dict[str, GoalGraph]:
    """One graph per validation defect class, each violating exactly one rule."""
    import dataclasses

    base = tiny_valid_graph()
    metric = base.metrics[0]
    goal = next(n for n in base.nodes if n.id == "G")
    task = next(n for n in base.nodes if n.id == "T")

    def continuous(source_baseline: float) -> dict:
        return {
            "P1": (
                ContributionSample(
                    target_delta=0.0, confidence=0.9, source_level=source_baseline
                ),
                ContributionSample(target_delta=5.0, confidence=0.9, source_level=80.0),
            )
        }

    goal_a = dataclasses.replace(goal, id="A", objective=None)
    goal_b = dataclasses.replace(goal, id="B", objective=None)
    cycle = GoalGraph(
        metrics=base.metrics,
        profiles=base.profiles,
        stakeholders=base.stakeholders,
        nodes=(goal_a, goal_b),
        links=(
            ContributionLink(
                id="LAB", source="A", target="B", samples=continuous(50.0),
                provenance="p",
            ),
            ContributionLink(
                id="LBA", source="B", target="A", samples=continuous(50.0),
                provenance="p",
            ),
        ),
    )

    dangling = dataclasses.replace(
        base,
        links=base.links
        + (
            ContributionLink(
                id="LX", source="GHOST", target="G", samples={}, provenance="p"
            ),
        ),
    )

    orphan = dataclasses.replace(
        base,
        nodes=(dataclasses.replace(goal, objective=None), task),
    )

    bad_objective = dataclasses.replace(
        base,
        nodes=(
            dataclasses.replace(
                goal,
                objective=dataclasses.replace(goal.objective, magnitude=999.0),
            ),
            task,
        ),
    )

    no_utility = dataclasses.replace(base, utilities=())

    relative_only = dataclasses.replace(
        base,
        links=(dataclasses.replace(base.links[0], absolute_figures=False),),
    )

    return {
        "cycle": cycle,
        "dangling-reference": dangling,
        "orphan-task": orphan,
        "unquantified-objective": bad_objective,
        "root-goal-without-utility": no_utility,
        "relative-only-contribution": relative_only,
    }
