"""Domain model for quantified goal graphs: types, document format, validation.

A goal graph relates task nodes (requirements to implement) to goal nodes
(measurable outcomes) through contribution links whose per-profile sample
data drives interpolation-based propagation. The on-disk format is a single
JSON document tagged ``goalbench/1``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping, NoReturn, Sequence

FORMAT_TAG = "goalbench/1"
DEFAULT_PROFILE_ID = "Normal"

AS_IS = "AsIs"
TO_BE = "ToBe"
TASK_STATES = (AS_IS, TO_BE)

AGGREGATE_STAKEHOLDER_ID = "aggregate"


class GoalbenchError(Exception):
    """Base class for all engine errors."""


class ModelError(GoalbenchError):
    """A model document cannot be parsed, or its cross-references are broken."""


class ScenarioError(GoalbenchError):
    """A scenario is structurally invalid (unknown ids, wrong assignment kind)."""


class DomainError(GoalbenchError):
    """A value lies outside its admissible domain."""


class EvaluationError(GoalbenchError):
    """Propagation cannot evaluate a contribution link."""


class Scale(str, Enum):
    RATIO = "ratio"
    INTERVAL = "interval"
    ORDINAL = "ordinal"


class MetricDirection(str, Enum):
    MAXIMIZE = "maximize"
    MINIMIZE = "minimize"


class NodeKind(str, Enum):
    TASK = "task"
    GOAL = "goal"


class AggregationPolicy(str, Enum):
    SUM = "sum"
    MIN = "min"
    MAX = "max"


class Severity(str, Enum):
    ERROR = "ERROR"
    WARNING = "WARNING"


class EstimateKind(str, Enum):
    POINT = "point"
    INTERVAL = "interval"
    THREE_POINT = "three_point"


@dataclass(frozen=True)
class Metric:
    id: str
    name: str
    unit: str
    scale: Scale
    domain_min: float
    domain_max: float
    direction: MetricDirection

    def contains(self, level: float) -> bool:
        return self.domain_min <= level <= self.domain_max

    def clamp(self, level: float) -> float:
        return min(max(level, self.domain_min), self.domain_max)

    @property
    def width(self) -> float:
        return self.domain_max - self.domain_min

    def improves(self, attained: float, required: float) -> bool:
        """Whether ``attained`` meets ``required`` in this metric's direction."""
        if self.direction is MetricDirection.MAXIMIZE:
            return attained >= required
        return attained <= required


@dataclass(frozen=True)
class UsageProfile:
    id: str
    name: str
    description: str = ""


@dataclass(frozen=True)
class Stakeholder:
    id: str
    name: str


@dataclass(frozen=True)
class Objective:
    """A required magnitude on a goal, stated with the full definition template."""

    activity: str
    focus: str
    magnitude: float
    timeframe: str
    scope: str
    constraints: str = ""


@dataclass(frozen=True)
class Estimate:
    """Alternative representation of a contribution delta: a point value, an
    interval, or a worst/likely/best triple."""

    kind: EstimateKind
    values: tuple[float, ...]

    @classmethod
    def point(cls, value: float) -> "Estimate":
        return cls(EstimateKind.POINT, (float(value),))

    @classmethod
    def interval(cls, low: float, high: float) -> "Estimate":
        if low > high:
            raise DomainError(f"interval estimate requires low <= high, got [{low}, {high}]")
        return cls(EstimateKind.INTERVAL, (float(low), float(high)))

    @classmethod
    def three_point(cls, worst: float, likely: float, best: float) -> "Estimate":
        # Reversed ordering (worst > best) is accepted and normalized: for
        # reduction-style deltas the worst case is the smaller improvement.
        lo, hi = min(worst, best), max(worst, best)
        if not lo <= likely <= hi:
            raise DomainError(
                f"three-point estimate requires likely between worst and best, got "
                f"({worst}, {likely}, {best})"
            )
        return cls(EstimateKind.THREE_POINT, (float(lo), float(likely), float(hi)))

    @property
    def central(self) -> float:
        """Deterministic stand-in delta: point value, interval midpoint, or likely."""
        if self.kind is EstimateKind.POINT:
            return self.values[0]
        if self.kind is EstimateKind.INTERVAL:
            return (self.values[0] + self.values[1]) / 2.0
        return self.values[1]

    def to_dict(self) -> dict[str, Any]:
        if self.kind is EstimateKind.POINT:
            return {"point": self.values[0]}
        return {self.kind.value: list(self.values)}


@dataclass(frozen=True)
class ContributionSample:
    """One elicited data point of a contribution link.

    Continuous samples carry ``source_level``; discrete samples carry
    ``state`` (AsIs/ToBe). ``target_delta`` is additive against the target's
    per-profile baseline; ``confidence`` is the estimator's confidence in
    this data point.
    """

    target_delta: float
    confidence: float
    source_level: float | None = None
    state: str | None = None
    estimate: Estimate | None = None

    @property
    def is_discrete(self) -> bool:
        return self.state is not None


@dataclass(frozen=True)
class ContributionLink:
    id: str
    source: str
    target: str
    samples: Mapping[str, tuple[ContributionSample, ...]]
    provenance: str = ""
    absolute_figures: bool = True


@dataclass(frozen=True)
class UtilityFunction:
    """Per-stakeholder mapping from a root goal's level to utility in [0, 1]."""

    stakeholder: str
    goal: str
    samples: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class Node:
    id: str
    kind: NodeKind
    name: str
    description: str = ""
    metric: str | None = None
    objective: Objective | None = None
    baseline: Mapping[str, float] = field(default_factory=dict)
    rationale: str = ""

    @property
    def is_functional_task(self) -> bool:
        """Functional tasks have no metric; their state space is AsIs/ToBe."""
        return self.kind is NodeKind.TASK and self.metric is None


@dataclass(frozen=True)
class Metadata:
    name: str = ""
    version: str = ""
    authors: tuple[str, ...] = ()


@dataclass(frozen=True)
class GoalGraph:
    """Immutable goal graph; all analysis operations are pure functions of it."""

    metadata: Metadata = field(default_factory=Metadata)
    metrics: tuple[Metric, ...] = ()
    profiles: tuple[UsageProfile, ...] = ()
    stakeholders: tuple[Stakeholder, ...] = ()
    nodes: tuple[Node, ...] = ()
    links: tuple[ContributionLink, ...] = ()
    utilities: tuple[UtilityFunction, ...] = ()
    aggregation: Mapping[str, AggregationPolicy] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_metric_index", {m.id: m for m in self.metrics})
        object.__setattr__(self, "_node_index", {n.id: n for n in self.nodes})
        object.__setattr__(self, "_link_index", {l.id: l for l in self.links})
        inbound: dict[str, list[ContributionLink]] = {}
        outbound: dict[str, list[ContributionLink]] = {}
        for link in self.links:
            inbound.setdefault(link.target, []).append(link)
            outbound.setdefault(link.source, []).append(link)
        object.__setattr__(self, "_inbound", {k: tuple(v) for k, v in inbound.items()})
        object.__setattr__(self, "_outbound", {k: tuple(v) for k, v in outbound.items()})

    # -- lookups ------------------------------------------------------------

    def metric_for_id(self, metric_id: str) -> Metric:
        try:
            return self._metric_index[metric_id]  # type: ignore[attr-defined]
        except KeyError:
            raise ModelError(f"dangling reference: metric '{metric_id}' is not declared") from None

    def node_for_id(self, node_id: str) -> Node:
        try:
            return self._node_index[node_id]  # type: ignore[attr-defined]
        except KeyError:
            raise ModelError(f"dangling reference: node '{node_id}' is not declared") from None

    def find_node(self, node_id: str) -> Node | None:
        return self._node_index.get(node_id)  # type: ignore[attr-defined]

    def find_metric(self, metric_id: str) -> Metric | None:
        return self._metric_index.get(metric_id)  # type: ignore[attr-defined]

    def node_metric(self, node: Node) -> Metric | None:
        return None if node.metric is None else self.find_metric(node.metric)

    def profile_ids(self) -> tuple[str, ...]:
        return tuple(p.id for p in self.profiles)

    def inbound(self, node_id: str) -> tuple[ContributionLink, ...]:
        return self._inbound.get(node_id, ())  # type: ignore[attr-defined]

    def outbound(self, node_id: str) -> tuple[ContributionLink, ...]:
        return self._outbound.get(node_id, ())  # type: ignore[attr-defined]

    def tasks(self) -> tuple[Node, ...]:
        return tuple(n for n in self.nodes if n.kind is NodeKind.TASK)

    def goals(self) -> tuple[Node, ...]:
        return tuple(n for n in self.nodes if n.kind is NodeKind.GOAL)

    def root_goals(self) -> tuple[Node, ...]:
        return tuple(n for n in self.goals() if not self.outbound(n.id))

    def objective_goals(self) -> tuple[Node, ...]:
        return tuple(n for n in self.goals() if n.objective is not None)

    def utilities_for(self, goal_id: str) -> tuple[UtilityFunction, ...]:
        return tuple(u for u in self.utilities if u.goal == goal_id)

    def aggregation_for(self, node_id: str) -> AggregationPolicy:
        return self.aggregation.get(node_id, AggregationPolicy.SUM)

    def baseline_level(self, node: Node, profile_id: str) -> float:
        try:
            return node.baseline[profile_id]
        except KeyError:
            raise ModelError(
                f"node '{node.id}' has no baseline for profile '{profile_id}'"
            ) from None

    def descendants(self, node_id: str) -> set[str]:
        """All nodes reachable from ``node_id`` via contribution links."""
        seen: set[str] = set()
        frontier = [node_id]
        while frontier:
            current = frontier.pop()
            for link in self.outbound(current):
                if link.target not in seen:
                    seen.add(link.target)
                    frontier.append(link.target)
        return seen


# -- validation report --------------------------------------------------------


@dataclass(frozen=True)
class Finding:
    rule: str
    severity: Severity
    subject: str
    message: str

    def to_dict(self) -> dict[str, str]:
        return {
            "rule": self.rule,
            "severity": self.severity.value,
            "subject": self.subject,
            "message": self.message,
        }


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...]

    @property
    def errors(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity is Severity.ERROR)

    @property
    def warnings(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity is Severity.WARNING)

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_dict(self) -> dict[str, Any]:
        return {
            "findings": [f.to_dict() for f in self.findings],
            "error_count": len(self.errors),
            "warning_count": len(self.warnings),
            "ok": self.ok,
        }


# -- document parsing ---------------------------------------------------------


def _fail(path: str, message: str) -> NoReturn:
    raise ModelError(f"{path}: {message}")


def _expect_object(
    value: Any, path: str, required: set[str], optional: set[str] | None = None
) -> dict[str, Any]:
    if not isinstance(value, dict):
        _fail(path, f"expected object, got {type(value).__name__}")
    allowed = required | (optional or set())
    unknown = sorted(k for k in value if k not in allowed)
    if unknown:
        _fail(path, f"unknown fields: {unknown}")
    missing = sorted(k for k in required if k not in value)
    if missing:
        _fail(path, f"missing required fields: {missing}")
    return value


def _as_str(value: Any, path: str) -> str:
    if not isinstance(value, str):
        _fail(path, f"expected string, got {type(value).__name__}")
    return value


def _as_bool(value: Any, path: str) -> bool:
    if not isinstance(value, bool):
        _fail(path, f"expected boolean, got {type(value).__name__}")
    return value


def _as_float(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, f"expected number, got {type(value).__name__}")
    out = float(value)
    if not math.isfinite(out):
        _fail(path, "number must be finite")
    return out


def _as_list(value: Any, path: str) -> list[Any]:
    if not isinstance(value, list):
        _fail(path, f"expected array, got {type(value).__name__}")
    return value


def _as_enum(enum_type: type, value: Any, path: str) -> Any:
    raw = _as_str(value, path)
    try:
        return enum_type(raw)
    except ValueError:
        allowed = ", ".join(sorted(item.value for item in enum_type))
        _fail(path, f"invalid value {raw!r}; expected one of: {allowed}")


def _check_unique(ids: Sequence[str], section: str) -> None:
    seen: set[str] = set()
    for item in ids:
        if item in seen:
            raise ModelError(f"duplicate id '{item}' in {section}")
        seen.add(item)


def _parse_metric(raw: Any, path: str) -> Metric:
    obj = _expect_object(
        raw, path, {"id", "name", "unit", "scale", "domain_min", "domain_max", "direction"}
    )
    return Metric(
        id=_as_str(obj["id"], f"{path}.id"),
        name=_as_str(obj["name"], f"{path}.name"),
        unit=_as_str(obj["unit"], f"{path}.unit"),
        scale=_as_enum(Scale, obj["scale"], f"{path}.scale"),
        domain_min=_as_float(obj["domain_min"], f"{path}.domain_min"),
        domain_max=_as_float(obj["domain_max"], f"{path}.domain_max"),
        direction=_as_enum(MetricDirection, obj["direction"], f"{path}.direction"),
    )


def _parse_profile(raw: Any, path: str) -> UsageProfile:
    obj = _expect_object(raw, path, {"id", "name"}, {"description"})
    return UsageProfile(
        id=_as_str(obj["id"], f"{path}.id"),
        name=_as_str(obj["name"], f"{path}.name"),
        description=_as_str(obj.get("description", ""), f"{path}.description"),
    )


def _parse_objective(raw: Any, path: str) -> Objective:
    obj = _expect_object(
        raw, path, {"activity", "focus", "magnitude", "timeframe", "scope"}, {"constraints"}
    )
    return Objective(
        activity=_as_str(obj["activity"], f"{path}.activity"),
        focus=_as_str(obj["focus"], f"{path}.focus"),
        magnitude=_as_float(obj["magnitude"], f"{path}.magnitude"),
        timeframe=_as_str(obj["timeframe"], f"{path}.timeframe"),
        scope=_as_str(obj["scope"], f"{path}.scope"),
        constraints=_as_str(obj.get("constraints", ""), f"{path}.constraints"),
    )


def _parse_node(raw: Any, path: str) -> Node:
    obj = _expect_object(
        raw,
        path,
        {"id", "kind", "name"},
        {"description", "metric", "objective", "baseline", "rationale"},
    )
    baseline_raw = obj.get("baseline", {})
    if not isinstance(baseline_raw, dict):
        _fail(f"{path}.baseline", "expected object mapping profile ids to levels")
    baseline = {
        _as_str(k, f"{path}.baseline key"): _as_float(v, f"{path}.baseline.{k}")
        for k, v in baseline_raw.items()
    }
    metric = obj.get("metric")
    objective = obj.get("objective")
    return Node(
        id=_as_str(obj["id"], f"{path}.id"),
        kind=_as_enum(NodeKind, obj["kind"], f"{path}.kind"),
        name=_as_str(obj["name"], f"{path}.name"),
        description=_as_str(obj.get("description", ""), f"{path}.description"),
        metric=None if metric is None else _as_str(metric, f"{path}.metric"),
        objective=None if objective is None else _parse_objective(objective, f"{path}.objective"),
        baseline=baseline,
        rationale=_as_str(obj.get("rationale", ""), f"{path}.rationale"),
    )


def _parse_estimate(raw: Any, path: str) -> Estimate:
    obj = _expect_object(raw, path, set(), {"point", "interval", "three_point"})
    if len(obj) != 1:
        _fail(path, "estimate must carry exactly one of point/interval/three_point")
    try:
        if "point" in obj:
            return Estimate.point(_as_float(obj["point"], f"{path}.point"))
        if "interval" in obj:
            pair = _as_list(obj["interval"], f"{path}.interval")
            if len(pair) != 2:
                _fail(f"{path}.interval", "expected [low, high]")
            return Estimate.interval(
                _as_float(pair[0], f"{path}.interval[0]"),
                _as_float(pair[1], f"{path}.interval[1]"),
            )
        triple = _as_list(obj["three_point"], f"{path}.three_point")
        if len(triple) != 3:
            _fail(f"{path}.three_point", "expected [worst, likely, best]")
        return Estimate.three_point(
            _as_float(triple[0], f"{path}.three_point[0]"),
            _as_float(triple[1], f"{path}.three_point[1]"),
            _as_float(triple[2], f"{path}.three_point[2]"),
        )
    except DomainError as exc:
        _fail(path, str(exc))


def _parse_sample(raw: Any, path: str) -> ContributionSample:
    obj = _expect_object(
        raw, path, {"confidence"}, {"source_level", "state", "target_delta", "estimate"}
    )
    if ("source_level" in obj) == ("state" in obj):
        _fail(path, "sample must carry exactly one of source_level or state")
    state = None
    source_level = None
    if "state" in obj:
        state = _as_str(obj["state"], f"{path}.state")
        if state not in TASK_STATES:
            _fail(f"{path}.state", f"expected one of {list(TASK_STATES)}, got {state!r}")
    else:
        source_level = _as_float(obj["source_level"], f"{path}.source_level")
    estimate = None
    if "estimate" in obj:
        estimate = _parse_estimate(obj["estimate"], f"{path}.estimate")
    if "target_delta" in obj:
        target_delta = _as_float(obj["target_delta"], f"{path}.target_delta")
    elif estimate is not None:
        target_delta = estimate.central
    else:
        _fail(path, "sample must carry target_delta or an estimate")
    return ContributionSample(
        target_delta=target_delta,
        confidence=_as_float(obj["confidence"], f"{path}.confidence"),
        source_level=source_level,
        state=state,
        estimate=estimate,
    )


def _sample_sort_key(sample: ContributionSample) -> tuple[int, float]:
    if sample.state is not None:
        return (0, float(TASK_STATES.index(sample.state)))
    return (1, sample.source_level if sample.source_level is not None else 0.0)


def _parse_link(raw: Any, path: str) -> ContributionLink:
    obj = _expect_object(
        raw, path, {"id", "source", "target", "samples"}, {"absolute_figures", "provenance"}
    )
    samples_raw = obj["samples"]
    if not isinstance(samples_raw, dict):
        _fail(f"{path}.samples", "expected object mapping profile ids to sample arrays")
    samples: dict[str, tuple[ContributionSample, ...]] = {}
    for profile_id, entries in samples_raw.items():
        profile_key = _as_str(profile_id, f"{path}.samples key")
        parsed = [
            _parse_sample(entry, f"{path}.samples.{profile_key}[{i}]")
            for i, entry in enumerate(_as_list(entries, f"{path}.samples.{profile_key}"))
        ]
        samples[profile_key] = tuple(sorted(parsed, key=_sample_sort_key))
    return ContributionLink(
        id=_as_str(obj["id"], f"{path}.id"),
        source=_as_str(obj["source"], f"{path}.source"),
        target=_as_str(obj["target"], f"{path}.target"),
        samples=samples,
        provenance=_as_str(obj.get("provenance", ""), f"{path}.provenance"),
        absolute_figures=_as_bool(obj.get("absolute_figures", True), f"{path}.absolute_figures"),
    )


def _parse_utility(raw: Any, path: str) -> UtilityFunction:
    obj = _expect_object(raw, path, {"stakeholder", "goal", "samples"})
    pairs: list[tuple[float, float]] = []
    for i, entry in enumerate(_as_list(obj["samples"], f"{path}.samples")):
        pair = _as_list(entry, f"{path}.samples[{i}]")
        if len(pair) != 2:
            _fail(f"{path}.samples[{i}]", "expected [level, utility]")
        pairs.append(
            (
                _as_float(pair[0], f"{path}.samples[{i}][0]"),
                _as_float(pair[1], f"{path}.samples[{i}][1]"),
            )
        )
    return UtilityFunction(
        stakeholder=_as_str(obj["stakeholder"], f"{path}.stakeholder"),
        goal=_as_str(obj["goal"], f"{path}.goal"),
        samples=tuple(sorted(pairs)),
    )


def _parse_metadata(raw: Any, path: str) -> Metadata:
    obj = _expect_object(raw, path, set(), {"name", "version", "authors"})
    authors = tuple(
        _as_str(a, f"{path}.authors[{i}]")
        for i, a in enumerate(_as_list(obj.get("authors", []), f"{path}.authors"))
    )
    return Metadata(
        name=_as_str(obj.get("name", ""), f"{path}.name"),
        version=_as_str(obj.get("version", ""), f"{path}.version"),
        authors=authors,
    )


def _resolve_references(graph: GoalGraph) -> None:
    """Raise ModelError on any dangling cross-reference in a parsed document."""
    metric_ids = {m.id for m in graph.metrics}
    profile_ids = set(graph.profile_ids())
    node_ids = {n.id for n in graph.nodes}
    stakeholder_ids = {s.id for s in graph.stakeholders}
    for node in graph.nodes:
        if node.metric is not None and node.metric not in metric_ids:
            raise ModelError(
                f"dangling reference: node '{node.id}' metric '{node.metric}' is not declared"
            )
        if node.objective is not None and node.objective.focus not in metric_ids:
            raise ModelError(
                f"dangling reference: node '{node.id}' objective focus "
                f"'{node.objective.focus}' is not declared"
            )
        for profile_id in node.baseline:
            if profile_id not in profile_ids:
                raise ModelError(
                    f"dangling reference: node '{node.id}' baseline profile "
                    f"'{profile_id}' is not declared"
                )
    for link in graph.links:
        for endpoint in (link.source, link.target):
            if endpoint not in node_ids:
                raise ModelError(
                    f"dangling reference: link '{link.id}' endpoint '{endpoint}' "
                    "is not a declared node"
                )
        for profile_id in link.samples:
            if profile_id not in profile_ids:
                raise ModelError(
                    f"dangling reference: link '{link.id}' samples profile "
                    f"'{profile_id}' is not declared"
                )
    for fn in graph.utilities:
        if fn.stakeholder not in stakeholder_ids:
            raise ModelError(
                f"dangling reference: utility stakeholder '{fn.stakeholder}' is not declared"
            )
        if fn.goal not in node_ids:
            raise ModelError(f"dangling reference: utility goal '{fn.goal}' is not declared")
    for goal_id in graph.aggregation:
        if goal_id not in node_ids:
            raise ModelError(
                f"dangling reference: aggregation entry '{goal_id}' is not a declared node"
            )


def parse_model(text: str) -> GoalGraph:
    """Parse a ``goalbench/1`` JSON document into an immutable GoalGraph.

    Rejects unknown fields, duplicate ids and dangling references; value-level
    rule checking is `validate`'s job so damaged-but-parseable models still
    produce a report.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(
            f"syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None
    obj = _expect_object(
        raw,
        "document",
        {"format"},
        {"metadata", "metrics", "profiles", "stakeholders", "nodes", "links", "utilities",
         "aggregation"},
    )
    fmt = _as_str(obj["format"], "document.format")
    if fmt != FORMAT_TAG:
        _fail("document.format", f"expected {FORMAT_TAG!r}, got {fmt!r}")

    metrics = [
        _parse_metric(m, f"metrics[{i}]")
        for i, m in enumerate(_as_list(obj.get("metrics", []), "metrics"))
    ]
    profiles = [
        _parse_profile(p, f"profiles[{i}]")
        for i, p in enumerate(_as_list(obj.get("profiles", []), "profiles"))
    ]
    if not profiles:
        profiles = [UsageProfile(id=DEFAULT_PROFILE_ID, name=DEFAULT_PROFILE_ID)]
    stakeholders = []
    for i, s in enumerate(_as_list(obj.get("stakeholders", []), "stakeholders")):
        entry = _expect_object(s, f"stakeholders[{i}]", {"id", "name"})
        stakeholders.append(
            Stakeholder(
                id=_as_str(entry["id"], f"stakeholders[{i}].id"),
                name=_as_str(entry["name"], f"stakeholders[{i}].name"),
            )
        )
    nodes = [
        _parse_node(n, f"nodes[{i}]") for i, n in enumerate(_as_list(obj.get("nodes", []), "nodes"))
    ]
    links = [
        _parse_link(l, f"links[{i}]") for i, l in enumerate(_as_list(obj.get("links", []), "links"))
    ]
    utilities = [
        _parse_utility(u, f"utilities[{i}]")
        for i, u in enumerate(_as_list(obj.get("utilities", []), "utilities"))
    ]
    aggregation_raw = obj.get("aggregation", {})
    if not isinstance(aggregation_raw, dict):
        _fail("aggregation", "expected object mapping node ids to policies")
    aggregation = {
        _as_str(k, "aggregation key"): _as_enum(AggregationPolicy, v, f"aggregation.{k}")
        for k, v in aggregation_raw.items()
    }

    _check_unique([m.id for m in metrics], "metrics")
    _check_unique([p.id for p in profiles], "profiles")
    _check_unique([s.id for s in stakeholders], "stakeholders")
    _check_unique([n.id for n in nodes], "nodes")
    _check_unique([l.id for l in links], "links")
    _check_unique([f"{u.goal}/{u.stakeholder}" for u in utilities], "utilities")

    graph = GoalGraph(
        metadata=_parse_metadata(obj.get("metadata", {}), "metadata"),
        metrics=tuple(sorted(metrics, key=lambda m: m.id)),
        profiles=tuple(sorted(profiles, key=lambda p: p.id)),
        stakeholders=tuple(sorted(stakeholders, key=lambda s: s.id)),
        nodes=tuple(sorted(nodes, key=lambda n: n.id)),
        links=tuple(sorted(links, key=lambda l: l.id)),
        utilities=tuple(sorted(utilities, key=lambda u: (u.goal, u.stakeholder))),
        aggregation=aggregation,
    )
    _resolve_references(graph)
    return graph


def load_model(path: Any) -> GoalGraph:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_model(handle.read())


# -- canonical serialization ---------------------------------------------------


def canonical_json(value: Any) -> str:
    """Byte-deterministic JSON: sorted keys, shortest round-trip floats, LF-terminated."""
    return json.dumps(value, sort_keys=True, ensure_ascii=False, allow_nan=False) + "\n"


def _sample_to_dict(sample: ContributionSample) -> dict[str, Any]:
    out: dict[str, Any] = {}
    if sample.state is not None:
        out["state"] = sample.state
    else:
        out["source_level"] = sample.source_level
    out["target_delta"] = sample.target_delta
    out["confidence"] = sample.confidence
    if sample.estimate is not None:
        out["estimate"] = sample.estimate.to_dict()
    return out


def graph_to_document(graph: GoalGraph) -> dict[str, Any]:
    """Rebuild the canonical document form of a graph (sections sorted by id)."""
    doc: dict[str, Any] = {
        "format": FORMAT_TAG,
        "metadata": {
            "name": graph.metadata.name,
            "version": graph.metadata.version,
            "authors": list(graph.metadata.authors),
        },
        "metrics": [
            {
                "id": m.id,
                "name": m.name,
                "unit": m.unit,
                "scale": m.scale.value,
                "domain_min": m.domain_min,
                "domain_max": m.domain_max,
                "direction": m.direction.value,
            }
            for m in sorted(graph.metrics, key=lambda m: m.id)
        ],
        "profiles": [
            {"id": p.id, "name": p.name, "description": p.description}
            for p in sorted(graph.profiles, key=lambda p: p.id)
        ],
        "stakeholders": [
            {"id": s.id, "name": s.name} for s in sorted(graph.stakeholders, key=lambda s: s.id)
        ],
        "nodes": [],
        "links": [],
        "utilities": [
            {
                "stakeholder": u.stakeholder,
                "goal": u.goal,
                "samples": [[level, utility] for level, utility in u.samples],
            }
            for u in sorted(graph.utilities, key=lambda u: (u.goal, u.stakeholder))
        ],
        "aggregation": {k: v.value for k, v in sorted(graph.aggregation.items())},
    }
    for node in sorted(graph.nodes, key=lambda n: n.id):
        entry: dict[str, Any] = {
            "id": node.id,
            "kind": node.kind.value,
            "name": node.name,
            "description": node.description,
            "baseline": dict(sorted(node.baseline.items())),
            "rationale": node.rationale,
        }
        if node.metric is not None:
            entry["metric"] = node.metric
        if node.objective is not None:
            obj = node.objective
            entry["objective"] = {
                "activity": obj.activity,
                "focus": obj.focus,
                "magnitude": obj.magnitude,
                "timeframe": obj.timeframe,
                "scope": obj.scope,
                "constraints": obj.constraints,
            }
        doc["nodes"].append(entry)
    for link in sorted(graph.links, key=lambda l: l.id):
        doc["links"].append(
            {
                "id": link.id,
                "source": link.source,
                "target": link.target,
                "absolute_figures": link.absolute_figures,
                "provenance": link.provenance,
                "samples": {
                    profile_id: [
                        _sample_to_dict(s) for s in sorted(entries, key=_sample_sort_key)
                    ]
                    for profile_id, entries in sorted(link.samples.items())
                },
            }
        )
    return doc


def canonical_serialize(value: Any) -> str:
    """Canonical text form of a graph, a report object, or a plain JSON value."""
    if isinstance(value, GoalGraph):
        return canonical_json(graph_to_document(value))
    if hasattr(value, "to_dict"):
        return canonical_json(value.to_dict())
    return canonical_json(value)


# -- objective template ---------------------------------------------------------


def objective_from_template(
    activity: str,
    focus: Metric,
    magnitude: float,
    timeframe: str,
    scope: str,
    constraints: str = "",
) -> Objective:
    """Build an Objective from the definition template, checking its magnitude.

    All fields but ``constraints`` are mandatory; attaching the result to a
    goal makes that goal a hard goal with a required magnitude.
    """
    for label, value in (("activity", activity), ("timeframe", timeframe), ("scope", scope)):
        if not value.strip():
            raise ModelError(f"objective template field '{label}' must not be empty")
    magnitude = float(magnitude)
    if not focus.contains(magnitude):
        raise DomainError(
            f"objective magnitude {magnitude} outside metric '{focus.id}' domain "
            f"[{focus.domain_min}, {focus.domain_max}]"
        )
    return Objective(
        activity=activity,
        focus=focus.id,
        magnitude=magnitude,
        timeframe=timeframe,
        scope=scope,
        constraints=constraints,
    )


# -- validation -----------------------------------------------------------------


def _finding(rule: str, severity: Severity, subject: str, message: str) -> Finding:
    return Finding(rule=rule, severity=severity, subject=subject, message=message)


def _check_metrics(graph: GoalGraph, out: list[Finding]) -> None:
    for metric in graph.metrics:
        if not metric.domain_min < metric.domain_max:
            out.append(
                _finding(
                    "metric-domain-invalid",
                    Severity.ERROR,
                    metric.id,
                    f"domain_min {metric.domain_min} must be < domain_max {metric.domain_max}",
                )
            )
        elif metric.scale is Scale.ORDINAL and not (
            float(metric.domain_min).is_integer() and float(metric.domain_max).is_integer()
        ):
            out.append(
                _finding(
                    "ordinal-bounds-not-integer",
                    Severity.ERROR,
                    metric.id,
                    "ordinal metrics need integer domain bounds",
                )
            )


def _check_nodes(graph: GoalGraph, out: list[Finding]) -> None:
    metric_ids = {m.id for m in graph.metrics}
    profile_ids = set(graph.profile_ids())
    for node in graph.nodes:
        if node.kind is NodeKind.GOAL and node.metric is None:
            out.append(
                _finding(
                    "goal-without-metric",
                    Severity.ERROR,
                    node.id,
                    "every goal must be quantified by a metric",
                )
            )
        if node.metric is not None and node.metric not in metric_ids:
            out.append(
                _finding(
                    "dangling-reference",
                    Severity.ERROR,
                    node.id,
                    f"metric '{node.metric}' is not declared",
                )
            )
        metric = graph.node_metric(node)
        if metric is not None:
            for profile_id in sorted(profile_ids):
                if profile_id not in node.baseline:
                    out.append(
                        _finding(
                            "baseline-missing",
                            Severity.ERROR,
                            node.id,
                            f"no baseline for profile '{profile_id}'",
                        )
                    )
            for profile_id, level in sorted(node.baseline.items()):
                if profile_id not in profile_ids:
                    out.append(
                        _finding(
                            "dangling-reference",
                            Severity.ERROR,
                            node.id,
                            f"baseline profile '{profile_id}' is not declared",
                        )
                    )
                elif metric.domain_min < metric.domain_max and not metric.contains(level):
                    out.append(
                        _finding(
                            "baseline-out-of-domain",
                            Severity.ERROR,
                            node.id,
                            f"baseline {level} for '{profile_id}' outside "
                            f"[{metric.domain_min}, {metric.domain_max}]",
                        )
                    )
        if node.objective is not None:
            _check_objective(graph, node, out)
        if node.kind is NodeKind.TASK and node.objective is not None:
            out.append(
                _finding(
                    "objective-on-task",
                    Severity.ERROR,
                    node.id,
                    "objectives belong on goal nodes",
                )
            )
        if not node.rationale.strip():
            out.append(
                _finding(
                    "empty-rationale",
                    Severity.WARNING,
                    node.id,
                    "rationale is empty; graphs should be self-explanatory",
                )
            )
        if not node.description.strip():
            out.append(
                _finding(
                    "empty-description",
                    Severity.WARNING,
                    node.id,
                    "description is empty; graphs should be self-explanatory",
                )
            )


def _check_objective(graph: GoalGraph, node: Node, out: list[Finding]) -> None:
    objective = node.objective
    assert objective is not None
    focus = graph.find_metric(objective.focus)
    if focus is None:
        out.append(
            _finding(
                "dangling-reference",
                Severity.ERROR,
                node.id,
                f"objective focus metric '{objective.focus}' is not declared",
            )
        )
        return
    magnitude = objective.magnitude
    if not isinstance(magnitude, (int, float)) or isinstance(magnitude, bool) or not math.isfinite(
        float(magnitude)
    ) or not focus.contains(float(magnitude)):
        out.append(
            _finding(
                "unquantified-objective",
                Severity.ERROR,
                node.id,
                f"objective magnitude {magnitude!r} is not a level within metric "
                f"'{focus.id}' domain [{focus.domain_min}, {focus.domain_max}]",
            )
        )
    empty = [
        label
        for label, value in (
            ("activity", objective.activity),
            ("timeframe", objective.timeframe),
            ("scope", objective.scope),
        )
        if not str(value).strip()
    ]
    if empty:
        out.append(
            _finding(
                "objective-incomplete",
                Severity.WARNING,
                node.id,
                f"objective template fields empty: {empty}",
            )
        )


def _check_link_samples(
    graph: GoalGraph, link: ContributionLink, source: Node, out: list[Finding]
) -> None:
    source_metric = graph.node_metric(source)
    for profile_id, entries in sorted(link.samples.items()):
        subject = f"{link.id}[{profile_id}]"
        if profile_id not in set(graph.profile_ids()):
            out.append(
                _finding(
                    "dangling-reference",
                    Severity.ERROR,
                    link.id,
                    f"samples profile '{profile_id}' is not declared",
                )
            )
            continue
        if not entries:
            out.append(
                _finding("invalid-samples", Severity.ERROR, subject, "empty sample list")
            )
            continue
        kinds = {s.is_discrete for s in entries}
        if len(kinds) > 1:
            out.append(
                _finding(
                    "invalid-samples",
                    Severity.ERROR,
                    subject,
                    "mixed discrete and continuous samples",
                )
            )
            continue
        discrete = entries[0].is_discrete
        if discrete:
            if not source.is_functional_task:
                out.append(
                    _finding(
                        "link-kind-mismatch",
                        Severity.ERROR,
                        subject,
                        "discrete samples require a functional task source",
                    )
                )
            states = [s.state for s in entries]
            if len(set(states)) != len(states):
                out.append(
                    _finding("invalid-samples", Severity.ERROR, subject, "duplicate states")
                )
            for state in TASK_STATES:
                if state not in states:
                    out.append(
                        _finding(
                            "invalid-samples",
                            Severity.ERROR,
                            subject,
                            f"missing sample for state {state}",
                        )
                    )
        else:
            if source.is_functional_task:
                out.append(
                    _finding(
                        "link-kind-mismatch",
                        Severity.ERROR,
                        subject,
                        "continuous samples require a level-valued source",
                    )
                )
            if len(entries) < 2:
                out.append(
                    _finding(
                        "invalid-samples",
                        Severity.ERROR,
                        subject,
                        "continuous sample lists need at least 2 points",
                    )
                )
            levels = [s.source_level for s in entries]
            if any(
                a is not None and b is not None and a >= b for a, b in zip(levels, levels[1:])
            ):
                out.append(
                    _finding(
                        "invalid-samples",
                        Severity.ERROR,
                        subject,
                        "source levels must be strictly increasing",
                    )
                )
            if source_metric is not None:
                for sample in entries:
                    if sample.source_level is not None and not source_metric.contains(
                        sample.source_level
                    ):
                        out.append(
                            _finding(
                                "source-level-out-of-domain",
                                Severity.ERROR,
                                subject,
                                f"source level {sample.source_level} outside metric "
                                f"'{source_metric.id}' domain",
                            )
                        )
        for sample in entries:
            if not 0.0 <= sample.confidence <= 1.0:
                out.append(
                    _finding(
                        "confidence-out-of-range",
                        Severity.ERROR,
                        subject,
                        f"confidence {sample.confidence} outside [0, 1]",
                    )
                )


def _check_links(graph: GoalGraph, out: list[Finding]) -> None:
    from . import reuse  # local import: reuse depends on model types

    node_ids = {n.id for n in graph.nodes}
    for link in graph.links:
        dangling = False
        for role, endpoint in (("source", link.source), ("target", link.target)):
            if endpoint not in node_ids:
                out.append(
                    _finding(
                        "dangling-reference",
                        Severity.ERROR,
                        link.id,
                        f"{role} '{endpoint}' is not a declared node",
                    )
                )
                dangling = True
        if dangling:
            continue
        source = graph.node_for_id(link.source)
        target = graph.node_for_id(link.target)
        if target.kind is not NodeKind.GOAL:
            out.append(
                _finding(
                    "link-target-not-goal",
                    Severity.ERROR,
                    link.id,
                    f"target '{target.id}' is a {target.kind.value}; contributions "
                    "point at goals",
                )
            )
        _check_link_samples(graph, link, source, out)
        out.extend(reuse.lint_reusability(link, graph.node_metric(target)))


def _cycle_findings(graph: GoalGraph) -> list[Finding]:
    """One finding per cycle (strongly connected component of size > 1 or self-loop)."""
    node_ids = {n.id for n in graph.nodes}
    adjacency: dict[str, list[str]] = {n: [] for n in node_ids}
    findings: list[Finding] = []
    for link in graph.links:
        if link.source in node_ids and link.target in node_ids:
            if link.source == link.target:
                findings.append(
                    _finding(
                        "cycle",
                        Severity.ERROR,
                        link.id,
                        f"self-contribution on node '{link.source}'",
                    )
                )
            else:
                adjacency[link.source].append(link.target)

    # Iterative Tarjan; recursion depth is unbounded on long chains otherwise.
    index_of: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    counter = 0
    for start in sorted(node_ids):
        if start in index_of:
            continue
        work: list[tuple[str, int]] = [(start, 0)]
        while work:
            node, child_index = work.pop()
            if child_index == 0:
                index_of[node] = low[node] = counter
                counter += 1
                stack.append(node)
                on_stack.add(node)
            children = adjacency[node]
            recursed = False
            for i in range(child_index, len(children)):
                child = children[i]
                if child not in index_of:
                    work.append((node, i + 1))
                    work.append((child, 0))
                    recursed = True
                    break
                if child in on_stack:
                    low[node] = min(low[node], index_of[child])
            if recursed:
                continue
            if low[node] == index_of[node]:
                component: list[str] = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component.append(member)
                    if member == node:
                        break
                if len(component) > 1:
                    findings.append(
                        _finding(
                            "cycle",
                            Severity.ERROR,
                            ",".join(sorted(component)),
                            f"contribution cycle through {sorted(component)}",
                        )
                    )
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
    return findings


def _check_structure(graph: GoalGraph, out: list[Finding]) -> None:
    out.extend(_cycle_findings(graph))

    # Pertinence: walk backwards from objective-bearing goals; any task not
    # reached cannot justify itself against a business objective.
    node_ids = {n.id for n in graph.nodes}
    reverse: dict[str, list[str]] = {n: [] for n in node_ids}
    for link in graph.links:
        if link.source in node_ids and link.target in node_ids:
            reverse[link.target].append(link.source)
    reached: set[str] = set()
    frontier = [g.id for g in graph.objective_goals()]
    reached.update(frontier)
    while frontier:
        current = frontier.pop()
        for upstream in reverse[current]:
            if upstream not in reached:
                reached.add(upstream)
                frontier.append(upstream)
    for task in graph.tasks():
        if task.id not in reached:
            out.append(
                _finding(
                    "orphan-task",
                    Severity.ERROR,
                    task.id,
                    "task has no contribution path to an objective-bearing goal",
                )
            )

    for goal in graph.root_goals():
        if not graph.utilities_for(goal.id):
            out.append(
                _finding(
                    "root-goal-without-utility",
                    Severity.ERROR,
                    goal.id,
                    "root goals need at least one stakeholder utility function",
                )
            )


def _check_utilities(graph: GoalGraph, out: list[Finding]) -> None:
    stakeholder_ids = {s.id for s in graph.stakeholders}
    root_ids = {g.id for g in graph.root_goals()}
    for fn in graph.utilities:
        subject = f"{fn.goal}/{fn.stakeholder}"
        if fn.stakeholder not in stakeholder_ids:
            out.append(
                _finding(
                    "dangling-reference",
                    Severity.ERROR,
                    subject,
                    f"stakeholder '{fn.stakeholder}' is not declared",
                )
            )
        goal = graph.find_node(fn.goal)
        if goal is None:
            out.append(
                _finding(
                    "dangling-reference",
                    Severity.ERROR,
                    subject,
                    f"goal '{fn.goal}' is not declared",
                )
            )
            continue
        if fn.goal not in root_ids:
            out.append(
                _finding(
                    "invalid-utility",
                    Severity.ERROR,
                    subject,
                    "utility functions attach to root goals",
                )
            )
        if len(fn.samples) < 2:
            out.append(
                _finding(
                    "invalid-utility", Severity.ERROR, subject, "need at least 2 samples"
                )
            )
        levels = [level for level, _ in fn.samples]
        if any(a >= b for a, b in zip(levels, levels[1:])):
            out.append(
                _finding(
                    "invalid-utility",
                    Severity.ERROR,
                    subject,
                    "levels must be strictly increasing",
                )
            )
        if any(not 0.0 <= u <= 1.0 for _, u in fn.samples):
            out.append(
                _finding(
                    "invalid-utility", Severity.ERROR, subject, "utilities must lie in [0, 1]"
                )
            )
        metric = graph.node_metric(goal)
        if metric is not None and any(not metric.contains(level) for level in levels):
            out.append(
                _finding(
                    "invalid-utility",
                    Severity.ERROR,
                    subject,
                    f"sample levels leave metric '{metric.id}' domain",
                )
            )


def validate(graph: GoalGraph) -> ValidationReport:
    """Check every structural invariant and quality lint; never raises.

    Structural violations (cycles, dangling references, unquantified
    objectives, orphan tasks, root goals without utility) are ERRORs;
    self-explanation and reusability lints are WARNINGs.
    """
    out: list[Finding] = []
    for section, ids in (
        ("metrics", [m.id for m in graph.metrics]),
        ("profiles", [p.id for p in graph.profiles]),
        ("stakeholders", [s.id for s in graph.stakeholders]),
        ("nodes", [n.id for n in graph.nodes]),
        ("links", [l.id for l in graph.links]),
    ):
        seen: set[str] = set()
        for item in ids:
            if item in seen:
                out.append(
                    _finding(
                        "duplicate-id", Severity.ERROR, item, f"duplicate id in {section}"
                    )
                )
            seen.add(item)
    if not graph.profiles:
        out.append(
            _finding("no-profiles", Severity.ERROR, "graph", "at least one usage profile required")
        )
    _check_metrics(graph, out)
    _check_nodes(graph, out)
    _check_links(graph, out)
    _check_structure(graph, out)
    _check_utilities(graph, out)
    return ValidationReport(findings=tuple(out))
