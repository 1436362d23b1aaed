"""Goal similarity scoring, duplicate detection and contribution reusability lints."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any, Sequence

from .model import (
    ContributionLink,
    DomainError,
    Finding,
    GoalGraph,
    Metric,
    Node,
    NodeKind,
    ScenarioError,
    Severity,
)

TEXT_WEIGHT = 0.7
METRIC_WEIGHT = 0.3
DEFAULT_DUPLICATE_THRESHOLD = 0.8

_TOKEN_SPLIT = re.compile(r"[^0-9a-z]+")
_PERCENT_UNITS = ("percent", "%")


@dataclass(frozen=True)
class SimilarityScore:
    a: str
    b: str
    score: float
    text_jaccard: float
    metric_match: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "a": self.a,
            "b": self.b,
            "score": self.score,
            "components": {"text_jaccard": self.text_jaccard, "metric_match": self.metric_match},
        }


def _tokens(node: Node) -> frozenset[str]:
    text = f"{node.name} {node.description}".lower()
    return frozenset(t for t in _TOKEN_SPLIT.split(text) if t)


def _metric_component(a: Node, b: Node, metric_a: Metric | None, metric_b: Metric | None) -> float:
    if a.metric is not None and a.metric == b.metric:
        return 1.0
    if metric_a is not None and metric_b is not None:
        if metric_a.unit == metric_b.unit and metric_a.direction == metric_b.direction:
            return 1.0
    return 0.0


def similarity(
    a: Node,
    b: Node,
    metric_a: Metric | None = None,
    metric_b: Metric | None = None,
) -> SimilarityScore:
    """Lexical-plus-metric similarity of two goals, in [0, 1].

    Token Jaccard over lower-cased, punctuation-stripped name+description,
    weighted 0.7, plus 0.3 when the goals share a metric id or a unit and
    direction. Symmetric by construction.
    """
    for node in (a, b):
        if node.kind is not NodeKind.GOAL:
            raise ScenarioError(f"similarity compares goals; '{node.id}' is a {node.kind.value}")
    tokens_a, tokens_b = _tokens(a), _tokens(b)
    union = tokens_a | tokens_b
    jaccard = len(tokens_a & tokens_b) / len(union) if union else 1.0
    metric_match = _metric_component(a, b, metric_a, metric_b)
    return SimilarityScore(
        a=a.id,
        b=b.id,
        score=TEXT_WEIGHT * jaccard + METRIC_WEIGHT * metric_match,
        text_jaccard=jaccard,
        metric_match=metric_match,
    )


def _qualified(score: SimilarityScore, index_a: int, index_b: int, qualify: bool) -> SimilarityScore:
    if not qualify:
        return score
    return SimilarityScore(
        a=f"g{index_a}:{score.a}",
        b=f"g{index_b}:{score.b}",
        score=score.score,
        text_jaccard=score.text_jaccard,
        metric_match=score.metric_match,
    )


def find_duplicates(
    graphs: Sequence[GoalGraph], threshold: float = DEFAULT_DUPLICATE_THRESHOLD
) -> tuple[SimilarityScore, ...]:
    """All intra- and cross-graph goal pairs scoring at or above ``threshold``.

    Sorted by descending score, then by id pair; with several graphs the ids
    are qualified as ``g<index>:<node id>`` so reuse candidates from previous
    projects stay distinguishable.
    """
    if not 0.0 < threshold <= 1.0:
        raise DomainError(f"duplicate threshold must be in (0, 1], got {threshold}")
    qualify = len(graphs) > 1
    results: list[SimilarityScore] = []
    for i, graph_a in enumerate(graphs):
        goals_a = sorted(graph_a.goals(), key=lambda n: n.id)
        for j in range(i, len(graphs)):
            graph_b = graphs[j]
            goals_b = sorted(graph_b.goals(), key=lambda n: n.id)
            for a in goals_a:
                for b in goals_b:
                    if i == j and a.id >= b.id:
                        continue
                    score = similarity(a, b, graph_a.node_metric(a), graph_b.node_metric(b))
                    if score.score >= threshold:
                        results.append(_qualified(score, i, j, qualify))
    results.sort(key=lambda s: (-s.score, s.a, s.b))
    return tuple(results)


def lint_reusability(
    link: ContributionLink, target_metric: Metric | None = None
) -> tuple[Finding, ...]:
    """Warnings for contribution data that future projects cannot reuse."""
    findings: list[Finding] = []
    if not link.absolute_figures:
        findings.append(
            Finding(
                rule="relative-only-contribution",
                severity=Severity.WARNING,
                subject=link.id,
                message="deltas are relative only; record the absolute figures",
            )
        )
    if not link.provenance.strip():
        findings.append(
            Finding(
                rule="missing-provenance",
                severity=Severity.WARNING,
                subject=link.id,
                message="no provenance; record who estimated this and when",
            )
        )
    if (
        target_metric is not None
        and any(tag in target_metric.unit.lower() for tag in _PERCENT_UNITS)
        and not link.absolute_figures
    ):
        findings.append(
            Finding(
                rule="percent-without-base",
                severity=Severity.WARNING,
                subject=link.id,
                message=f"unit '{target_metric.unit}' is a percentage with no declared base",
            )
        )
    return tuple(findings)
