"""goalbench: quantified goal-graph analysis for requirement benefit decisions."""

from .model import (
    AS_IS,
    TO_BE,
    AggregationPolicy,
    ContributionLink,
    ContributionSample,
    DomainError,
    Estimate,
    EvaluationError,
    Finding,
    GoalbenchError,
    GoalGraph,
    Metadata,
    Metric,
    MetricDirection,
    ModelError,
    Node,
    NodeKind,
    Objective,
    Scale,
    ScenarioError,
    Severity,
    Stakeholder,
    UsageProfile,
    UtilityFunction,
    ValidationReport,
    canonical_json,
    canonical_serialize,
    load_model,
    objective_from_template,
    parse_model,
    validate,
)
from .propagation import (
    PropagationResult,
    Scenario,
    ToleranceSlack,
    WhatifDiff,
    benefit_delta,
    build_scenario,
    eval_link,
    propagate,
    tolerance_slack,
    whatif_diff,
)
from .uncertainty import McSummary, make_sampler, monte_carlo
from .valuation import (
    aggregate_utilities,
    disagreement,
    eval_utility,
    scenario_utility,
)
from .reuse import SimilarityScore, find_duplicates, lint_reusability, similarity
from .layout import Layout, assign_coordinates, assign_layers, export_dot, export_svg, layout_graph, order_layers

__version__ = "0.1.0"
