/** View-models for every panel.
 *
 * Single-engine rule: every figure shown comes verbatim from a service
 * response, stringified with String(); this module never computes a level,
 * delta, utility or probability of its own. The only client-side arithmetic
 * is boolean styling (confidence bands, disagreement flags).
 */

import type {
  McSummary,
  ModelDocument,
  NodeDoc,
  PropagationResult,
  UtilityResult,
  WhatifResult,
} from "./types.js";

export function text(value: number | null): string {
  return value === null ? "–" : String(value);
}

export type ConfidenceBand = "low" | "mid" | "high";

export function confidenceBand(confidence: number): ConfidenceBand {
  if (confidence < 0.4) return "low";
  if (confidence <= 0.7) return "mid";
  return "high";
}

export interface NodeAnnotation {
  id: string;
  kind: "task" | "goal";
  name: string;
  levelText: string;
  state: string | null;
  badge: string | null; // objective goals: "82 / ≤85 ✓"
  confidenceText: string;
  confidenceBand: ConfidenceBand;
  extrapolated: boolean;
  satisfied: boolean | null;
}

function directionGlyph(model: ModelDocument, node: NodeDoc): string {
  const metricId = node.objective?.focus ?? node.metric;
  const metric = model.metrics.find((m) => m.id === metricId);
  return metric?.direction === "maximize" ? "≥" : "≤";
}

export function buildAnnotations(
  model: ModelDocument,
  result: PropagationResult,
): NodeAnnotation[] {
  return model.nodes.map((node) => {
    const outcome = result.nodes[node.id];
    let badge: string | null = null;
    if (node.objective && outcome) {
      const mark = outcome.satisfied ? "✓" : "✗";
      badge = `${text(outcome.attained_level)} / ${directionGlyph(model, node)}${text(
        node.objective.magnitude,
      )} ${mark}`;
    }
    return {
      id: node.id,
      kind: node.kind,
      name: node.name,
      levelText: outcome ? text(outcome.attained_level) : "–",
      state: outcome?.state ?? null,
      badge,
      confidenceText: outcome ? text(outcome.confidence) : "–",
      confidenceBand: confidenceBand(outcome?.confidence ?? 0),
      extrapolated: outcome?.extrapolated ?? false,
      satisfied: outcome?.satisfied ?? null,
    };
  });
}

export interface ObjectiveRow {
  goal: string;
  name: string;
  attainedText: string;
  magnitudeText: string;
  glyph: string;
  satisfied: boolean;
  degreeText: string;
}

export function buildObjectivePanel(
  model: ModelDocument,
  result: PropagationResult,
): ObjectiveRow[] {
  return model.nodes
    .filter((node) => node.kind === "goal" && node.objective)
    .map((node) => {
      const outcome = result.nodes[node.id];
      return {
        goal: node.id,
        name: node.name,
        attainedText: outcome ? text(outcome.attained_level) : "–",
        magnitudeText: text(node.objective!.magnitude),
        glyph: directionGlyph(model, node),
        satisfied: outcome?.satisfied === true,
        degreeText: outcome ? text(outcome.satisfaction_degree) : "–",
      };
    });
}

export interface UtilityGauge {
  stakeholder: string;
  valueText: string;
  value: number;
}

export interface UtilityPanel {
  aggregateText: string;
  aggregate: number;
  gauges: UtilityGauge[];
  perGoal: {
    goal: string;
    levelText: string;
    aggregateText: string;
    disagreementWarning: boolean;
  }[];
}

const DISAGREEMENT_THRESHOLD = 0.2;

function populationStddev(values: number[]): number {
  // Styling flag only; the number itself is never displayed.
  const mean = values.reduce((a, b) => a + b, 0) / values.length;
  return Math.sqrt(values.reduce((a, b) => a + (b - mean) ** 2, 0) / values.length);
}

export function buildUtilityPanel(utility: UtilityResult): UtilityPanel {
  const gauges = Object.entries(utility.stakeholders).map(([stakeholder, value]) => ({
    stakeholder,
    valueText: text(value),
    value,
  }));
  const perGoal = Object.entries(utility.root_goals).map(([goal, entry]) => {
    const values = Object.values(entry.stakeholders);
    return {
      goal,
      levelText: text(entry.level),
      aggregateText: text(entry.aggregate),
      disagreementWarning: values.length >= 2 && populationStddev(values) > DISAGREEMENT_THRESHOLD,
    };
  });
  return {
    aggregateText: text(utility.aggregate),
    aggregate: utility.aggregate,
    gauges,
    perGoal,
  };
}

export interface DiffRow {
  node: string;
  beforeText: string;
  afterText: string;
  deltaText: string;
  changed: boolean;
}

export function buildDiffPanel(diff: WhatifResult): DiffRow[] {
  return Object.entries(diff.nodes).map(([node, entry]) => ({
    node,
    beforeText: text(entry.before),
    afterText: text(entry.after),
    deltaText: text(entry.delta),
    changed: entry.delta !== 0,
  }));
}

export interface McRow {
  node: string;
  p05Text: string;
  p50Text: string;
  p95Text: string;
  pSatisfiedText: string | null;
}

export interface McPanel {
  runsText: string;
  seedText: string;
  rows: McRow[];
}

export function buildMcPanel(summary: McSummary): McPanel {
  return {
    runsText: text(summary.runs),
    seedText: text(summary.seed),
    rows: Object.entries(summary.nodes).map(([node, stats]) => ({
      node,
      p05Text: text(stats.p05),
      p50Text: text(stats.p50),
      p95Text: text(stats.p95),
      pSatisfiedText: stats.p_satisfied === null ? null : text(stats.p_satisfied),
    })),
  };
}

export interface NodeDetail {
  id: string;
  name: string;
  description: string;
  rationale: string;
  objective: { label: string; value: string }[] | null;
}

export function buildNodeDetail(model: ModelDocument, nodeId: string): NodeDetail | null {
  const node = model.nodes.find((n) => n.id === nodeId);
  if (!node) return null;
  const objective = node.objective
    ? [
        { label: "activity", value: node.objective.activity },
        { label: "focus", value: node.objective.focus },
        { label: "magnitude", value: text(node.objective.magnitude) },
        { label: "timeframe", value: node.objective.timeframe },
        { label: "scope", value: node.objective.scope },
        { label: "constraints", value: node.objective.constraints },
      ]
    : null;
  return {
    id: node.id,
    name: node.name,
    description: node.description,
    rationale: node.rationale,
    objective,
  };
}
