/** Payload types of the analysis service API (canonical JSON documents). */

export interface MetricDoc {
  id: string;
  name: string;
  unit: string;
  scale: string;
  domain_min: number;
  domain_max: number;
  direction: "maximize" | "minimize";
}

export interface ObjectiveDoc {
  activity: string;
  focus: string;
  magnitude: number;
  timeframe: string;
  scope: string;
  constraints: string;
}

export interface NodeDoc {
  id: string;
  kind: "task" | "goal";
  name: string;
  description: string;
  metric?: string;
  objective?: ObjectiveDoc;
  baseline: Record<string, number>;
  rationale: string;
}

export interface SampleDoc {
  source_level?: number;
  state?: string;
  target_delta: number;
  confidence: number;
  estimate?: Record<string, unknown>;
}

export interface LinkDoc {
  id: string;
  source: string;
  target: string;
  absolute_figures: boolean;
  provenance: string;
  samples: Record<string, SampleDoc[]>;
}

export interface UtilityDoc {
  stakeholder: string;
  goal: string;
  samples: [number, number][];
}

export interface ModelDocument {
  format: string;
  metadata: { name: string; version: string; authors: string[] };
  metrics: MetricDoc[];
  profiles: { id: string; name: string; description: string }[];
  stakeholders: { id: string; name: string }[];
  nodes: NodeDoc[];
  links: LinkDoc[];
  utilities: UtilityDoc[];
  aggregation: Record<string, string>;
}

export interface NodeOutcome {
  attained_level: number | null;
  confidence: number;
  extrapolated: boolean;
  state: string | null;
  satisfaction_degree: number | null;
  satisfied: boolean | null;
}

export interface PropagationResult {
  profile: string;
  nodes: Record<string, NodeOutcome>;
}

export interface WhatifNodeDiff {
  before: number | null;
  after: number | null;
  delta: number;
  confidence_after: number;
}

export interface WhatifResult {
  base_profile: string;
  changed_profile: string;
  cross_profile: boolean;
  nodes: Record<string, WhatifNodeDiff>;
}

export interface UtilityResult {
  profile: string;
  weights: Record<string, number>;
  root_goals: Record<
    string,
    { level: number; aggregate: number; stakeholders: Record<string, number> }
  >;
  stakeholders: Record<string, number>;
  aggregate: number;
}

export interface McNodeStats {
  mean: number;
  stddev: number;
  p05: number;
  p50: number;
  p95: number;
  p_satisfied: number | null;
}

export interface McSummary {
  runs: number;
  seed: number;
  profile: string;
  rng: string;
  nodes: Record<string, McNodeStats>;
}

export interface LayoutNodeDoc {
  id: string;
  layer: number;
  order: number;
  x: number;
  y: number;
  dummy: boolean;
  kind: string | null;
  name: string;
}

export interface LayoutDoc {
  box: { width: number; height: number };
  node_gap: number;
  layer_gap: number;
  nodes: LayoutNodeDoc[];
  edges: { link: string; source: string; target: string; points: [number, number][] }[];
}

export interface ScenarioBody {
  profile: string;
  assignments: Record<string, string | number>;
}
