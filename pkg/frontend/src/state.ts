/** Scenario panel state: profile selection plus one control per task.
 *
 * Level sliders are clamped to their metric domain, so any panel state maps
 * to a valid /api/propagate body and back.
 */

import type { ModelDocument, ScenarioBody } from "./types.js";

export const AS_IS = "AsIs";
export const TO_BE = "ToBe";

export interface TaskControl {
  id: string;
  name: string;
  kind: "functional" | "level";
  state: string; // functional tasks: AsIs | ToBe
  level: number; // level tasks: current slider value
  min: number;
  max: number;
}

export interface ScenarioPanelState {
  profile: string;
  profiles: string[];
  tasks: TaskControl[];
}

function clamp(value: number, min: number, max: number): number {
  return Math.min(Math.max(value, min), max);
}

export function initialPanelState(model: ModelDocument): ScenarioPanelState {
  const profiles = model.profiles.map((p) => p.id);
  const profile = profiles[0];
  const metrics = new Map(model.metrics.map((m) => [m.id, m]));
  const tasks: TaskControl[] = model.nodes
    .filter((n) => n.kind === "task")
    .map((n) => {
      if (!n.metric) {
        return { id: n.id, name: n.name, kind: "functional" as const, state: AS_IS, level: 0, min: 0, max: 1 };
      }
      const metric = metrics.get(n.metric);
      const min = metric ? metric.domain_min : 0;
      const max = metric ? metric.domain_max : 1;
      const baseline = n.baseline[profile];
      return {
        id: n.id,
        name: n.name,
        kind: "level" as const,
        state: "",
        level: clamp(baseline ?? min, min, max),
        min,
        max,
      };
    });
  return { profile, profiles, tasks };
}

export function setProfile(state: ScenarioPanelState, profile: string): ScenarioPanelState {
  if (!state.profiles.includes(profile)) {
    return state;
  }
  return { ...state, profile };
}

export function setTask(
  state: ScenarioPanelState,
  taskId: string,
  value: string | number,
): ScenarioPanelState {
  const tasks = state.tasks.map((task) => {
    if (task.id !== taskId) {
      return task;
    }
    if (task.kind === "functional") {
      const next = value === TO_BE ? TO_BE : AS_IS;
      return { ...task, state: next };
    }
    const level = clamp(Number(value), task.min, task.max);
    return { ...task, level };
  });
  return { ...state, tasks };
}

export function toScenarioBody(state: ScenarioPanelState): ScenarioBody {
  const assignments: Record<string, string | number> = {};
  for (const task of state.tasks) {
    assignments[task.id] = task.kind === "functional" ? task.state : task.level;
  }
  return { profile: state.profile, assignments };
}

export function panelStateFromScenario(
  model: ModelDocument,
  body: ScenarioBody,
): ScenarioPanelState {
  let state = initialPanelState(model);
  state = setProfile(state, body.profile);
  for (const [taskId, value] of Object.entries(body.assignments)) {
    state = setTask(state, taskId, value);
  }
  return state;
}
