import { describe, expect, it } from "vitest";

import {
  AS_IS,
  TO_BE,
  initialPanelState,
  panelStateFromScenario,
  setProfile,
  setTask,
  toScenarioBody,
} from "../src/state.js";
import type { ModelDocument } from "../src/types.js";

const model: ModelDocument = {
  format: "goalbench/1",
  metadata: { name: "m", version: "1", authors: [] },
  metrics: [
    {
      id: "M",
      name: "m",
      unit: "h",
      scale: "ratio",
      domain_min: 2,
      domain_max: 8,
      direction: "minimize",
    },
  ],
  profiles: [
    { id: "Normal", name: "Normal", description: "" },
    { id: "Promo", name: "Promo", description: "" },
  ],
  stakeholders: [],
  nodes: [
    { id: "T1", kind: "task", name: "functional", description: "", baseline: {}, rationale: "" },
    {
      id: "T2",
      kind: "task",
      name: "level",
      description: "",
      metric: "M",
      baseline: { Normal: 5, Promo: 6 },
      rationale: "",
    },
  ],
  links: [],
  utilities: [],
  aggregation: {},
};

describe("scenario panel state", () => {
  it("defaults to As-Is and baselines under the first profile", () => {
    const state = initialPanelState(model);
    expect(state.profile).toBe("Normal");
    const body = toScenarioBody(state);
    expect(body.assignments.T1).toBe(AS_IS);
    expect(body.assignments.T2).toBe(5);
  });

  it("clamps level sliders to the metric domain", () => {
    let state = initialPanelState(model);
    state = setTask(state, "T2", 100);
    expect(toScenarioBody(state).assignments.T2).toBe(8);
    state = setTask(state, "T2", -3);
    expect(toScenarioBody(state).assignments.T2).toBe(2);
  });

  it("ignores unknown profiles", () => {
    const state = initialPanelState(model);
    expect(setProfile(state, "Weekend")).toBe(state);
  });

  it("round-trips applied scenarios back into panel state", () => {
    let state = initialPanelState(model);
    state = setProfile(state, "Promo");
    state = setTask(state, "T1", TO_BE);
    state = setTask(state, "T2", 3.5);
    const body = toScenarioBody(state);
    const recovered = panelStateFromScenario(model, body);
    expect(toScenarioBody(recovered)).toEqual(body);
    expect(recovered.profile).toBe("Promo");
    expect(recovered.tasks.find((t) => t.id === "T1")!.state).toBe(TO_BE);
    expect(recovered.tasks.find((t) => t.id === "T2")!.level).toBe(3.5);
  });

  it("always produces a body with one assignment per task", () => {
    const body = toScenarioBody(initialPanelState(model));
    expect(Object.keys(body.assignments).sort()).toEqual(["T1", "T2"]);
  });
});
