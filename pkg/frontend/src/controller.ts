/** Orchestrates panel state, service calls and view-model refreshes.
 *
 * At most one propagate round-trip is live at a time: each apply bumps a
 * request token and stale responses are dropped, so the newest click wins.
 */

import type { ApiClient } from "./api.js";
import { ServiceError } from "./api.js";
import type { LayoutDoc, ModelDocument, ScenarioBody } from "./types.js";
import {
  initialPanelState,
  setProfile,
  setTask,
  toScenarioBody,
  type ScenarioPanelState,
} from "./state.js";
import {
  buildAnnotations,
  buildDiffPanel,
  buildMcPanel,
  buildObjectivePanel,
  buildUtilityPanel,
  type DiffRow,
  type McPanel,
  type NodeAnnotation,
  type ObjectiveRow,
  type UtilityPanel,
} from "./viewmodel.js";

export interface InlineError {
  message: string;
  subject: string | null; // task id when the message names one
}

export interface AppView {
  annotations: NodeAnnotation[];
  objectives: ObjectiveRow[];
  utilityPanel: UtilityPanel | null;
  diffRows: DiffRow[];
  crossProfile: boolean;
  mcPanel: McPanel | null;
  banner: string | null; // service unreachable
  inlineError: InlineError | null;
  busy: boolean;
  mcBusy: boolean;
}

function emptyView(): AppView {
  return {
    annotations: [],
    objectives: [],
    utilityPanel: null,
    diffRows: [],
    crossProfile: false,
    mcPanel: null,
    banner: null,
    inlineError: null,
    busy: false,
    mcBusy: false,
  };
}

function inlineErrorFor(panel: ScenarioPanelState, error: ServiceError): InlineError {
  const subject = panel.tasks.find((task) => error.message.includes(`'${task.id}'`));
  return { message: error.message, subject: subject ? subject.id : null };
}

export class AppController {
  model: ModelDocument | null = null;
  layout: LayoutDoc | null = null;
  panel: ScenarioPanelState | null = null;
  view: AppView = emptyView();

  private applyToken = 0;
  private lastApplied: ScenarioBody | null = null;
  private mcAbort: AbortController | null = null;

  constructor(private client: ApiClient) {}

  async init(): Promise<AppView> {
    try {
      this.model = await this.client.fetchModel();
      this.layout = await this.client.fetchLayout();
    } catch (error) {
      this.view = { ...emptyView(), banner: describeFailure(error) };
      return this.view;
    }
    this.panel = initialPanelState(this.model);
    return this.applyScenario() as Promise<AppView>;
  }

  changeProfile(profile: string): void {
    if (this.panel) this.panel = setProfile(this.panel, profile);
  }

  changeTask(taskId: string, value: string | number): void {
    if (this.panel) this.panel = setTask(this.panel, taskId, value);
  }

  /** POST the pending scenario; refresh every panel from the responses. */
  async applyScenario(): Promise<AppView | null> {
    if (!this.model || !this.panel) throw new Error("controller not initialized");
    const token = ++this.applyToken;
    const body = toScenarioBody(this.panel);
    const base = this.lastApplied ?? body;
    this.view = { ...this.view, busy: true, banner: null, inlineError: null };
    try {
      const [propagation, diff, utility] = await Promise.all([
        this.client.propagate(body),
        this.client.whatif(base, body),
        this.client.utility(body),
      ]);
      if (token !== this.applyToken) return null; // a newer apply superseded this one
      this.lastApplied = body;
      this.view = {
        ...this.view,
        annotations: buildAnnotations(this.model, propagation),
        objectives: buildObjectivePanel(this.model, propagation),
        utilityPanel: buildUtilityPanel(utility),
        diffRows: buildDiffPanel(diff),
        crossProfile: diff.cross_profile,
        banner: null,
        inlineError: null,
        busy: false,
      };
      return this.view;
    } catch (error) {
      if (token !== this.applyToken) return null;
      if (error instanceof ServiceError) {
        this.view = {
          ...this.view,
          busy: false,
          inlineError: inlineErrorFor(this.panel, error),
        };
      } else {
        this.view = { ...this.view, busy: false, banner: describeFailure(error) };
      }
      return this.view;
    }
  }

  /** POST /api/montecarlo with a progress flag; cancel discards the request. */
  async runUncertainty(runs: number, seed: number): Promise<AppView | null> {
    if (!this.model || !this.panel) throw new Error("controller not initialized");
    this.cancelUncertainty();
    const abort = new AbortController();
    this.mcAbort = abort;
    this.view = { ...this.view, mcBusy: true };
    try {
      const summary = await this.client.montecarlo(
        toScenarioBody(this.panel),
        runs,
        seed,
        abort.signal,
      );
      if (abort.signal.aborted) return null;
      this.view = { ...this.view, mcPanel: buildMcPanel(summary), mcBusy: false };
      return this.view;
    } catch (error) {
      if (abort.signal.aborted) {
        this.view = { ...this.view, mcBusy: false };
        return null;
      }
      if (error instanceof ServiceError) {
        this.view = {
          ...this.view,
          mcBusy: false,
          inlineError: inlineErrorFor(this.panel, error),
        };
      } else {
        this.view = { ...this.view, mcBusy: false, banner: describeFailure(error) };
      }
      return this.view;
    } finally {
      if (this.mcAbort === abort) this.mcAbort = null;
    }
  }

  cancelUncertainty(): void {
    if (this.mcAbort) {
      this.mcAbort.abort();
      this.mcAbort = null;
      this.view = { ...this.view, mcBusy: false };
    }
  }
}

function describeFailure(error: unknown): string {
  const reason = error instanceof Error ? error.message : String(error);
  return `service unreachable: ${reason}`;
}
