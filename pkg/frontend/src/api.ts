/** Typed client for the analysis service. The UI has no other data source. */

import type {
  LayoutDoc,
  McSummary,
  ModelDocument,
  PropagationResult,
  ScenarioBody,
  UtilityResult,
  WhatifResult,
} from "./types.js";

export class ServiceError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
    this.name = "ServiceError";
  }
}

export interface ApiClient {
  fetchModel(): Promise<ModelDocument>;
  fetchLayout(): Promise<LayoutDoc>;
  propagate(body: ScenarioBody, signal?: AbortSignal): Promise<PropagationResult>;
  whatif(base: ScenarioBody, changed: ScenarioBody): Promise<WhatifResult>;
  montecarlo(
    body: ScenarioBody,
    runs: number,
    seed: number,
    signal?: AbortSignal,
  ): Promise<McSummary>;
  utility(body: ScenarioBody): Promise<UtilityResult>;
}

async function parseResponse<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let code = "http-error";
    let message = `${response.status} ${response.statusText}`;
    try {
      const body = (await response.json()) as { error?: { code: string; message: string } };
      if (body.error) {
        code = body.error.code;
        message = body.error.message;
      }
    } catch {
      // non-JSON error body; keep the status line
    }
    throw new ServiceError(response.status, code, message);
  }
  return (await response.json()) as T;
}

export class HttpApiClient implements ApiClient {
  constructor(private baseUrl: string = "") {}

  private async get<T>(path: string): Promise<T> {
    return parseResponse<T>(await fetch(`${this.baseUrl}${path}`));
  }

  private async post<T>(path: string, payload: unknown, signal?: AbortSignal): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
      signal,
    });
    return parseResponse<T>(response);
  }

  fetchModel(): Promise<ModelDocument> {
    return this.get("/api/model");
  }

  fetchLayout(): Promise<LayoutDoc> {
    return this.get("/api/layout");
  }

  propagate(body: ScenarioBody, signal?: AbortSignal): Promise<PropagationResult> {
    return this.post("/api/propagate", body, signal);
  }

  whatif(base: ScenarioBody, changed: ScenarioBody): Promise<WhatifResult> {
    return this.post("/api/whatif", { base, changed });
  }

  montecarlo(
    body: ScenarioBody,
    runs: number,
    seed: number,
    signal?: AbortSignal,
  ): Promise<McSummary> {
    return this.post("/api/montecarlo", { ...body, runs, seed }, signal);
  }

  utility(body: ScenarioBody): Promise<UtilityResult> {
    const assignments = Object.entries(body.assignments)
      .map(([task, value]) => `${task}=${value}`)
      .join(",");
    const params = new URLSearchParams({ profile: body.profile, assignments });
    return this.get(`/api/utility?${params.toString()}`);
  }
}
