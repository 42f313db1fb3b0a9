import type {
  DirectivesResponse,
  ForecastResponse,
  ScenarioRequestBody,
  Stage1Attributions,
  Stage2Attributions,
} from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, readonly detail: unknown) {
    super(`API error ${status}`);
    this.name = "ApiError";
  }
}

type FetchFn = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin client over the forecasting service. At most one scenario request
 *  is in flight; a new submission aborts the previous one so a slow stale
 *  response can never overwrite a fresher result. */
export class ApiClient {
  private scenarioAbort: AbortController | null = null;

  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchFn = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    let payload: unknown = null;
    try {
      payload = await response.json();
    } catch {
      // non-JSON body; status alone has to do
    }
    if (!response.ok) {
      throw new ApiError(response.status, payload);
    }
    return payload as T;
  }

  getForecast(horizon?: number): Promise<ForecastResponse> {
    const query = horizon === undefined ? "" : `?horizon=${horizon}`;
    return this.request(`/forecast${query}`);
  }

  postScenario(body: ScenarioRequestBody): Promise<ForecastResponse> {
    this.scenarioAbort?.abort();
    const controller = new AbortController();
    this.scenarioAbort = controller;
    return this.request("/scenario", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
      signal: controller.signal,
    });
  }

  getDirectives(horizon?: number): Promise<DirectivesResponse> {
    const query = horizon === undefined ? "" : `?horizon=${horizon}`;
    return this.request(`/directives${query}`);
  }

  getStage1Attributions(): Promise<Stage1Attributions> {
    return this.request("/attributions?stage=1");
  }

  getStage2Attributions(): Promise<Stage2Attributions> {
    return this.request("/attributions?stage=2");
  }
}

export function isAbort(err: unknown): boolean {
  return err instanceof DOMException && err.name === "AbortError";
}
