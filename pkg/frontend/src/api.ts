/**
 * Typed client for the solver service. Field names and ordering mirror the
 * wire format exactly; nothing here computes — every number the UI shows
 * comes back from one of these calls.
 */

export interface InstancePayload {
  categories: string[] | null;
  q: number[];
  p: number[];
  w: number[];
}

export type Kind = "sed" | "kl" | "isd";

export type ActivityTag = "ZERO" | "INTERIOR" | "ONE";

export interface SolveResponse {
  delta: number[];
  t: number[];
  risk: number;
  alpha: number;
  beta: number;
  activity: ActivityTag[];
  method: string;
  residuals: number[];
  risk_ratio: number;
  mu: number;
  mu_max: number;
  instance_digest: string;
}

export interface CurvePoint {
  mu: number;
  risk: number;
  delta: number[];
  alpha: number;
  beta: number;
  activity: ActivityTag[];
  method: string;
  inserted: boolean;
}

export interface CurveResponse {
  kind: Kind;
  mu_max: number;
  points: CurvePoint[];
  breakpoints: number[];
  instance_digest: string;
}

export interface ThresholdCell {
  k: number;
  j: number;
  zeros: number[];
  ones: number[];
  interior: number[];
  mu_formula: number | null;
  mu_lo: number | null;
  mu_hi: number | null;
  covered: boolean;
}

export interface ThresholdsResponse {
  n3: (number | null)[] | null;
  cells: ThresholdCell[];
  mu_max: number;
  instance_digest: string;
}

export interface GeometrySlab {
  z: number[];
  lower: number;
  upper: number;
}

export interface GeometryVertex {
  i: number;
  j: number;
  a: number;
  b: number;
  gamma: number[];
}

export interface GeometryResponse {
  slabs: GeometrySlab[];
  origin: number[] | null;
  conical: boolean;
  vertices: GeometryVertex[];
  gamma_path: number[][];
}

/** Error body the service sends on every 4xx: `{error, message}`. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ExplorerApi {
  private readonly fetchImpl: FetchLike;

  constructor(
    readonly baseUrl: string,
    fetchImpl?: FetchLike,
  ) {
    // default must stay bound to globalThis or browsers throw on invocation
    this.fetchImpl = fetchImpl ?? ((input, init) => globalThis.fetch(input, init));
  }

  solve(instance: InstancePayload, kind: Kind, mu: number, mode = "strict"): Promise<SolveResponse> {
    return this.post("/v1/solve", { instance, kind, mu, mode });
  }

  curve(instance: InstancePayload, kind: Kind, points = 200): Promise<CurveResponse> {
    return this.post("/v1/curve", { instance, kind, points });
  }

  thresholds(instance: InstancePayload): Promise<ThresholdsResponse> {
    return this.post("/v1/thresholds", { instance });
  }

  geometry(instance: InstancePayload, kind: Kind, pathPoints = 0): Promise<GeometryResponse> {
    return this.post("/v1/geometry", { instance, kind, path_points: pathPoints });
  }

  async health(): Promise<boolean> {
    try {
      const resp = await this.fetchImpl(`${this.baseUrl}/v1/health`);
      return resp.ok;
    } catch {
      return false;
    }
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) {
      let code = "HTTP_" + resp.status;
      let message = resp.statusText;
      try {
        const detail = (await resp.json()) as { error?: string; message?: string };
        if (detail.error) code = detail.error;
        if (detail.message) message = detail.message;
      } catch {
        // non-JSON error body: keep the status line
      }
      throw new ApiError(resp.status, code, message);
    }
    return (await resp.json()) as T;
  }
}
