// Typed client for the p4lab HTTP API. Response shapes mirror the server's
// JSON exactly; every plotted point in the UI comes from one of these calls.

export type EquationTag = 'p' | 'pbar' | 'phalf' | 'pbarhalf';

export type BehaviorTag =
  | 'OscUpper'
  | 'OscLower'
  | 'BlowUpPos'
  | 'BlowUpNeg'
  | 'LingerZero'
  | 'LingerOuterParabola'
  | 'Undetermined';

export interface Sample {
  t: number;
  y: number | null;
  v: number | null;
}

export type Termination =
  | { kind: 'ReachedEnd' }
  | { kind: 'BlowUp'; t_est: number }
  | { kind: 'StepUnderflow'; t: number }
  | { kind: 'MaxSteps' };

export interface Tolerances {
  rtol?: number;
  atol?: number;
}

export interface IntegrateRequest {
  equation: EquationTag;
  ic: { t: number; y: number; v: number };
  span: { t0: number; t1: number };
  tolerances?: Tolerances;
  max_samples?: number;
}

export interface IntegrateResponse {
  schema: string;
  equation: EquationTag | null;
  ic: { t: number; y: number; v: number };
  samples: Sample[];
  termination: Termination;
  control: { rtol: number; atol: number };
  downsampled: boolean;
  n_nodes: number;
  request: unknown;
  compute_ms: number;
}

export interface Evidence {
  window: [number, number];
  n_samples: number;
  crossings_upper: number;
  crossings_lower: number;
  linger_zero_span: number | null;
  linger_outer_span: number | null;
  linger_outer_branch: number | null;
  blowup_t_est: number | null;
  blowup_sign: number | null;
}

export interface Behavior {
  tag: BehaviorTag;
  evidence: Evidence;
}

export interface ClassifyRequest {
  equation: EquationTag;
  ic: { t: number; y: number; v: number };
  window: { t0: number; t1: number };
  tolerances?: Tolerances;
}

export interface ClassifyResponse {
  schema: string;
  kind: 'classification';
  behavior: Behavior;
  request: unknown;
  compute_ms: number;
}

export interface BisectRequest {
  equation: EquationTag;
  t0: number;
  y0: number;
  window: { t0: number; t1: number };
  lo: number;
  hi: number;
  tol?: number;
  tolerances?: Tolerances;
}

export interface BisectResponse {
  schema: string;
  kind: 'threshold';
  bracket: [number, number];
  width: number;
  midpoint: number;
  iterations: number;
  class_lo: Behavior;
  class_hi: Behavior;
  request: unknown;
  compute_ms: number;
}

export interface RegionCurve {
  name: string;
  t: number[];
  sigma: (number | null)[];
}

export interface RegionsResponse {
  schema: string;
  kind: 'regions';
  curves: RegionCurve[];
  request: unknown;
  compute_ms: number;
}

/** Machine-readable failure: `reason` is the server's slug ("no-sign-change",
 * "budget-exceeded", ...) or "network" when the request never got an answer. */
export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly reason: string,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

export function isAbort(err: unknown): boolean {
  return err instanceof DOMException && err.name === 'AbortError';
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  integrate(body: IntegrateRequest, signal?: AbortSignal): Promise<IntegrateResponse> {
    return this.post('/api/integrate', body, signal);
  }

  classify(body: ClassifyRequest, signal?: AbortSignal): Promise<ClassifyResponse> {
    return this.post('/api/classify', body, signal);
  }

  bisect(body: BisectRequest, signal?: AbortSignal): Promise<BisectResponse> {
    return this.post('/api/bisect', body, signal);
  }

  regions(tmin: number, tmax: number, n: number, signal?: AbortSignal): Promise<RegionsResponse> {
    const q = new URLSearchParams({ tmin: String(tmin), tmax: String(tmax), n: String(n) });
    return this.request(`/api/regions?${q}`, { signal });
  }

  private post<T>(path: string, body: unknown, signal?: AbortSignal): Promise<T> {
    return this.request(path, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
      signal,
    });
  }

  private async request<T>(path: string, init: RequestInit): Promise<T> {
    let resp: Response;
    try {
      resp = await this.fetchImpl(this.baseUrl + path, init);
    } catch (err) {
      if (isAbort(err)) throw err; // cancellation is not a failure
      throw new ApiError(0, 'network', `server unreachable: ${String(err)}`);
    }
    if (!resp.ok) {
      let reason = 'error';
      let message = `HTTP ${resp.status}`;
      try {
        const body = (await resp.json()) as { reason?: string; message?: string };
        if (body.reason) reason = body.reason;
        if (body.message) message = body.message;
      } catch {
        // non-JSON error body: keep the generic slug
      }
      throw new ApiError(resp.status, reason, message);
    }
    return (await resp.json()) as T;
  }
}
