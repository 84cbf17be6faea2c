/** Typed client for the qonduct HTTP API. */

export interface NodeInfo {
  type: string;
  children: string[];
  requires: string[];
  creates: string[];
  path_keys: string[];
}

export interface TreeInfo {
  root: string;
  flags: Record<string, unknown>;
  nodes: Record<string, NodeInfo>;
  path_keys: string[];
  validation: { ok: boolean; violations: unknown[]; warnings: string[] };
}

export type RunState =
  | "validating"
  | "running"
  | "awaiting_query"
  | "finished"
  | "aborted";

export interface RunResultBody {
  status: "completed" | "aborted";
  reason: string | null;
  visited_path: string[];
  entries: Record<string, unknown>;
}

export interface RunHandle {
  id: string;
  state: RunState;
  mode: string;
  created_at: number;
  links: { self: string; queries: string };
  result: RunResultBody | null;
  reason: string | null;
}

export interface QueryInfo {
  id: string;
  kind: string;
  prompt: string;
  options: unknown[];
  default: unknown;
  recommendation: { value: unknown; rationale: string } | null;
  minimum: number | null;
  maximum: number | null;
}

export interface HypothesisEstimate {
  valid: boolean;
  point?: number | null;
  low?: number | null;
  high?: number | null;
  unbounded?: boolean;
}

export interface CombinationEntry {
  vqa: { id: string; [k: string]: unknown };
  optimizer: { id: string; [k: string]: unknown };
  hypotheses: Record<string, HypothesisEstimate>;
  worst_case: number | null;
  worst_case_unbounded: boolean;
  n_calls: number;
  status: "feasible" | "infeasible" | "not_characterizable";
}

export interface AssessmentBody {
  problem: { n: number; density: number; matched_class: string; grid_density: number };
  boundary: { log2: number; evaluations: number };
  combinations: CombinationEntry[];
  recommendation: {
    kind: "combination" | "classical_fallback";
    vqa?: { id: string };
    optimizer?: { id: string };
    worst_case?: number | null;
  };
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function raise(response: Response): Promise<never> {
  let code = "unknown";
  let message = response.statusText;
  try {
    const body = await response.json();
    if (body?.detail?.code) {
      code = body.detail.code;
      message = body.detail.message;
    } else if (body?.detail) {
      message = JSON.stringify(body.detail);
      code = "validation_error";
    }
  } catch {
    /* non-JSON error body */
  }
  throw new ApiError(response.status, code, message);
}

export class Api {
  constructor(private base: string = "") {}

  private async get<T>(path: string): Promise<T> {
    const response = await fetch(this.base + path);
    if (!response.ok) await raise(response);
    return (await response.json()) as T;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await fetch(this.base + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) await raise(response);
    if (response.status === 204) return undefined as T;
    return (await response.json()) as T;
  }

  getTree(): Promise<TreeInfo> {
    return this.get("/tree");
  }

  getBackends(): Promise<Record<string, unknown>[]> {
    return this.get("/backends");
  }

  startRun(
    instance: unknown,
    mode: "automatic" | "manual",
    path: Record<string, unknown> = {},
  ): Promise<RunHandle> {
    return this.post("/runs", { instance, mode, path });
  }

  getRun(id: string): Promise<RunHandle> {
    return this.get(`/runs/${id}`);
  }

  getQueries(id: string): Promise<QueryInfo[]> {
    return this.get(`/runs/${id}/queries`);
  }

  answerQuery(queryId: string, value: unknown): Promise<void> {
    return this.post(`/queries/${queryId}/answer`, { value });
  }

  assess(instance: unknown, declaredClass?: string): Promise<AssessmentBody> {
    return this.post("/assessments", {
      instance,
      declared_class: declaredClass ?? null,
    });
  }

  /** The recommended tree/path pair as YAML text, for download. */
  async assessConfig(instance: unknown, declaredClass?: string): Promise<string> {
    const response = await fetch(this.base + "/assessments/config", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ instance, declared_class: declaredClass ?? null }),
    });
    if (!response.ok) await raise(response);
    return await response.text();
  }
}
