// REST client. Every mutating call carries a fresh request id so a retry
// replays the original response instead of repeating the side effect, and
// list refreshes are sequenced so stale responses never overwrite newer ones.

import type {
  AiSession,
  AlgorithmSpec,
  DatasetRecord,
  ExperimentRecord,
  HeatmapData,
  Recommendation,
  RocCurve,
  SubmitResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

function requestId(): string {
  if (typeof crypto !== "undefined" && "randomUUID" in crypto) {
    return crypto.randomUUID();
  }
  return `req-${Date.now()}-${Math.random().toString(36).slice(2)}`;
}

export class Api {
  constructor(private base: string = "") {}

  private async call<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.base + path, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = await response.json();
        detail = body.detail ?? JSON.stringify(body);
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, body: Record<string, unknown>): Promise<T> {
    return this.call<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ ...body, request_id: requestId() }),
    });
  }

  listDatasets(): Promise<DatasetRecord[]> {
    return this.call<{ datasets: DatasetRecord[] }>("/datasets").then((r) => r.datasets);
  }

  getDataset(id: string): Promise<DatasetRecord> {
    return this.call(`/datasets/${id}`);
  }

  uploadDataset(form: FormData): Promise<{ dataset: DatasetRecord; created: boolean }> {
    return this.call("/datasets", { method: "POST", body: form });
  }

  algorithms(task: string): Promise<AlgorithmSpec[]> {
    return this.call<{ algorithms: AlgorithmSpec[] }>(
      `/algorithms?task=${encodeURIComponent(task)}`,
    ).then((r) => r.algorithms);
  }

  submitExperiment(body: {
    dataset_id: string;
    algorithm?: string;
    parameters?: Record<string, unknown>;
    grid?: boolean;
    cv?: { folds: number; seed: number };
  }): Promise<SubmitResponse> {
    return this.post("/experiments", body);
  }

  listExperiments(filters: Record<string, string> = {}): Promise<ExperimentRecord[]> {
    const query = new URLSearchParams(filters).toString();
    return this.call<{ experiments: ExperimentRecord[] }>(
      `/experiments${query ? "?" + query : ""}`,
    ).then((r) => r.experiments);
  }

  getExperiment(id: string): Promise<ExperimentRecord> {
    return this.call(`/experiments/${id}`);
  }

  sendFeedback(experimentId: string, vote: "up" | "down"): Promise<ExperimentRecord> {
    return this.post(`/experiments/${experimentId}/feedback`, { vote });
  }

  recommendations(datasetId: string, n: number): Promise<Recommendation[]> {
    return this.call<{ recommendations: Recommendation[] }>(
      `/recommendations?dataset_id=${encodeURIComponent(datasetId)}&n=${n}`,
    ).then((r) => r.recommendations);
  }

  createSession(body: {
    dataset_id: string;
    max_runs: number;
    update_every: number;
    epsilon: number;
    enabled: boolean;
  }): Promise<AiSession> {
    return this.post("/ai/sessions", body);
  }

  toggleSession(sessionId: string, enabled: boolean): Promise<AiSession> {
    return this.call(`/ai/sessions/${sessionId}/toggle`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ enabled }),
    });
  }

  listSessions(): Promise<AiSession[]> {
    return this.call<{ sessions: AiSession[] }>("/ai/sessions").then((r) => r.sessions);
  }

  heatmap(metric: string): Promise<HeatmapData> {
    return this.call(`/reports/heatmap?metric=${encodeURIComponent(metric)}`);
  }

  roc(experimentId: string): Promise<RocCurve> {
    return this.call(`/experiments/${experimentId}/roc`);
  }
}

/** Drops responses that arrive after a newer request for the same key. */
export class Sequencer {
  private seq = new Map<string, number>();

  async latest<T>(key: string, work: Promise<T>): Promise<T | null> {
    const ticket = (this.seq.get(key) ?? 0) + 1;
    this.seq.set(key, ticket);
    const value = await work;
    return this.seq.get(key) === ticket ? value : null;
  }
}
