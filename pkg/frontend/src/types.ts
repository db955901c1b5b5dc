// Mirrors of the REST API JSON shapes. The UI holds no state of its own
// beyond view state; every number shown comes from these payloads.

export interface ParamSpec {
  name: string;
  type: string;
  allowed: (string | number | null)[];
  default: string | number | null;
  description: string;
}

export interface AlgorithmSpec {
  name: string;
  task: string;
  params: ParamSpec[];
}

export interface MetaFeatures {
  [key: string]: number;
}

export interface DatasetRecord {
  id: string;
  name: string;
  columns: [string, string][];
  target_column: string;
  task_type: string;
  tags: string[];
  n_rows: number;
  meta_features: MetaFeatures;
  created_at: string;
}

export interface Metrics {
  [name: string]: number;
}

export interface RocCurve {
  points: [number, number][];
  auc: number;
}

export interface EvaluationResult {
  metrics: Metrics;
  per_fold: Metrics[];
  roc: RocCurve | null;
  seed: number;
  cv_folds: number;
  wall_time?: number;
  warning: string | null;
}

export interface ExperimentRecord {
  id: string;
  dataset_id: string;
  task_type: string;
  algorithm: string;
  parameters: Record<string, unknown>;
  seed: number;
  cv_folds: number;
  status: "pending" | "running" | "completed" | "failed";
  result: EvaluationResult | null;
  error: string | null;
  launched_by: "user" | "ai";
  feedback: "none" | "up" | "down";
  index_terms: string[];
  created_at: string;
  finished_at: string | null;
}

export interface Recommendation {
  algorithm: string;
  parameters: Record<string, unknown>;
  expected_score: number;
  rationale: string;
  rank: number;
}

export interface AiSession {
  session_id: string;
  dataset_id: string;
  enabled: boolean;
  max_runs: number;
  runs_launched: number;
  update_every: number;
  epsilon: number;
  stop_reason: string | null;
}

export interface HeatmapData {
  metric: string;
  row_labels: string[];
  col_labels: string[];
  cells: (number | null)[][];
}

export interface SubmitResponse {
  experiment_id?: string;
  job_id?: string;
  duplicate?: boolean;
  submitted?: { experiment_id: string }[];
  count?: number;
}
