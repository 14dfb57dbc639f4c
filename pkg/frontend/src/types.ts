/** Wire types mirroring the moderation service's JSON payloads. */

export type Decision =
  | 'auto_accept'
  | 'auto_reject'
  | 'gray_pending'
  | 'human_accept'
  | 'human_reject';

export type Label = 'accept' | 'reject';

export interface AttentionSpan {
  token: string;
  weight: number;
}

export interface QueueItem {
  id: string;
  text: string;
  ts: number;
  p: number;
  attention: AttentionSpan[] | null;
  decision: Decision;
  model_version: string;
  thresholds_version: number;
  decided_by: string | null;
  decided_at: number | null;
  audit_label: string | null;
  audited_by: string | null;
  audited_at: number | null;
}

export interface QueuePage {
  items: QueueItem[];
  total: number;
}

export interface Thresholds {
  t_a: number;
  t_r: number;
  coverage: number;
  beta: number;
  dev_macro_f_beta: number;
  tuned_at: string;
  version: number;
  /** Fraction of dev comments in the gray zone; null until a dev set exists. */
  projected_workload: number | null;
}

export interface Metrics {
  auc: number | null;
  spearman: number | null;
  p_accept: number;
  p_reject: number;
  f_beta: number;
  beta: number;
  n_audited: number;
  counters: Record<Decision, number>;
  total_items: number;
}

export interface ApiErrorBody {
  error: string;
  message: string;
}
