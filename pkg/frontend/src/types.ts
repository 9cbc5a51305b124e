/** Shapes of the server's JSON payloads. The UI does no scoring of its
 * own: every number rendered comes straight from one of these. */

export interface MetricConfig {
  header?: string;
  Header?: string;
  accessor: string;
  direction?: string;
  weight?: number;
}

export interface CategoryConfig {
  name: string;
  weight?: number;
  metrics: MetricConfig[];
}

export interface ModelConfig {
  model_name: string;
  categories: CategoryConfig[];
}

export type Score = number | null;

export interface RankEntry {
  candidate: string;
  rank: number | null;
  score: Score;
}

export interface MetricComparison {
  header: string;
  accessor: string;
  direction: string;
  weight: number;
  raw: Record<string, Score>;
  normalized: Record<string, Score>;
}

export interface CategoryComparison {
  name: string;
  weight: number;
  metrics: MetricComparison[];
  scores: Record<string, Score>;
  ranking: RankEntry[];
}

export interface ComparisonPayload {
  model_name: string;
  candidates: string[];
  categories: CategoryComparison[];
  overall?: {
    scores: Record<string, Score>;
    ranking: RankEntry[];
  };
}

export interface CandidateRow {
  full_name: string;
  [column: string]: unknown;
}

export function headerOf(metric: MetricConfig): string {
  return metric.header ?? metric.Header ?? metric.accessor;
}
