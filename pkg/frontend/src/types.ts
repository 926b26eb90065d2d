/** JSON payloads of the classification service, mirrored 1:1. */

export interface BatchSummary {
  batch_id: string;
  categories: string[];
  status: BatchStatus;
  document_count: number;
  unrankable: string[];
  selections: Record<string, string[]>;
  selection_warnings: string[];
  prediction_counts: Record<string, number>;
  unclassifiable: string[];
}

export type BatchStatus =
  | "ingested"
  | "embedded"
  | "candidates_ready"
  | "labeled"
  | "classified";

export interface CandidateEntry {
  doc_id: string;
  excerpt: string;
  full_text: string;
  theta: number;
  token_count: number;
}

export interface CandidatesPage {
  batch_id: string;
  page: number;
  page_count: number;
  page_size: number;
  topics: CandidateEntry[][];
  unrankable: string[];
}

export interface Prediction {
  doc_id: string;
  category: string;
  score: number;
  margin: number;
  excerpt: string;
}

export interface PredictionsResponse {
  batch_id: string;
  category: string | null;
  total: number;
  page: number | null;
  predictions: Prediction[];
  prediction_counts: Record<string, number>;
  unclassifiable: string[];
  representatives: Record<string, string[]>;
}

export interface ErrorBody {
  code: string;
  message: string;
  detail: unknown;
}
