// Payload shapes of the /api/* endpoints (the canonical interchange encoding).

export type ModelId = "end_to_end" | "iterative" | "interactive";

export type PlanMode = "qa" | "question_only";

export interface QAPairPayload {
  question: string;
  answer?: string;
  included: boolean;
}

export interface BlueprintPayload {
  mode: PlanMode;
  pairs: QAPairPayload[];
}

export interface SummaryPayload {
  sentences: string[];
}

export interface StepPayload {
  step_index: number;
  plan: BlueprintPayload;
  sentence: string;
}

export type AlignmentPayload = Record<string, number[]>;

export interface GenerationPayload {
  blueprint: BlueprintPayload;
  summary: SummaryPayload;
  alignment: AlignmentPayload;
  steps?: StepPayload[];
  backend_id: string;
  raw_output: string;
}

export interface ModelsPayload {
  models: { id: ModelId }[];
  backends: string[];
}

export interface DocumentPayload {
  doc_id: number;
  url: string;
  title: string;
  body: string;
}

export interface RetrievePayload {
  session_id: string;
  documents: DocumentPayload[];
}

export interface FilterPayload {
  blueprint: BlueprintPayload;
  removed_pairs: number;
}

export interface GenerationParamsPayload {
  max_output_tokens?: number;
  max_pairs?: number;
  max_sentences?: number;
}
