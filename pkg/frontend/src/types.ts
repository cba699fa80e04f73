// Shapes of the documents and responses served under /v1. The console is a
// thin client: it renders these, it never recomputes them.

export interface ValueProfile {
  common_subsequence: string;
  patterns: [string, number][];
  lengths: Record<string, number>;
  values_seen: number;
  truncated: number;
}

export interface EnumInfo {
  status: "Enumerable" | "NotEnumerable";
  threshold: number;
  values: string[] | null;
}

export interface ParamDoc {
  profile: ValueProfile;
  examples: string[];
  enum: EnumInfo;
  enum_values: string[] | null;
  numeric_range: { min: number; max: number } | null;
  required: boolean;
  unspecified_param: boolean;
}

export interface DependencyEdge {
  producer: string;
  score: number;
}

export interface SequenceRow {
  params: string[];
  count: number;
  rate: number;
}

export interface KnowledgeDoc {
  api: string;
  schema_version: number;
  record_count: number;
  params: Record<string, ParamDoc>;
  sequences: SequenceRow[];
  dependencies: Record<string, DependencyEdge[]>;
  spec: { inputs: string[]; outputs: string[] } | null;
}

export interface Violation {
  param: string;
  kind: "missing_required" | "not_in_enum" | "out_of_range";
  detail: string;
}

export interface PredictResponse {
  api: string;
  prediction: { label: string; probability: number } | null;
  violations: Violation[];
  knowledge_available: boolean;
}

export interface CallResponse {
  api: string;
  outcome: string;
  right: boolean;
}

export interface SrResponse {
  call_number: number;
  call_success: number;
  sr: number;
}
