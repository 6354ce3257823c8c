// Payload shapes exchanged with the lampbot serve endpoint. The studio
// treats these as read-only: every number displayed comes from a response.

export type Variant = 'F' | 'E';
export type PlanMode = 'scripted' | 'searched';
export type SearchMode = 'beam' | 'exhaustive';

export interface WorldDoc {
  user_position: number[];
  user_attention_point: number[] | null;
  objects: Record<string, number[]>;
  beat_times: number[];
}

export interface PlanStep {
  kind: string;
  anchor: string;
  params: Record<string, number | string>;
}

export interface ScenarioDescriptor {
  id: string;
  title: string;
  orientation: string;
  agency: string;
  description: string;
  goal_kind: string;
  epsilon: number;
  beat_align: Record<string, number> | null;
  expression_weights: Record<string, number>;
  scripted_plan: PlanStep[];
  world: WorldDoc;
}

export interface ParamSchema {
  type: 'float' | 'int' | 'str';
  default: number | string | null;
  low: number | null;
  high: number | null;
  required: boolean;
}

export interface Catalog {
  anchors: string[];
  kinds: Record<string, Record<string, ParamSchema>>;
}

export interface Override {
  index: number;
  params: Record<string, number | string>;
}

export interface PlanRequest {
  scenario: string;
  variant: Variant;
  gamma: number;
  seed: number;
  mode: PlanMode;
  search: SearchMode;
  overrides: Override[];
}

export interface UtilityReportDoc {
  F: number;
  E: number;
  gamma: number;
  total: number;
  per_category: Record<string, number>;
  scores: Record<string, number>;
}

export interface MetricsDoc {
  format: string;
  version: string;
  scenario: string;
  variant: Variant;
  gamma: number;
  seed: number;
  mode: PlanMode;
  search: SearchMode;
  plan: PlanStep[];
  report: UtilityReportDoc;
  goal_reached: boolean;
  trajectory_digest: string;
  duration: number;
  timing_ms: number;
}

export interface ToolDoc {
  light_on: boolean;
  light_intensity: number;
  projector_on: boolean;
  projected_content: string | null;
}

export interface AnnotationDoc {
  start: number;
  end: number;
  kind: string;
  label: string;
}

// Precomputed by the endpoint, one entry per trajectory sample: the eight
// chain points, the head facing, and the tool state. The studio never
// derives poses itself.
export interface RenderGeometry {
  times: number[];
  links: number[][][];
  facings: number[][];
  tools: ToolDoc[];
  annotations: AnnotationDoc[];
}

export interface PlanResponse {
  request: PlanRequest;
  digest: string;
  trajectory: unknown;
  metrics: MetricsDoc;
  render: RenderGeometry;
}
