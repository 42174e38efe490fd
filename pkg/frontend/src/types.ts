/**
 * Wire types mirroring the session service JSON. The client renders these
 * verbatim; every displayed number originates from a service response.
 */

export interface RingView {
  id: number;
  status: "active" | "decoupled";
  mark: number | null;
}

export interface RibbonView {
  l: number;
  r: number;
  twist: 0 | 90 | 180 | 270;
  crossing: "none" | "over" | "under";
}

export interface ComponentView {
  rings: RingView[];
  ribbons: RibbonView[];
}

export interface EventView {
  kind: string;
  qubit: number;
}

export interface DiagramDoc {
  components: ComponentView[];
  events: EventView[];
}

export interface StepRecord {
  index: number;
  qubit: number;
  basis: string;
  outcome: string;
  sampled: boolean;
  probability: number;
  oracle_only: boolean;
  rule: string | null;
  event: EventView | null;
  schmidt: SchmidtInfo | null;
  fidelity: number | null;
  correspondence_ok: boolean | null;
}

export interface SchmidtInfo {
  cut: number[] | null;
  coefficients: number[] | null;
  rank: number;
  source: string;
}

export interface SessionView {
  n: number;
  seed: number | null;
  oracle_on: boolean;
  hybrid: boolean;
  coherent: boolean;
  degraded_at: number | null;
  live_qubits: number[];
  diagram: DiagramDoc;
  byproducts: Record<string, number>;
  decoupled: { id: number; value: number }[];
  history: StepRecord[];
  undo_depth: number;
  last_event: EventView | null;
}

export interface CreateSessionResponse {
  id: string;
  n: number;
  diagram: DiagramDoc;
  summary: Record<string, unknown>;
}

export interface OutcomePreview {
  possible: boolean;
  probability: number;
  rule?: string;
  event?: EventView;
  diagram?: DiagramDoc;
  byproducts?: Record<string, number>;
  oracle_only?: boolean;
}

export interface MeasureResponse {
  committed: boolean;
  step: StepRecord | null;
  outcomes: { "+": OutcomePreview; "-": OutcomePreview } | null;
  diagram: DiagramDoc | null;
  byproducts: Record<string, number> | null;
  schmidt: SchmidtInfo | null;
  fidelity: number | null;
  correspondence_ok: boolean | null;
}

export type Basis = "Z" | "X" | "Y";
export type OutcomeChoice = "+" | "-" | "random";
