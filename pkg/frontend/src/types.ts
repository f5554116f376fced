// Wire types for the hilmeme session API.

export type Phase =
  | "consent"
  | "introduction"
  | "practice"
  | "assessment"
  | "complete"
  | "declined";

export type Category = "ref_mwe" | "alt_mwe" | "non_mwe" | "null";
export type AspectCode = "sem" | "gra" | "idi" | "amb";

export const CATEGORIES: Category[] = ["ref_mwe", "alt_mwe", "non_mwe", "null"];
export const ASPECTS: AspectCode[] = ["sem", "gra", "idi", "amb"];

export type EventKind =
  | "accept_consent"
  | "decline_consent"
  | "finish_introduction"
  | "submit_practice"
  | "submit_assessment";

export interface SessionStateDto {
  phase: Phase;
  practice_done: number;
  next_index: number;
}

export interface ProgressDto {
  practice_done: number;
  practice_total: number;
  assessment_done: number;
  assessment_total: number;
}

export interface MweSpanDto {
  id: string;
  start: number;
  end: number;
  surface: string;
  refs: string[];
}

export interface UnitDto {
  kind: "practice" | "assessment";
  item_id: string;
  system_id: string;
  source: string;
  tokens: string[];
  reference: string;
  hypothesis: string;
  mwes: MweSpanDto[];
}

export interface PromptsDto {
  consent: string;
  introduction: string;
  step1: { title: string; scale: [number, number]; guidance: Record<string, string> };
  step2: { title: string; choices: Record<Category, string> };
  step3: { title: string; aspects: Record<AspectCode, string>; weight_scale: [number, number] };
}

export interface SessionSnapshot {
  session_id: string;
  campaign_id: string;
  assessor_id: string;
  state: SessionStateDto;
  next_seq: number;
  progress: ProgressDto;
}

export interface CurrentDto extends SessionSnapshot {
  unit: UnitDto | null;
  prompts: PromptsDto;
}

export interface StartSessionDto extends SessionSnapshot {
  token: string;
}

export interface FeedbackDto {
  general_delta: number;
  category_matches: Record<string, boolean>;
}

export interface SubmitResponseDto extends SessionSnapshot {
  feedback: FeedbackDto | null;
}

export interface MwePayload {
  span_id: string;
  category: Category;
  weight: number;
  aspects: AspectCode[];
  assessor_score?: number;
  captured_rendering?: string;
}

export interface JudgementPayload {
  item_id: string;
  system_id: string;
  general: number;
  mwes: MwePayload[];
}

export interface SubmitBody {
  seq: number;
  kind: EventKind;
  judgement: JudgementPayload | null;
}

export interface ErrorDetail {
  error: string;
  kind?: string;
  span_id?: string;
}
