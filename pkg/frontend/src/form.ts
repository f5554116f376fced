// Judgement form state: one general score plus per-span category, score,
// aspects, weight, and captured rendering. Mirrors the server's score rules
// client-side so the submit button can only produce valid payloads.

import type { AspectCode, Category, JudgementPayload, MwePayload, UnitDto } from "./types.js";

export const SCORE_MIN = 0;
export const SCORE_MAX = 10;
export const SCORE_STEP = 0.5;
export const WEIGHT_MIN = 0;
export const WEIGHT_MAX = 1;
export const WEIGHT_STEP = 0.05;

export interface SpanFormState {
  category: Category | null;
  score: number | null; // user-set; only meaningful while category is non_mwe
  capture: string;
  aspects: AspectCode[];
  weight: number | null;
}

export interface FormState {
  general: number | null;
  spans: Record<string, SpanFormState>;
}

function clamp(value: number, lo: number, hi: number): number {
  return Math.min(hi, Math.max(lo, value));
}

/** Scores snap to 0.5 increments (2 per unit keeps the float exact). */
export function snapScore(value: number): number {
  return Math.round(clamp(value, SCORE_MIN, SCORE_MAX) * 2) / 2;
}

/** Difficulty weights snap to 0.05 increments (20 per unit, then divide). */
export function snapWeight(value: number): number {
  return Math.round(clamp(value, WEIGHT_MIN, WEIGHT_MAX) * 20) / 20;
}

export function emptyForm(unit: UnitDto): FormState {
  const spans: Record<string, SpanFormState> = {};
  for (const span of unit.mwes) {
    spans[span.id] = { category: null, score: null, capture: "", aspects: [], weight: null };
  }
  return { general: null, spans };
}

/** ref/alt/null carry fixed scores; only non_mwe is assessor-scored. */
export function lockedScore(category: Category): number | null {
  if (category === "ref_mwe" || category === "alt_mwe") return 10;
  if (category === "null") return 0;
  return null;
}

export function scoreLocked(category: Category | null): boolean {
  return category !== "non_mwe";
}

/** The value the score control should display for the span. */
export function displayScore(span: SpanFormState): number | null {
  if (span.category === null) return null;
  const locked = lockedScore(span.category);
  return locked !== null ? locked : span.score;
}

export function setGeneral(form: FormState, value: number): void {
  form.general = snapScore(value);
}

export function setCategory(form: FormState, spanId: string, category: Category): void {
  const span = form.spans[spanId];
  if (!span) return;
  span.category = category;
  // switching to non_mwe demands a fresh explicit score
  span.score = null;
}

export function setScore(form: FormState, spanId: string, value: number): void {
  const span = form.spans[spanId];
  if (!span || scoreLocked(span.category)) return;
  span.score = snapScore(value);
}

export function setWeight(form: FormState, spanId: string, value: number): void {
  const span = form.spans[spanId];
  if (!span) return;
  span.weight = snapWeight(value);
}

export function setCapture(form: FormState, spanId: string, text: string): void {
  const span = form.spans[spanId];
  if (!span) return;
  span.capture = text;
}

export function toggleAspect(form: FormState, spanId: string, aspect: AspectCode, on: boolean): void {
  const span = form.spans[spanId];
  if (!span) return;
  const present = span.aspects.includes(aspect);
  if (on && !present) span.aspects = [...span.aspects, aspect];
  if (!on && present) span.aspects = span.aspects.filter((a) => a !== aspect);
}

/** Human-readable reasons the form cannot be submitted yet (empty = ready). */
export function missingFields(form: FormState, unit: UnitDto): string[] {
  const missing: string[] = [];
  if (form.general === null) missing.push("overall score");
  for (const span of unit.mwes) {
    const state = form.spans[span.id];
    if (!state || state.category === null) {
      missing.push(`category for "${span.surface}"`);
      continue;
    }
    if (state.category === "non_mwe" && state.score === null) {
      missing.push(`score for "${span.surface}"`);
    }
    if (state.category === "alt_mwe" && state.capture.trim() === "") {
      missing.push(`captured expression for "${span.surface}"`);
    }
    if (state.weight === null) {
      missing.push(`difficulty weight for "${span.surface}"`);
    }
  }
  return missing;
}

export function isComplete(form: FormState, unit: UnitDto): boolean {
  return missingFields(form, unit).length === 0;
}

export function buildPayload(form: FormState, unit: UnitDto): JudgementPayload {
  const missing = missingFields(form, unit);
  if (missing.length > 0) {
    throw new Error(`form incomplete: ${missing.join(", ")}`);
  }
  const mwes: MwePayload[] = unit.mwes.map((span) => {
    const state = form.spans[span.id]!;
    const category = state.category!;
    const payload: MwePayload = {
      span_id: span.id,
      category,
      weight: state.weight!,
      aspects: [...state.aspects],
    };
    if (category === "non_mwe") {
      payload.assessor_score = state.score!;
      if (state.capture.trim() !== "") payload.captured_rendering = state.capture.trim();
    } else if (category === "alt_mwe") {
      payload.captured_rendering = state.capture.trim();
    }
    return payload;
  });
  return {
    item_id: unit.item_id,
    system_id: unit.system_id,
    general: form.general!,
    mwes,
  };
}
