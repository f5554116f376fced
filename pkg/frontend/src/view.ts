// DOM rendering. The whole screen re-renders from a view model on every
// change; one delegated listener per event type feeds user input back to the
// controller. Every interactive control carries a data-testid so automated
// drivers (and the e2e suite) can find it.

import type { FormState } from "./form.js";
import { displayScore, isComplete, missingFields, scoreLocked } from "./form.js";
import type {
  AspectCode,
  Category,
  FeedbackDto,
  ProgressDto,
  PromptsDto,
  UnitDto,
} from "./types.js";
import { ASPECTS, CATEGORIES } from "./types.js";

export type Screen =
  | { kind: "loading" }
  | { kind: "consent"; text: string }
  | { kind: "introduction"; text: string }
  | {
      kind: "unit";
      unit: UnitDto;
      form: FormState;
      prompts: PromptsDto;
      progress: ProgressDto;
      errors: string[];
    }
  | { kind: "feedback"; feedback: FeedbackDto; unit: UnitDto }
  | { kind: "complete"; progress: ProgressDto }
  | { kind: "declined" }
  | { kind: "fatal"; message: string };

export interface ViewModel {
  screen: Screen;
  banner: { message: string; canRetry: boolean } | null;
  busy: boolean;
}

export interface ViewCallbacks {
  onAction(action: string): void;
  onCategory(spanId: string, category: Category): void;
  onScore(spanId: string, value: number): void;
  onWeight(spanId: string, value: number): void;
  onAspect(spanId: string, aspect: AspectCode, checked: boolean): void;
  onCapture(spanId: string, text: string): void;
  onGeneral(value: number): void;
}

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function highlightedSource(unit: UnitDto): string {
  const spans = [...unit.mwes].sort((a, b) => a.start - b.start);
  const parts: string[] = [];
  let cursor = 0;
  for (const span of spans) {
    if (span.start > cursor) {
      parts.push(esc(unit.tokens.slice(cursor, span.start).join(" ")));
    }
    const text = esc(unit.tokens.slice(span.start, span.end).join(" "));
    parts.push(`<mark class="mwe" data-span="${esc(span.id)}">${text}</mark>`);
    cursor = span.end;
  }
  if (cursor < unit.tokens.length) {
    parts.push(esc(unit.tokens.slice(cursor).join(" ")));
  }
  return parts.filter((p) => p !== "").join(" ");
}

function sliderValue(value: number | null, fallback: number): number {
  return value === null ? fallback : value;
}

function spanForm(unit: UnitDto, form: FormState, prompts: PromptsDto, spanId: string): string {
  const span = unit.mwes.find((s) => s.id === spanId)!;
  const state = form.spans[spanId]!;
  const locked = scoreLocked(state.category);
  const score = displayScore(state);
  const scoreKnown = score !== null;
  const categoryRows = CATEGORIES.map((category) => {
    const checked = state.category === category ? "checked" : "";
    return `
      <label class="choice">
        <input type="radio" name="cat-${esc(spanId)}" value="${category}" ${checked}
               data-role="category" data-span="${esc(spanId)}"
               data-testid="category-${esc(spanId)}-${category}">
        <span>${esc(prompts.step2.choices[category])}</span>
      </label>`;
  }).join("");
  const aspectRows = ASPECTS.map((aspect) => {
    const checked = state.aspects.includes(aspect) ? "checked" : "";
    return `
      <label class="choice">
        <input type="checkbox" value="${aspect}" ${checked}
               data-role="aspect" data-span="${esc(spanId)}" data-aspect="${aspect}"
               data-testid="aspect-${esc(spanId)}-${aspect}">
        <span>${esc(prompts.step3.aspects[aspect])}</span>
      </label>`;
  }).join("");
  const needsCapture = state.category === "alt_mwe";
  const showCapture = state.category === "alt_mwe" || state.category === "non_mwe";
  return `
    <section class="span-form" data-span="${esc(spanId)}">
      <h3>&ldquo;${esc(span.surface)}&rdquo;</h3>
      <p class="refs">Reference renderings: ${span.refs.map(esc).join(" / ")}</p>
      <fieldset>
        <legend>Step II &mdash; ${esc(prompts.step2.title)}</legend>
        ${categoryRows}
        <label class="slider">
          <span>Expression score: <output data-role="score-out" data-span="${esc(spanId)}">${
            scoreKnown ? score : "&ndash;"
          }</output></span>
          <input type="range" min="0" max="10" step="0.5"
                 value="${sliderValue(score, 5)}" ${locked ? "disabled" : ""}
                 data-role="span-score" data-span="${esc(spanId)}"
                 data-testid="span-score-${esc(spanId)}">
        </label>
        ${
          showCapture
            ? `<label class="capture">
                 <span>${needsCapture ? "Expression used (required)" : "Wording used (optional)"}</span>
                 <input type="text" value="${esc(state.capture)}"
                        data-role="capture" data-span="${esc(spanId)}"
                        data-testid="capture-${esc(spanId)}">
               </label>`
            : ""
        }
      </fieldset>
      <fieldset>
        <legend>Step III &mdash; ${esc(prompts.step3.title)}</legend>
        ${aspectRows}
        <label class="slider">
          <span>Difficulty weight: <output data-role="weight-out" data-span="${esc(spanId)}">${
            state.weight === null ? "&ndash;" : state.weight
          }</output></span>
          <input type="range" min="0" max="1" step="0.05"
                 value="${sliderValue(state.weight, 0.5)}"
                 data-role="weight" data-span="${esc(spanId)}"
                 data-testid="weight-${esc(spanId)}">
        </label>
      </fieldset>
    </section>`;
}

function unitScreen(screen: Extract<Screen, { kind: "unit" }>, busy: boolean): string {
  const { unit, form, prompts, progress, errors } = screen;
  const position =
    unit.kind === "practice"
      ? `Practice ${progress.practice_done + 1} of ${progress.practice_total}`
      : `Unit ${progress.assessment_done + 1} of ${progress.assessment_total}`;
  const guidance = Object.entries(prompts.step1.guidance)
    .map(([name, text]) => `<li><strong>${esc(name)}</strong>: ${esc(text)}</li>`)
    .join("");
  const complete = isComplete(form, unit);
  const missing = missingFields(form, unit);
  return `
    <header>
      <span class="badge">${unit.kind === "practice" ? "Practice round" : "Assessment"}</span>
      <span data-testid="progress">${esc(position)}</span>
    </header>
    <section class="texts">
      <p class="label">Source</p>
      <p class="source" data-testid="source">${highlightedSource(unit)}</p>
      <p class="label">Reference</p>
      <p data-testid="reference">${esc(unit.reference)}</p>
      <p class="label">Candidate</p>
      <p data-testid="hypothesis">${esc(unit.hypothesis)}</p>
    </section>
    <section class="general">
      <fieldset>
        <legend>Step I &mdash; ${esc(prompts.step1.title)}</legend>
        <ul class="guidance">${guidance}</ul>
        <label class="slider">
          <span>Overall score: <output data-role="general-out">${
            form.general === null ? "&ndash;" : form.general
          }</output></span>
          <input type="range" min="0" max="10" step="0.5"
                 value="${sliderValue(form.general, 5)}"
                 data-role="general" data-testid="general-score">
        </label>
      </fieldset>
    </section>
    ${unit.mwes.map((span) => spanForm(unit, form, prompts, span.id)).join("")}
    ${errors.length ? `<ul class="errors" data-testid="errors">${errors.map((e) => `<li>${esc(e)}</li>`).join("")}</ul>` : ""}
    ${
      !complete && missing.length
        ? `<p class="missing" data-testid="missing">Still needed: ${missing.map(esc).join("; ")}</p>`
        : ""
    }
    <button data-action="submit" data-testid="submit-judgement" ${complete && !busy ? "" : "disabled"}>
      Submit judgement
    </button>`;
}

function feedbackScreen(screen: Extract<Screen, { kind: "feedback" }>): string {
  const rows = Object.entries(screen.feedback.category_matches)
    .map(([spanId, ok]) => {
      const surface = screen.unit.mwes.find((s) => s.id === spanId)?.surface ?? spanId;
      return `<li data-testid="match-${esc(spanId)}">&ldquo;${esc(surface)}&rdquo;: ${
        ok ? "category matches the expected answer" : "category differs from the expected answer"
      }</li>`;
    })
    .join("");
  return `
    <h2>Practice feedback</h2>
    <p data-testid="general-delta">Your overall score differs from the expected one by ${
      screen.feedback.general_delta
    } points.</p>
    <ul>${rows}</ul>
    <p class="note">Feedback is advisory; your judgement stands as submitted.</p>
    <button data-action="continue" data-testid="feedback-continue">Continue</button>`;
}

function render(model: ViewModel): string {
  const { screen, banner, busy } = model;
  const bannerHtml = banner
    ? `<div class="banner" data-testid="banner">
         <span>${esc(banner.message)}</span>
         ${banner.canRetry ? '<button data-action="retry" data-testid="retry">Retry</button>' : ""}
       </div>`
    : "";
  let body: string;
  switch (screen.kind) {
    case "loading":
      body = "<p>Loading&hellip;</p>";
      break;
    case "consent":
      body = `
        <h2>Consent</h2>
        <p>${esc(screen.text)}</p>
        <button data-action="accept" data-testid="accept-consent" ${busy ? "disabled" : ""}>I consent</button>
        <button data-action="decline" data-testid="decline-consent" ${busy ? "disabled" : ""}>Decline</button>`;
      break;
    case "introduction":
      body = `
        <h2>How this works</h2>
        <p>${esc(screen.text)}</p>
        <button data-action="finish-introduction" data-testid="finish-introduction" ${busy ? "disabled" : ""}>
          Start practice
        </button>`;
      break;
    case "unit":
      body = unitScreen(screen, busy);
      break;
    case "feedback":
      body = feedbackScreen(screen);
      break;
    case "complete":
      body = `
        <h2>All done</h2>
        <p data-testid="complete">You judged ${screen.progress.assessment_done} of ${screen.progress.assessment_total} units. Thank you.</p>`;
      break;
    case "declined":
      body = `<h2>Session ended</h2><p data-testid="declined">You declined to take part. Nothing was recorded.</p>`;
      break;
    case "fatal":
      body = `<p class="errors" data-testid="fatal">${esc(screen.message)}</p>`;
      break;
  }
  return `${bannerHtml}<main data-screen="${screen.kind}">${body}</main>`;
}

export class View {
  constructor(
    private readonly root: HTMLElement,
    private readonly callbacks: ViewCallbacks,
  ) {
    this.root.addEventListener("click", (event) => this.handleClick(event));
    this.root.addEventListener("input", (event) => this.handleInput(event));
    this.root.addEventListener("change", (event) => this.handleChange(event));
  }

  update(model: ViewModel): void {
    this.root.innerHTML = render(model);
  }

  private handleClick(event: Event): void {
    const target = event.target as HTMLElement | null;
    const action = target?.closest?.("[data-action]")?.getAttribute("data-action");
    if (action) this.callbacks.onAction(action);
  }

  private handleInput(event: Event): void {
    const target = event.target as HTMLInputElement | null;
    if (!target || !target.dataset) return;
    const { role, span } = target.dataset;
    if (role === "general") this.callbacks.onGeneral(Number(target.value));
    else if (role === "span-score" && span) this.callbacks.onScore(span, Number(target.value));
    else if (role === "weight" && span) this.callbacks.onWeight(span, Number(target.value));
  }

  private handleChange(event: Event): void {
    const target = event.target as HTMLInputElement | null;
    if (!target || !target.dataset) return;
    const { role, span, aspect } = target.dataset;
    if (role === "category" && span && target.checked) {
      this.callbacks.onCategory(span, target.value as Category);
    } else if (role === "aspect" && span && aspect) {
      this.callbacks.onAspect(span, aspect as AspectCode, target.checked);
    } else if (role === "capture" && span) {
      this.callbacks.onCapture(span, target.value);
    }
  }
}
