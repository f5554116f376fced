// Controller: holds the session snapshot and the in-progress form, talks to
// the service, and re-renders the view after every change. The screen only
// advances on a successful service response; rejected submissions keep the
// entered values on screen, and network failures raise a retry banner.

import { ApiClient, ApiError, NetworkError } from "./api.js";
import { DraftStore, KeyValueStore } from "./drafts.js";
import type { FormState } from "./form.js";
import {
  buildPayload,
  emptyForm,
  isComplete,
  setCapture,
  setCategory,
  setGeneral,
  setScore,
  setWeight,
  toggleAspect,
} from "./form.js";
import type {
  AspectCode,
  Category,
  CurrentDto,
  EventKind,
  FeedbackDto,
  JudgementPayload,
  UnitDto,
} from "./types.js";
import { View, ViewModel } from "./view.js";

export class App {
  private readonly view: View;
  private current: CurrentDto | null = null;
  private form: FormState | null = null;
  private drafts: DraftStore | null = null;
  private token: string | null = null;
  private errors: string[] = [];
  private banner: { message: string; canRetry: boolean } | null = null;
  private busy = false;
  private fatal: string | null = null;
  private feedback: { feedback: FeedbackDto; unit: UnitDto } | null = null;
  private pendingRetry: (() => Promise<void>) | null = null;

  constructor(
    private readonly api: ApiClient,
    root: HTMLElement,
    private readonly storage: KeyValueStore,
  ) {
    this.view = new View(root, {
      onAction: (action) => void this.handleAction(action),
      onGeneral: (value) => this.editForm((form) => setGeneral(form, value)),
      onCategory: (spanId, category: Category) =>
        this.editForm((form) => setCategory(form, spanId, category)),
      onScore: (spanId, value) => this.editForm((form) => setScore(form, spanId, value)),
      onWeight: (spanId, value) => this.editForm((form) => setWeight(form, spanId, value)),
      onAspect: (spanId, aspect: AspectCode, checked) =>
        this.editForm((form) => toggleAspect(form, spanId, aspect, checked)),
      onCapture: (spanId, text) => this.editForm((form) => setCapture(form, spanId, text)),
    });
    this.render();
  }

  async startSession(campaignId: string, assessorId: string): Promise<void> {
    try {
      const started = await this.api.startSession(campaignId, assessorId);
      await this.resume(started.token);
    } catch (error) {
      this.handleStartupError(error, () => this.startSession(campaignId, assessorId));
    }
  }

  async resume(token: string): Promise<void> {
    this.token = token;
    this.drafts = new DraftStore(this.storage, token);
    await this.refresh();
  }

  sessionToken(): string | null {
    return this.token;
  }

  private async refresh(): Promise<void> {
    if (!this.token) return;
    try {
      this.current = await this.api.getCurrent(this.token);
    } catch (error) {
      this.handleStartupError(error, () => this.refresh());
      return;
    }
    this.banner = null;
    this.errors = [];
    this.feedback = null;
    this.form = null;
    if (this.current.unit) {
      this.form = this.drafts?.load(this.current.next_seq) ?? emptyForm(this.current.unit);
    }
    this.render();
  }

  private handleStartupError(error: unknown, retry: () => Promise<void>): void {
    if (error instanceof NetworkError) {
      this.banner = { message: error.message, canRetry: true };
      this.pendingRetry = retry;
    } else if (error instanceof ApiError) {
      this.fatal = error.message;
    } else {
      this.fatal = String(error);
    }
    this.render();
  }

  private editForm(edit: (form: FormState) => void): void {
    if (!this.form || !this.current?.unit) return;
    edit(this.form);
    this.drafts?.save(this.current.next_seq, this.form);
    this.render();
  }

  private async handleAction(action: string): Promise<void> {
    if (this.busy) return;
    switch (action) {
      case "accept":
        return this.sendEvent("accept_consent");
      case "decline":
        return this.sendEvent("decline_consent");
      case "finish-introduction":
        return this.sendEvent("finish_introduction");
      case "submit":
        return this.submitJudgement();
      case "continue":
        this.feedback = null;
        return this.refresh();
      case "retry": {
        const retry = this.pendingRetry;
        this.pendingRetry = null;
        this.banner = null;
        if (retry) await retry();
        return;
      }
    }
  }

  private async submitJudgement(): Promise<void> {
    const unit = this.current?.unit;
    if (!unit || !this.form || !isComplete(this.form, unit)) return;
    const payload = buildPayload(this.form, unit);
    const kind: EventKind = unit.kind === "practice" ? "submit_practice" : "submit_assessment";
    await this.sendEvent(kind, payload);
  }

  private async sendEvent(kind: EventKind, judgement: JudgementPayload | null = null): Promise<void> {
    if (!this.token || !this.current) return;
    const seq = this.current.next_seq;
    const judgedUnit = this.current.unit;
    this.busy = true;
    this.render();
    try {
      const response = await this.api.submit(this.token, { seq, kind, judgement });
      this.busy = false;
      this.drafts?.clear(seq);
      this.errors = [];
      this.banner = null;
      if (response.feedback && judgedUnit) {
        // hold the feedback panel; the next unit loads on Continue
        this.feedback = { feedback: response.feedback, unit: judgedUnit };
        this.render();
      } else {
        await this.refresh();
      }
    } catch (error) {
      this.busy = false;
      if (error instanceof ApiError) {
        if (error.status === 409) {
          // the log moved on (duplicate tab or replayed seq): show server truth
          await this.refresh();
          return;
        }
        const where = error.detail.span_id ? ` (expression ${error.detail.span_id})` : "";
        this.errors = [`${error.detail.error}${where}`];
        this.render();
      } else if (error instanceof NetworkError) {
        this.banner = { message: error.message, canRetry: true };
        this.pendingRetry = () => this.sendEvent(kind, judgement);
        this.render();
      } else {
        throw error;
      }
    }
  }

  private model(): ViewModel {
    const base = { banner: this.banner, busy: this.busy };
    if (this.fatal) return { ...base, screen: { kind: "fatal", message: this.fatal } };
    if (this.feedback) return { ...base, screen: { kind: "feedback", ...this.feedback } };
    if (!this.current) return { ...base, screen: { kind: "loading" } };
    const { state, prompts, unit, progress } = this.current;
    switch (state.phase) {
      case "consent":
        return { ...base, screen: { kind: "consent", text: prompts.consent } };
      case "introduction":
        return { ...base, screen: { kind: "introduction", text: prompts.introduction } };
      case "practice":
      case "assessment":
        if (!unit || !this.form) {
          return { ...base, screen: { kind: "fatal", message: "service returned no unit to judge" } };
        }
        return {
          ...base,
          screen: { kind: "unit", unit, form: this.form, prompts, progress, errors: this.errors },
        };
      case "complete":
        return { ...base, screen: { kind: "complete", progress } };
      case "declined":
        return { ...base, screen: { kind: "declined" } };
    }
  }

  private render(): void {
    this.view.update(this.model());
  }
}
