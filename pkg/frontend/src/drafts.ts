// Local draft persistence: entered-but-unsubmitted form values survive a
// reload. Drafts are keyed by (session token, event seq) so a submitted
// unit's draft can never be replayed onto a later unit.

import type { FormState } from "./form.js";

export interface KeyValueStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export class MemoryStore implements KeyValueStore {
  private data = new Map<string, string>();

  getItem(key: string): string | null {
    return this.data.has(key) ? this.data.get(key)! : null;
  }

  setItem(key: string, value: string): void {
    this.data.set(key, value);
  }

  removeItem(key: string): void {
    this.data.delete(key);
  }
}

export class DraftStore {
  constructor(
    private readonly storage: KeyValueStore,
    private readonly token: string,
  ) {}

  private key(seq: number): string {
    return `hilmeme:draft:${this.token}:${seq}`;
  }

  save(seq: number, form: FormState): void {
    this.storage.setItem(this.key(seq), JSON.stringify(form));
  }

  load(seq: number): FormState | null {
    const raw = this.storage.getItem(this.key(seq));
    if (raw === null) return null;
    try {
      return JSON.parse(raw) as FormState;
    } catch {
      return null;
    }
  }

  clear(seq: number): void {
    this.storage.removeItem(this.key(seq));
  }
}
