// End-to-end: an automated driver works the real DOM through the full
// consent -> practice x3 -> 4-unit assessment flow against the fixture
// service, and every payload the UI emits must pass the mirrored server
// validation.

import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { App } from "../src/app.js";
import { MemoryStore } from "../src/drafts.js";
import {
  byTestId,
  chooseCategory,
  click,
  currentSpanIds,
  fillUnit,
  maybeByTestId,
  root,
  screenKind,
  setRange,
  setText,
  submitDisabled,
  tick,
  toggleAspect,
} from "./driver.js";
import { FixtureService, defaultFixture } from "./fixture-service.js";

let fixture: FixtureService;
let app: App;
let storage: MemoryStore;

async function bootApp(): Promise<void> {
  document.body.innerHTML = '<div id="app"></div>';
  fixture = defaultFixture();
  storage = new MemoryStore();
  const api = new ApiClient("http://fixture", fixture.fetch);
  app = new App(api, root(), storage);
  await app.startSession("fix1", "anna");
  await tick();
}

beforeEach(async () => {
  await bootApp();
});

describe("full campaign drive", () => {
  it("completes consent, three practice rounds, and four units", async () => {
    expect(screenKind()).toBe("consent");
    await click("accept-consent");
    expect(screenKind()).toBe("introduction");
    await click("finish-introduction");

    // practice 1: non_mwe with score + capture, matching the gold category
    expect(screenKind()).toBe("unit");
    expect(byTestId("progress").textContent).toContain("Practice 1 of 3");
    await setRange("general-score", 7);
    await chooseCategory("m1", "non_mwe");
    await setRange("span-score-m1", 6.5);
    await setText("capture-m1", "told the secret");
    await toggleAspect("m1", "idi");
    await setRange("weight-m1", 0.6);
    expect(submitDisabled()).toBe(false);
    await click("submit-judgement");

    // advisory feedback panel, then continue
    expect(screenKind()).toBe("feedback");
    expect(byTestId("general-delta").textContent).toContain("1");
    expect(byTestId("match-m1").textContent).toContain("matches");
    await click("feedback-continue");

    // practice 2 and 3
    expect(byTestId("progress").textContent).toContain("Practice 2 of 3");
    await fillUnit(9);
    await click("submit-judgement");
    await click("feedback-continue");
    expect(byTestId("progress").textContent).toContain("Practice 3 of 3");
    await setRange("general-score", 5); // no spans on p3
    expect(submitDisabled()).toBe(false);
    await click("submit-judgement");
    await click("feedback-continue");

    // four assessment units
    for (let n = 1; n <= 4; n += 1) {
      expect(screenKind()).toBe("unit");
      expect(byTestId("progress").textContent).toContain(`Unit ${n} of 4`);
      await fillUnit(6 + n * 0.5);
      await click("submit-judgement");
    }

    expect(screenKind()).toBe("complete");
    expect(byTestId("complete").textContent).toContain("4 of 4");

    // every payload the UI emitted passed the mirrored server validation
    expect(fixture.recorded.length).toBe(7);
    expect(fixture.recorded.every((r) => r.errors.length === 0)).toBe(true);
    const session = fixture.sessions.get("tok-anna")!;
    expect(session.phase).toBe("complete");
    expect(session.judged.length).toBe(4);
  });

  it("declining consent ends the session", async () => {
    await click("decline-consent");
    expect(screenKind()).toBe("declined");
  });
});

describe("score locking and submit gating", () => {
  async function intoFirstPractice(): Promise<void> {
    await click("accept-consent");
    await click("finish-introduction");
  }

  it("ref_mwe and null lock the score control at 10 and 0", async () => {
    await intoFirstPractice();
    await chooseCategory("m1", "ref_mwe");
    let slider = byTestId<HTMLInputElement>("span-score-m1");
    expect(slider.hasAttribute("disabled")).toBe(true);
    expect(slider.value).toBe("10");

    await chooseCategory("m1", "null");
    slider = byTestId<HTMLInputElement>("span-score-m1");
    expect(slider.hasAttribute("disabled")).toBe(true);
    expect(slider.value).toBe("0");

    await chooseCategory("m1", "non_mwe");
    slider = byTestId<HTMLInputElement>("span-score-m1");
    expect(slider.hasAttribute("disabled")).toBe(false);
  });

  it("submit stays disabled until every span is fully judged", async () => {
    await intoFirstPractice();
    expect(submitDisabled()).toBe(true);
    await setRange("general-score", 7);
    expect(submitDisabled()).toBe(true);
    await chooseCategory("m1", "non_mwe");
    await setRange("weight-m1", 0.5);
    expect(submitDisabled()).toBe(true); // non_mwe score still unset
    await setRange("span-score-m1", 4);
    expect(submitDisabled()).toBe(false);
  });

  it("alt_mwe with an empty capture field keeps submit disabled", async () => {
    await intoFirstPractice();
    await setRange("general-score", 7);
    await chooseCategory("m1", "alt_mwe");
    await setRange("weight-m1", 0.5);
    expect(submitDisabled()).toBe(true);
    expect(byTestId("missing").textContent).toContain("captured expression");
    await setText("capture-m1", "let slip");
    expect(submitDisabled()).toBe(false);
  });

  it("multi-span units gate until the last span is judged", async () => {
    await click("accept-consent");
    await click("finish-introduction");
    for (const general of [7, 9, 5]) {
      await fillUnit(general);
      if (screenKind() === "unit" && currentSpanIds().length === 0) {
        await setRange("general-score", general);
      }
      await click("submit-judgement");
      await click("feedback-continue");
    }
    // first assessment unit has one span; submit it to reach the 2-span unit
    await fillUnit(6);
    await click("submit-judgement");
    await fillUnit(6);
    await click("submit-judgement");
    expect(currentSpanIds()).toEqual(["m1", "m2"]);
    await setRange("general-score", 6);
    await chooseCategory("m1", "ref_mwe");
    await setRange("weight-m1", 0.3);
    expect(submitDisabled()).toBe(true);
    await chooseCategory("m2", "null");
    expect(submitDisabled()).toBe(true);
    await setRange("weight-m2", 0.9);
    expect(submitDisabled()).toBe(false);
  });
});

describe("failure handling", () => {
  it("network failure raises a retry banner and preserves entered values", async () => {
    await click("accept-consent");
    await click("finish-introduction");
    await setRange("general-score", 7);
    await chooseCategory("m1", "non_mwe");
    await setRange("span-score-m1", 6.5);
    await setRange("weight-m1", 0.6);

    fixture.failNextFetch = true;
    await click("submit-judgement");
    expect(maybeByTestId("banner")).not.toBeNull();
    expect(screenKind()).toBe("unit"); // did not advance
    expect(byTestId<HTMLInputElement>("span-score-m1").value).toBe("6.5");

    await click("retry");
    expect(screenKind()).toBe("feedback");
  });

  it("a rejected submission shows inline errors and never advances", async () => {
    await click("accept-consent");
    await click("finish-introduction");
    await fillUnit(7);
    fixture.failNextSubmitWith = { error: "score out of range", span_id: "m1" };
    await click("submit-judgement");
    expect(screenKind()).toBe("unit");
    expect(byTestId("errors").textContent).toContain("score out of range");
    expect(byTestId("errors").textContent).toContain("m1");
    await click("submit-judgement"); // fixture accepts the retry
    expect(screenKind()).toBe("feedback");
  });
});

describe("draft persistence", () => {
  it("a reload mid-unit restores entered values", async () => {
    await click("accept-consent");
    await click("finish-introduction");
    await setRange("general-score", 7.5);
    await chooseCategory("m1", "alt_mwe");
    await setText("capture-m1", "let slip the secret");
    await setRange("weight-m1", 0.35);

    // same storage + token = same browser reloading the page
    const token = app.sessionToken()!;
    document.body.innerHTML = '<div id="app"></div>';
    const revived = new App(new ApiClient("http://fixture", fixture.fetch), root(), storage);
    await revived.resume(token);
    await tick();

    expect(byTestId<HTMLInputElement>("general-score").value).toBe("7.5");
    expect(byTestId<HTMLInputElement>("category-m1-alt_mwe").checked).toBe(true);
    expect(byTestId<HTMLInputElement>("capture-m1").value).toBe("let slip the secret");
    expect(byTestId<HTMLInputElement>("weight-m1").value).toBe("0.35");
    expect(submitDisabled()).toBe(false);
  });

  it("drafts are keyed by seq and cleared on submit", async () => {
    await click("accept-consent");
    await click("finish-introduction");
    await fillUnit(7);
    await click("submit-judgement");
    await click("feedback-continue");
    // next practice unit starts blank even though the previous one was filled
    expect(byTestId("progress").textContent).toContain("Practice 2 of 3");
    expect(submitDisabled()).toBe(true);
    const general = root().querySelector('[data-role="general-out"]')!;
    expect(general.textContent).toContain("–");
  });
});
